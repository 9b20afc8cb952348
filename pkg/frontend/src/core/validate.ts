/**
 * Client-side invariants mirroring the backend contracts, checked before
 * anything is uploaded: label indices stay inside the palette, the
 * sketch layer is strictly binary, dimensions agree.
 */
import type { EditorDocument } from './document.js';

export interface Violation {
  invariant: string;
  detail: string;
}

export function validateDocument(doc: EditorDocument): Violation[] {
  const out: Violation[] = [];
  if (doc.labels.length !== doc.width * doc.height) {
    out.push({
      invariant: 'label-shape',
      detail: `label buffer ${doc.labels.length} != ${doc.width}x${doc.height}`,
    });
  }
  if (doc.sketch.length !== doc.width * doc.height) {
    out.push({
      invariant: 'sketch-shape',
      detail: `sketch buffer ${doc.sketch.length} != ${doc.width}x${doc.height}`,
    });
  }
  const maxClass = doc.classNames.length - 1;
  for (let i = 0; i < doc.labels.length; i++) {
    if (doc.labels[i] > maxClass) {
      out.push({
        invariant: 'label-range',
        detail: `pixel ${i} holds class ${doc.labels[i]} > ${maxClass}`,
      });
      break;
    }
  }
  for (let i = 0; i < doc.sketch.length; i++) {
    if (doc.sketch[i] > 1) {
      out.push({
        invariant: 'sketch-binary',
        detail: `pixel ${i} holds ${doc.sketch[i]}, sketch must be 0/1`,
      });
      break;
    }
  }
  return out;
}

export function assertExportable(doc: EditorDocument): void {
  const violations = validateDocument(doc);
  if (violations.length) {
    throw new Error(violations.map((v) => `${v.invariant}: ${v.detail}`).join('; '));
  }
}
