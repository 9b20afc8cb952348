/**
 * Editor document: one label layer of class indices, one binary sketch
 * layer, bound to a model's class palette. Undo/redo works on full-layer
 * snapshots so a round trip restores the exact buffers.
 */

export interface EditorDocument {
  width: number;
  height: number;
  /** class names including background at index 0; sketch is index length */
  classNames: string[];
  labels: Uint8Array;
  sketch: Uint8Array;
  checkpointId: string | null;
}

interface Snapshot {
  labels: Uint8Array;
  sketch: Uint8Array;
}

export interface History {
  undo: Snapshot[];
  redo: Snapshot[];
}

export function createDocument(
  width: number,
  height: number,
  classNames: string[],
  checkpointId: string | null = null,
): EditorDocument {
  if (classNames.length < 2) {
    throw new Error('a document needs background plus at least one class');
  }
  return {
    width,
    height,
    classNames,
    labels: new Uint8Array(width * height),
    sketch: new Uint8Array(width * height),
    checkpointId,
  };
}

export function createHistory(): History {
  return { undo: [], redo: [] };
}

function snapshot(doc: EditorDocument): Snapshot {
  return { labels: doc.labels.slice(), sketch: doc.sketch.slice() };
}

function restore(doc: EditorDocument, snap: Snapshot): void {
  doc.labels = snap.labels.slice();
  doc.sketch = snap.sketch.slice();
}

/** Run a mutation with undo recorded; no-op edits leave history alone. */
export function applyEdit(
  doc: EditorDocument,
  history: History,
  mutate: (doc: EditorDocument) => void,
): boolean {
  const before = snapshot(doc);
  mutate(doc);
  const changed =
    !buffersEqual(before.labels, doc.labels) || !buffersEqual(before.sketch, doc.sketch);
  if (changed) {
    history.undo.push(before);
    history.redo.length = 0;
  }
  return changed;
}

export function undo(doc: EditorDocument, history: History): boolean {
  const snap = history.undo.pop();
  if (!snap) return false;
  history.redo.push(snapshot(doc));
  restore(doc, snap);
  return true;
}

export function redo(doc: EditorDocument, history: History): boolean {
  const snap = history.redo.pop();
  if (!snap) return false;
  history.undo.push(snapshot(doc));
  restore(doc, snap);
  return true;
}

export function buffersEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) return false;
  }
  return true;
}

export function documentsEqual(a: EditorDocument, b: EditorDocument): boolean {
  return (
    a.width === b.width &&
    a.height === b.height &&
    buffersEqual(a.labels, b.labels) &&
    buffersEqual(a.sketch, b.sketch)
  );
}
