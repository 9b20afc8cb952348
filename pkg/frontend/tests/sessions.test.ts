import { describe, expect, it } from 'vitest';

import { documentsEqual, redo, undo } from '../src/core/document.js';
import { encodePng } from '../src/core/png.js';
import { validateDocument } from '../src/core/validate.js';
import { runScriptedSession } from './helpers.js';

describe('scripted edit sessions', () => {
  it('50 sessions export labels that satisfy every invariant', () => {
    for (let seed = 0; seed < 50; seed++) {
      const { doc } = runScriptedSession(seed);
      const violations = validateDocument(doc);
      expect(violations, `session ${seed}`).toEqual([]);
      // export must encode without throwing and stay within the palette
      const png = encodePng(doc.labels, doc.width, doc.height);
      expect(png.length).toBeGreaterThan(64);
      const maxClass = doc.classNames.length - 1;
      for (const v of doc.labels) expect(v).toBeLessThanOrEqual(maxClass);
      for (const v of doc.sketch) expect(v).toBeLessThanOrEqual(1);
    }
  }, 60_000);

  it('every session survives a full undo/redo cycle exactly', () => {
    for (let seed = 0; seed < 10; seed++) {
      const session = runScriptedSession(seed);
      const final = {
        labels: session.doc.labels.slice(),
        sketch: session.doc.sketch.slice(),
      };
      let undos = 0;
      while (undo(session.doc, session.history)) undos++;
      expect(undos).toBe(session.editsApplied);
      let redos = 0;
      while (redo(session.doc, session.history)) redos++;
      expect(redos).toBe(undos);
      expect(Array.from(session.doc.labels)).toEqual(Array.from(final.labels));
      expect(Array.from(session.doc.sketch)).toEqual(Array.from(final.sketch));
    }
  }, 60_000);

  it('sessions are deterministic per seed', () => {
    const a = runScriptedSession(31);
    const b = runScriptedSession(31);
    expect(documentsEqual(a.doc, b.doc)).toBe(true);
  });
});
