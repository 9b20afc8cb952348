/** Deterministic pseudo-random edit sessions shared by the test files. */
import {
  applyEdit,
  createDocument,
  createHistory,
  type EditorDocument,
  type History,
} from '../src/core/document.js';
import {
  addRegion,
  brush,
  dilateRegion,
  drawSketch,
  eraseSketch,
  erodeRegion,
  moveRegion,
  removeRegion,
  scaleRegion,
  type Point,
} from '../src/core/edits.js';

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface Session {
  doc: EditorDocument;
  history: History;
  editsApplied: number;
}

const CLASS_NAMES = ['background', 'structure_1', 'structure_2'];

export function runScriptedSession(seed: number, size = 128): Session {
  const rand = mulberry32(seed);
  const doc = createDocument(size, size, CLASS_NAMES, 'phase4');
  const history = createHistory();
  const randint = (lo: number, hi: number) => lo + Math.floor(rand() * (hi - lo + 1));
  const point = (): Point => ({ x: randint(4, size - 5), y: randint(4, size - 5) });

  let applied = 0;
  const actions: Array<(d: EditorDocument) => void> = [
    (d) => brush(d, randint(1, 2), [point(), point(), point()], randint(2, 7)),
    (d) => brush(d, 0, [point(), point()], randint(2, 5)),
    (d) => drawSketch(d, [point(), point(), point()], randint(1, 3)),
    (d) => eraseSketch(d, [point(), point()], randint(2, 4)),
    (d) => moveRegion(d, randint(1, 2), randint(-9, 9), randint(-9, 9)),
    (d) => scaleRegion(d, randint(1, 2), 0.8 + rand() * 0.6),
    (d) => dilateRegion(d, randint(1, 2), randint(1, 2)),
    (d) => erodeRegion(d, randint(1, 2), 1),
    (d) => removeRegion(d, randint(1, 2)),
    (d) => {
      const cx = randint(12, size - 13);
      const cy = randint(12, size - 13);
      const r = randint(4, 11);
      const polygon: Point[] = [];
      const sides = randint(3, 7);
      for (let i = 0; i < sides; i++) {
        const angle = (2 * Math.PI * i) / sides;
        polygon.push({
          x: Math.round(cx + r * Math.cos(angle)),
          y: Math.round(cy + r * Math.sin(angle)),
        });
      }
      addRegion(d, randint(1, 2), polygon);
    },
  ];

  // seed some content so region ops have something to grab
  applyEdit(doc, history, (d) => brush(d, 1, [point(), point()], 6));
  applyEdit(doc, history, (d) => brush(d, 2, [point(), point()], 5));
  applied += 2;

  const steps = randint(5, 14);
  for (let i = 0; i < steps; i++) {
    const action = actions[randint(0, actions.length - 1)];
    if (applyEdit(doc, history, action)) applied++;
  }
  return { doc, history, editsApplied: applied };
}
