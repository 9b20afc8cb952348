/**
 * Editing tools over the document layers. These mirror the backend edit
 * kinds one-to-one: translate, scale, dilate, erode, add_region,
 * remove_region on the label layer; draw/erase strokes on the sketch.
 *
 * The label layer holds discrete class indices with no anti-aliasing;
 * the sketch layer is strictly 0/1. Out-of-canvas coordinates are
 * clamped, overlaps resolve painter-style (the op's class wins).
 */
import type { EditorDocument } from './document.js';

export type Point = { x: number; y: number };

function clampInt(v: number, lo: number, hi: number): number {
  return Math.min(Math.max(Math.round(v), lo), hi);
}

function idx(doc: { width: number }, x: number, y: number): number {
  return y * doc.width + x;
}

/** Paint filled circles along a stroke; class 0 erases to background. */
export function brush(
  doc: EditorDocument,
  cls: number,
  points: Point[],
  radius: number,
): void {
  checkClass(doc, cls, true);
  const r = Math.max(0, Math.round(radius));
  for (const seg of segments(points)) {
    for (const p of rasterizeLine(seg.a, seg.b)) {
      stampDisc(doc.labels, doc.width, doc.height, p, r, cls);
    }
  }
}

export function drawSketch(doc: EditorDocument, points: Point[], thickness = 1): void {
  strokeBinary(doc.sketch, doc.width, doc.height, points, thickness, 1);
}

export function eraseSketch(doc: EditorDocument, points: Point[], thickness = 1): void {
  strokeBinary(doc.sketch, doc.width, doc.height, points, thickness, 0);
}

export function removeRegion(doc: EditorDocument, cls: number): void {
  checkClass(doc, cls, false);
  for (let i = 0; i < doc.labels.length; i++) {
    if (doc.labels[i] === cls) doc.labels[i] = 0;
  }
}

export function addRegion(doc: EditorDocument, cls: number, polygon: Point[]): void {
  checkClass(doc, cls, false);
  if (polygon.length < 3) throw new Error('add_region needs at least 3 vertices');
  const ys = polygon.map((p) => p.y);
  const y0 = clampInt(Math.min(...ys), 0, doc.height - 1);
  const y1 = clampInt(Math.max(...ys), 0, doc.height - 1);
  for (let y = y0; y <= y1; y++) {
    for (const [xa, xb] of scanlineSpans(polygon, y)) {
      const a = clampInt(xa, 0, doc.width - 1);
      const b = clampInt(xb, 0, doc.width - 1);
      for (let x = a; x <= b; x++) doc.labels[idx(doc, x, y)] = cls;
    }
  }
}

export function moveRegion(doc: EditorDocument, cls: number, dy: number, dx: number): void {
  checkClass(doc, cls, false);
  const { width, height, labels } = doc;
  const moved: number[] = [];
  for (let i = 0; i < labels.length; i++) {
    if (labels[i] === cls) {
      moved.push(i);
      labels[i] = 0;
    }
  }
  for (const i of moved) {
    const y = Math.floor(i / width) + Math.round(dy);
    const x = (i % width) + Math.round(dx);
    if (x >= 0 && x < width && y >= 0 && y < height) {
      labels[idx(doc, x, y)] = cls;
    }
  }
}

export function scaleRegion(doc: EditorDocument, cls: number, factor: number): void {
  checkClass(doc, cls, false);
  if (factor <= 0) throw new Error('scale factor must be positive');
  const { width, height, labels } = doc;
  const region = new Uint8Array(labels.length);
  let sumX = 0;
  let sumY = 0;
  let count = 0;
  for (let i = 0; i < labels.length; i++) {
    if (labels[i] === cls) {
      region[i] = 1;
      sumX += i % width;
      sumY += Math.floor(i / width);
      count++;
    }
  }
  if (count === 0) return;
  const cx = sumX / count;
  const cy = sumY / count;
  for (let i = 0; i < labels.length; i++) {
    if (region[i]) labels[i] = 0;
  }
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const sx = Math.round((x - cx) / factor + cx);
      const sy = Math.round((y - cy) / factor + cy);
      if (sx >= 0 && sx < width && sy >= 0 && sy < height && region[idx(doc, sx, sy)]) {
        labels[idx(doc, x, y)] = cls;
      }
    }
  }
}

export function dilateRegion(doc: EditorDocument, cls: number, radius: number): void {
  morphRegion(doc, cls, radius, true);
}

export function erodeRegion(doc: EditorDocument, cls: number, radius: number): void {
  morphRegion(doc, cls, radius, false);
}

function morphRegion(doc: EditorDocument, cls: number, radius: number, grow: boolean): void {
  checkClass(doc, cls, false);
  const r = Math.max(0, Math.round(radius));
  if (r === 0) return;
  const { width, height, labels } = doc;
  const region = new Uint8Array(labels.length);
  for (let i = 0; i < labels.length; i++) region[i] = labels[i] === cls ? 1 : 0;
  const out = new Uint8Array(labels.length);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      // square structuring element of side 2r+1
      let hit = grow ? 0 : 1;
      for (let dy = -r; dy <= r && hit === (grow ? 0 : 1); dy++) {
        for (let dx = -r; dx <= r; dx++) {
          const yy = y + dy;
          const xx = x + dx;
          const inside =
            yy >= 0 && yy < height && xx >= 0 && xx < width
              ? region[yy * width + xx]
              : 0;
          if (grow && inside) {
            hit = 1;
            break;
          }
          if (!grow && !inside) {
            hit = 0;
            break;
          }
        }
      }
      out[idx(doc, x, y)] = hit;
    }
  }
  for (let i = 0; i < labels.length; i++) {
    if (region[i] && !out[i]) labels[i] = 0;
    if (out[i]) labels[i] = cls;
  }
}

function checkClass(doc: EditorDocument, cls: number, allowBackground: boolean): void {
  const lo = allowBackground ? 0 : 1;
  if (!Number.isInteger(cls) || cls < lo || cls >= doc.classNames.length) {
    throw new Error(
      `class ${cls} outside the palette (${lo}..${doc.classNames.length - 1})`,
    );
  }
}

function stampDisc(
  layer: Uint8Array,
  width: number,
  height: number,
  center: Point,
  r: number,
  value: number,
): void {
  const x0 = clampInt(center.x - r, 0, width - 1);
  const x1 = clampInt(center.x + r, 0, width - 1);
  const y0 = clampInt(center.y - r, 0, height - 1);
  const y1 = clampInt(center.y + r, 0, height - 1);
  const r2 = r * r;
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      const dx = x - center.x;
      const dy = y - center.y;
      if (dx * dx + dy * dy <= r2) layer[y * width + x] = value;
    }
  }
}

function strokeBinary(
  layer: Uint8Array,
  width: number,
  height: number,
  points: Point[],
  thickness: number,
  value: number,
): void {
  const r = Math.max(0, Math.round((thickness - 1) / 2));
  for (const seg of segments(points)) {
    for (const p of rasterizeLine(seg.a, seg.b)) {
      stampDisc(layer, width, height, p, r, value);
    }
  }
}

function* segments(points: Point[]): Generator<{ a: Point; b: Point }> {
  if (points.length === 1) {
    yield { a: points[0], b: points[0] };
    return;
  }
  for (let i = 0; i + 1 < points.length; i++) {
    yield { a: points[i], b: points[i + 1] };
  }
}

/** Bresenham walk between two points, inclusive. */
export function rasterizeLine(a: Point, b: Point): Point[] {
  let x0 = Math.round(a.x);
  let y0 = Math.round(a.y);
  const x1 = Math.round(b.x);
  const y1 = Math.round(b.y);
  const dx = Math.abs(x1 - x0);
  const dy = -Math.abs(y1 - y0);
  const sx = x0 < x1 ? 1 : -1;
  const sy = y0 < y1 ? 1 : -1;
  let err = dx + dy;
  const out: Point[] = [];
  for (;;) {
    out.push({ x: x0, y: y0 });
    if (x0 === x1 && y0 === y1) break;
    const e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
  return out;
}

/** Even-odd scanline spans of a polygon at row y, as [xStart, xEnd]. */
function scanlineSpans(polygon: Point[], y: number): Array<[number, number]> {
  const xs: number[] = [];
  const n = polygon.length;
  for (let i = 0; i < n; i++) {
    const p = polygon[i];
    const q = polygon[(i + 1) % n];
    const y0 = p.y;
    const y1 = q.y;
    if ((y0 <= y && y1 > y) || (y1 <= y && y0 > y)) {
      xs.push(p.x + ((y - y0) / (y1 - y0)) * (q.x - p.x));
    }
  }
  xs.sort((u, v) => u - v);
  const spans: Array<[number, number]> = [];
  for (let i = 0; i + 1 < xs.length; i += 2) {
    spans.push([Math.ceil(xs[i]), Math.floor(xs[i + 1])]);
  }
  return spans;
}
