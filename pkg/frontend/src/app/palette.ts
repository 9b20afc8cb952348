/** Stable colors for class layers and the sketch overlay. */

export const CLASS_COLORS: Array<[number, number, number]> = [
  [16, 16, 20], // background
  [214, 93, 74],
  [94, 157, 222],
  [118, 196, 124],
  [222, 182, 84],
  [170, 116, 212],
  [86, 203, 194],
];

export const SKETCH_COLOR: [number, number, number] = [240, 240, 120];

export function classColor(cls: number): [number, number, number] {
  return CLASS_COLORS[cls % CLASS_COLORS.length];
}
