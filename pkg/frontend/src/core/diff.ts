/** Pixel difference helpers for the before/after preview toggle. */

export interface DiffStats {
  changed: number;
  total: number;
  mask: Uint8Array;
}

export function diffGrids(a: Uint8Array, b: Uint8Array): DiffStats {
  if (a.length !== b.length) throw new Error('diff needs equal-size grids');
  const mask = new Uint8Array(a.length);
  let changed = 0;
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) {
      mask[i] = 1;
      changed++;
    }
  }
  return { changed, total: a.length, mask };
}

export function countChangedInRegion(stats: DiffStats, region: Uint8Array): number {
  if (region.length !== stats.mask.length) throw new Error('region size mismatch');
  let n = 0;
  for (let i = 0; i < region.length; i++) {
    if (region[i] && stats.mask[i]) n++;
  }
  return n;
}
