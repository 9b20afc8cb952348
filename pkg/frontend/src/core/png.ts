/**
 * Minimal 8-bit grayscale PNG codec.
 *
 * Encoding writes stored (uncompressed) deflate blocks inside a valid
 * zlib stream, which every PNG reader accepts. Decoding handles any
 * grayscale-8 PNG (all five row filters) and inflates through the
 * platform DecompressionStream, available in browsers and node alike.
 */

const SIGNATURE = new Uint8Array([137, 80, 78, 71, 13, 10, 26, 10]);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(...parts: Uint8Array[]): number {
  let crc = 0xffffffff;
  for (const part of parts) {
    for (let i = 0; i < part.length; i++) {
      crc = CRC_TABLE[(crc ^ part[i]) & 0xff] ^ (crc >>> 8);
    }
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function adler32(data: Uint8Array): number {
  let a = 1;
  let b = 0;
  for (let i = 0; i < data.length; i++) {
    a = (a + data[i]) % 65521;
    b = (b + a) % 65521;
  }
  return ((b << 16) | a) >>> 0;
}

function u32be(value: number): Uint8Array {
  return new Uint8Array([(value >>> 24) & 255, (value >>> 16) & 255, (value >>> 8) & 255, value & 255]);
}

function chunk(type: string, data: Uint8Array): Uint8Array {
  const typeBytes = new TextEncoder().encode(type);
  const out = new Uint8Array(12 + data.length);
  out.set(u32be(data.length), 0);
  out.set(typeBytes, 4);
  out.set(data, 8);
  out.set(u32be(crc32(typeBytes, data)), 8 + data.length);
  return out;
}

function zlibStored(raw: Uint8Array): Uint8Array {
  const blocks: Uint8Array[] = [new Uint8Array([0x78, 0x01])];
  const max = 65535;
  for (let off = 0; off < raw.length || off === 0; off += max) {
    const end = Math.min(off + max, raw.length);
    const final = end >= raw.length ? 1 : 0;
    const len = end - off;
    const header = new Uint8Array([final, len & 255, len >>> 8, ~len & 255, (~len >>> 8) & 255]);
    blocks.push(header, raw.subarray(off, end));
    if (end >= raw.length) break;
  }
  blocks.push(u32be(adler32(raw)));
  let total = 0;
  for (const b of blocks) total += b.length;
  const out = new Uint8Array(total);
  let pos = 0;
  for (const b of blocks) {
    out.set(b, pos);
    pos += b.length;
  }
  return out;
}

/** Encode a width*height grayscale byte grid as a PNG file. */
export function encodePng(grid: Uint8Array, width: number, height: number): Uint8Array {
  if (grid.length !== width * height) {
    throw new Error(`grid length ${grid.length} != ${width}x${height}`);
  }
  const ihdr = new Uint8Array(13);
  ihdr.set(u32be(width), 0);
  ihdr.set(u32be(height), 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 0; // grayscale
  const raw = new Uint8Array(height * (width + 1));
  for (let y = 0; y < height; y++) {
    raw[y * (width + 1)] = 0; // filter: none
    raw.set(grid.subarray(y * width, (y + 1) * width), y * (width + 1) + 1);
  }
  const parts = [
    SIGNATURE,
    chunk('IHDR', ihdr),
    chunk('IDAT', zlibStored(raw)),
    chunk('IEND', new Uint8Array(0)),
  ];
  let total = 0;
  for (const p of parts) total += p.length;
  const out = new Uint8Array(total);
  let pos = 0;
  for (const p of parts) {
    out.set(p, pos);
    pos += p.length;
  }
  return out;
}

async function inflate(data: Uint8Array): Promise<Uint8Array> {
  const stream = new DecompressionStream('deflate');
  const writer = stream.writable.getWriter();
  void writer.write(data.slice());
  void writer.close();
  const chunks: Uint8Array[] = [];
  const reader = stream.readable.getReader();
  for (;;) {
    const { done, value } = await reader.read();
    if (done) break;
    chunks.push(value);
  }
  let total = 0;
  for (const c of chunks) total += c.length;
  const out = new Uint8Array(total);
  let pos = 0;
  for (const c of chunks) {
    out.set(c, pos);
    pos += c.length;
  }
  return out;
}

export interface DecodedPng {
  width: number;
  height: number;
  grid: Uint8Array;
}

/** Decode an 8-bit grayscale PNG (the only format the service emits). */
export async function decodePng(data: Uint8Array): Promise<DecodedPng> {
  for (let i = 0; i < SIGNATURE.length; i++) {
    if (data[i] !== SIGNATURE[i]) throw new Error('not a PNG file');
  }
  let pos = 8;
  let width = 0;
  let height = 0;
  const idats: Uint8Array[] = [];
  while (pos + 8 <= data.length) {
    const len = (data[pos] << 24) | (data[pos + 1] << 16) | (data[pos + 2] << 8) | data[pos + 3];
    const type = String.fromCharCode(data[pos + 4], data[pos + 5], data[pos + 6], data[pos + 7]);
    const body = data.subarray(pos + 8, pos + 8 + len);
    if (pos + 12 + len > data.length) throw new Error('truncated PNG');
    if (type === 'IHDR') {
      width = (body[0] << 24) | (body[1] << 16) | (body[2] << 8) | body[3];
      height = (body[4] << 24) | (body[5] << 16) | (body[6] << 8) | body[7];
      if (body[8] !== 8 || body[9] !== 0) {
        throw new Error('only 8-bit grayscale PNGs are supported');
      }
      if (body[12] !== 0) throw new Error('interlaced PNGs are not supported');
    } else if (type === 'IDAT') {
      idats.push(body);
    } else if (type === 'IEND') {
      break;
    }
    pos += 12 + len;
  }
  if (!width || !height || idats.length === 0) throw new Error('malformed PNG');
  let total = 0;
  for (const c of idats) total += c.length;
  const zdata = new Uint8Array(total);
  let zpos = 0;
  for (const c of idats) {
    zdata.set(c, zpos);
    zpos += c.length;
  }
  const raw = await inflate(zdata);
  const stride = width + 1;
  if (raw.length < stride * height) throw new Error('PNG pixel data truncated');
  const grid = new Uint8Array(width * height);
  let prev = new Uint8Array(width);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * stride];
    const row = raw.subarray(y * stride + 1, y * stride + 1 + width);
    const out = new Uint8Array(width);
    for (let x = 0; x < width; x++) {
      const a = x > 0 ? out[x - 1] : 0;
      const b = prev[x];
      const c = x > 0 ? prev[x - 1] : 0;
      let value: number;
      switch (filter) {
        case 0:
          value = row[x];
          break;
        case 1:
          value = row[x] + a;
          break;
        case 2:
          value = row[x] + b;
          break;
        case 3:
          value = row[x] + Math.floor((a + b) / 2);
          break;
        case 4: {
          const p = a + b - c;
          const pa = Math.abs(p - a);
          const pb = Math.abs(p - b);
          const pc = Math.abs(p - c);
          value = row[x] + (pa <= pb && pa <= pc ? a : pb <= pc ? b : c);
          break;
        }
        default:
          throw new Error(`unknown PNG filter ${filter}`);
      }
      out[x] = value & 255;
    }
    grid.set(out, y * width);
    prev = out;
  }
  return { width, height, grid };
}
