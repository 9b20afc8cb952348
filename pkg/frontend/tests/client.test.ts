import { describe, expect, it } from 'vitest';

import { ApiError, PreviewController, SpganClient } from '../src/core/client.js';
import { createDocument } from '../src/core/document.js';
import { brush } from '../src/core/edits.js';

const OK_COMPOSE = {
  composite_png: 'aGVsbG8=',
  manifest: { kind: 'composite', class_names: ['background', 'a'] },
};
const OK_SYNTH = { image_png: 'd29ybGQ=', checkpoint: 'phase4' };

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

function docWithContent() {
  const doc = createDocument(16, 16, ['background', 'a'], 'phase4');
  brush(doc, 1, [{ x: 8, y: 8 }], 3);
  return doc;
}

describe('SpganClient', () => {
  it('posts compose payloads with base64 PNGs and class names', async () => {
    const calls: Array<{ url: string; body: any }> = [];
    const client = new SpganClient('http://svc', (async (url: any, init: any) => {
      calls.push({ url: String(url), body: JSON.parse(init.body) });
      return jsonResponse(200, OK_COMPOSE);
    }) as typeof fetch);
    const result = await client.compose(docWithContent());
    expect(result.composite_png).toBe(OK_COMPOSE.composite_png);
    expect(calls[0].url).toBe('http://svc/v1/compose');
    expect(calls[0].body.class_names).toEqual(['background', 'a']);
    expect(typeof calls[0].body.label_png).toBe('string');
    expect(typeof calls[0].body.sketch_png).toBe('string');
  });

  it('refuses to upload documents that violate invariants', async () => {
    const doc = docWithContent();
    doc.sketch[0] = 9; // corrupt the binary layer
    const client = new SpganClient('', (async () =>
      jsonResponse(200, OK_COMPOSE)) as typeof fetch);
    await expect(client.compose(doc)).rejects.toThrow('sketch-binary');
  });

  it('surfaces service error bodies verbatim', async () => {
    const client = new SpganClient('', (async () =>
      jsonResponse(400, { error: 'grids disagree on shape', invariant: 'DimensionError' })
    ) as typeof fetch);
    const err = await client.compose(docWithContent()).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.message).toBe('grids disagree on shape');
    expect(err.body.invariant).toBe('DimensionError');
  });

  it('healthz returns false when the service is down', async () => {
    const client = new SpganClient('', (async () => {
      throw new TypeError('fetch failed');
    }) as typeof fetch);
    expect(await client.healthz()).toBe(false);
  });
});

describe('PreviewController', () => {
  it('cancels the in-flight preview when a newer one arrives', async () => {
    let aborted = 0;
    const slowThenFast = (async (url: any, init: any) => {
      const signal: AbortSignal = init.signal;
      const path = String(url);
      if (path.endsWith('/compose')) return jsonResponse(200, OK_COMPOSE);
      // synthesize: hang until aborted for the first call, fast after
      if (aborted === 0) {
        aborted++;
        return new Promise<Response>((_, reject) => {
          if (signal.aborted) {
            reject(new DOMException('aborted', 'AbortError'));
            return;
          }
          signal.addEventListener('abort', () =>
            reject(new DOMException('aborted', 'AbortError')),
          );
        });
      }
      return jsonResponse(200, OK_SYNTH);
    }) as typeof fetch;

    const controller = new PreviewController(new SpganClient('', slowThenFast));
    const doc = docWithContent();
    const first = controller.request(doc);
    const second = controller.request(doc);
    const [a, b] = await Promise.all([first, second]);
    expect(a).toBeNull(); // superseded, silently dropped
    expect(b).not.toBeNull();
    expect(new TextDecoder().decode(b!.imagePng)).toBe('world');
  });

  it('propagates real errors but not cancellations', async () => {
    const failing = (async () => jsonResponse(404, { error: 'unknown checkpoint' })) as typeof fetch;
    const controller = new PreviewController(new SpganClient('', failing));
    await expect(controller.request(docWithContent())).rejects.toThrow('unknown checkpoint');
  });

  it('rejects documents that are not bound to a model', async () => {
    const controller = new PreviewController(new SpganClient('', (async () =>
      jsonResponse(200, OK_COMPOSE)) as typeof fetch));
    const unbound = createDocument(8, 8, ['background', 'a']);
    await expect(controller.request(unbound)).rejects.toThrow('not bound');
  });
});
