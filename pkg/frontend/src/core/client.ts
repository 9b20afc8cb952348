/**
 * Typed client for the /v1 JSON API, plus a preview controller that
 * keeps at most one synthesis in flight: a newer request aborts the
 * older one, so the editing thread never waits on a stale render.
 */
import type { EditorDocument } from './document.js';
import { assertExportable } from './validate.js';
import { encodePng } from './png.js';

export interface ModelEntry {
  id: string;
  class_names: string[];
  num_classes: number;
  stage: string;
  resolution: number;
  phase: number;
  checksum: string;
}

export interface ComposeResult {
  composite_png: string;
  manifest: { kind: string; class_names: string[] };
}

export interface SynthesisResult {
  image_png: string;
  checkpoint: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: { error?: string; invariant?: string },
  ) {
    super(body.error ?? `request failed with status ${status}`);
  }
}

function toBase64(bytes: Uint8Array): string {
  let bin = '';
  for (let i = 0; i < bytes.length; i++) bin += String.fromCharCode(bytes[i]);
  return btoa(bin);
}

export function fromBase64(data: string): Uint8Array {
  const bin = atob(data);
  const out = new Uint8Array(bin.length);
  for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
  return out;
}

type FetchLike = typeof fetch;

export class SpganClient {
  constructor(
    readonly base: string = '',
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async post<T>(path: string, payload: unknown, signal?: AbortSignal): Promise<T> {
    const resp = await this.fetchImpl(`${this.base}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
      signal,
    });
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) throw new ApiError(resp.status, body);
    return body as T;
  }

  async healthz(signal?: AbortSignal): Promise<boolean> {
    try {
      const resp = await this.fetchImpl(`${this.base}/v1/healthz`, { signal });
      return resp.ok;
    } catch {
      return false;
    }
  }

  async models(signal?: AbortSignal): Promise<ModelEntry[]> {
    const resp = await this.fetchImpl(`${this.base}/v1/models`, { signal });
    if (!resp.ok) throw new ApiError(resp.status, await resp.json().catch(() => ({})));
    return (await resp.json()) as ModelEntry[];
  }

  async compose(doc: EditorDocument, signal?: AbortSignal): Promise<ComposeResult> {
    assertExportable(doc);
    return this.post<ComposeResult>(
      '/v1/compose',
      {
        label_png: toBase64(encodePng(doc.labels, doc.width, doc.height)),
        sketch_png: toBase64(encodePng(doc.sketch, doc.width, doc.height)),
        class_names: doc.classNames,
      },
      signal,
    );
  }

  async synthesize(
    checkpoint: string,
    compositePng: string,
    signal?: AbortSignal,
  ): Promise<SynthesisResult> {
    return this.post<SynthesisResult>(
      '/v1/synthesize',
      { checkpoint, composite_png: compositePng },
      signal,
    );
  }
}

export interface Preview {
  imagePng: Uint8Array;
  compositePng: Uint8Array;
}

/** Serializes previews; a new request cancels the in-flight one. */
export class PreviewController {
  private inflight: AbortController | null = null;

  constructor(private readonly client: SpganClient) {}

  async request(doc: EditorDocument): Promise<Preview | null> {
    if (!doc.checkpointId) throw new Error('document is not bound to a model');
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const composed = await this.client.compose(doc, controller.signal);
      const synth = await this.client.synthesize(
        doc.checkpointId,
        composed.composite_png,
        controller.signal,
      );
      return {
        imagePng: fromBase64(synth.image_png),
        compositePng: fromBase64(composed.composite_png),
      };
    } catch (err) {
      if (controller.signal.aborted) return null; // superseded, not an error
      throw err;
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }

  cancel(): void {
    this.inflight?.abort();
    this.inflight = null;
  }
}
