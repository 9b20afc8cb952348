/**
 * Editor shell: layered canvas painting on the left, live synthesis
 * preview on the right. All label mutations run through the document
 * history, every preview goes through /v1/compose + /v1/synthesize, and
 * a newer preview cancels the in-flight one.
 */
import {
  applyEdit,
  createDocument,
  createHistory,
  redo,
  undo,
  type EditorDocument,
  type History,
} from '../core/document.js';
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
} from '../core/edits.js';
import { PreviewController, SpganClient, type ModelEntry } from '../core/client.js';
import { decodePng, encodePng } from '../core/png.js';
import { diffGrids } from '../core/diff.js';
import { classColor, SKETCH_COLOR } from './palette.js';

type Tool =
  | 'brush'
  | 'erase'
  | 'sketch'
  | 'sketch-erase'
  | 'move'
  | 'scale'
  | 'dilate'
  | 'erode'
  | 'add-region'
  | 'remove-region';

interface AppState {
  doc: EditorDocument;
  history: History;
  model: ModelEntry | null;
  tool: Tool;
  activeClass: number;
  brushRadius: number;
  stroke: Point[];
  polygon: Point[];
  lastPreview: Uint8Array | null;
  prevPreview: Uint8Array | null;
  showDiff: boolean;
}

const client = new SpganClient('');
const previews = new PreviewController(client);

const state: AppState = {
  doc: createDocument(128, 128, ['background', 'structure_1']),
  history: createHistory(),
  model: null,
  tool: 'brush',
  activeClass: 1,
  brushRadius: 4,
  stroke: [],
  polygon: [],
  lastPreview: null,
  prevPreview: null,
  showDiff: false,
};

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

const editorCanvas = $('editor') as HTMLCanvasElement;
const previewCanvas = $('preview') as HTMLCanvasElement;
const banner = $('banner');
const statusLine = $('status');

function setBanner(text: string | null): void {
  banner.textContent = text ?? '';
  banner.classList.toggle('visible', text !== null);
}

function setStatus(text: string): void {
  statusLine.textContent = text;
}

function renderEditor(): void {
  const { doc } = state;
  editorCanvas.width = doc.width;
  editorCanvas.height = doc.height;
  const ctx = editorCanvas.getContext('2d');
  if (!ctx) return;
  const img = ctx.createImageData(doc.width, doc.height);
  for (let i = 0; i < doc.labels.length; i++) {
    const [r, g, b] = doc.sketch[i] ? SKETCH_COLOR : classColor(doc.labels[i]);
    img.data[i * 4] = r;
    img.data[i * 4 + 1] = g;
    img.data[i * 4 + 2] = b;
    img.data[i * 4 + 3] = 255;
  }
  ctx.putImageData(img, 0, 0);
}

async function renderPreview(): Promise<void> {
  const ctx = previewCanvas.getContext('2d');
  if (!ctx || !state.lastPreview) return;
  const decoded = await decodePng(state.lastPreview);
  previewCanvas.width = decoded.width;
  previewCanvas.height = decoded.height;
  const img = ctx.createImageData(decoded.width, decoded.height);
  let diffMask: Uint8Array | null = null;
  if (state.showDiff && state.prevPreview) {
    const prev = await decodePng(state.prevPreview);
    if (prev.grid.length === decoded.grid.length) {
      diffMask = diffGrids(prev.grid, decoded.grid).mask;
    }
  }
  for (let i = 0; i < decoded.grid.length; i++) {
    const v = decoded.grid[i];
    img.data[i * 4] = diffMask && diffMask[i] ? 255 : v;
    img.data[i * 4 + 1] = v;
    img.data[i * 4 + 2] = v;
    img.data[i * 4 + 3] = 255;
  }
  ctx.putImageData(img, 0, 0);
}

function canvasPoint(event: PointerEvent): Point {
  const rect = editorCanvas.getBoundingClientRect();
  return {
    x: Math.floor(((event.clientX - rect.left) / rect.width) * state.doc.width),
    y: Math.floor(((event.clientY - rect.top) / rect.height) * state.doc.height),
  };
}

function edit(mutate: (doc: EditorDocument) => void): void {
  const changed = applyEdit(state.doc, state.history, mutate);
  if (changed) {
    renderEditor();
    schedulePreview();
  }
}

let previewTimer: ReturnType<typeof setTimeout> | null = null;

function schedulePreview(): void {
  if (!state.doc.checkpointId) return;
  if (previewTimer) clearTimeout(previewTimer);
  previewTimer = setTimeout(() => void requestPreview(), 350);
}

async function requestPreview(): Promise<void> {
  if (!state.doc.checkpointId) return;
  setStatus('rendering…');
  try {
    const result = await previews.request(state.doc);
    if (result === null) return; // superseded by a newer edit
    state.prevPreview = state.lastPreview;
    state.lastPreview = result.imagePng;
    await renderPreview();
    setBanner(null);
    setStatus('ready');
  } catch (err) {
    if (err instanceof TypeError) {
      setBanner('service unreachable — edits are preserved locally');
    } else {
      setBanner(String(err instanceof Error ? err.message : err));
    }
    setStatus('preview failed');
  }
}

function bindTools(): void {
  document.querySelectorAll<HTMLButtonElement>('[data-tool]').forEach((button) => {
    button.addEventListener('click', () => {
      state.tool = button.dataset.tool as Tool;
      state.polygon = [];
      document
        .querySelectorAll('[data-tool]')
        .forEach((b) => b.classList.toggle('active', b === button));
      setStatus(`tool: ${state.tool}`);
    });
  });
  ($('brush-radius') as HTMLInputElement).addEventListener('input', (e) => {
    state.brushRadius = Number((e.target as HTMLInputElement).value);
  });
  $('undo').addEventListener('click', () => {
    if (undo(state.doc, state.history)) {
      renderEditor();
      schedulePreview();
    }
  });
  $('redo').addEventListener('click', () => {
    if (redo(state.doc, state.history)) {
      renderEditor();
      schedulePreview();
    }
  });
  $('render').addEventListener('click', () => void requestPreview());
  ($('diff-toggle') as HTMLInputElement).addEventListener('change', (e) => {
    state.showDiff = (e.target as HTMLInputElement).checked;
    void renderPreview();
  });
  $('export').addEventListener('click', exportLabel);
  ($('import') as HTMLInputElement).addEventListener('change', importLabel);
}

function bindPointer(): void {
  editorCanvas.addEventListener('pointerdown', (event) => {
    const p = canvasPoint(event);
    if (state.tool === 'add-region') {
      state.polygon.push(p);
      setStatus(`polygon: ${state.polygon.length} vertices (double-click to close)`);
      return;
    }
    state.stroke = [p];
    editorCanvas.setPointerCapture(event.pointerId);
  });
  editorCanvas.addEventListener('pointermove', (event) => {
    if (!state.stroke.length) return;
    state.stroke.push(canvasPoint(event));
    if (state.tool === 'brush' || state.tool === 'erase' || state.tool === 'sketch'
        || state.tool === 'sketch-erase') {
      // live feedback: paint incrementally without history spam
      const seg = state.stroke.slice(-2);
      const doc = state.doc;
      if (state.tool === 'brush') brush(doc, state.activeClass, seg, state.brushRadius);
      if (state.tool === 'erase') brush(doc, 0, seg, state.brushRadius);
      if (state.tool === 'sketch') drawSketch(doc, seg, 1);
      if (state.tool === 'sketch-erase') eraseSketch(doc, seg, 3);
      renderEditor();
    }
  });
  editorCanvas.addEventListener('pointerup', () => {
    const stroke = state.stroke;
    state.stroke = [];
    if (!stroke.length) return;
    finishStroke(stroke);
  });
  editorCanvas.addEventListener('dblclick', () => {
    if (state.tool === 'add-region' && state.polygon.length >= 3) {
      const polygon = state.polygon.slice();
      state.polygon = [];
      edit((doc) => addRegion(doc, state.activeClass, polygon));
    }
  });
}

function finishStroke(stroke: Point[]): void {
  const start = stroke[0];
  const end = stroke[stroke.length - 1];
  const cls = state.activeClass;
  switch (state.tool) {
    case 'brush':
      edit((doc) => brush(doc, cls, stroke, state.brushRadius));
      break;
    case 'erase':
      edit((doc) => brush(doc, 0, stroke, state.brushRadius));
      break;
    case 'sketch':
      edit((doc) => drawSketch(doc, stroke, 1));
      break;
    case 'sketch-erase':
      edit((doc) => eraseSketch(doc, stroke, 3));
      break;
    case 'move':
      edit((doc) => moveRegion(doc, cls, end.y - start.y, end.x - start.x));
      break;
    case 'scale': {
      const factor = Math.exp((start.y - end.y) / 80);
      edit((doc) => scaleRegion(doc, cls, factor));
      break;
    }
    case 'dilate':
      edit((doc) => dilateRegion(doc, cls, 1));
      break;
    case 'erode':
      edit((doc) => erodeRegion(doc, cls, 1));
      break;
    case 'remove-region':
      edit((doc) => removeRegion(doc, cls));
      break;
    default:
      break;
  }
}

function rebuildClassButtons(): void {
  const holder = $('classes');
  holder.innerHTML = '';
  state.doc.classNames.forEach((name, cls) => {
    if (cls === 0) return;
    const button = document.createElement('button');
    const [r, g, b] = classColor(cls);
    button.textContent = `${cls} ${name}`;
    button.style.borderColor = `rgb(${r},${g},${b})`;
    button.classList.toggle('active', cls === state.activeClass);
    button.addEventListener('click', () => {
      state.activeClass = cls;
      rebuildClassButtons();
    });
    holder.appendChild(button);
  });
}

function exportLabel(): void {
  const encoded = encodePng(state.doc.labels, state.doc.width, state.doc.height);
  const png = new Uint8Array(encoded.length);
  png.set(encoded);
  const manifest = { kind: 'label', class_names: state.doc.classNames };
  downloadBlob(new Blob([png], { type: 'image/png' }), 'label.png');
  downloadBlob(
    new Blob([JSON.stringify(manifest, null, 2)], { type: 'application/json' }),
    'label.json',
  );
}

function downloadBlob(blob: Blob, name: string): void {
  const a = document.createElement('a');
  a.href = URL.createObjectURL(blob);
  a.download = name;
  a.click();
  URL.revokeObjectURL(a.href);
}

async function importLabel(event: Event): Promise<void> {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  try {
    const decoded = await decodePng(new Uint8Array(await file.arrayBuffer()));
    if (decoded.width !== state.doc.width || decoded.height !== state.doc.height) {
      throw new Error(
        `label is ${decoded.width}x${decoded.height}, document needs ` +
          `${state.doc.width}x${state.doc.height}`,
      );
    }
    const maxClass = state.doc.classNames.length - 1;
    for (const v of decoded.grid) {
      if (v > maxClass) throw new Error(`imported class ${v} outside the palette`);
    }
    edit((doc) => doc.labels.set(decoded.grid));
  } catch (err) {
    setBanner(String(err instanceof Error ? err.message : err));
  } finally {
    input.value = '';
  }
}

async function bindModel(): Promise<void> {
  const select = $('model') as HTMLSelectElement;
  let models: ModelEntry[] = [];
  try {
    models = await client.models();
  } catch {
    setBanner('service unreachable — editing offline, previews disabled');
  }
  select.innerHTML = '';
  for (const model of models) {
    const option = document.createElement('option');
    option.value = model.id;
    option.textContent = `${model.id} (${model.resolution}px, phase ${model.phase})`;
    select.appendChild(option);
  }
  const pick = (id: string) => {
    const model = models.find((m) => m.id === id);
    if (!model) return;
    state.model = model;
    state.doc = createDocument(
      model.resolution,
      model.resolution,
      model.class_names,
      model.id,
    );
    state.history = createHistory();
    state.lastPreview = null;
    state.prevPreview = null;
    state.activeClass = 1;
    rebuildClassButtons();
    renderEditor();
    setStatus(`bound to ${model.id}`);
  };
  select.addEventListener('change', () => pick(select.value));
  const latest = models.find((m) => m.phase === 4) ?? models[0];
  if (latest) {
    select.value = latest.id;
    pick(latest.id);
  } else {
    rebuildClassButtons();
    renderEditor();
  }
}

bindTools();
bindPointer();
void bindModel();
