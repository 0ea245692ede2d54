// SPA wiring: home (upload + objectives), editor (embedded diagrams.net),
// report (client-filtered findings). State lives in SessionState and is
// persisted after every mutation.

import { TfaiClient, ApiError } from "./api.js";
import { DrawioEditor } from "./editor.js";
import { renderReportView } from "./report_view.js";
import { SessionStore, SessionState } from "./session.js";
import { ALL_OBJECTIVES } from "./types.js";

const client = new TfaiClient();
const store = new SessionStore(window.localStorage);
let session: SessionState = store.load();
let reportIsStale = false;
let activeEditor: DrawioEditor | null = null;
let analysisInFlight = false;

function mutate(change: Partial<SessionState>): void {
  session = store.update(session, change);
}

function app(): HTMLElement {
  return document.getElementById("app")!;
}

function setStatus(message: string, isError = false): void {
  const el = document.getElementById("status")!;
  el.textContent = message;
  el.className = isError ? "status error" : "status";
}

function navigate(view: string): void {
  window.location.hash = `#/${view}`;
}

async function runAnalysis(): Promise<void> {
  if (!session.currentDiagram || analysisInFlight) {
    return;
  }
  analysisInFlight = true;
  setStatus("Analyzing…");
  try {
    const result = await client.analyze(
      session.currentDiagram,
      session.selectedObjectives,
      session.annotationKey,
    );
    mutate({ lastReport: result.report });
    reportIsStale = false;
    setStatus(result.hasWarnings ? "Analysis finished with warnings." : "Analysis finished.");
    navigate("report");
  } catch (error) {
    const message = error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
    setStatus(`Analysis failed — ${message}`, true);
  } finally {
    analysisInFlight = false;
    render();
  }
}

function objectiveCheckboxes(onChange: () => void): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "objectives";
  for (const objective of ALL_OBJECTIVES) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.value = objective;
    box.checked = session.selectedObjectives.includes(objective);
    box.addEventListener("change", () => {
      const next = new Set(session.selectedObjectives);
      if (box.checked) {
        next.add(objective);
      } else {
        next.delete(objective);
      }
      mutate({ selectedObjectives: ALL_OBJECTIVES.filter((o) => next.has(o)) });
      onChange();
    });
    label.append(box, ` ${objective.replace("_", "-")}`);
    wrap.append(label);
  }
  return wrap;
}

function renderHome(): void {
  const root = app();
  root.innerHTML = `
    <h2>Start a threat model</h2>
    <p>Upload an annotated architecture diagram (.drawio / .xml) and select the
    security objectives that matter for your system, or open the editor to
    model from scratch with the AI asset stencils.</p>
    <div id="objective-slot"></div>
    <p>
      <input type="file" id="diagram-file" accept=".xml,.drawio">
    </p>
    <p id="diagram-state"></p>
    <p>
      <button id="analyze-btn">Analyze</button>
      <button id="editor-btn">Open editor</button>
    </p>`;
  root.querySelector("#objective-slot")!.append(objectiveCheckboxes(() => renderHome()));

  const state = root.querySelector("#diagram-state")!;
  state.textContent = session.currentDiagram
    ? `Diagram loaded (${session.currentDiagram.length} characters).`
    : "No diagram loaded yet.";

  const analyzeBtn = root.querySelector<HTMLButtonElement>("#analyze-btn")!;
  analyzeBtn.disabled = !session.currentDiagram || analysisInFlight;
  analyzeBtn.addEventListener("click", () => void runAnalysis());
  root.querySelector("#editor-btn")!.addEventListener("click", () => navigate("editor"));

  const fileInput = root.querySelector<HTMLInputElement>("#diagram-file")!;
  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) {
      return;
    }
    const text = await file.text();
    mutate({ currentDiagram: text });
    reportIsStale = session.lastReport !== null;
    setStatus(`Loaded ${file.name}.`);
    renderHome();
  });
}

function renderEditor(): void {
  const root = app();
  root.innerHTML = `
    <div class="editor-bar">
      <button id="editor-analyze">Analyze current diagram</button>
      <span id="editor-note">Loading embedded editor…</span>
    </div>
    <iframe id="drawio-frame" title="diagram editor"></iframe>`;
  const iframe = root.querySelector<HTMLIFrameElement>("#drawio-frame")!;

  activeEditor?.stop();
  activeEditor = new DrawioEditor(iframe, {
    onReady: () => {
      root.querySelector("#editor-note")!.textContent =
        "Drag AI asset stencils onto the canvas; the model autosaves locally.";
    },
    onSave: (xml) => {
      mutate({ currentDiagram: xml });
      reportIsStale = session.lastReport !== null;
    },
    onAutosave: (xml) => {
      mutate({ currentDiagram: xml });
      reportIsStale = session.lastReport !== null;
    },
    onUnreachable: () => {
      root.innerHTML = `
        <p class="status error">The embedded editor could not be reached.
        You can still upload a diagram file on the start page.</p>`;
      navigateHomeButton(root);
    },
  });

  void client
    .stencilLibrary()
    .catch(() => null)
    .then((library) => activeEditor?.start(session.currentDiagram, library));

  root.querySelector("#editor-analyze")!.addEventListener("click", () => void runAnalysis());
}

function navigateHomeButton(root: HTMLElement): void {
  const btn = document.createElement("button");
  btn.textContent = "Back to start";
  btn.addEventListener("click", () => navigate("home"));
  root.append(btn);
}

async function exportRendered(format: "markdown" | "html"): Promise<void> {
  if (!session.currentDiagram) {
    return;
  }
  const body = await client.analyzeRendered(
    session.currentDiagram,
    session.selectedObjectives,
    session.annotationKey,
    format,
  );
  const type = format === "html" ? "text/html" : "text/markdown";
  const blob = new Blob([body], { type });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = format === "html" ? "threat-report.html" : "threat-report.md";
  link.click();
  URL.revokeObjectURL(link.href);
}

function renderReport(): void {
  const root = app();
  if (!session.lastReport) {
    root.innerHTML = "<p>No analysis yet. Upload or model a diagram first.</p>";
    navigateHomeButton(root);
    return;
  }
  root.innerHTML = `
    <h2>Threat report</h2>
    <p>Toggle objectives to re-focus the report instantly; the finding set
    itself never changes client-side.</p>
    <div id="objective-slot"></div>
    <p>
      <button id="export-html">Export HTML</button>
      <button id="export-md">Export Markdown</button>
      <button id="rerun">Re-run analysis</button>
    </p>
    <div id="report-slot"></div>`;
  root.querySelector("#objective-slot")!.append(objectiveCheckboxes(() => renderReport()));
  root.querySelector("#report-slot")!.innerHTML = renderReportView(session.lastReport, {
    objectives: session.selectedObjectives,
    stale: reportIsStale,
  });
  root.querySelector("#export-html")!.addEventListener("click", () => void exportRendered("html"));
  root.querySelector("#export-md")!.addEventListener("click", () => void exportRendered("markdown"));
  root.querySelector("#rerun")!.addEventListener("click", () => void runAnalysis());
}

function render(): void {
  const view = window.location.hash.replace(/^#\//, "") || "home";
  document.querySelectorAll("nav a").forEach((a) => {
    a.classList.toggle("active", a.getAttribute("href") === `#/${view}`);
  });
  if (view !== "editor") {
    activeEditor?.stop();
    activeEditor = null;
  }
  if (view === "editor") {
    renderEditor();
  } else if (view === "report") {
    renderReport();
  } else {
    renderHome();
  }
}

window.addEventListener("hashchange", render);
window.addEventListener("DOMContentLoaded", () => {
  void client
    .health()
    .then((h) => setStatus(`Connected — ${h.kb_provenance}`))
    .catch(() => setStatus("Backend unreachable; analysis is unavailable.", true));
  render();
});
