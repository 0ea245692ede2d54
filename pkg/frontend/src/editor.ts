// Embedded diagrams.net editor (embed mode, JSON protocol). The stencil
// library fetched from the backend is converted into a shape-picker palette;
// when the editor cannot be reached the caller falls back to upload-only.

export const EDITOR_URL =
  "https://embed.diagrams.net/?embed=1&proto=json&spin=1&libraries=0&noSaveBtn=1&noExitBtn=1";

export interface EditorCallbacks {
  onReady?: () => void;
  onSave?: (xml: string) => void;
  onAutosave?: (xml: string) => void;
  onUnreachable?: () => void;
}

interface LibraryEntry {
  xml: string;
  w: number;
  h: number;
  title: string;
}

/** Extract the JSON entry array from an mxlibrary document. */
export function parseStencilLibrary(libraryXml: string): LibraryEntry[] {
  const match = libraryXml.match(/<mxlibrary[^>]*>([\s\S]*)<\/mxlibrary>/);
  if (!match) {
    throw new Error("not a stencil library document");
  }
  const text = match[1]
    .replace(/&lt;/g, "<")
    .replace(/&gt;/g, ">")
    .replace(/&quot;/g, '"')
    .replace(/&amp;/g, "&");
  return JSON.parse(text) as LibraryEntry[];
}

export class DrawioEditor {
  private ready = false;
  private readyTimer: number | undefined;

  constructor(
    private iframe: HTMLIFrameElement,
    private callbacks: EditorCallbacks,
    private timeoutMs = 15000,
  ) {}

  start(initialXml: string | null, libraryXml: string | null): void {
    window.addEventListener("message", this.onMessage);
    this.readyTimer = window.setTimeout(() => {
      if (!this.ready) {
        this.callbacks.onUnreachable?.();
      }
    }, this.timeoutMs);
    this.iframe.src = EDITOR_URL;
    this.pendingXml = initialXml;
    this.pendingLibrary = libraryXml;
  }

  stop(): void {
    window.removeEventListener("message", this.onMessage);
    if (this.readyTimer !== undefined) {
      window.clearTimeout(this.readyTimer);
    }
  }

  requestExport(): void {
    this.post({ action: "export", format: "xml" });
  }

  private pendingXml: string | null = null;
  private pendingLibrary: string | null = null;

  private post(message: object): void {
    this.iframe.contentWindow?.postMessage(JSON.stringify(message), "*");
  }

  private onMessage = (event: MessageEvent): void => {
    if (event.source !== this.iframe.contentWindow || typeof event.data !== "string") {
      return;
    }
    let message: { event?: string; xml?: string };
    try {
      message = JSON.parse(event.data);
    } catch {
      return;
    }
    switch (message.event) {
      case "init": {
        this.ready = true;
        if (this.pendingLibrary !== null) {
          this.loadPalette(this.pendingLibrary);
        }
        this.post({ action: "load", xml: this.pendingXml ?? "", autosave: 1 });
        this.callbacks.onReady?.();
        break;
      }
      case "save":
        if (message.xml) {
          this.callbacks.onSave?.(message.xml);
        }
        // ask for the full file so multi-page state is preserved
        this.requestExport();
        break;
      case "autosave":
        if (message.xml) {
          this.callbacks.onAutosave?.(message.xml);
        }
        break;
      case "export":
        if (message.xml) {
          this.callbacks.onSave?.(message.xml);
        }
        break;
    }
  };

  private loadPalette(libraryXml: string): void {
    try {
      const entries = parseStencilLibrary(libraryXml);
      // best effort: editors that ignore the palette message still work,
      // users can import the same library via File > Open Library
      this.post({
        action: "configure",
        config: {
          libraries: [
            {
              title: { main: "AI Assets" },
              entries: [
                {
                  id: "tfai-assets",
                  title: { main: "AI Assets" },
                  desc: { main: "Annotated stencils from the loaded knowledge base" },
                  libs: [{ title: { main: "AI Assets" }, data: entries }],
                },
              ],
            },
          ],
        },
      });
    } catch (error) {
      console.warn("could not load stencil palette", error);
    }
  }
}
