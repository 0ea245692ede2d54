// Session persistence: the current diagram, objective selection, and last
// report survive reloads via browser storage (key tfai.session.v1).

import { ThreatReport, isObjective } from "./types.js";

export const STORAGE_KEY = "tfai.session.v1";
export const DEFAULT_ANNOTATION_KEY = "tfai_asset";

export interface SessionState {
  currentDiagram: string | null;
  selectedObjectives: string[];
  lastReport: ThreatReport | null;
  annotationKey: string;
}

export function emptySession(): SessionState {
  return {
    currentDiagram: null,
    selectedObjectives: [],
    lastReport: null,
    annotationKey: DEFAULT_ANNOTATION_KEY,
  };
}

// Minimal Storage surface so tests can pass an in-memory stub.
export interface KeyValueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class SessionStore {
  constructor(private storage: KeyValueStorage) {}

  load(): SessionState {
    let raw: string | null = null;
    try {
      raw = this.storage.getItem(STORAGE_KEY);
    } catch {
      return emptySession();
    }
    if (!raw) {
      return emptySession();
    }
    try {
      const parsed = JSON.parse(raw) as Partial<SessionState>;
      return {
        currentDiagram: typeof parsed.currentDiagram === "string" ? parsed.currentDiagram : null,
        selectedObjectives: Array.isArray(parsed.selectedObjectives)
          ? parsed.selectedObjectives.filter(isObjective)
          : [],
        lastReport: parsed.lastReport ?? null,
        annotationKey:
          typeof parsed.annotationKey === "string" && parsed.annotationKey !== ""
            ? parsed.annotationKey
            : DEFAULT_ANNOTATION_KEY,
      };
    } catch {
      return emptySession();
    }
  }

  save(state: SessionState): void {
    try {
      this.storage.setItem(STORAGE_KEY, JSON.stringify(state));
    } catch (error) {
      console.warn("failed to persist session", error);
    }
  }

  /** Apply a partial change and persist immediately. */
  update(state: SessionState, change: Partial<SessionState>): SessionState {
    const next = { ...state, ...change };
    this.save(next);
    return next;
  }

  clear(): void {
    try {
      this.storage.removeItem(STORAGE_KEY);
    } catch {
      // storage unavailable; nothing to clear
    }
  }
}
