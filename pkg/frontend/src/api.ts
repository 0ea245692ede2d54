// Thin client for the backend /api endpoints.

import { ThreatReport } from "./types.js";

export interface AnalyzeResult {
  report: ThreatReport;
  hasWarnings: boolean;
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function raiseApiError(response: Response): Promise<never> {
  let code = `http-${response.status}`;
  let message = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(code, message);
}

export class TfaiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private url(path: string, params: Record<string, string>): string {
    const query = new URLSearchParams(params).toString();
    return `${this.baseUrl}${path}${query ? "?" + query : ""}`;
  }

  async analyze(
    diagramXml: string,
    objectives: string[],
    annotationKey: string,
  ): Promise<AnalyzeResult> {
    const response = await this.fetchFn(
      this.url("/api/analyze", {
        objectives: objectives.join(","),
        annotation_key: annotationKey,
      }),
      {
        method: "POST",
        headers: { "content-type": "application/xml" },
        body: diagramXml,
      },
    );
    // 422 means the analysis succeeded but carries warnings
    if (response.status !== 200 && response.status !== 422) {
      await raiseApiError(response);
    }
    const report = (await response.json()) as ThreatReport;
    return { report, hasWarnings: response.status === 422 };
  }

  /** Server-side rendering of the same diagram, for the export buttons. */
  async analyzeRendered(
    diagramXml: string,
    objectives: string[],
    annotationKey: string,
    format: "markdown" | "html",
  ): Promise<string> {
    const response = await this.fetchFn(
      this.url("/api/analyze", {
        objectives: objectives.join(","),
        annotation_key: annotationKey,
        format,
      }),
      {
        method: "POST",
        headers: { "content-type": "application/xml" },
        body: diagramXml,
      },
    );
    if (response.status !== 200 && response.status !== 422) {
      await raiseApiError(response);
    }
    return response.text();
  }

  async stencilLibrary(): Promise<string> {
    const response = await this.fetchFn(this.url("/api/stencils", {}));
    if (!response.ok) {
      await raiseApiError(response);
    }
    return response.text();
  }

  async kbSummary(): Promise<unknown> {
    const response = await this.fetchFn(this.url("/api/kb", {}));
    if (!response.ok) {
      await raiseApiError(response);
    }
    return response.json();
  }

  async health(): Promise<{ status: string; version: string; kb_provenance: string }> {
    const response = await this.fetchFn(this.url("/api/health", {}));
    if (!response.ok) {
      await raiseApiError(response);
    }
    return response.json();
  }
}
