/** Thin typed client over the HTTP API. Every method returns the parsed
 * body; non-2xx responses throw an ApiError carrying the server's error
 * envelope so views can show its kind and message verbatim.
 */

import type {
  CompetitorsResponse,
  ErrorBody,
  ForecastWire,
  HealthResponse,
  JobResponse,
  ModelKind,
  ProductDetail,
  ProductsResponse,
  PromotionsResponse,
  SalesResponse,
  ScenarioRequest,
  WhatIfResponse,
} from "./wire.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let body: ErrorBody | null = null;
      try {
        body = (await response.json()) as ErrorBody;
      } catch {
        // non-JSON error page; fall through to the generic error
      }
      if (body?.error) {
        throw new ApiError(body.error.status, body.error.kind, body.error.message);
      }
      throw new ApiError(response.status, "HttpError", `request failed: ${path}`);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<HealthResponse> {
    return this.request("/health");
  }

  products(): Promise<ProductsResponse> {
    return this.request("/products");
  }

  product(id: string): Promise<ProductDetail> {
    return this.request(`/products/${encodeURIComponent(id)}`);
  }

  sales(id: string, from?: string, to?: string): Promise<SalesResponse> {
    const query = new URLSearchParams();
    if (from) query.set("from", from);
    if (to) query.set("to", to);
    const suffix = query.size > 0 ? `?${query}` : "";
    return this.request(`/products/${encodeURIComponent(id)}/sales${suffix}`);
  }

  promotions(id: string): Promise<PromotionsResponse> {
    return this.request(`/products/${encodeURIComponent(id)}/promotions`);
  }

  competitors(id: string, k = 5): Promise<CompetitorsResponse> {
    return this.request(`/products/${encodeURIComponent(id)}/competitors?k=${k}`);
  }

  /** Kick off async training; poll the returned job until done. */
  train(modelKind: ModelKind, config?: Record<string, unknown>): Promise<JobResponse> {
    return this.post("/train", { model_kind: modelKind, config: config ?? {} });
  }

  job(jobId: string): Promise<JobResponse> {
    return this.request(`/jobs/${encodeURIComponent(jobId)}`);
  }

  async waitForJob(jobId: string, pollMs = 250, timeoutMs = 120_000): Promise<JobResponse> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.job(jobId);
      if (job.status === "done" || job.status === "error") return job;
      if (Date.now() > deadline) {
        throw new ApiError(504, "JobTimeout", `job ${jobId} still ${job.status}`);
      }
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }

  predict(
    productId: string,
    start: string,
    end: string,
    modelKind: ModelKind,
  ): Promise<ForecastWire> {
    return this.post("/predict", {
      product_id: productId,
      horizon: { start, end },
      model_kind: modelKind,
    });
  }

  whatIf(scenario: ScenarioRequest): Promise<WhatIfResponse> {
    return this.post("/whatif", scenario);
  }
}
