/** Transport seam between the store and the HTTP API; tests install fakes. */
export interface Transport {
  get(path: string): Promise<unknown>;
  post(path: string, body: unknown): Promise<unknown>;
}

/** Error body the server returns for every non-2xx response. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parse(response: Response): Promise<unknown> {
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const err = (body ?? {}) as { code?: string; message?: string };
    throw new ApiError(
      response.status,
      err.code ?? 'unknown',
      err.message ?? `request failed with status ${response.status}`,
    );
  }
  return body;
}

export class HttpTransport implements Transport {
  constructor(private readonly base: string = '') {}

  async get(path: string): Promise<unknown> {
    return parse(await fetch(this.base + path));
  }

  async post(path: string, body: unknown): Promise<unknown> {
    return parse(
      await fetch(this.base + path, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(body),
      }),
    );
  }
}
