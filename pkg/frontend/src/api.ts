// HTTP client for the inference service. The UI talks only over these
// endpoints; there is no build-time coupling to the backend.

export interface RandomSample {
  id: string;
  layout: unknown;
  image_png_base64: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class Api {
  constructor(readonly baseUrl: string = "") {}

  async health(): Promise<boolean> {
    try {
      const res = await fetch(`${this.baseUrl}/healthz`);
      return res.ok;
    } catch {
      return false;
    }
  }

  async infer(layoutJson: string): Promise<Blob> {
    const res = await fetch(`${this.baseUrl}/api/infer`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: layoutJson,
    });
    if (!res.ok) {
      const message = await this.errorMessage(res);
      throw new ApiError(res.status, message);
    }
    return res.blob();
  }

  async random(): Promise<RandomSample> {
    const res = await fetch(`${this.baseUrl}/api/random`);
    if (!res.ok) {
      throw new ApiError(res.status, await this.errorMessage(res));
    }
    return (await res.json()) as RandomSample;
  }

  private async errorMessage(res: Response): Promise<string> {
    try {
      const body = (await res.json()) as { error?: string; path?: string };
      if (body.error) {
        return body.path ? `${body.path}: ${body.error}` : body.error;
      }
    } catch {
      // fall through to the status line
    }
    return `request failed with status ${res.status}`;
  }
}
