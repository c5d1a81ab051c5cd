// Thin JSON transport over fetch.  Injectable so tests and the corpus
// generator run without a network; the service is the only backend.

export interface HttpReply {
  status: number;
  body: unknown;
}

export interface ServiceClient {
  get(path: string): Promise<HttpReply>;
  post(
    path: string,
    body: unknown,
    headers?: Record<string, string>,
  ): Promise<HttpReply>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export function httpClient(baseUrl: string, fetchImpl?: FetchLike): ServiceClient {
  const base = baseUrl.replace(/\/+$/, "");
  const doFetch: FetchLike = fetchImpl ?? ((input, init) => fetch(input, init));

  async function parse(resp: Response): Promise<HttpReply> {
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      body = null;
    }
    return { status: resp.status, body };
  }

  return {
    async get(path) {
      return parse(await doFetch(base + path));
    },
    async post(path, body, headers = {}) {
      return parse(
        await doFetch(base + path, {
          method: "POST",
          headers: { "content-type": "application/json", ...headers },
          body: body === null ? undefined : JSON.stringify(body),
        }),
      );
    },
  };
}
