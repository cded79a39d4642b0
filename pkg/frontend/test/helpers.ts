// Test helpers: a fetch stub that serves captured service responses and
// records every request it sees.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", `${name}.json`), "utf-8")) as T;
}

export interface SeenRequest {
  path: string;
  body: any;
}

export type Responder = (path: string, body: any) => unknown;

export function fakeFetch(responder: Responder) {
  const seen: SeenRequest[] = [];
  const fn = async (input: string, init?: RequestInit): Promise<Response> => {
    const path = new URL(input, "http://test").pathname;
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    seen.push({ path, body });
    const payload = responder(path, body);
    return new Response(JSON.stringify(payload), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  };
  return { fn, seen };
}
