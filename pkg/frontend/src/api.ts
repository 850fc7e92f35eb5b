/** Typed fetch wrapper over the /api/v1 session endpoints. */
import { ApiError, SessionPayload, validateSession, validateWitnessList } from "./schema.js";

export class ServiceRejection extends Error {
  constructor(public readonly code: string, message: string, public readonly status: number) {
    super(message);
  }
}

async function request(path: string, init?: RequestInit): Promise<unknown> {
  const response = await fetch(path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const body = (await response.json().catch(() => ({}))) as Partial<ApiError>;
  if (!response.ok) {
    throw new ServiceRejection(body.code ?? "unknown_error", body.message ?? response.statusText, response.status);
  }
  return body;
}

export interface CreatedSession {
  id: string;
  status: unknown;
  relationSummary: unknown;
}

export async function createSession(payload: unknown): Promise<CreatedSession> {
  return (await request("/api/v1/session", { method: "POST", body: JSON.stringify(payload) })) as CreatedSession;
}

export async function fetchSession(id: string): Promise<SessionPayload> {
  return validateSession(await request(`/api/v1/session/${encodeURIComponent(id)}`));
}

export async function postMove(id: string, move: unknown): Promise<SessionPayload> {
  return validateSession(
    await request(`/api/v1/session/${encodeURIComponent(id)}/move`, {
      method: "POST",
      body: JSON.stringify(move),
    }),
  );
}

export async function fetchWitnesses(id: string, side: string, quantifier: string): Promise<string[][][]> {
  const query = new URLSearchParams({ side, quantifier });
  return validateWitnessList(await request(`/api/v1/session/${encodeURIComponent(id)}/witnesses?${query}`));
}
