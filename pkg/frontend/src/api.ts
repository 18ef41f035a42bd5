// Typed client for the advisor service /v1 JSON API.

export interface SeatState {
  seat: number
  name: string
  stack: number
  folded: boolean
  all_in: boolean
  actions: string[]
  shown: (string | null)[]
}

export interface Snapshot {
  session_id: string
  street: string
  phase: string
  terminal: boolean
  pot: number
  board: string[]
  hero_seat: number
  hero_cards: string[]
  hero_rank: string
  characteristics: string[]
  seats: SeatState[]
  to_act: number | null
  awaiting_board: string | null
  legal_actions: string[]
  call_amount: number
  min_raise_to: number
  amount_menu: number[]
  event_count: number
}

export interface CreateSessionRequest {
  players: { seat: number; stack: number; name?: string }[]
  blinds: { small: number; big: number; currency?: string }
  dealer_seat: number
  hero_seat: number
  hero_cards: string[]
  advisor?: string
}

export interface CreateSessionResponse {
  session_id: string
  constant_block: string
  state: Snapshot
}

export type GameEvent =
  | { type: 'action'; seat: number; action: string; amount?: number }
  | { type: 'board'; cards: string[] }
  | { type: 'show'; seat: number; cards: (string | null)[] }

export interface Advice {
  action: string
  amount: number
  prompt_used: string
  rationale_text: string
  fallback: boolean
}

export interface ApiErrorBody {
  code: string
  message: string
  violated_rule?: string
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(body.message)
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(base + path, {
    headers: { 'Content-Type': 'application/json' },
    ...init,
  })
  const body = await res.json()
  if (!res.ok) {
    throw new ApiError(res.status, body as ApiErrorBody)
  }
  return body as T
}

export class AdvisorClient {
  constructor(private base: string = '') {}

  createSession(req: CreateSessionRequest): Promise<CreateSessionResponse> {
    return request(this.base, '/v1/sessions', {
      method: 'POST',
      body: JSON.stringify(req),
    })
  }

  getState(sessionId: string): Promise<Snapshot> {
    return request(this.base, `/v1/sessions/${sessionId}`)
  }

  postEvent(sessionId: string, event: GameEvent): Promise<Snapshot> {
    return request(this.base, `/v1/sessions/${sessionId}/events`, {
      method: 'POST',
      body: JSON.stringify(event),
    })
  }

  getPrompt(sessionId: string): Promise<{ prompt: string }> {
    return request(this.base, `/v1/sessions/${sessionId}/prompt`)
  }

  getAdvice(sessionId: string, directive?: string): Promise<Advice> {
    return request(this.base, `/v1/sessions/${sessionId}/advice`, {
      method: 'POST',
      body: JSON.stringify(directive ? { directive } : {}),
    })
  }
}
