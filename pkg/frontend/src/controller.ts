// Session controller: owns the latest snapshot, polls the server once a
// second, de-duplicates in-flight requests per endpoint, and refuses to
// send inputs the latest snapshot marks illegal.

import { AdvisorClient, ApiError } from './api'
import type { CreateSessionRequest, GameEvent, Snapshot } from './api'
import {
  buildActionControls,
  buildAdviceView,
  buildTableView,
  validateWizard,
} from './model'
import type { ActionControls, AdviceView, TableView, WizardForm } from './model'

export type Listener = () => void

export class SessionController {
  snapshot: Snapshot | null = null
  constantBlock = ''
  lastError = ''
  lastAdvice: AdviceView | null = null
  private listeners: Listener[] = []
  private inFlight = new Map<string, Promise<unknown>>()
  private pollTimer: ReturnType<typeof setInterval> | null = null

  constructor(
    private client: AdvisorClient,
    private now: () => number = () => Date.now(),
  ) {}

  get sessionId(): string | null {
    return this.snapshot?.session_id ?? null
  }

  onChange(listener: Listener): void {
    this.listeners.push(listener)
  }

  private emit(): void {
    for (const listener of this.listeners) listener()
  }

  private accept(snapshot: Snapshot): void {
    // the server is authoritative: reconcile on every response
    this.snapshot = snapshot
    this.emit()
  }

  // one request per key at a time; concurrent callers share the promise
  private dedupe<T>(key: string, run: () => Promise<T>): Promise<T> {
    const existing = this.inFlight.get(key)
    if (existing) return existing as Promise<T>
    const promise = run().finally(() => this.inFlight.delete(key))
    this.inFlight.set(key, promise)
    return promise
  }

  async createSession(form: WizardForm): Promise<string[]> {
    const errors = validateWizard(form)
    if (errors.length) return errors // no request for invalid input
    const req: CreateSessionRequest = {
      players: form.seats.map((s) => ({ seat: s.seat, stack: s.stack })),
      blinds: { small: form.smallBlind, big: form.bigBlind },
      dealer_seat: form.dealerSeat,
      hero_seat: form.heroSeat,
      hero_cards: form.heroCards,
    }
    try {
      const created = await this.dedupe('create', () => this.client.createSession(req))
      this.constantBlock = created.constant_block
      this.lastError = ''
      this.accept(created.state)
      return []
    } catch (err) {
      return [this.describeError(err)]
    }
  }

  table(): TableView | null {
    return this.snapshot ? buildTableView(this.snapshot) : null
  }

  controls(): ActionControls | null {
    return this.snapshot ? buildActionControls(this.snapshot) : null
  }

  canSend(event: GameEvent): boolean {
    const snap = this.snapshot
    if (!snap || snap.terminal) return false
    if (event.type === 'board') return snap.awaiting_board !== null
    if (snap.awaiting_board) return false
    if (event.type === 'action') {
      return snap.to_act === event.seat && snap.legal_actions.includes(event.action)
    }
    return event.seat !== snap.hero_seat // shows allowed any time for others
  }

  async sendEvent(event: GameEvent): Promise<boolean> {
    if (!this.sessionId) return false
    if (!this.canSend(event)) {
      this.lastError = 'that input is not legal right now'
      this.emit()
      return false
    }
    try {
      const snapshot = await this.dedupe('event', () =>
        this.client.postEvent(this.sessionId!, event),
      )
      this.lastError = ''
      this.accept(snapshot)
      return true
    } catch (err) {
      this.lastError = this.describeError(err)
      await this.refresh()
      return false
    }
  }

  async requestAdvice(directive?: string): Promise<AdviceView | null> {
    if (!this.sessionId) return null
    const started = this.now()
    try {
      const advice = await this.dedupe('advice', () =>
        this.client.getAdvice(this.sessionId!, directive),
      )
      this.lastError = ''
      this.lastAdvice = buildAdviceView(advice, this.now() - started)
      this.emit()
      return this.lastAdvice
    } catch (err) {
      this.lastError = this.describeError(err)
      this.emit()
      return null
    }
  }

  async refresh(): Promise<void> {
    if (!this.sessionId) return
    try {
      const snapshot = await this.dedupe('state', () =>
        this.client.getState(this.sessionId!),
      )
      this.accept(snapshot)
    } catch {
      // transient poll failures keep the last good snapshot
    }
  }

  startPolling(intervalMs = 1000): void {
    this.stopPolling()
    this.pollTimer = setInterval(() => void this.refresh(), intervalMs)
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer)
      this.pollTimer = null
    }
  }

  private describeError(err: unknown): string {
    if (err instanceof ApiError) {
      return err.body.violated_rule
        ? `${err.body.message} (rule: ${err.body.violated_rule})`
        : err.body.message
    }
    return err instanceof Error ? err.message : String(err)
  }
}
