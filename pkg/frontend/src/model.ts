// Pure view-model builders: snapshots in, render-ready structures out.
// No rule logic here beyond input affordances; the server stays
// authoritative for legality.

import type { Snapshot, SeatState } from './api'

export interface SeatView {
  seat: number
  name: string
  stack: string
  folded: boolean
  allIn: boolean
  isHero: boolean
  toAct: boolean
  actions: string
  cards: [string, string]
}

export interface TableView {
  street: string
  pot: string
  boardSlots: string[]
  heroCards: string[]
  rankBadge: string
  characteristics: string[]
  seats: SeatView[]
  statusLine: string
  terminal: boolean
}

export interface ActionControls {
  enabled: string[]
  needsAmount: string[]
  callAmount: number
  minRaiseTo: number
  menu: number[]
  actingSeat: number | null
  awaitingBoard: string | null
  boardCardsNeeded: number
}

export interface AdviceView {
  action: string
  amount: number
  headline: string
  fallback: boolean
  prompt: string
  latencyMs: number
}

export function money(value: number): string {
  // trim trailing zeros the way the prompts do: 1 -> "1", 0.30 -> "0.3"
  return String(Math.round(value * 100) / 100)
}

export function cardSlots(board: string[]): string[] {
  const slots = board.slice(0, 5)
  while (slots.length < 5) slots.push('**')
  return slots
}

function seatCards(seat: SeatState, heroCards: string[], isHero: boolean): [string, string] {
  if (isHero) return [heroCards[0] ?? '**', heroCards[1] ?? '**']
  return [(seat.shown[0] ?? '**') as string, (seat.shown[1] ?? '**') as string]
}

export function buildTableView(snap: Snapshot): TableView {
  const seats = snap.seats.map((seat) => {
    const isHero = seat.seat === snap.hero_seat
    return {
      seat: seat.seat,
      name: seat.name,
      stack: money(seat.stack),
      folded: seat.folded,
      allIn: seat.all_in,
      isHero,
      toAct: snap.to_act === seat.seat,
      actions: seat.actions.join(', '),
      cards: seatCards(seat, snap.hero_cards, isHero),
    }
  })
  let statusLine: string
  if (snap.terminal) {
    statusLine = 'The hand is over.'
  } else if (snap.awaiting_board) {
    statusLine = `Enter the ${snap.awaiting_board} card(s)`
  } else if (snap.to_act === snap.hero_seat) {
    statusLine = 'Your turn'
  } else {
    statusLine = `Waiting on seat ${snap.to_act}`
  }
  return {
    street: snap.street,
    pot: money(snap.pot),
    boardSlots: cardSlots(snap.board),
    heroCards: snap.hero_cards,
    rankBadge: snap.hero_rank,
    characteristics: snap.characteristics,
    seats,
    statusLine,
    terminal: snap.terminal,
  }
}

const AMOUNT_ACTIONS = ['bet', 'raise']

export function buildActionControls(snap: Snapshot): ActionControls {
  const boardCardsNeeded =
    snap.awaiting_board === 'FLOP' ? 3 : snap.awaiting_board ? 1 : 0
  return {
    enabled: snap.terminal || snap.awaiting_board ? [] : snap.legal_actions,
    needsAmount: snap.legal_actions.filter((a) => AMOUNT_ACTIONS.includes(a)),
    callAmount: snap.call_amount,
    minRaiseTo: snap.min_raise_to,
    menu: snap.amount_menu,
    actingSeat: snap.terminal ? null : snap.to_act,
    awaitingBoard: snap.awaiting_board,
    boardCardsNeeded,
  }
}

// Client-side preview of the server's round-up rule; the server snap is
// still authoritative when the event lands.
export function snapPreview(amount: number, menu: number[]): number {
  for (const value of menu) {
    if (value >= amount - 1e-9) return value
  }
  return menu.length ? menu[menu.length - 1] : amount
}

export interface WizardForm {
  seats: { seat: number; stack: number }[]
  smallBlind: number
  bigBlind: number
  dealerSeat: number
  heroSeat: number
  heroCards: [string, string]
}

const CARD_RE = /^[2-9TJQKA][cdhs]$/

export function validateWizard(form: WizardForm): string[] {
  const errors: string[] = []
  if (form.seats.length < 2 || form.seats.length > 15) {
    errors.push('between 2 and 15 players')
  }
  const seatNumbers = form.seats.map((s) => s.seat)
  if (new Set(seatNumbers).size !== seatNumbers.length) {
    errors.push('seat numbers must be unique')
  }
  if (form.seats.some((s) => !(s.stack > 0))) {
    errors.push('every stack must be positive')
  }
  if (!(form.smallBlind > 0) || !(form.bigBlind > form.smallBlind)) {
    errors.push('blinds must satisfy 0 < small < big')
  }
  if (!seatNumbers.includes(form.dealerSeat)) {
    errors.push('dealer must sit at an occupied seat')
  }
  if (!seatNumbers.includes(form.heroSeat)) {
    errors.push('hero must sit at an occupied seat')
  }
  for (const card of form.heroCards) {
    if (!CARD_RE.test(card)) {
      errors.push(`bad card label '${card}'`)
    }
  }
  if (form.heroCards[0] === form.heroCards[1] && CARD_RE.test(form.heroCards[0])) {
    errors.push('hero cards must differ')
  }
  return errors
}

export function quickHeadsUpPreset(): WizardForm {
  return {
    seats: [
      { seat: 1, stack: 5 },
      { seat: 2, stack: 5 },
    ],
    smallBlind: 0.02,
    bigBlind: 0.05,
    dealerSeat: 1,
    heroSeat: 1,
    heroCards: ['Ah', 'Kh'],
  }
}

export function buildAdviceView(
  advice: { action: string; amount: number; rationale_text: string; fallback: boolean; prompt_used: string },
  latencyMs: number,
): AdviceView {
  const amountText = advice.amount > 0 ? ` to ${money(advice.amount)}` : ''
  const headline = advice.fallback
    ? `advisor unavailable — safe suggestion: ${advice.action}`
    : `${advice.action}${amountText}`
  return {
    action: advice.action,
    amount: advice.amount,
    headline,
    fallback: advice.fallback,
    prompt: advice.prompt_used,
    latencyMs: Math.round(latencyMs),
  }
}
