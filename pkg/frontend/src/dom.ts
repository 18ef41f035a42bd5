// DOM rendering: the whole page re-renders from the controller state on
// every change, dashboard-style.

import type { GameEvent } from './api'
import type { SessionController } from './controller'
import { money, quickHeadsUpPreset, snapPreview } from './model'
import type { WizardForm } from './model'

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  if (className) node.className = className
  if (text !== undefined) node.textContent = text
  return node
}

function cardSpan(label: string): HTMLElement {
  const hidden = label === '**'
  const suit = label[1]
  const red = suit === 'h' || suit === 'd'
  const node = el('span', `card${hidden ? ' hidden-card' : red ? ' red' : ''}`)
  node.textContent = label
  return node
}

export function renderApp(root: HTMLElement, controller: SessionController): void {
  root.textContent = ''
  if (!controller.snapshot) {
    root.append(renderWizard(controller))
    return
  }
  root.append(renderTable(controller))
  root.append(renderControls(controller))
  root.append(renderAdvicePanel(controller))
  if (controller.lastError) {
    root.append(el('div', 'error-banner', controller.lastError))
  }
}

function readWizardForm(form: HTMLFormElement): WizardForm {
  const data = new FormData(form)
  const seats: { seat: number; stack: number }[] = []
  const seatsText = String(data.get('seats') || '')
  for (const part of seatsText.split(',')) {
    const [seatText, stackText] = part.trim().split(':')
    if (seatText) {
      seats.push({ seat: Number(seatText), stack: Number(stackText) })
    }
  }
  return {
    seats,
    smallBlind: Number(data.get('small_blind')),
    bigBlind: Number(data.get('big_blind')),
    dealerSeat: Number(data.get('dealer_seat')),
    heroSeat: Number(data.get('hero_seat')),
    heroCards: [
      String(data.get('card1') || '').trim(),
      String(data.get('card2') || '').trim(),
    ],
  }
}

function renderWizard(controller: SessionController): HTMLElement {
  const panel = el('section', 'panel wizard')
  panel.append(el('h2', undefined, 'New hand'))
  const form = el('form')
  form.innerHTML = `
    <label>Seats (seat:stack, ...)
      <input name="seats" value="2:3.94, 3:2.38, 5:5.54, 6:3.75, 7:4.22, 9:1.57">
    </label>
    <label>Small blind <input name="small_blind" value="0.02"></label>
    <label>Big blind <input name="big_blind" value="0.05"></label>
    <label>Dealer seat <input name="dealer_seat" value="9"></label>
    <label>My seat <input name="hero_seat" value="2"></label>
    <label>My cards
      <input name="card1" value="Th" size="3">
      <input name="card2" value="Ah" size="3">
    </label>
    <button type="submit">Start session</button>
    <button type="button" data-preset="hu">2-player preset</button>
    <ul class="form-errors"></ul>
  `
  const errorList = form.querySelector('.form-errors') as HTMLUListElement
  form.addEventListener('submit', (event) => {
    event.preventDefault()
    void controller.createSession(readWizardForm(form)).then((errors) => {
      errorList.textContent = ''
      for (const message of errors) {
        errorList.append(el('li', undefined, message))
      }
    })
  })
  const preset = form.querySelector('[data-preset="hu"]') as HTMLButtonElement
  preset.addEventListener('click', () => {
    const quick = quickHeadsUpPreset()
    ;(form.elements.namedItem('seats') as HTMLInputElement).value = quick.seats
      .map((s) => `${s.seat}:${s.stack}`)
      .join(', ')
    ;(form.elements.namedItem('small_blind') as HTMLInputElement).value = String(quick.smallBlind)
    ;(form.elements.namedItem('big_blind') as HTMLInputElement).value = String(quick.bigBlind)
    ;(form.elements.namedItem('dealer_seat') as HTMLInputElement).value = String(quick.dealerSeat)
    ;(form.elements.namedItem('hero_seat') as HTMLInputElement).value = String(quick.heroSeat)
    ;(form.elements.namedItem('card1') as HTMLInputElement).value = quick.heroCards[0]
    ;(form.elements.namedItem('card2') as HTMLInputElement).value = quick.heroCards[1]
  })
  panel.append(form)
  return panel
}

function renderTable(controller: SessionController): HTMLElement {
  const view = controller.table()!
  const panel = el('section', 'panel table')
  const head = el('div', 'table-head')
  head.append(el('span', 'stage', view.street))
  head.append(el('span', 'pot', `Pot ${view.pot}`))
  const rank = el('span', 'rank-badge', view.rankBadge)
  rank.dataset.role = 'rank-badge'
  head.append(rank)
  if (view.characteristics.length) {
    head.append(el('span', 'chars', view.characteristics.join(' · ')))
  }
  panel.append(head)

  const board = el('div', 'board')
  for (const slot of view.boardSlots) board.append(cardSpan(slot))
  panel.append(board)

  const seatList = el('div', 'seats')
  for (const seat of view.seats) {
    const row = el(
      'div',
      `seat-row${seat.isHero ? ' hero' : ''}${seat.folded ? ' folded' : ''}${seat.toAct ? ' to-act' : ''}`,
    )
    row.append(el('span', 'seat-no', `Seat ${seat.seat}`))
    const cards = el('span', 'seat-cards')
    cards.append(cardSpan(seat.cards[0]), cardSpan(seat.cards[1]))
    row.append(cards)
    row.append(el('span', 'stack', seat.stack))
    row.append(el('span', 'seat-actions', seat.actions))
    if (seat.allIn) row.append(el('span', 'flag', 'all-in'))
    if (seat.folded) row.append(el('span', 'flag', 'folded'))
    seatList.append(row)
  }
  panel.append(seatList)
  panel.append(el('div', 'status', view.statusLine))
  return panel
}

function renderControls(controller: SessionController): HTMLElement {
  const controls = controller.controls()!
  const panel = el('section', 'panel controls')
  panel.append(el('h2', undefined, 'Enter events'))

  if (controls.awaitingBoard) {
    const form = el('form', 'board-entry')
    const input = el('input')
    input.placeholder =
      controls.boardCardsNeeded === 3 ? 'e.g. 7h 4h 2h' : 'e.g. Ks'
    form.append(input, el('button', undefined, `Reveal ${controls.awaitingBoard}`))
    form.addEventListener('submit', (event) => {
      event.preventDefault()
      const cards = input.value.trim().split(/\s+/)
      void controller.sendEvent({ type: 'board', cards })
    })
    panel.append(form)
    return panel
  }

  if (controls.actingSeat === null) {
    panel.append(el('div', 'status', 'No action pending.'))
    return panel
  }

  panel.append(el('div', undefined, `Seat ${controls.actingSeat} to act`))
  const amountInput = el('input', 'amount-input')
  amountInput.placeholder = 'amount'
  const preview = el('span', 'snap-preview')
  amountInput.addEventListener('input', () => {
    const raw = Number(amountInput.value)
    preview.textContent =
      raw > 0 ? `snaps to ${money(snapPreview(raw, controls.menu))}` : ''
  })

  const buttons = el('div', 'action-buttons')
  for (const action of controls.enabled) {
    const button = el('button', 'action', action)
    button.dataset.action = action
    button.addEventListener('click', () => {
      const event: GameEvent = {
        type: 'action',
        seat: controls.actingSeat!,
        action,
      }
      if (controls.needsAmount.includes(action)) {
        event.amount = snapPreview(Number(amountInput.value), controls.menu)
      }
      void controller.sendEvent(event)
    })
    buttons.append(button)
  }
  panel.append(buttons)

  const menuRow = el('div', 'menu-row')
  for (const value of controls.menu) {
    const chip = el('button', 'menu-chip', money(value))
    chip.addEventListener('click', () => {
      amountInput.value = String(value)
      amountInput.dispatchEvent(new Event('input'))
    })
    menuRow.append(chip)
  }
  panel.append(menuRow)
  panel.append(amountInput, preview)
  return panel
}

function renderAdvicePanel(controller: SessionController): HTMLElement {
  const panel = el('section', 'panel advice')
  panel.append(el('h2', undefined, 'Advice'))
  const directive = el('input', 'directive')
  directive.placeholder = 'optional directive, e.g. Please be aggressive.'
  const ask = el('button', undefined, 'What should I do?')
  ask.addEventListener('click', () => {
    void controller.requestAdvice(directive.value.trim() || undefined)
  })
  panel.append(directive, ask)

  const advice = controller.lastAdvice
  if (advice) {
    const card = el(
      'div',
      `advice-card${advice.fallback ? ' fallback' : ''}`,
    )
    card.dataset.role = 'advice'
    card.append(el('strong', undefined, advice.headline))
    if (advice.fallback) card.append(el('span', 'flag', 'fallback'))
    card.append(el('span', 'latency', `${advice.latencyMs} ms`))
    const details = el('details')
    details.append(el('summary', undefined, 'prompt sent'))
    const pre = el('pre', 'prompt-text')
    pre.textContent = advice.prompt
    details.append(pre)
    card.append(details)
    panel.append(card)
  }
  return panel
}
