import { AdvisorClient } from './api'
import { SessionController } from './controller'
import { renderApp } from './dom'

const client = new AdvisorClient('')
const controller = new SessionController(client)

window.addEventListener('DOMContentLoaded', () => {
  const root = document.getElementById('app')!
  controller.onChange(() => renderApp(root, controller))
  renderApp(root, controller)
  controller.startPolling(1000)
})
