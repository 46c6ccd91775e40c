// Browser entry point: wires the canvas, option panel, and result panels to
// the session state machine. Everything testable lives in the other modules.

import { Session } from './session'
import { DragState, canvasToImage, finishDrag } from './selection'
import { renderError, renderPanels } from './render'

const SERVICE_URL = ''

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id)
  if (!el) throw new Error(`missing element #${id}`)
  return el as T
}

function drawSelection(canvas: HTMLCanvasElement, image: HTMLImageElement, drag: DragState | null) {
  const ctx = canvas.getContext('2d')
  if (!ctx) return
  ctx.clearRect(0, 0, canvas.width, canvas.height)
  ctx.drawImage(image, 0, 0, canvas.width, canvas.height)
  if (drag) {
    // dashed magenta outline around the current selection
    ctx.strokeStyle = 'magenta'
    ctx.setLineDash([6, 4])
    ctx.strokeRect(
      Math.min(drag.startX, drag.currentX),
      Math.min(drag.startY, drag.currentY),
      Math.abs(drag.currentX - drag.startX),
      Math.abs(drag.currentY - drag.startY),
    )
  }
}

export function bootstrap(): void {
  const session = new Session(SERVICE_URL)
  const canvas = byId<HTMLCanvasElement>('screenshot-canvas')
  const fileInput = byId<HTMLInputElement>('image-file')
  const runButton = byId<HTMLButtonElement>('run-explain')
  const opacitySlider = byId<HTMLInputElement>('opacity-slider')
  const stepsInput = byId<HTMLInputElement>('steps-input')
  const panels = {
    probability: byId<HTMLElement>('probability-panel'),
    overlay: byId<HTMLElement>('overlay-panel'),
    neighbors: byId<HTMLElement>('neighbors-panel'),
  }
  const errorPanel = byId<HTMLElement>('error-panel')
  const image = new Image()
  let drag: DragState | null = null

  fileInput.addEventListener('change', () => {
    const file = fileInput.files?.[0]
    if (!file) return
    const reader = new FileReader()
    reader.onload = () => {
      const dataUrl = reader.result as string
      image.onload = () => {
        session.loadImage(dataUrl.split(',')[1], image.naturalWidth, image.naturalHeight)
        drawSelection(canvas, image, null)
      }
      image.src = dataUrl
    }
    reader.readAsDataURL(file)
  })

  canvas.addEventListener('mousedown', (ev) => {
    const p = canvasToImage(ev.offsetX, ev.offsetY, canvas.width, canvas.height,
      session.state.imageWidth, session.state.imageHeight)
    drag = { startX: p.x, startY: p.y, currentX: p.x, currentY: p.y }
  })
  canvas.addEventListener('mousemove', (ev) => {
    if (!drag) return
    const p = canvasToImage(ev.offsetX, ev.offsetY, canvas.width, canvas.height,
      session.state.imageWidth, session.state.imageHeight)
    drag.currentX = p.x
    drag.currentY = p.y
    drawSelection(canvas, image, drag)
  })
  canvas.addEventListener('mouseup', () => {
    if (!drag) return
    session.setSelection(finishDrag(drag, session.state.imageWidth, session.state.imageHeight))
    drag = null
  })

  runButton.addEventListener('click', () => void session.runExplain())
  opacitySlider.addEventListener('input', () => {
    session.state.options.heatmapOpacity = Number(opacitySlider.value)
    if (session.state.lastResponse) {
      renderPanels(panels, session.state.lastResponse, session.state.options.heatmapOpacity)
    }
  })
  stepsInput.addEventListener('change', () => {
    session.state.options.steps = Number(stepsInput.value)
  })

  session.onChange((state) => {
    runButton.disabled = !session.canExplain() || state.inFlight
    errorPanel.textContent = ''
    if (state.lastError) {
      renderError(errorPanel, state.lastError, () => void session.runExplain())
    } else if (state.lastResponse) {
      renderPanels(panels, state.lastResponse, state.options.heatmapOpacity, SERVICE_URL)
    }
  })
}

if (typeof document !== 'undefined' && document.getElementById('screenshot-canvas')) {
  bootstrap()
}
