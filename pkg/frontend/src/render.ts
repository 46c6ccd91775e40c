// DOM rendering for the three panels: probability, heatmap overlay, and the
// two contrasting-neighbor galleries. Values are displayed exactly as the
// service sent them; nothing is recomputed client-side.

import { ExplainResponse, NeighborCard } from './api'

export function formatProbability(p: number): string {
  return `${(p * 100).toFixed(2)}%`
}

export function renderProbability(container: HTMLElement, response: ExplainResponse): void {
  container.textContent = ''
  const value = document.createElement('span')
  value.className = 'probability-value'
  value.textContent = formatProbability(response.tap_probability)
  const verdict = document.createElement('span')
  verdict.className = 'probability-verdict'
  verdict.textContent = response.decision ? 'likely tappable' : 'likely not tappable'
  container.append(value, verdict)
}

export function renderOverlay(
  container: HTMLElement,
  response: ExplainResponse,
  opacity: number,
): void {
  container.textContent = ''
  const img = document.createElement('img')
  img.className = 'heatmap-overlay'
  // server-rendered PNG, composited with adjustable opacity
  img.src = `data:image/png;base64,${response.heatmap_overlay_png}`
  img.style.opacity = String(Math.min(Math.max(opacity, 0), 1))
  container.append(img)
}

function neighborColumn(title: string, cards: NeighborCard[], baseUrl: string): HTMLElement {
  const column = document.createElement('div')
  column.className = 'neighbor-column'
  const heading = document.createElement('h3')
  heading.textContent = title
  column.append(heading)
  // most similar on top
  const sorted = [...cards].sort((a, b) => a.distance - b.distance)
  for (const card of sorted) {
    const el = document.createElement('div')
    el.className = 'neighbor-card'
    const shot = document.createElement('img')
    shot.className = 'neighbor-screenshot'
    if (card.thumbnail_refs.screenshot) {
      shot.src = baseUrl + card.thumbnail_refs.screenshot
    }
    const crop = document.createElement('img')
    crop.className = 'neighbor-crop'
    if (card.thumbnail_refs.crop) {
      crop.src = baseUrl + card.thumbnail_refs.crop
    }
    const caption = document.createElement('div')
    caption.className = 'neighbor-caption'
    caption.textContent = `${card.element_ref.join('/')} · d=${card.distance.toFixed(3)}`
    el.append(shot, crop, caption)
    column.append(el)
  }
  return column
}

export function renderNeighbors(
  container: HTMLElement,
  response: ExplainResponse,
  baseUrl = '',
): void {
  container.textContent = ''
  if (!response.neighbors_available || response.neighbors === null) {
    const notice = document.createElement('p')
    notice.className = 'neighbors-notice'
    notice.textContent = 'No example index is loaded; contrasting examples are unavailable.'
    container.append(notice)
    return
  }
  container.append(
    neighborColumn('Tappable examples', response.neighbors.tappable, baseUrl),
    neighborColumn('Non-tappable examples', response.neighbors.non_tappable, baseUrl),
  )
}

export function renderError(
  container: HTMLElement,
  error: { status: number; message: string },
  onRetry: () => void,
): void {
  container.textContent = ''
  const note = document.createElement('p')
  note.className = 'error-message'
  note.textContent = error.status > 0 ? `${error.status}: ${error.message}` : error.message
  const retry = document.createElement('button')
  retry.className = 'error-retry'
  retry.textContent = 'Retry'
  retry.addEventListener('click', onRetry)
  container.append(note, retry)
}

/** All three panels update from one response, so they can never disagree. */
export function renderPanels(
  panels: { probability: HTMLElement; overlay: HTMLElement; neighbors: HTMLElement },
  response: ExplainResponse,
  opacity: number,
  baseUrl = '',
): void {
  renderProbability(panels.probability, response)
  renderOverlay(panels.overlay, response, opacity)
  renderNeighbors(panels.neighbors, response, baseUrl)
}
