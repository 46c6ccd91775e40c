// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from 'vitest'

import {
  formatProbability,
  renderError,
  renderNeighbors,
  renderOverlay,
  renderPanels,
  renderProbability,
} from '../src/render'
import { cannedResponse } from './fixtures'

let container: HTMLElement

beforeEach(() => {
  container = document.createElement('div')
  document.body.replaceChildren(container)
})

describe('probability panel', () => {
  it('formats as a percentage with two decimals, no recomputation', () => {
    expect(formatProbability(0.8731)).toBe('87.31%')
    expect(formatProbability(0.5)).toBe('50.00%')
    expect(formatProbability(1)).toBe('100.00%')
  })

  it('renders the service value and the decision', () => {
    renderProbability(container, cannedResponse())
    expect(container.querySelector('.probability-value')?.textContent).toBe('87.31%')
    expect(container.querySelector('.probability-verdict')?.textContent).toBe('likely tappable')
  })
})

describe('overlay panel', () => {
  it('uses the server PNG with the requested opacity', () => {
    renderOverlay(container, cannedResponse(), 0.35)
    const img = container.querySelector('img.heatmap-overlay') as HTMLImageElement
    expect(img.src.startsWith('data:image/png;base64,')).toBe(true)
    expect(img.style.opacity).toBe('0.35')
  })

  it('clamps opacity into [0, 1]', () => {
    renderOverlay(container, cannedResponse(), 3)
    const img = container.querySelector('img.heatmap-overlay') as HTMLImageElement
    expect(img.style.opacity).toBe('1')
  })
})

describe('neighbor galleries', () => {
  it('renders two columns of five cards each', () => {
    renderNeighbors(container, cannedResponse())
    const columns = container.querySelectorAll('.neighbor-column')
    expect(columns.length).toBe(2)
    for (const column of columns) {
      expect(column.querySelectorAll('.neighbor-card').length).toBe(5)
    }
  })

  it('sorts each column ascending by distance (most similar on top)', () => {
    renderNeighbors(container, cannedResponse())
    const left = container.querySelectorAll('.neighbor-column')[0]
    const captions = [...left.querySelectorAll('.neighbor-caption')].map(
      (el) => el.textContent ?? '',
    )
    const dists = captions.map((c) => Number(c.split('d=')[1]))
    expect(dists).toEqual([...dists].sort((a, b) => a - b))
    expect(captions[0]).toContain('screen/t1')
  })

  it('each card shows the full screenshot and the enlarged region crop', () => {
    renderNeighbors(container, cannedResponse(), 'http://svc')
    const card = container.querySelector('.neighbor-card') as HTMLElement
    const shot = card.querySelector('.neighbor-screenshot') as HTMLImageElement
    const crop = card.querySelector('.neighbor-crop') as HTMLImageElement
    expect(shot.src).toContain('http://svc/api/corpus/thumbnail?id=screen')
    expect(crop.src).toContain('element=')
  })

  it('replaces the columns with a notice when no index is loaded', () => {
    renderNeighbors(
      container,
      cannedResponse({ neighbors_available: false, neighbors: null }),
    )
    expect(container.querySelectorAll('.neighbor-column').length).toBe(0)
    expect(container.querySelector('.neighbors-notice')?.textContent).toContain('unavailable')
  })
})

describe('error panel', () => {
  it('shows the status and message inline with a retry button', () => {
    let retried = false
    renderError(container, { status: 503, message: 'no checkpoint' }, () => {
      retried = true
    })
    expect(container.querySelector('.error-message')?.textContent).toBe('503: no checkpoint')
    ;(container.querySelector('.error-retry') as HTMLButtonElement).click()
    expect(retried).toBe(true)
  })
})

describe('renderPanels', () => {
  it('updates probability, overlay, and neighbors from one response', () => {
    const panels = {
      probability: document.createElement('div'),
      overlay: document.createElement('div'),
      neighbors: document.createElement('div'),
    }
    renderPanels(panels, cannedResponse(), 0.5)
    expect(panels.probability.textContent).toContain('87.31%')
    expect(panels.overlay.querySelector('img')).not.toBeNull()
    expect(panels.neighbors.querySelectorAll('.neighbor-column').length).toBe(2)
  })
})
