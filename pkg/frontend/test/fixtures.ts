import { ExplainResponse, NeighborCard } from '../src/api'

// 1x1 red pixel PNG
export const TINY_PNG =
  'iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR4nGP4z8DwHwAFBQIAX8jx0gAAAABJRU5ErkJggg=='

export function neighbor(id: string, distance: number, prob: number): NeighborCard {
  return {
    element_ref: ['screen', id],
    tap_probability: prob,
    distance,
    thumbnail_refs: {
      screenshot: `/api/corpus/thumbnail?id=screen`,
      crop: `/api/corpus/thumbnail?id=screen&element=${id}`,
    },
  }
}

export function cannedResponse(overrides: Partial<ExplainResponse> = {}): ExplainResponse {
  return {
    tap_probability: 0.8731,
    decision: true,
    heatmap_overlay_png: TINY_PNG,
    filtered_png: TINY_PNG,
    ranked_regions: [
      { bbox: [0, 0, 10, 10], rectangular: true, total: 5.0, density: 0.05, rank: 0 },
    ],
    neighbors_available: true,
    neighbors: {
      tappable: [
        neighbor('t3', 0.9, 0.91),
        neighbor('t1', 0.2, 0.95),
        neighbor('t2', 0.5, 0.88),
        neighbor('t5', 1.4, 0.77),
        neighbor('t4', 1.1, 0.83),
      ],
      non_tappable: [
        neighbor('n1', 0.3, 0.1),
        neighbor('n2', 0.6, 0.2),
        neighbor('n3', 0.7, 0.05),
        neighbor('n4', 1.0, 0.15),
        neighbor('n5', 1.2, 0.3),
      ],
    },
    ...overrides,
  }
}

/** A fetch stub that serves queued JSON responses, optionally delayed. */
export function stubFetch(
  queue: { status: number; body: unknown; delayMs?: number }[],
): typeof fetch {
  return (async () => {
    const next = queue.shift()
    if (!next) throw new Error('stub fetch queue exhausted')
    if (next.delayMs) {
      await new Promise((resolve) => setTimeout(resolve, next.delayMs))
    }
    return {
      ok: next.status >= 200 && next.status < 300,
      status: next.status,
      json: async () => next.body,
    } as Response
  }) as typeof fetch
}
