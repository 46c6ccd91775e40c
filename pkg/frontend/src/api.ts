// JSON contract of the tappability service. Mirrors the server payloads
// exactly; the client never recomputes any of these values.

export interface RankedRegion {
  bbox: [number, number, number, number]
  rectangular: boolean
  total: number
  density: number
  rank: number
}

export interface NeighborCard {
  element_ref: [string, string]
  tap_probability: number
  distance: number
  thumbnail_refs: { screenshot?: string; crop?: string }
}

export interface ExplainResponse {
  tap_probability: number
  decision: boolean
  heatmap_overlay_png: string
  filtered_png: string
  ranked_regions: RankedRegion[]
  neighbors_available: boolean
  neighbors: { tappable: NeighborCard[]; non_tappable: NeighborCard[] } | null
}

export interface ApiErrorBody {
  code: string
  message: string
  field: string | null
}

export interface ExplainOptions {
  steps: number
  k: number
  region_mode: 'ui_bbox' | 'felzenszwalb'
  regions?: { element_id: string; bbox: number[]; view_type?: string }[]
}

export interface ExplainRequestBody {
  image: string
  bbox: [number, number, number, number]
  options: ExplainOptions
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(body.message)
  }
}

export function buildExplainRequest(
  imageBase64: string,
  bbox: [number, number, number, number],
  options: ExplainOptions,
): ExplainRequestBody {
  // bbox passes through in native image coordinates, unchanged
  return { image: imageBase64, bbox, options }
}

export async function postExplain(
  baseUrl: string,
  body: ExplainRequestBody,
  fetchFn: typeof fetch = fetch,
): Promise<ExplainResponse> {
  const res = await fetchFn(`${baseUrl}/api/explain`, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(body),
  })
  if (!res.ok) {
    const errBody = (await res.json()) as ApiErrorBody
    throw new ServiceError(res.status, errBody)
  }
  return (await res.json()) as ExplainResponse
}
