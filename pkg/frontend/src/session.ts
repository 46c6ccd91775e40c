// Session state machine. One explain request may be in flight at a time;
// every request gets an id and only the newest id may publish its response,
// so panels never mix artifacts from two different requests.

import {
  ExplainOptions,
  ExplainResponse,
  ServiceError,
  buildExplainRequest,
  postExplain,
} from './api'
import { Rect, isValidSelection, rectToBbox } from './selection'

export interface OptionPanel {
  steps: number
  k: number
  regionMode: 'ui_bbox' | 'felzenszwalb'
  heatmapOpacity: number
  mergeAreaFraction: number
}

export const DEFAULT_OPTIONS: OptionPanel = {
  steps: 128,
  k: 5,
  regionMode: 'felzenszwalb',
  heatmapOpacity: 0.6,
  mergeAreaFraction: 0.1,
}

export interface SessionState {
  imageBase64: string | null
  imageWidth: number
  imageHeight: number
  selection: Rect | null
  lastResponse: ExplainResponse | null
  lastError: { status: number; message: string } | null
  options: OptionPanel
  inFlight: boolean
}

export function initialState(): SessionState {
  return {
    imageBase64: null,
    imageWidth: 0,
    imageHeight: 0,
    selection: null,
    lastResponse: null,
    lastError: null,
    options: { ...DEFAULT_OPTIONS },
    inFlight: false,
  }
}

export type SessionListener = (state: SessionState) => void

export class Session {
  state: SessionState = initialState()
  private requestCounter = 0
  private listeners: SessionListener[] = []

  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  onChange(listener: SessionListener): void {
    this.listeners.push(listener)
  }

  private publish(): void {
    for (const listener of this.listeners) {
      listener(this.state)
    }
  }

  loadImage(base64: string, width: number, height: number): void {
    this.state = {
      ...initialState(),
      options: this.state.options,
      imageBase64: base64,
      imageWidth: width,
      imageHeight: height,
    }
    this.publish()
  }

  setSelection(rect: Rect | null): void {
    this.state = { ...this.state, selection: rect }
    this.publish()
  }

  canExplain(): boolean {
    return (
      this.state.imageBase64 !== null &&
      isValidSelection(this.state.selection, this.state.imageWidth, this.state.imageHeight)
    )
  }

  /**
   * Issue an explain request. A newer call supersedes any in-flight one:
   * the older response is discarded when it arrives. Resolves once this
   * request settled (published or discarded).
   */
  async runExplain(): Promise<void> {
    if (!this.canExplain()) {
      return
    }
    const requestId = ++this.requestCounter
    const selection = this.state.selection as Rect
    const options: ExplainOptions = {
      steps: this.state.options.steps,
      k: this.state.options.k,
      region_mode: this.state.options.regionMode,
    }
    const body = buildExplainRequest(
      this.state.imageBase64 as string,
      rectToBbox(selection),
      options,
    )
    this.state = { ...this.state, inFlight: true }
    this.publish()
    try {
      const response = await postExplain(this.baseUrl, body, this.fetchFn)
      if (requestId !== this.requestCounter) {
        return // stale: a newer request owns the panels now
      }
      this.state = {
        ...this.state,
        lastResponse: response,
        lastError: null,
        inFlight: false,
      }
    } catch (err) {
      if (requestId !== this.requestCounter) {
        return
      }
      const fail =
        err instanceof ServiceError
          ? { status: err.status, message: err.body.message }
          : { status: 0, message: String(err) }
      this.state = { ...this.state, lastError: fail, inFlight: false }
    }
    this.publish()
  }
}
