// Drag-rectangle selection over the screenshot canvas. All results are in
// native image coordinates; the canvas may display the image scaled.

export interface Rect {
  xMin: number
  yMin: number
  xMax: number
  yMax: number
}

export interface DragState {
  startX: number
  startY: number
  currentX: number
  currentY: number
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(Math.max(v, lo), hi)
}

/** Map a canvas-space point to native image coordinates. */
export function canvasToImage(
  x: number,
  y: number,
  canvasWidth: number,
  canvasHeight: number,
  imageWidth: number,
  imageHeight: number,
): { x: number; y: number } {
  return {
    x: (x / canvasWidth) * imageWidth,
    y: (y / canvasHeight) * imageHeight,
  }
}

/**
 * Finish a drag: normalize corner order, round to integer pixels, and clamp
 * to the image bounds. Returns null for a zero-area drag (selection discarded).
 */
export function finishDrag(
  drag: DragState,
  imageWidth: number,
  imageHeight: number,
): Rect | null {
  const xMin = clamp(Math.round(Math.min(drag.startX, drag.currentX)), 0, imageWidth)
  const xMax = clamp(Math.round(Math.max(drag.startX, drag.currentX)), 0, imageWidth)
  const yMin = clamp(Math.round(Math.min(drag.startY, drag.currentY)), 0, imageHeight)
  const yMax = clamp(Math.round(Math.max(drag.startY, drag.currentY)), 0, imageHeight)
  if (xMax <= xMin || yMax <= yMin) {
    return null
  }
  return { xMin, yMin, xMax, yMax }
}

export function rectToBbox(rect: Rect): [number, number, number, number] {
  return [rect.xMin, rect.yMin, rect.xMax, rect.yMax]
}

/** A request may only be issued for a positive-area rectangle inside bounds. */
export function isValidSelection(
  rect: Rect | null,
  imageWidth: number,
  imageHeight: number,
): rect is Rect {
  return (
    rect !== null &&
    rect.xMin >= 0 &&
    rect.yMin >= 0 &&
    rect.xMax <= imageWidth &&
    rect.yMax <= imageHeight &&
    rect.xMax > rect.xMin &&
    rect.yMax > rect.yMin
  )
}
