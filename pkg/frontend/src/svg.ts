/**
 * Minimal deterministic SVG assembly. All coordinates are formatted
 * with a fixed precision so identical inputs yield identical bytes.
 */

export const WIDTH = 640;
export const HEIGHT = 640;
export const MARGIN = 56;

export function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  // strip the negative sign from a rounded -0.000
  const s = v.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

/** Affine map from data interval [lo, hi] onto pixel interval [a, b]. */
export function scale(
  lo: number,
  hi: number,
  a: number,
  b: number
): (v: number) => number {
  const span = hi - lo;
  if (span <= 0) {
    return () => (a + b) / 2;
  }
  return (v: number) => a + ((v - lo) / span) * (b - a);
}

export function openSvg(title: string): string[] {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<title>${title}</title>`,
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
  ];
}

export function closeSvg(parts: string[]): string {
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function axes(parts: string[]): void {
  const x0 = MARGIN;
  const y0 = HEIGHT - MARGIN;
  const x1 = WIDTH - MARGIN;
  const y1 = MARGIN;
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black" stroke-width="1"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black" stroke-width="1"/>`
  );
}

export function circle(
  parts: string[],
  cx: number,
  cy: number,
  r: number,
  stroke: string
): void {
  parts.push(
    `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="none" stroke="${stroke}" stroke-width="1.5"/>`
  );
}

export function dot(parts: string[], cx: number, cy: number): void {
  parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="1.2" fill="black"/>`);
}

export function polyline(
  parts: string[],
  points: Array<[number, number]>,
  stroke: string
): void {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  parts.push(
    `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="1.5"/>`
  );
}

export function bar(
  parts: string[],
  x: number,
  y: number,
  w: number,
  h: number
): void {
  parts.push(
    `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="steelblue" stroke="none"/>`
  );
}
