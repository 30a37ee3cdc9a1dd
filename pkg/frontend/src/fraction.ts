/** Geometry helper: approximate an exact rational string for bar widths.
 *
 * Displayed values always show the server's exact text; this conversion is
 * used only to size comparison bars, never to print numbers.
 */

export function approx(value: string): number {
  const slash = value.indexOf("/");
  if (slash >= 0) {
    const num = Number(value.slice(0, slash));
    const den = Number(value.slice(slash + 1));
    return den === 0 ? NaN : num / den;
  }
  return Number(value);
}

/** Relative widths (0..100) for a pair of rational strings. */
export function barWidths(a: string, b: string): { a: number; b: number } {
  const [x, y] = [approx(a), approx(b)];
  const top = Math.max(x, y);
  if (!isFinite(top) || top <= 0) {
    return { a: 0, b: 0 };
  }
  return { a: Math.round((x / top) * 100), b: Math.round((y / top) * 100) };
}
