/** String-building helpers for SVG output.
 *
 * Views return markup as plain strings so they stay renderable and
 * testable without a DOM; the browser entry point is the only place
 * that touches document APIs.
 */

export type Attrs = Readonly<Record<string, string | number>>;

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
};

export function escapeText(text: string): string {
  return text.replace(/[&<>"]/g, (ch) => ESCAPES[ch]!);
}

export function el(tag: string, attrs: Attrs, ...children: string[]): string {
  const parts: string[] = [`<${tag}`];
  for (const [key, value] of Object.entries(attrs)) {
    parts.push(` ${key}="${escapeText(String(value))}"`);
  }
  if (children.length === 0) return parts.join("") + "/>";
  parts.push(">", ...children, `</${tag}>`);
  return parts.join("");
}

/** Group carrying the name a legend toggle switches off. */
export function series(name: string, ...children: string[]): string {
  return el("g", { "data-series": name }, ...children);
}

export function svgDoc(width: number, height: number, ...children: string[]): string {
  return el(
    "svg",
    {
      xmlns: "http://www.w3.org/2000/svg",
      viewBox: `0 0 ${width} ${height}`,
      width,
      height,
    },
    ...children,
  );
}
