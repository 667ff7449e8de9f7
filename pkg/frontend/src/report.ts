/** Finalized-report view: the service's rendered page, inlined.
 *
 * The server's web page is the canonical rendering; this view extracts its
 * three sections rather than re-deriving them, rewriting the page-relative
 * image paths to API URLs so they resolve from the app's origin.
 */

import { ApiClient } from "./api.js";

const SECTION_IDS = ["preliminary", "steps", "screenshots"] as const;

export function rewriteShotSources(section: Element, api: ApiClient): void {
  for (const img of Array.from(section.querySelectorAll("img"))) {
    const src = img.getAttribute("src") ?? "";
    const match = src.match(/([0-9a-f]{64})\.svg$/);
    if (match) img.setAttribute("src", api.shotUrl(match[1]!));
  }
}

export async function renderReport(
  root: HTMLElement,
  api: ApiClient,
  reportId: string,
): Promise<void> {
  const page = await api.reportWebPage(reportId);
  const parsed = new DOMParser().parseFromString(page, "text/html");

  root.innerHTML = `
    <section id="report-view" aria-label="Finalized report">
      <p class="report-meta">
        Report <strong>${reportId}</strong> created.
        <a id="report-page-link" href="${api.reportPageUrl(reportId)}">Open the rendered page</a>
      </p>
      <article id="report-body"></article>
    </section>
  `;
  const body = root.querySelector<HTMLElement>("#report-body")!;
  for (const id of SECTION_IDS) {
    const section = parsed.getElementById(id);
    if (!section) continue;
    rewriteShotSources(section, api);
    body.append(section);
  }
}
