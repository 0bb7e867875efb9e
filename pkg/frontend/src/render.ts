import type { AnswerPayload, SourceRef, TableData } from "./types";
import type { Locale } from "./strings";
import { t } from "./strings";

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const NUMERIC_RE = /^-?\d+(?:[.,]\d+)?%?$/;

function parseNumeric(cell: string): number | null {
  const trimmed = cell.trim().replace(/%$/, "").replace(",", ".");
  if (!NUMERIC_RE.test(cell.trim())) {
    return null;
  }
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : null;
}

/** True when every column after the first holds only numeric cells, so the
 * table can also be shown as a bar chart. */
export function isChartable(table: TableData): boolean {
  if (table.columns.length < 2 || table.rows.length === 0) {
    return false;
  }
  return table.rows.every((row) =>
    row.slice(1).every((cell) => parseNumeric(cell) !== null),
  );
}

export function renderTable(table: TableData, locale: Locale = "en"): string {
  const header = table.columns
    .map((col) => `<th>${escapeHtml(col)}</th>`)
    .join("");
  const body = table.rows
    .map(
      (row) =>
        `<tr>${row.map((cell) => `<td>${escapeHtml(cell)}</td>`).join("")}</tr>`,
    )
    .join("");
  const toggle = isChartable(table)
    ? `<button type="button" class="chart-toggle" data-view="table">${escapeHtml(
        t(locale, "chartToggle"),
      )}</button>`
    : "";
  return (
    `<div class="answer-table">` +
    `<table><thead><tr>${header}</tr></thead><tbody>${body}</tbody></table>` +
    toggle +
    `</div>`
  );
}

/** Horizontal bar chart built from the first numeric column; pure markup so it
 * needs no canvas or chart library. */
export function renderChart(table: TableData): string {
  const values = table.rows.map((row) => parseNumeric(row[1] ?? "") ?? 0);
  const max = Math.max(...values.map((v) => Math.abs(v)), 1);
  const bars = table.rows
    .map((row, i) => {
      const width = Math.round((Math.abs(values[i]) / max) * 100);
      return (
        `<div class="chart-row">` +
        `<span class="chart-label">${escapeHtml(row[0] ?? "")}</span>` +
        `<span class="chart-bar" style="width:${width}%"></span>` +
        `<span class="chart-value">${escapeHtml(row[1] ?? "")}</span>` +
        `</div>`
      );
    })
    .join("");
  return `<div class="answer-chart">${bars}</div>`;
}

export function renderSources(
  sources: SourceRef[],
  locale: Locale = "en",
): string {
  if (sources.length === 0) {
    return `<p class="no-sources">${escapeHtml(t(locale, "noSources"))}</p>`;
  }
  const items = sources
    .map(
      (src, i) =>
        `<li class="source-item" data-chunk-key="${escapeHtml(src.chunk_key)}">` +
        `<span class="source-rank">${i + 1}.</span> ` +
        `<span class="source-uri">${escapeHtml(src.source_uri)}</span> ` +
        `<span class="source-score">(${src.score.toFixed(3)})</span>` +
        `</li>`,
    )
    .join("");
  return (
    `<section class="sources">` +
    `<h3>${escapeHtml(t(locale, "sourcesHeading"))}</h3>` +
    `<ol class="source-list">${items}</ol>` +
    `</section>`
  );
}

export function renderAnswer(
  payload: AnswerPayload,
  locale: Locale = "en",
): string {
  const answer = `<div class="answer-text" lang="${escapeHtml(
    payload.language,
  )}">${escapeHtml(payload.answer)}</div>`;
  const table = payload.table ? renderTable(payload.table, locale) : "";
  const sources = renderSources(payload.sources, locale);
  return `<article class="answer">${answer}${table}${sources}</article>`;
}
