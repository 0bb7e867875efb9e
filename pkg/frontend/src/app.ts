import { ApiClient } from "./api";
import { FeedbackController } from "./feedback";
import { escapeHtml, isChartable, renderAnswer, renderChart, renderTable } from "./render";
import type { Locale } from "./strings";
import { t } from "./strings";
import type { AskResponse } from "./types";

/** Browser wiring: one question form, a conversation log, a per-answer rating
 * widget, and an id/en toggle for the page chrome. Only one ask request may be
 * in flight at a time. */
export function mountApp(root: HTMLElement, api: ApiClient = new ApiClient()): void {
  let locale: Locale = "id";
  let busy = false;

  root.innerHTML = `
    <header class="topbar">
      <h1>GovQA</h1>
      <div class="locale-switch">
        <button type="button" data-locale="id">ID</button>
        <button type="button" data-locale="en">EN</button>
      </div>
    </header>
    <div id="conversation"></div>
    <form id="ask-form">
      <input id="question" type="text" autocomplete="off" />
      <button id="ask-button" type="submit"></button>
    </form>
    <p id="status" role="status"></p>
  `;

  const conversation = root.querySelector("#conversation") as HTMLElement;
  const form = root.querySelector("#ask-form") as HTMLFormElement;
  const input = root.querySelector("#question") as HTMLInputElement;
  const askButton = root.querySelector("#ask-button") as HTMLButtonElement;
  const status = root.querySelector("#status") as HTMLElement;

  function applyLocale(): void {
    input.placeholder = t(locale, "askPlaceholder");
    askButton.textContent = t(locale, "askButton");
    root.querySelectorAll<HTMLButtonElement>("[data-locale]").forEach((btn) => {
      btn.classList.toggle("active", btn.dataset.locale === locale);
    });
  }

  root.querySelectorAll<HTMLButtonElement>("[data-locale]").forEach((btn) => {
    btn.addEventListener("click", () => {
      locale = btn.dataset.locale as Locale;
      applyLocale();
    });
  });

  function attachChartToggle(container: HTMLElement, payload: AskResponse): void {
    const toggle = container.querySelector<HTMLButtonElement>(".chart-toggle");
    const table = payload.table;
    if (!toggle || !table || !isChartable(table)) {
      return;
    }
    toggle.addEventListener("click", () => {
      const holder = container.querySelector(".answer-table");
      if (!holder) {
        return;
      }
      const showingTable = toggle.dataset.view === "table";
      const inner = showingTable ? renderChart(table) : renderTable(table, locale);
      if (showingTable) {
        holder.querySelector("table")?.insertAdjacentHTML("afterend", inner);
        holder.querySelector("table")?.remove();
        toggle.dataset.view = "chart";
        toggle.textContent = t(locale, "tableToggle");
      } else {
        // Re-render the whole block back to a table, then rebind.
        (holder as HTMLElement).outerHTML = inner;
        attachChartToggle(container, payload);
      }
    });
  }

  function attachFeedback(container: HTMLElement, payload: AskResponse): void {
    const widget = document.createElement("div");
    widget.className = "feedback";
    container.appendChild(widget);

    const controller = new FeedbackController(api, payload.response_id, (state) => {
      if (state.kind === "rated") {
        widget.innerHTML = `<p>${escapeHtml(t(locale, "feedbackRecorded"))}</p>`;
      } else if (state.kind === "error") {
        renderWidget(t(locale, "feedbackError"));
      } else if (state.kind === "submitting") {
        widget.querySelectorAll("button").forEach((b) => (b.disabled = true));
      }
    });

    function renderWidget(notice = ""): void {
      const stars = [1, 2, 3, 4, 5]
        .map((n) => `<button type="button" data-rating="${n}">${n}★</button>`)
        .join("");
      widget.innerHTML =
        `<span>${escapeHtml(t(locale, "feedbackPrompt"))}</span>` +
        stars +
        `<input type="text" class="comment" placeholder="${escapeHtml(
          t(locale, "commentPlaceholder"),
        )}" />` +
        (notice ? `<p class="feedback-notice">${escapeHtml(notice)}</p>` : "");
      widget.querySelectorAll<HTMLButtonElement>("[data-rating]").forEach((btn) => {
        btn.addEventListener("click", () => {
          const comment =
            widget.querySelector<HTMLInputElement>(".comment")?.value || undefined;
          void controller.submit(Number(btn.dataset.rating), comment);
        });
      });
    }

    renderWidget();
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const question = input.value.trim();
    if (busy) {
      return;
    }
    if (!question) {
      status.textContent = t(locale, "emptyQuestion");
      return;
    }
    busy = true;
    askButton.disabled = true;
    status.textContent = t(locale, "pending");

    const turn = document.createElement("section");
    turn.className = "turn";
    turn.innerHTML = `<p class="question">${escapeHtml(question)}</p>`;
    conversation.appendChild(turn);
    input.value = "";

    api
      .ask(question)
      .then((payload) => {
        turn.insertAdjacentHTML("beforeend", renderAnswer(payload, locale));
        attachChartToggle(turn, payload);
        attachFeedback(turn, payload);
        status.textContent = "";
      })
      .catch((err: unknown) => {
        const message = err instanceof Error ? err.message : String(err);
        turn.insertAdjacentHTML(
          "beforeend",
          `<p class="error">${escapeHtml(message)}</p>`,
        );
        status.textContent = "";
      })
      .finally(() => {
        busy = false;
        askButton.disabled = false;
      });
  });

  applyLocale();
}
