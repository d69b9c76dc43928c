/** DOM wiring for the two-pane editor.
 *
 * Left: assistant textbox with live tag highlighting, tag palette, sample
 * count control and the Generate button. Right: the main textbox the author
 * owns, candidate cards with their + buttons, and the live session report.
 */
import { EditorController } from "./controller.js";
import { PALETTE, renderHighlights } from "./markup.js";
import type { UiState } from "./controller.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function mount(container: HTMLElement, controller: EditorController): void {
  const doc = container.ownerDocument;
  container.classList.add("editor");

  const left = el(doc, "section", "pane pane-assistant");
  const right = el(doc, "section", "pane pane-main");
  container.append(right, left);

  // main pane: the document under the author's control
  const mainBox = el(doc, "textarea", "main-text");
  mainBox.placeholder = "Accepted text lands here; edit freely.";
  mainBox.addEventListener("input", () => controller.onEditInput(mainBox.value));
  right.append(el(doc, "h2", undefined, "Main text"), mainBox);

  const cards = el(doc, "div", "candidates");
  right.append(cards);

  const reportPanel = el(doc, "div", "report");
  right.append(el(doc, "h2", undefined, "Session report"), reportPanel);

  // assistant pane
  left.append(el(doc, "h2", undefined, "Assistant"));
  const highlight = el(doc, "div", "highlight");
  const assistantBox = el(doc, "textarea", "assistant-text");
  assistantBox.placeholder = "It was raining <contrast> trees";
  assistantBox.addEventListener("input", () => controller.setAssistantText(assistantBox.value));
  left.append(highlight, assistantBox);

  const palette = el(doc, "div", "palette");
  for (const entry of PALETTE) {
    const button = el(doc, "button", "palette-tag", entry.label);
    button.type = "button";
    button.addEventListener("click", () => {
      controller.insertTag(entry.token);
      assistantBox.value = controller.state.assistantText;
    });
    palette.append(button);
  }
  left.append(palette);

  const controls = el(doc, "div", "controls");
  const samples = el(doc, "input", "num-samples") as HTMLInputElement;
  samples.type = "number";
  samples.min = "1";
  samples.value = String(controller.state.numSamples);
  samples.addEventListener("change", () => controller.setNumSamples(Number(samples.value)));
  const generate = el(doc, "button", "generate", "Generate");
  generate.type = "button";
  generate.addEventListener("click", () => void controller.onGenerate());
  controls.append(el(doc, "label", undefined, "samples"), samples, generate);
  left.append(controls);

  const errorLine = el(doc, "div", "error-line");
  const statusLine = el(doc, "div", "status-line");
  left.append(errorLine, statusLine);

  controller.subscribe((state: UiState) => {
    highlight.innerHTML = renderHighlights(state.assistantText);
    generate.disabled = state.pending || Boolean(state.markupError);
    errorLine.textContent = state.markupError ?? state.error ?? "";
    statusLine.textContent =
      state.queueStatus === "idle" ? "" : `${state.queueStatus} (${state.queueDepth} queued)`;
    if (mainBox.value !== state.mainText) {
      mainBox.value = state.mainText;
    }

    cards.replaceChildren();
    for (const candidate of state.candidates) {
      const card = el(doc, "div", "candidate-card");
      card.append(el(doc, "p", "candidate-text", candidate.assembled));
      const add = el(doc, "button", "add", "+");
      add.type = "button";
      add.disabled = state.pending;
      add.addEventListener("click", () => void controller.onAdd(candidate.candidate_id));
      card.append(add);
      cards.append(card);
    }

    renderReport(doc, reportPanel, state);
  });
}

function renderReport(doc: Document, panel: HTMLElement, state: UiState): void {
  panel.replaceChildren();
  const report = state.report;
  if (!report) {
    panel.append(el(doc, "p", "report-empty", "no report yet"));
    return;
  }
  const facts = el(doc, "ul", "report-facts");
  const rows: Array<[string, number | string]> = [
    ["tokens", report.tokens],
    ["sentences", report.sentences],
    ["AI-assisted sentences", report.ai_assisted_sentences],
    ["generate clicks", report.generate_clicks],
    ["add clicks", report.add_clicks],
    ["novel tokens inserted", report.novel_tokens_inserted],
    ["model tokens deleted", report.deleted_model_tokens],
  ];
  for (const [label, value] of rows) {
    facts.append(el(doc, "li", undefined, `${label}: ${value}`));
  }
  panel.append(facts);

  const entries = Object.entries(report.tag_usage_histogram);
  if (entries.length > 0) {
    const maxCount = Math.max(...entries.map(([, count]) => count));
    const histogram = el(doc, "div", "histogram");
    for (const [tag, count] of entries) {
      const row = el(doc, "div", "histogram-row");
      const bar = el(doc, "span", "histogram-bar");
      bar.style.width = `${Math.round((100 * count) / maxCount)}%`;
      row.append(el(doc, "span", "histogram-label", `${tag} (${count})`), bar);
      histogram.append(row);
    }
    panel.append(el(doc, "h3", undefined, "tag usage"), histogram);
  }
}
