/** Rating flow: one item at a time, source and simplification side by
 * side, four score selectors, a free-text note, and a progress counter.
 *
 * Submit stays disabled until all four criteria are scored, so the
 * normal path can never send a structurally invalid payload. When the
 * server still rejects a rating (e.g. a hand-crafted payload via
 * sendRating), a 422 naming a criterion is surfaced inline on that
 * criterion's selector; transport failures show a retry banner and
 * leave the filled form untouched.
 */

import { ApiError, postRating } from "./api.js";
import type { ItemRow, RatingPayload, RubricCriterion } from "./api.js";
import { ScorePicker, criterionNamedIn } from "./scorePicker.js";

export interface RatingFormOptions {
  annotator: string;
  queue: ItemRow[];
  rubric: RubricCriterion[];
  onFinished?: () => void;
}

export class RatingForm {
  private index = 0;
  private picker: ScorePicker | null = null;
  private lastPayload: RatingPayload | null = null;
  private readonly keyListener = (event: KeyboardEvent) => this.onKey(event);

  constructor(
    private readonly root: HTMLElement,
    private readonly options: RatingFormOptions,
  ) {
    document.addEventListener("keydown", this.keyListener);
    this.render();
  }

  dispose(): void {
    document.removeEventListener("keydown", this.keyListener);
  }

  private current(): ItemRow | undefined {
    return this.options.queue[this.index];
  }

  private render(): void {
    this.root.innerHTML = "";
    const item = this.current();
    if (!item) {
      const done = document.createElement("p");
      done.className = "all-done";
      done.textContent =
        this.options.queue.length === 0
          ? "Nothing pending — your queue is empty."
          : `All ${this.options.queue.length} items rated. Aitäh!`;
      this.root.appendChild(done);
      this.options.onFinished?.();
      return;
    }

    const form = document.createElement("div");
    form.className = "rating-form";

    const progress = document.createElement("div");
    progress.className = "progress";
    progress.textContent =
      `Item ${this.index + 1} of ${this.options.queue.length}` +
      ` — ${item.system_name} — ${item.item_id}`;
    form.appendChild(progress);

    form.appendChild(renderPair(item));

    this.picker = new ScorePicker(this.options.rubric, () => this.updateSubmit());
    form.appendChild(this.picker.element);

    const noteLabel = document.createElement("label");
    noteLabel.className = "note";
    noteLabel.textContent = "Note (optional)";
    const note = document.createElement("textarea");
    note.rows = 2;
    noteLabel.appendChild(note);
    form.appendChild(noteLabel);

    const formError = document.createElement("p");
    formError.className = "form-error";
    formError.hidden = true;
    form.appendChild(formError);

    const banner = document.createElement("div");
    banner.className = "retry-banner";
    banner.hidden = true;
    const bannerText = document.createElement("span");
    bannerText.textContent =
      "Could not reach the server — your scores are still here.";
    const retry = document.createElement("button");
    retry.type = "button";
    retry.className = "retry";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => {
      if (this.lastPayload) void this.sendRating(this.lastPayload);
    });
    banner.append(bannerText, retry);
    form.appendChild(banner);

    const actions = document.createElement("div");
    actions.className = "actions";
    const submit = document.createElement("button");
    submit.type = "button";
    submit.className = "submit";
    submit.textContent = "Submit rating";
    submit.disabled = true;
    submit.addEventListener("click", () => void this.submit());
    const hint = document.createElement("span");
    hint.className = "hint";
    hint.textContent = "keys 0–4 score the marked criterion, Enter submits";
    actions.append(submit, hint);
    form.appendChild(actions);

    this.root.appendChild(form);
  }

  private noteText(): string {
    const note = this.root.querySelector<HTMLTextAreaElement>("textarea");
    return note ? note.value.trim() : "";
  }

  private submitButton(): HTMLButtonElement | null {
    return this.root.querySelector<HTMLButtonElement>("button.submit");
  }

  private updateSubmit(): void {
    const submit = this.submitButton();
    if (submit && this.picker) submit.disabled = !this.picker.isComplete();
  }

  private onKey(event: KeyboardEvent): void {
    const target = event.target;
    if (
      target instanceof HTMLTextAreaElement ||
      target instanceof HTMLInputElement
    ) {
      return; // typing a note or a name, not scoring
    }
    if (!this.picker) return;
    if (this.picker.handleKey(event)) {
      event.preventDefault();
      return;
    }
    if (event.key === "Enter") {
      event.preventDefault();
      void this.submit();
    }
  }

  private buildPayload(): RatingPayload | null {
    const item = this.current();
    if (!item || !this.picker || !this.picker.isComplete()) return null;
    const payload: RatingPayload = {
      annotator: this.options.annotator,
      item_id: item.item_id,
      scores: this.picker.scores(),
    };
    const note = this.noteText();
    if (note) payload.note = note;
    return payload;
  }

  async submit(): Promise<void> {
    const payload = this.buildPayload();
    if (!payload) return; // incomplete form: the guard the server never sees
    await this.sendRating(payload);
  }

  /** POST a rating payload and route the outcome into the view. Public
   * so a payload can be injected past the client-side guard (tests do
   * this deliberately to exercise the server's 422 surface). */
  async sendRating(payload: RatingPayload): Promise<void> {
    this.lastPayload = payload;
    this.clearErrors();
    try {
      await postRating(payload);
    } catch (error) {
      if (error instanceof ApiError) {
        this.showApiError(error);
      } else {
        this.showBanner(); // transport failure: nothing lost, offer retry
      }
      return;
    }
    this.index += 1;
    this.lastPayload = null;
    this.render();
  }

  private clearErrors(): void {
    this.picker?.clearErrors();
    const formError = this.root.querySelector<HTMLElement>(".form-error");
    if (formError) {
      formError.hidden = true;
      formError.textContent = "";
    }
    const banner = this.root.querySelector<HTMLElement>(".retry-banner");
    if (banner) banner.hidden = true;
  }

  private showApiError(error: ApiError): void {
    const code =
      this.picker && error.status === 422
        ? criterionNamedIn(error.detail, this.picker.criterionCodes())
        : null;
    if (code && this.picker) {
      this.picker.markError(code, error.detail);
      return;
    }
    const formError = this.root.querySelector<HTMLElement>(".form-error");
    if (formError) {
      formError.hidden = false;
      formError.textContent = error.detail;
    }
  }

  private showBanner(): void {
    const banner = this.root.querySelector<HTMLElement>(".retry-banner");
    if (banner) banner.hidden = false;
  }
}

/** Source and simplification, side by side. */
export function renderPair(item: ItemRow): HTMLElement {
  const pair = document.createElement("div");
  pair.className = "pair";
  const source = document.createElement("div");
  source.className = "pane pane-source";
  const sourceHead = document.createElement("h3");
  sourceHead.textContent = "Source";
  const sourceText = document.createElement("p");
  sourceText.textContent = item.source;
  source.append(sourceHead, sourceText);
  const output = document.createElement("div");
  output.className = "pane pane-output";
  const outputHead = document.createElement("h3");
  outputHead.textContent = "Simplified";
  const outputText = document.createElement("p");
  outputText.textContent = item.output;
  output.append(outputHead, outputText);
  pair.append(source, output);
  return pair;
}
