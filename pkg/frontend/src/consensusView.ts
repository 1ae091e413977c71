/** Consensus flow: disputes one at a time, every annotator's scores in
 * a table with only the differing criteria highlighted, and a selector
 * pre-filled where annotators already agree.
 *
 * The agreement snapshot's log offset travels with the consensus POST;
 * if ratings moved underneath us the server answers 409 and the view
 * reloads with the current state instead of overwriting anything.
 */

import { ApiError, getAgreement, getItems, postConsensus } from "./api.js";
import type { Disagreement, ItemRow, RubricCriterion } from "./api.js";
import { renderPair } from "./ratingView.js";
import { ScorePicker, criterionNamedIn } from "./scorePicker.js";

export class ConsensusView {
  private disputes: Disagreement[] = [];
  private itemsById = new Map<string, ItemRow>();
  private asOf: number | null = null;
  private picker: ScorePicker | null = null;
  private notice = "";
  private readonly keyListener = (event: KeyboardEvent) => this.onKey(event);

  constructor(
    private readonly root: HTMLElement,
    private readonly rubric: RubricCriterion[],
  ) {
    document.addEventListener("keydown", this.keyListener);
  }

  dispose(): void {
    document.removeEventListener("keydown", this.keyListener);
  }

  async load(): Promise<void> {
    const agreement = await getAgreement();
    const listing = await getItems();
    this.asOf = agreement.as_of;
    this.disputes = agreement.disagreements;
    this.itemsById = new Map(listing.items.map((item) => [item.item_id, item]));
    this.render();
  }

  private currentDispute(): Disagreement | undefined {
    return this.disputes[0];
  }

  private render(): void {
    this.root.innerHTML = "";
    const view = document.createElement("div");
    view.className = "consensus";

    if (this.notice) {
      const notice = document.createElement("p");
      notice.className = "notice";
      notice.textContent = this.notice;
      view.appendChild(notice);
      this.notice = "";
    }

    const dispute = this.currentDispute();
    if (!dispute) {
      const empty = document.createElement("p");
      empty.className = "no-disputes";
      empty.textContent = "No disputes awaiting resolution.";
      view.appendChild(empty);
      this.root.appendChild(view);
      this.picker = null;
      return;
    }

    const progress = document.createElement("div");
    progress.className = "progress";
    const plural = this.disputes.length === 1 ? "dispute" : "disputes";
    progress.textContent =
      `${this.disputes.length} ${plural} to resolve — ${dispute.item_id}`;
    view.appendChild(progress);

    const item = this.itemsById.get(dispute.item_id);
    if (item) view.appendChild(renderPair(item));

    view.appendChild(this.renderRatingsTable(dispute));

    const heading = document.createElement("h3");
    heading.textContent = "Consensus scores";
    view.appendChild(heading);

    this.picker = new ScorePicker(this.rubric, () => this.updateSubmit());
    // where the annotators already agree there is nothing to decide:
    // pre-fill those criteria and park the cursor on the first disputed one
    const anyRating = Object.values(dispute.ratings)[0];
    for (const criterion of this.rubric) {
      if (!dispute.criteria.includes(criterion.code) && anyRating) {
        const agreedValue = anyRating[criterion.code];
        if (agreedValue !== undefined) this.picker.preset(criterion.code, agreedValue);
      }
    }
    this.picker.focusFirstMissing();
    view.appendChild(this.picker.element);

    const formError = document.createElement("p");
    formError.className = "form-error";
    formError.hidden = true;
    view.appendChild(formError);

    const actions = document.createElement("div");
    actions.className = "actions";
    const submit = document.createElement("button");
    submit.type = "button";
    submit.className = "submit";
    submit.textContent = "Record consensus";
    submit.disabled = !this.picker.isComplete();
    submit.addEventListener("click", () => void this.resolve());
    const hint = document.createElement("span");
    hint.className = "hint";
    hint.textContent = "keys 0–4 score the marked criterion, Enter records";
    actions.append(submit, hint);
    view.appendChild(actions);

    this.root.appendChild(view);
  }

  private renderRatingsTable(dispute: Disagreement): HTMLElement {
    const table = document.createElement("table");
    table.className = "ratings-table";
    const head = document.createElement("tr");
    const corner = document.createElement("th");
    corner.textContent = "Annotator";
    head.appendChild(corner);
    for (const criterion of this.rubric) {
      const th = document.createElement("th");
      th.textContent = criterion.code;
      head.appendChild(th);
    }
    table.appendChild(head);

    for (const annotator of Object.keys(dispute.ratings).sort()) {
      const row = document.createElement("tr");
      const name = document.createElement("th");
      name.textContent = annotator;
      row.appendChild(name);
      const scores = dispute.ratings[annotator] ?? {};
      for (const criterion of this.rubric) {
        const cell = document.createElement("td");
        cell.dataset.criterion = criterion.code;
        const value = scores[criterion.code];
        cell.textContent = value === undefined ? "—" : String(value);
        if (dispute.criteria.includes(criterion.code)) {
          cell.classList.add("diff"); // only differing criteria light up
        }
        row.appendChild(cell);
      }
      table.appendChild(row);
    }
    return table;
  }

  private updateSubmit(): void {
    const submit = this.root.querySelector<HTMLButtonElement>("button.submit");
    if (submit && this.picker) submit.disabled = !this.picker.isComplete();
  }

  private onKey(event: KeyboardEvent): void {
    const target = event.target;
    if (
      target instanceof HTMLTextAreaElement ||
      target instanceof HTMLInputElement
    ) {
      return;
    }
    if (!this.picker) return;
    if (this.picker.handleKey(event)) {
      event.preventDefault();
      return;
    }
    if (event.key === "Enter") {
      event.preventDefault();
      void this.resolve();
    }
  }

  async resolve(): Promise<void> {
    const dispute = this.currentDispute();
    if (!dispute || !this.picker || !this.picker.isComplete()) return;
    try {
      await postConsensus({
        item_id: dispute.item_id,
        scores: this.picker.scores(),
        resolved_by: Object.keys(dispute.ratings).sort(),
        as_of: this.asOf,
      });
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // someone re-rated while we decided: reload, never overwrite
        this.notice =
          "Ratings changed while you were deciding — reloaded with the current state.";
        await this.load();
        return;
      }
      if (error instanceof ApiError) {
        const code =
          error.status === 422
            ? criterionNamedIn(error.detail, this.picker.criterionCodes())
            : null;
        if (code) {
          this.picker.markError(code, error.detail);
        } else {
          const formError = this.root.querySelector<HTMLElement>(".form-error");
          if (formError) {
            formError.hidden = false;
            formError.textContent = error.detail;
          }
        }
        return;
      }
      const formError = this.root.querySelector<HTMLElement>(".form-error");
      if (formError) {
        formError.hidden = false;
        formError.textContent = "Could not reach the server — nothing was recorded.";
      }
      return;
    }
    this.notice = `Consensus recorded for ${dispute.item_id}.`;
    await this.load();
  }
}
