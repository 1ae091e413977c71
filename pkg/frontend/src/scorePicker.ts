/** The four-criterion score selector shared by the rating form and the
 * consensus view.
 *
 * One fieldset per rubric criterion, five buttons (0-4) each. Every
 * descriptor string shown anywhere comes from the rubric the server
 * sent; this module holds no criterion texts of its own.
 *
 * Keyboard model: one criterion is "active" (visibly marked); digit
 * keys 0-4 score it and move the focus to the next unscored criterion,
 * so a full rating is four keystrokes. Clicking a button scores that
 * criterion directly.
 */

import type { RubricCriterion, Scores } from "./api.js";

export class ScorePicker {
  readonly element: HTMLElement;
  private readonly values = new Map<string, number>();
  private active = 0;

  constructor(
    private readonly rubric: RubricCriterion[],
    private readonly onChange: () => void,
  ) {
    this.element = document.createElement("div");
    this.element.className = "criteria";
    for (const criterion of rubric) {
      this.element.appendChild(this.buildFieldset(criterion));
    }
    this.paintActive();
  }

  private buildFieldset(criterion: RubricCriterion): HTMLElement {
    const fieldset = document.createElement("fieldset");
    fieldset.className = "criterion";
    fieldset.dataset.criterion = criterion.code;

    const legend = document.createElement("legend");
    legend.textContent = `${criterion.code} — ${criterion.name}`;
    legend.title = criterion.description;
    fieldset.appendChild(legend);

    const buttons = document.createElement("div");
    buttons.className = "levels";
    for (const [level, text] of Object.entries(criterion.level_descriptors)) {
      const button = document.createElement("button");
      button.type = "button";
      button.dataset.level = level;
      button.textContent = level;
      button.title = text; // descriptor tooltip, verbatim from the server
      button.addEventListener("click", () => {
        this.activateCriterion(criterion.code);
        this.set(criterion.code, Number(level));
      });
      buttons.appendChild(button);
    }
    fieldset.appendChild(buttons);

    const descriptor = document.createElement("p");
    descriptor.className = "descriptor";
    descriptor.textContent = criterion.description;
    fieldset.appendChild(descriptor);

    const error = document.createElement("p");
    error.className = "criterion-error";
    error.hidden = true;
    fieldset.appendChild(error);
    return fieldset;
  }

  /** Handle a keydown; returns true when the key was consumed. */
  handleKey(event: KeyboardEvent): boolean {
    if (event.key >= "0" && event.key <= "4") {
      const criterion = this.rubric[this.active];
      if (!criterion) return false;
      this.set(criterion.code, Number(event.key));
      this.advanceActive();
      return true;
    }
    return false;
  }

  set(code: string, level: number): void {
    this.values.set(code, level);
    this.paintSelection(code);
    this.clearErrors();
    this.onChange();
  }

  /** Preselect a value without treating it as a user change. */
  preset(code: string, level: number): void {
    this.values.set(code, level);
    this.paintSelection(code);
  }

  reset(): void {
    this.values.clear();
    this.active = 0;
    for (const button of this.element.querySelectorAll("button.selected")) {
      button.classList.remove("selected");
    }
    this.clearErrors();
    this.paintActive();
  }

  isComplete(): boolean {
    return this.rubric.every((criterion) => this.values.has(criterion.code));
  }

  scores(): Scores {
    const scores: Scores = {};
    for (const criterion of this.rubric) {
      const value = this.values.get(criterion.code);
      if (value !== undefined) scores[criterion.code] = value;
    }
    return scores;
  }

  /** Point the keyboard cursor at the first criterion with no score. */
  focusFirstMissing(): void {
    const index = this.rubric.findIndex((c) => !this.values.has(c.code));
    this.active = index === -1 ? 0 : index;
    this.paintActive();
  }

  markError(code: string, message: string): void {
    const fieldset = this.fieldsetFor(code);
    if (!fieldset) return;
    fieldset.classList.add("invalid");
    const error = fieldset.querySelector<HTMLElement>(".criterion-error");
    if (error) {
      error.hidden = false;
      error.textContent = message;
    }
  }

  clearErrors(): void {
    for (const fieldset of this.element.querySelectorAll("fieldset.invalid")) {
      fieldset.classList.remove("invalid");
    }
    for (const error of this.element.querySelectorAll<HTMLElement>(".criterion-error")) {
      error.hidden = true;
      error.textContent = "";
    }
  }

  criterionCodes(): string[] {
    return this.rubric.map((criterion) => criterion.code);
  }

  private activateCriterion(code: string): void {
    const index = this.rubric.findIndex((criterion) => criterion.code === code);
    if (index !== -1) {
      this.active = index;
      this.paintActive();
    }
  }

  private advanceActive(): void {
    const missing = this.rubric.findIndex((c) => !this.values.has(c.code));
    if (missing !== -1) {
      this.active = missing;
    } else if (this.active < this.rubric.length - 1) {
      this.active += 1;
    }
    this.paintActive();
  }

  private fieldsetFor(code: string): HTMLElement | null {
    return this.element.querySelector(`fieldset[data-criterion="${code}"]`);
  }

  private paintSelection(code: string): void {
    const fieldset = this.fieldsetFor(code);
    if (!fieldset) return;
    const value = this.values.get(code);
    for (const button of fieldset.querySelectorAll<HTMLButtonElement>("button[data-level]")) {
      button.classList.toggle("selected", Number(button.dataset.level) === value);
    }
  }

  private paintActive(): void {
    const fieldsets = this.element.querySelectorAll("fieldset.criterion");
    fieldsets.forEach((fieldset, index) => {
      fieldset.classList.toggle("active", index === this.active);
    });
  }
}

/** Pull the criterion code out of a server validation message such as
 * "missing score for criterion S" or "score for criterion G must be an
 * integer in 0..4, got 7". Returns null when no known code is named. */
export function criterionNamedIn(message: string, codes: string[]): string | null {
  const match = message.match(/criterion ([A-Za-z]+)/);
  if (match && match[1] && codes.includes(match[1])) return match[1];
  return null;
}
