/** Application shell: annotator identity, three tabs (Rate, Consensus,
 * Summary), and the wiring that fetches each view's data. */

import { getItems } from "./api.js";
import type { RubricCriterion } from "./api.js";
import { ConsensusView } from "./consensusView.js";
import { RatingForm } from "./ratingView.js";
import { SummaryView } from "./summaryView.js";

type Disposable = { dispose(): void };

const STORAGE_KEY = "simpkit.annotator";

class App {
  private view: Disposable | null = null;
  private content!: HTMLElement;
  private status!: HTMLElement;
  private nameInput!: HTMLInputElement;
  private rubric: RubricCriterion[] | null = null;

  constructor(private readonly root: HTMLElement) {
    this.renderShell();
    void this.switchTab("rate");
  }

  private renderShell(): void {
    this.root.innerHTML = "";
    const header = document.createElement("header");
    const title = document.createElement("h1");
    title.textContent = "simpkit annotation";
    header.appendChild(title);

    const identity = document.createElement("label");
    identity.className = "identity";
    identity.textContent = "Annotator";
    this.nameInput = document.createElement("input");
    this.nameInput.type = "text";
    this.nameInput.placeholder = "your name";
    this.nameInput.value = localStorage.getItem(STORAGE_KEY) ?? "";
    this.nameInput.addEventListener("change", () => {
      localStorage.setItem(STORAGE_KEY, this.nameInput.value.trim());
      void this.switchTab("rate");
    });
    identity.appendChild(this.nameInput);
    header.appendChild(identity);

    const nav = document.createElement("nav");
    for (const [key, label] of [
      ["rate", "Rate"],
      ["consensus", "Consensus"],
      ["summary", "Summary"],
    ] as const) {
      const button = document.createElement("button");
      button.type = "button";
      button.dataset.tab = key;
      button.textContent = label;
      button.addEventListener("click", () => void this.switchTab(key));
      nav.appendChild(button);
    }
    header.appendChild(nav);
    this.root.appendChild(header);

    this.status = document.createElement("p");
    this.status.className = "app-status";
    this.status.hidden = true;
    this.root.appendChild(this.status);

    this.content = document.createElement("main");
    this.root.appendChild(this.content);
  }

  private annotator(): string {
    return this.nameInput.value.trim();
  }

  private setStatus(message: string): void {
    this.status.hidden = message === "";
    this.status.textContent = message;
  }

  private markActiveTab(name: string): void {
    for (const button of this.root.querySelectorAll<HTMLElement>("nav button")) {
      button.classList.toggle("active", button.dataset.tab === name);
    }
  }

  private async loadRubric(): Promise<RubricCriterion[]> {
    if (!this.rubric) {
      const listing = await getItems();
      this.rubric = listing.rubric;
    }
    return this.rubric;
  }

  async switchTab(name: "rate" | "consensus" | "summary"): Promise<void> {
    this.view?.dispose();
    this.view = null;
    this.content.innerHTML = "";
    this.setStatus("");
    this.markActiveTab(name);
    try {
      if (name === "rate") {
        const annotator = this.annotator();
        if (!annotator) {
          this.setStatus("Enter your annotator name to load your queue.");
          return;
        }
        const listing = await getItems({ annotator, status: "pending" });
        this.rubric = listing.rubric;
        this.view = new RatingForm(this.content, {
          annotator,
          queue: listing.items,
          rubric: listing.rubric,
        });
      } else if (name === "consensus") {
        const view = new ConsensusView(this.content, await this.loadRubric());
        this.view = view;
        await view.load();
      } else {
        const rubric = await this.loadRubric();
        const view = new SummaryView(
          this.content,
          rubric.map((criterion) => criterion.code),
        );
        this.view = view;
        await view.load();
      }
    } catch {
      this.setStatus("Could not reach the server — is `simpkit serve` running?");
    }
  }
}

const rootElement = document.getElementById("app");
if (rootElement) new App(rootElement);
