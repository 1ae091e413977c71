/** Live summary table: one row per system with the four criterion
 * means and the overall mean, straight from GET /api/summary. */

import { getSummary } from "./api.js";
import type { SummaryRow } from "./api.js";

export class SummaryView {
  constructor(
    private readonly root: HTMLElement,
    private readonly criterionCodes: string[],
  ) {}

  dispose(): void {}

  async load(): Promise<void> {
    const data = await getSummary();
    this.render(data.systems);
  }

  private render(rows: SummaryRow[]): void {
    this.root.innerHTML = "";
    const view = document.createElement("div");
    view.className = "summary";

    if (rows.length === 0) {
      const empty = document.createElement("p");
      empty.className = "no-summary";
      empty.textContent = "No consensus records yet.";
      view.appendChild(empty);
      this.root.appendChild(view);
      return;
    }

    const table = document.createElement("table");
    table.className = "summary-table";
    const head = document.createElement("tr");
    for (const label of ["System", "Items", ...this.criterionCodes, "Overall"]) {
      const th = document.createElement("th");
      th.textContent = label;
      head.appendChild(th);
    }
    table.appendChild(head);

    for (const row of rows) {
      const tr = document.createElement("tr");
      tr.dataset.system = row.system_name;

      const name = document.createElement("td");
      name.className = "system-name";
      name.textContent = row.system_name;
      tr.appendChild(name);

      const count = document.createElement("td");
      count.className = "n-items";
      count.textContent = String(row.n_items);
      tr.appendChild(count);

      for (const code of this.criterionCodes) {
        const cell = document.createElement("td");
        cell.dataset.criterion = code;
        const mean = row.means[code];
        cell.textContent = mean === undefined ? "—" : mean.toFixed(2);
        tr.appendChild(cell);
      }

      const overall = document.createElement("td");
      overall.className = "overall";
      overall.textContent = row.overall.toFixed(2);
      tr.appendChild(overall);

      table.appendChild(tr);
    }
    view.appendChild(table);
    this.root.appendChild(view);
  }
}
