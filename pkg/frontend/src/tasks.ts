// Manual-task console: the open sign-off tasks of one order, two actions per
// row. Every click is one API call; the rows and the order badge are always
// refetched afterwards, never updated optimistically.

import { ApiClient, ApiError } from "./api.js";
import { el, clear, toast } from "./dom.js";
import type { ManualTask, ServiceOrder } from "./types.js";

export class TaskConsole {
  readonly root: HTMLElement;

  constructor(
    private api: ApiClient,
    private orderId: string,
    private onOrderRefresh: (order: ServiceOrder) => void,
  ) {
    this.root = el("section", { class: "card task-console" });
  }

  async refresh(): Promise<void> {
    const tasks = await this.api.listTasks(this.orderId, "OPEN");
    clear(this.root);
    this.root.append(el("h3", {}, "Manual tasks"));
    if (tasks.length === 0) {
      this.root.append(el("p", { class: "note", "data-empty-tasks": "" }, "No open tasks."));
      return;
    }
    for (const task of tasks) this.root.append(this.row(task));
  }

  private row(task: ManualTask): HTMLElement {
    const activate = el("button", { class: "btn primary task-activate" }, "Mark active");
    const terminate = el("button", { class: "btn danger task-terminate" }, "Mark terminated");
    activate.addEventListener("click", () => void this.complete(task, "ACTIVE"));
    terminate.addEventListener("click", () => void this.complete(task, "TERMINATED"));
    return el(
      "div",
      { class: "task-row", "data-task-id": task.id },
      el("span", { class: "task-service" }, task.serviceName),
      el("span", { class: "note" }, `opened ${task.createdAt}`),
      activate,
      terminate,
    );
  }

  private async complete(task: ManualTask, resolution: "ACTIVE" | "TERMINATED"): Promise<void> {
    try {
      await this.api.completeTask(task.id, resolution, "resolved from portal");
    } catch (error) {
      if (error instanceof ApiError) toast(`${error.code}: ${error.message}`);
      else throw error;
    }
    await this.refresh();
    this.onOrderRefresh(await this.api.getOrder(this.orderId));
  }
}
