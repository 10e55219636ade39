// Hash-routed single page app. Views are re-rendered from fresh API
// responses; the order page polls for progress so state changes appear
// without a reload.

import { ApiClient, ApiError } from "./api.js";
import { el, clear, toast } from "./dom.js";
import { buildWizard } from "./wizard.js";
import { TaskConsole } from "./tasks.js";
import { catalogCard, orderBody, orderHeader, serviceDetail, updateOrderBadge } from "./views.js";
import type { ServiceOrder, ServiceSpecification } from "./types.js";

export interface AppOptions {
  /** Refresh interval for the order page, milliseconds. */
  pollMs?: number;
}

export class PortalApp {
  private content: HTMLElement;
  private tokenInput: HTMLInputElement;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  // Bumped on every navigation; in-flight page builds from an older
  // navigation abort instead of appending a second copy of the view.
  private navSeq = 0;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private options: AppOptions = {},
  ) {
    this.content = el("main", { id: "content" });
    this.tokenInput = el("input", {
      type: "password",
      placeholder: "bearer token",
      id: "token-input",
    });
  }

  start(): void {
    clear(this.root);
    this.root.append(this.chrome(), this.content);
    window.addEventListener("hashchange", () => void this.route());
    void this.route();
  }

  stop(): void {
    this.stopPolling();
  }

  private chrome(): HTMLElement {
    const apply = el("button", { class: "btn ghost" }, "Use token");
    this.tokenInput.value = this.api.token ?? "";
    apply.addEventListener("click", () => {
      this.api.token = this.tokenInput.value.trim() || null;
      try {
        localStorage.setItem("portal-token", this.api.token ?? "");
      } catch {
        // storage may be unavailable; the in-memory token still applies
      }
      void this.route();
    });
    const nav = el(
      "nav",
      {},
      this.navLink("#/catalog", "Catalog"),
      this.navLink("#/orders", "Orders"),
      this.navLink("#/services", "Inventory"),
      this.navLink("#/nsd", "Descriptors"),
    );
    return el(
      "header",
      { class: "chrome" },
      el("span", { class: "brand" }, "Slice services portal"),
      nav,
      el("span", { class: "auth" }, this.tokenInput, apply),
    );
  }

  private navLink(href: string, label: string): HTMLElement {
    return el("a", { href, class: "nav-link" }, label);
  }

  private async route(): Promise<void> {
    const seq = ++this.navSeq;
    this.stopPolling();
    const hash = window.location.hash || "#/catalog";
    const [, page, argument] = hash.split("/");
    const view = el("div", { class: "view" });
    try {
      if (page === "catalog" || page === "") await this.catalogPage(view);
      else if (page === "order-new" && argument) await this.wizardPage(view, argument);
      else if (page === "orders") await this.ordersPage(view);
      else if (page === "order" && argument) await this.orderPage(view, argument, seq);
      else if (page === "services") await this.servicesPage(view);
      else if (page === "service" && argument) await this.servicePage(view, argument);
      else if (page === "nsd") await this.descriptorPage(view);
      else this.notFound(view, "no such page");
    } catch (error) {
      if (seq !== this.navSeq) return;
      if (error instanceof ApiError && error.status === 404) {
        clear(view);
        this.notFound(view, error.message);
      } else if (error instanceof ApiError) {
        toast(`${error.code}: ${error.message}`);
      } else {
        throw error;
      }
    }
    if (seq !== this.navSeq) return;
    clear(this.content);
    this.content.append(view);
  }

  private notFound(view: HTMLElement, message: string): void {
    view.append(
      el("article", { class: "card", "data-not-found": "" }, el("h2", {}, "Not found"), el("p", {}, message)),
    );
  }

  private async catalogPage(view: HTMLElement): Promise<void> {
    const specs = await this.api.listSpecifications();
    const grid = el("div", { class: "grid" });
    for (const spec of specs) {
      grid.append(
        catalogCard(spec, (chosen: ServiceSpecification) => {
          window.location.hash = `#/order-new/${chosen.id}`;
        }),
      );
    }
    view.append(el("h1", {}, "Service catalog"), grid);
  }

  private async wizardPage(view: HTMLElement, specId: string): Promise<void> {
    const spec = await this.api.getSpecification(specId);
    const wizard = buildWizard(spec, (body) => {
      this.api
        .placeOrder(body)
        .then((order) => {
          window.location.hash = `#/order/${order.id}`;
        })
        .catch((error: unknown) => {
          if (error instanceof ApiError) toast(`${error.code}: ${error.message}`);
          else throw error;
        });
    });
    view.append(wizard.root);
  }

  private async ordersPage(view: HTMLElement): Promise<void> {
    const orders = await this.api.listOrders();
    const table = el("table", { class: "card" });
    table.append(
      el("tr", {}, el("th", {}, "Order"), el("th", {}, "Date"), el("th", {}, "State")),
    );
    for (const order of orders) {
      const link = el("a", { href: `#/order/${order.id}` }, order.id.slice(0, 8));
      table.append(
        el("tr", {}, el("td", {}, link), el("td", {}, order.orderDate), el("td", {}, order.state)),
      );
    }
    view.append(el("h1", {}, "Orders"), table);
  }

  private async orderPage(view: HTMLElement, orderId: string, seq: number): Promise<void> {
    const order = await this.api.getOrder(orderId);
    const services = await this.api.listServices({ orderId });

    const headerHost = el("div", {});
    headerHost.append(orderHeader(order));
    const bodyHost = el("div", {});
    bodyHost.append(orderBody(order, services));
    view.append(headerHost, bodyHost);

    const console_ = new TaskConsole(this.api, orderId, (fresh: ServiceOrder) => {
      updateOrderBadge(headerHost, fresh);
    });
    view.append(console_.root);
    try {
      await console_.refresh();
    } catch {
      // tasks are a provider surface; customers simply see no console
      console_.root.remove();
    }

    // A newer navigation owns the poll timer slot; leave it alone.
    if (seq !== this.navSeq) return;
    const refresh = async () => {
      const fresh = await this.api.getOrder(orderId);
      const freshServices = await this.api.listServices({ orderId });
      updateOrderBadge(headerHost, fresh);
      clear(bodyHost);
      bodyHost.append(orderBody(fresh, freshServices));
    };
    this.pollTimer = setInterval(() => {
      refresh().catch(() => undefined);
    }, this.options.pollMs ?? 3000);
  }

  private async servicesPage(view: HTMLElement): Promise<void> {
    const services = await this.api.listServices();
    const table = el("table", { class: "card" });
    table.append(
      el("tr", {}, el("th", {}, "Service"), el("th", {}, "Category"), el("th", {}, "State")),
    );
    for (const service of services) {
      const link = el("a", { href: `#/service/${service.id}` }, service.name);
      table.append(
        el("tr", {}, el("td", {}, link), el("td", {}, service.category), el("td", {}, service.state)),
      );
    }
    view.append(el("h1", {}, "Service inventory"), table);
  }

  private async servicePage(view: HTMLElement, serviceId: string): Promise<void> {
    const service = await this.api.getService(serviceId);
    view.append(serviceDetail(service));
  }

  private async descriptorPage(view: HTMLElement): Promise<void> {
    const descriptors = await this.api.listDescriptors();
    const table = el("table", { class: "card" });
    table.append(
      el("tr", {}, el("th", {}, "Id"), el("th", {}, "Name"), el("th", {}, "Version"), el("th", {}, "Vendor")),
    );
    for (const nsd of descriptors) {
      table.append(
        el(
          "tr",
          {},
          el("td", {}, nsd.id),
          el("td", {}, nsd.name),
          el("td", {}, nsd.version),
          el("td", {}, nsd.vendor),
        ),
      );
    }

    const name = el("input", { placeholder: "name", id: "nsd-name" });
    const version = el("input", { placeholder: "version", id: "nsd-version" });
    const vendor = el("input", { placeholder: "vendor", id: "nsd-vendor" });
    const submit = el("button", { class: "btn primary" }, "Onboard");
    submit.addEventListener("click", () => {
      this.api
        .onboardDescriptor({
          name: name.value.trim(),
          version: version.value.trim() || "1.0",
          vendor: vendor.value.trim(),
        })
        .then(() => this.route())
        .catch((error: unknown) => {
          if (error instanceof ApiError) toast(`${error.code}: ${error.message}`);
          else throw error;
        });
    });
    const form = el("div", { class: "card row" }, name, version, vendor, submit);
    view.append(el("h1", {}, "Network service descriptors"), table, el("h3", {}, "Onboard"), form);
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }
}
