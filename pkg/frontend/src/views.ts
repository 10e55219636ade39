// Read-only renderings of orders, services and catalog entries. All values
// come straight out of API responses.

import { el, badgeClass } from "./dom.js";
import type { CharacteristicValue, Service, ServiceOrder, ServiceSpecification } from "./types.js";

function shownValue(value: CharacteristicValue): string {
  return value.alias ? `${value.value} (${value.alias})` : value.value;
}

function characteristicTable(values: Record<string, CharacteristicValue>, owner: string): HTMLElement {
  const table = el("table", { class: "char-table" });
  const head = el("tr", {}, el("th", {}, "Characteristic"), el("th", {}, "Value"));
  table.append(head);
  for (const [name, value] of Object.entries(values)) {
    table.append(
      el(
        "tr",
        { "data-char-of": owner },
        el("td", {}, `${owner}: ${name}`),
        el("td", {}, shownValue(value)),
      ),
    );
  }
  return table;
}

export function orderHeader(order: ServiceOrder): HTMLElement {
  const badge = el("span", { class: badgeClass(order.state), id: "order-badge" }, order.state);
  return el(
    "header",
    { class: "order-header" },
    el("h2", {}, `Order ${order.id.slice(0, 8)}`),
    badge,
    el("p", { class: "note" }, `ordered by ${order.orderedBy} on ${order.orderDate}`),
  );
}

/** Patch the badge in place; the page is never reloaded to show progress. */
export function updateOrderBadge(root: HTMLElement, order: ServiceOrder): void {
  const badge = root.querySelector<HTMLElement>("#order-badge");
  if (!badge) return;
  badge.textContent = order.state;
  badge.className = badgeClass(order.state);
}

/** Items, requested values and supporting services; the header with the
 * badge lives in a separate node so polling can re-render this part alone. */
export function orderBody(order: ServiceOrder, services: Service[]): HTMLElement {
  const root = el("article", { class: "card order-detail" });

  const items = el("table", { class: "items" });
  items.append(el("tr", {}, el("th", {}, "Item"), el("th", {}, "State")));
  for (const item of order.items) {
    items.append(
      el("tr", {}, el("td", {}, item.itemId), el("td", {}, item.state)),
    );
  }
  root.append(el("h3", {}, "Items"), items);

  for (const item of order.items) {
    if (Object.keys(item.requestedValues).length > 0) {
      root.append(characteristicTable(item.requestedValues, "requested"));
    }
  }

  root.append(el("h3", {}, "Supporting services"));
  for (const service of services) {
    const section = el(
      "section",
      { class: "service-block", "data-service-id": service.id },
      el(
        "h4",
        {},
        service.name,
        " ",
        el("span", { class: badgeClass(service.state) }, service.state),
        " ",
        el("span", { class: "note" }, `${service.category}, startMode ${service.startMode}`),
      ),
    );
    if (service.errorNote) {
      section.append(el("p", { class: "violation" }, service.errorNote));
    }
    if (Object.keys(service.characteristics).length > 0) {
      section.append(characteristicTable(service.characteristics, service.name));
    }
    root.append(section);
  }
  return root;
}

export function serviceDetail(service: Service): HTMLElement {
  const root = el("article", { class: "card" });
  root.append(
    el(
      "header",
      {},
      el("h2", {}, service.name),
      el("span", { class: badgeClass(service.state) }, service.state),
    ),
    el("p", { class: "note" }, `order ${service.orderId}, ${service.category}, startMode ${service.startMode}`),
  );
  if (service.errorNote) root.append(el("p", { class: "violation" }, service.errorNote));
  root.append(characteristicTable(service.characteristics, service.name));
  return root;
}

export function catalogCard(spec: ServiceSpecification, onOrder: (spec: ServiceSpecification) => void): HTMLElement {
  const orderButton = el("button", { class: "btn primary" }, "Order");
  orderButton.addEventListener("click", () => onOrder(spec));
  const card = el(
    "article",
    { class: "card spec-card", "data-spec-id": spec.id },
    el("h3", {}, spec.name),
    el("p", { class: "note" }, `${spec.version} | ${spec.specType}${spec.isBundle ? " bundle" : ""}`),
    el("p", {}, spec.description),
    orderButton,
  );
  return card;
}
