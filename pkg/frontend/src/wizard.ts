// Order wizard: one typed input control per configurable characteristic,
// read-only rows for everything else, client-side validation mirroring the
// gateway, and a submit that is blocked while any value is invalid.

import { el, clear } from "./dom.js";
import { validateValue } from "./validate.js";
import type { Characteristic, OrderRequest, ServiceSpecification, ValueEntry } from "./types.js";

export interface Wizard {
  root: HTMLElement;
  submitButton: HTMLButtonElement;
  isValid(): boolean;
  /** The POST body the wizard would submit right now, or null while invalid. */
  body(): OrderRequest | null;
}

function defaultEntry(char: Characteristic): ValueEntry | null {
  return char.serviceSpecCharacteristicValue.find((entry) => entry.isDefault) ?? null;
}

function optionLabel(entry: ValueEntry): string {
  const { value, alias } = entry.value;
  return alias ? `${alias} (${value})` : value;
}

function makeControl(char: Characteristic): HTMLInputElement | HTMLSelectElement | HTMLTextAreaElement {
  const preset = defaultEntry(char)?.value.value ?? "";
  if (char.valueType === "ENUM" && char.serviceSpecCharacteristicValue.length > 0) {
    const select = el("select", { "data-char": char.name });
    select.append(el("option", { value: "" }, "(not set)"));
    for (const entry of char.serviceSpecCharacteristicValue) {
      if (entry.value.value === "") continue;
      select.append(el("option", { value: entry.value.value }, optionLabel(entry)));
    }
    select.value = preset;
    return select;
  }
  if (char.valueType === "BOOLEAN") {
    const select = el("select", { "data-char": char.name });
    select.append(el("option", { value: "" }, "(not set)"));
    select.append(el("option", { value: "true" }, "true"));
    select.append(el("option", { value: "false" }, "false"));
    select.value = preset;
    return select;
  }
  if (char.valueType === "SET" || char.valueType === "ARRAY" || char.valueType === "LONGTEXT") {
    const area = el("textarea", { "data-char": char.name, rows: "2" });
    if (char.valueType !== "LONGTEXT") area.placeholder = '["first", "second"]';
    area.value = preset;
    return area;
  }
  const input = el("input", { type: "text", "data-char": char.name });
  if (["INTEGER", "SMALLINT", "LONGINT"].includes(char.valueType)) {
    input.inputMode = "numeric";
  } else if (char.valueType === "FLOAT") {
    input.inputMode = "decimal";
  } else if (char.valueType === "TIMESTAMP") {
    input.placeholder = "2026-01-01T12:00:00Z";
  }
  input.value = preset;
  return input;
}

function readOnlyRow(char: Characteristic): HTMLElement {
  const preset = defaultEntry(char);
  const shown = preset
    ? preset.value.alias
      ? `${preset.value.value} (${preset.value.alias})`
      : preset.value.value
    : "";
  const unit = preset?.unitOfMeasure ? ` ${preset.unitOfMeasure}` : "";
  return el(
    "div",
    { class: "char-row readonly", "data-readonly-char": char.name },
    el("span", { class: "char-name" }, char.name),
    el("span", { class: "char-value" }, shown + unit),
    el("span", { class: "char-type" }, char.valueType),
  );
}

export function buildWizard(
  spec: ServiceSpecification,
  onSubmit: (body: OrderRequest) => void,
): Wizard {
  const configurable = spec.serviceSpecCharacteristic.filter((c) => c.configurable);
  const fixed = spec.serviceSpecCharacteristic.filter((c) => !c.configurable);
  const controls = new Map<string, { char: Characteristic; control: HTMLInputElement | HTMLSelectElement | HTMLTextAreaElement; violation: HTMLElement }>();

  const form = el("form", { class: "wizard card" });
  form.append(
    el("h2", {}, `Order: ${spec.name}`),
    el("p", { class: "note" }, spec.description),
  );

  for (const char of configurable) {
    const control = makeControl(char);
    const violation = el("span", { class: "violation", "data-violation-for": char.name });
    const unit = defaultEntry(char)?.unitOfMeasure;
    const label = el(
      "label",
      { class: "char-row editable" },
      el("span", { class: "char-name" }, char.name + (unit ? ` (${unit})` : "")),
      control,
      el("span", { class: "char-type" }, char.valueType),
      violation,
    );
    control.addEventListener("input", revalidate);
    control.addEventListener("change", revalidate);
    controls.set(char.name, { char, control, violation });
    form.append(label);
  }

  if (fixed.length > 0) {
    form.append(el("h3", {}, "Included settings"));
    for (const char of fixed) form.append(readOnlyRow(char));
  }

  const submitButton = el("button", { type: "submit", class: "btn primary" }, "Place order");
  const errorBox = el("p", { class: "violation", "data-wizard-error": "" });
  form.append(submitButton, errorBox);

  function collectViolations(): Map<string, string> {
    const found = new Map<string, string>();
    for (const { char, control } of controls.values()) {
      const text = control.value.trim();
      if (text === "") continue; // omitted values fall back to defaults
      const violations = validateValue(char, text);
      if (violations.length > 0) found.set(char.name, violations[0].message);
    }
    return found;
  }

  function revalidate(): void {
    const found = collectViolations();
    for (const [name, { violation }] of controls) {
      violation.textContent = found.get(name) ?? "";
    }
    submitButton.disabled = found.size > 0;
  }

  function body(): OrderRequest | null {
    if (collectViolations().size > 0) return null;
    const requestedValues: Record<string, { value: string }> = {};
    for (const [name, { control }] of controls) {
      const text = control.value.trim();
      if (text !== "") requestedValues[name] = { value: text };
    }
    return { orderItem: [{ specId: spec.id, requestedValues }] };
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const request = body();
    if (request) onSubmit(request);
  });

  revalidate();
  const root = el("div", { class: "wizard-host" });
  clear(root);
  root.append(form);
  return {
    root,
    submitButton,
    isValid: () => collectViolations().size === 0,
    body,
  };
}
