// Client-side mirror of the gateway's value validation. The server stays
// authoritative; this exists so the wizard can block obviously invalid
// submissions before they leave the browser.

import type { Characteristic, CharacteristicValue } from "./types.js";

export interface Violation {
  code: "TypeMismatch" | "ValueNotAllowed";
  message: string;
}

const INT_RANGES: Record<string, [bigint, bigint]> = {
  SMALLINT: [-(2n ** 15n), 2n ** 15n - 1n],
  INTEGER: [-(2n ** 31n), 2n ** 31n - 1n],
  LONGINT: [-(2n ** 63n), 2n ** 63n - 1n],
};

const INT_RE = /^[+-]?\d+$/;
const FLOAT_RE = /^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$/;
const BASE64_RE = /^[A-Za-z0-9+/]*={0,2}$/;
// date-time with an explicit offset, per RFC 3339
const TIMESTAMP_RE = /^\d{4}-\d{2}-\d{2}[Tt].*(?:[Zz]|[+-]\d{2}:\d{2})$/;

function scalarViolation(
  valueType: string,
  text: string,
  allowed: CharacteristicValue[],
): Violation | null {
  if (valueType in INT_RANGES) {
    if (!INT_RE.test(text)) {
      return { code: "TypeMismatch", message: `${JSON.stringify(text)} is not a base-10 integer` };
    }
    const [low, high] = INT_RANGES[valueType];
    const parsed = BigInt(text);
    if (parsed < low || parsed > high) {
      return { code: "TypeMismatch", message: `${JSON.stringify(text)} is out of range for ${valueType}` };
    }
    return null;
  }
  if (valueType === "FLOAT") {
    if (!FLOAT_RE.test(text)) {
      return { code: "TypeMismatch", message: `${JSON.stringify(text)} is not a decimal number` };
    }
    return null;
  }
  if (valueType === "BOOLEAN") {
    if (text !== "true" && text !== "false") {
      return { code: "TypeMismatch", message: `${JSON.stringify(text)} is not 'true' or 'false'` };
    }
    return null;
  }
  if (valueType === "ENUM") {
    if (allowed.length > 0 && !allowed.some((v) => v.value === text)) {
      return { code: "ValueNotAllowed", message: `${JSON.stringify(text)} is not an allowed value` };
    }
    return null;
  }
  if (valueType === "TIMESTAMP") {
    if (!TIMESTAMP_RE.test(text) || Number.isNaN(Date.parse(text))) {
      return { code: "TypeMismatch", message: `${JSON.stringify(text)} is not an RFC 3339 timestamp` };
    }
    return null;
  }
  if (valueType === "BINARY") {
    if (!BASE64_RE.test(text) || text.length % 4 !== 0) {
      return { code: "TypeMismatch", message: `${JSON.stringify(text)} is not base64 data` };
    }
    return null;
  }
  // TEXT and LONGTEXT accept anything
  return null;
}

/**
 * Validate one candidate value against a characteristic. Collections are a
 * JSON array in the value text; each element is checked against the declared
 * element type, and SET elements must be unique.
 */
export function validateValue(char: Characteristic, text: string): Violation[] {
  const allowed = char.serviceSpecCharacteristicValue
    .map((entry) => entry.value)
    .filter((v) => v.value !== "");
  if (char.valueType === "SET" || char.valueType === "ARRAY") {
    let elements: unknown;
    try {
      elements = JSON.parse(text);
    } catch {
      return [{ code: "TypeMismatch", message: `${JSON.stringify(text)} is not a JSON array` }];
    }
    if (!Array.isArray(elements)) {
      return [{ code: "TypeMismatch", message: `${JSON.stringify(text)} is not a JSON array` }];
    }
    const elementType = char.elementValueType ?? "TEXT";
    const violations: Violation[] = [];
    for (const element of elements) {
      if (element !== null && typeof element === "object") {
        violations.push({
          code: "TypeMismatch",
          message: `${JSON.stringify(element)} is not a scalar element`,
        });
        continue;
      }
      const asText = typeof element === "boolean" ? String(element) : String(element);
      const found = scalarViolation(elementType, asText, allowed);
      if (found) violations.push(found);
    }
    if (char.valueType === "SET") {
      const distinct = new Set(elements.map((e) => JSON.stringify(e)));
      if (distinct.size !== elements.length) {
        violations.push({ code: "ValueNotAllowed", message: "set elements must be unique" });
      }
    }
    return violations;
  }
  const found = scalarViolation(char.valueType, text, allowed);
  return found ? [found] : [];
}
