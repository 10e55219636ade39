import type { Characteristic, ServiceSpecification } from "../src/types.js";

export function makeCharacteristic(partial: Partial<Characteristic> & { name: string }): Characteristic {
  return {
    description: "",
    valueType: "TEXT",
    elementValueType: null,
    configurable: false,
    minCardinality: 0,
    maxCardinality: 1,
    isUnique: true,
    extensible: null,
    regex: null,
    serviceSpecCharacteristicValue: [],
    serviceSpecCharRelationship: [],
    ...partial,
  };
}

export function makeSpec(characteristics: Characteristic[], partial: Partial<ServiceSpecification> = {}): ServiceSpecification {
  return {
    id: "spec-1",
    name: "Surveillance Slice",
    version: "1.0",
    description: "A camera-backed slice offer",
    specType: "CFS",
    isBundle: false,
    lifecycleStatus: "ACTIVE",
    serviceSpecCharacteristic: characteristics,
    serviceSpecRelationship: [],
    origin: null,
    ...partial,
  };
}

export async function until(
  condition: () => boolean | Promise<boolean>,
  timeoutMs = 15_000,
  stepMs = 100,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (await condition()) return;
    await new Promise((resolve) => setTimeout(resolve, stepMs));
  }
  throw new Error(`condition not met within ${timeoutMs}ms`);
}
