// Client-side mirrors of the gateway's wire JSON. The portal never invents
// state: everything rendered comes out of these shapes as the API returned
// them.

export interface CharacteristicValue {
  value: string;
  alias: string | null;
}

export interface ValueEntry {
  value: CharacteristicValue;
  unitOfMeasure: string | null;
  isDefault: boolean;
}

export interface CharRelationship {
  name: string;
  relationshipType: "dependency" | "tag";
  role: string;
}

export interface Characteristic {
  name: string;
  description: string;
  valueType: string;
  elementValueType: string | null;
  configurable: boolean;
  minCardinality: number;
  maxCardinality: number;
  isUnique: boolean;
  extensible: boolean | null;
  regex: string | null;
  serviceSpecCharacteristicValue: ValueEntry[];
  serviceSpecCharRelationship: CharRelationship[];
}

export interface SpecRelationship {
  specId: string;
  relationshipType: string;
}

export interface ServiceSpecification {
  id: string;
  name: string;
  version: string;
  description: string;
  specType: "CFS" | "RFS";
  isBundle: boolean;
  lifecycleStatus: string;
  serviceSpecCharacteristic: Characteristic[];
  serviceSpecRelationship: SpecRelationship[];
  origin: { partnerId: string; remoteSpecId: string } | null;
}

export interface OrderItem {
  itemId: string;
  specId: string;
  requestedValues: Record<string, CharacteristicValue>;
  state: string;
}

export interface ServiceOrder {
  id: string;
  orderedBy: string;
  orderDate: string;
  state: string;
  items: OrderItem[];
  supportingServiceRefs: string[];
  notes: { at: string; text: string }[];
}

export interface Service {
  id: string;
  name: string;
  specId: string;
  orderId: string;
  category: "TOP" | "CFS_LEAF" | "CFS_BUNDLE" | "RFS";
  startMode: number;
  state: string;
  characteristics: Record<string, CharacteristicValue>;
  supportingServiceRefs: string[];
  supportingResourceRefs: string[];
  errorNote: string | null;
  planPath: string;
}

export interface ManualTask {
  id: string;
  orderId: string;
  serviceId: string;
  serviceName: string;
  specId: string;
  status: "OPEN" | "RESOLVED";
  createdAt: string;
  resolvedAt: string | null;
  resolution: string | null;
  note: string | null;
}

export interface NsDescriptor {
  id: string;
  name: string;
  version: string;
  vendor: string;
  packagingFormat: string;
  packageLocation: string;
}

export interface Category {
  id: string;
  name: string;
  description: string;
  specIds: string[];
}

/** Body of POST serviceOrder, as the wizard assembles it. */
export interface OrderRequest {
  orderItem: {
    specId: string;
    requestedValues: Record<string, { value: string }>;
  }[];
}
