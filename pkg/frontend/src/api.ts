// Thin fetch client for the gateway. Every portal action is exactly one
// call here; there are no client-side state transitions.

import type {
  Category,
  ManualTask,
  NsDescriptor,
  OrderRequest,
  Service,
  ServiceOrder,
  ServiceSpecification,
} from "./types.js";

const CATALOG = "/tmf-api/serviceCatalogManagement/v4";
const ORDERING = "/tmf-api/serviceOrdering/v4";
const INVENTORY = "/tmf-api/serviceInventory/v4";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl = "",
    public token: string | null = null,
    private fetchImpl: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const code = payload?.code ?? "HttpError";
      const message = payload?.message ?? `${response.status} on ${path}`;
      throw new ApiError(response.status, code, message);
    }
    return payload as T;
  }

  listSpecifications(): Promise<ServiceSpecification[]> {
    return this.request("GET", `${CATALOG}/serviceSpecification`);
  }

  getSpecification(id: string): Promise<ServiceSpecification> {
    return this.request("GET", `${CATALOG}/serviceSpecification/${id}`);
  }

  listCategories(): Promise<Category[]> {
    return this.request("GET", `${CATALOG}/category`);
  }

  placeOrder(body: OrderRequest): Promise<ServiceOrder> {
    return this.request("POST", `${ORDERING}/serviceOrder`, body);
  }

  listOrders(): Promise<ServiceOrder[]> {
    return this.request("GET", `${ORDERING}/serviceOrder`);
  }

  getOrder(id: string): Promise<ServiceOrder> {
    return this.request("GET", `${ORDERING}/serviceOrder/${id}`);
  }

  listServices(query: { orderId?: string } = {}): Promise<Service[]> {
    const params = new URLSearchParams();
    if (query.orderId) params.set("orderId", query.orderId);
    const suffix = params.size ? `?${params}` : "";
    return this.request("GET", `${INVENTORY}/service${suffix}`);
  }

  getService(id: string): Promise<Service> {
    return this.request("GET", `${INVENTORY}/service/${id}`);
  }

  listTasks(orderId?: string, status?: string): Promise<ManualTask[]> {
    const params = new URLSearchParams();
    if (orderId) params.set("orderId", orderId);
    if (status) params.set("status", status);
    const suffix = params.size ? `?${params}` : "";
    return this.request("GET", `/osom/manualTask${suffix}`);
  }

  completeTask(taskId: string, resolution: "ACTIVE" | "TERMINATED", note = ""): Promise<ManualTask> {
    return this.request("POST", `/osom/manualTask/${taskId}/complete`, { resolution, note });
  }

  listDescriptors(): Promise<NsDescriptor[]> {
    return this.request("GET", "/nfvo/nsd/v1/ns_descriptors");
  }

  onboardDescriptor(body: { name: string; version: string; vendor: string }): Promise<NsDescriptor> {
    return this.request("POST", "/nfvo/nsd/v1/ns_descriptors", body);
  }
}
