// End-to-end: the portal running in a DOM against a live gateway process.
// The gateway is spawned with fast simulator ticks so deployments resolve on
// their own; every assertion below reads the same document that was first
// mounted, demonstrating progress without a page reload.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import net from "node:net";
import os from "node:os";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { Window } from "happy-dom";

import { ApiClient } from "../src/api.js";
import { PortalApp } from "../src/app.js";
import { until } from "./helpers.js";

const nodeFetch = (input: string, init?: RequestInit) => globalThis.fetch(input, init);

let gateway: ChildProcess;
let dataDir: string;
let base: string;
let dom: Window;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const { port } = probe.address() as net.AddressInfo;
      probe.close(() => resolve(port));
    });
  });
}

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  dataDir = mkdtempSync(path.join(os.tmpdir(), "portal-e2e-"));
  gateway = spawn(
    "python3",
    [
      "-m",
      "sliceoss.cli",
      "serve",
      "--host",
      "127.0.0.1",
      "--port",
      String(port),
      "--data-dir",
      dataDir,
      "--tick-interval",
      "0.2",
      "--sync-interval",
      "120",
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  gateway.stderr?.on("data", () => undefined);
  await until(async () => {
    try {
      const response = await nodeFetch(`${base}/tmf-api/serviceCatalogManagement/v4/category`);
      return response.ok;
    } catch {
      return false;
    }
  }, 60_000, 250);

  dom = new Window({ url: `${base}/` });
  globalThis.window = dom as unknown as typeof globalThis.window;
  globalThis.document = dom.document as unknown as Document;
});

afterAll(async () => {
  dom?.close();
  gateway?.kill("SIGTERM");
  await new Promise((resolve) => {
    gateway?.once("exit", resolve);
    setTimeout(resolve, 5000);
  });
  rmSync(dataDir, { recursive: true, force: true });
});

function provider(): ApiClient {
  return new ApiClient(base, "provider-token", nodeFetch);
}

function customer(): ApiClient {
  return new ApiClient(base, "customer-token", nodeFetch);
}

async function placeSliceOrder(): Promise<string> {
  const api = customer();
  const specs = await api.listSpecifications();
  const nest = specs.find((spec) => spec.name === "eMBB 5G Slice");
  expect(nest).toBeDefined();
  const order = await api.placeOrder({
    orderItem: [{ specId: nest!.id, requestedValues: {} }],
  });
  // the deployment leg resolves on its own via the gateway's tick loop
  await until(async () => (await api.getOrder(order.id)).state === "PARTIAL", 30_000, 200);
  return order.id;
}

function mountOrderPage(orderId: string): PortalApp {
  document.body.innerHTML = '<div id="app"></div>';
  window.location.hash = `#/order/${orderId}`;
  const app = new PortalApp(document.getElementById("app")!, provider(), { pollMs: 150 });
  app.start();
  return app;
}

describe("task console drives the order badge", () => {
  it("resolving both manual tasks flips PARTIAL to COMPLETED without a reload", async () => {
    const orderId = await placeSliceOrder();
    const app = mountOrderPage(orderId);
    try {
      await until(() => document.querySelectorAll(".task-row").length === 2, 20_000);

      const badge = document.querySelector<HTMLElement>("#order-badge")!;
      expect(badge.textContent).toBe("PARTIAL");
      const documentBefore = document;

      document.querySelector<HTMLElement>(".task-activate")!.click();
      await until(() => document.querySelectorAll(".task-row").length === 1, 20_000);
      document.querySelector<HTMLElement>(".task-activate")!.click();

      await until(() => badge.textContent === "COMPLETED", 20_000);

      // same document, same badge node: nothing was reloaded
      expect(document).toBe(documentBefore);
      expect(document.querySelector("#order-badge")).toBe(badge);
      expect(document.querySelector("[data-empty-tasks]")).not.toBeNull();

      // the provider sees the activated slice in the rendered service blocks
      await until(() => {
        const blocks = [...document.querySelectorAll(".service-block")];
        return blocks.length === 4 && blocks.every((b) => b.textContent!.includes("ACTIVE"));
      }, 20_000);
    } finally {
      app.stop();
    }
  }, 90_000);

  it("completing an already-resolved task surfaces the server error verbatim", async () => {
    const orderId = await placeSliceOrder();
    const app = mountOrderPage(orderId);
    try {
      await until(() => document.querySelectorAll(".task-row").length === 2, 20_000);

      // resolve the first task behind the console's back
      const staleRow = document.querySelector<HTMLElement>(".task-row")!;
      const staleId = staleRow.getAttribute("data-task-id")!;
      await provider().completeTask(staleId, "ACTIVE");

      staleRow.querySelector<HTMLElement>(".task-activate")!.click();
      await until(() => {
        const toast = document.querySelector(".toast");
        return toast !== null && toast.textContent!.includes("TaskNotOpen");
      }, 20_000);

      // the refetch after the failure drops the stale row
      await until(() => document.querySelectorAll(".task-row").length === 1, 20_000);
      document.querySelector<HTMLElement>(".task-activate")!.click();
      await until(
        () => document.querySelector("#order-badge")!.textContent === "COMPLETED",
        20_000,
      );
    } finally {
      app.stop();
    }
  }, 90_000);
});

describe("catalog page", () => {
  it("lists the public offers with an order action", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    window.location.hash = "#/catalog";
    const app = new PortalApp(document.getElementById("app")!, customer(), { pollMs: 9999 });
    app.start();
    try {
      await until(() => document.querySelectorAll(".spec-card").length >= 1, 20_000);
      const names = [...document.querySelectorAll(".spec-card h3")].map((n) => n.textContent);
      expect(names).toContain("eMBB 5G Slice");
      // internal resource specs stay hidden from the public view
      expect(names).not.toContain("cirros_2vm_ns");
    } finally {
      app.stop();
    }
  }, 60_000);
});
