import { ApiClient } from "./api.js";
import { PortalApp } from "./app.js";

let stored: string | null = null;
try {
  stored = localStorage.getItem("portal-token");
} catch {
  stored = null;
}

const api = new ApiClient("", stored || null);
const host = document.getElementById("app");
if (host) new PortalApp(host, api).start();
