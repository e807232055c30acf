import { ApiClient } from "./api.js";
import { initApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  // same-origin service by default; override with ?api=http://host:port
  const override = new URLSearchParams(window.location.search).get("api");
  initApp(root, new ApiClient(override ?? ""));
}
