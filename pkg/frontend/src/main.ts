import { mount } from "./app.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
const baseUrl =
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8000";
const workbench = mount(root, baseUrl);
void workbench.start();
