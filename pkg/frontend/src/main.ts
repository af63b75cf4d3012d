import { ApiClient } from "./api.js";
import { App } from "./ui.js";

const root = document.getElementById("app");
if (root) {
  const app = new App(root, new ApiClient(window.location.origin));
  void app.start();
}
