import { App } from "./app.js";
import { Client } from "./api.js";

const root = document.getElementById("app");
if (root) {
  const app = new App(root, new Client(""));
  void app.start();
}
