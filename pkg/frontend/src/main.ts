import { bootstrap } from "./app.js";

window.addEventListener("DOMContentLoaded", () => {
  bootstrap();
});
