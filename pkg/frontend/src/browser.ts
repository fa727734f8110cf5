/** Browser entry: wire the explorer to the page and the same-origin API
 * (override with ?api=http://host:port when served separately). */

import { initExplorer } from "./main.js";

const params = new URLSearchParams(window.location.search);
const app = initExplorer(document, { baseUrl: params.get("api") ?? "" });

declare global {
  interface Window { explorer: ReturnType<typeof initExplorer>; }
}
window.explorer = app;
