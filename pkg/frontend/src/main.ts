// Browser entry point. The service origin can be pinned with
// ?api=http://host:port; by default the page assumes it is served from
// the same origin as the service (or a dev proxy).

import { mount } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "";

mount(document, { baseUrl, window });
