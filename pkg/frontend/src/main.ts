/** Entry point: boot the editor against the service named by ?service= or
 * the current origin. */
import { ApiClient } from "./api.js";
import { EditorController } from "./controller.js";
import { mount } from "./dom.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? window.location.origin;
const mode = (params.get("mode") ?? "IGA") as "BASE" | "ILM" | "IGA";

const controller = new EditorController(new ApiClient(base));
mount(document.getElementById("app")!, controller);
void controller.start(mode);
