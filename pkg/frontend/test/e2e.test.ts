// @vitest-environment jsdom
//
// Full-stack flow against the real engine: spawns the Python service with
// the bundled three-scene seed and drives the actual App DOM over HTTP.
// Enabled with RUN_E2E=1 (npm run test:e2e).
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { ApiClient } from "../src/api.js";
import { App } from "../src/ui.js";

const REJECTION = "Sorry, you can't marry this person because Iron Man is already married to this person";

const here = dirname(fileURLToPath(import.meta.url));
const seedPath = join(here, "..", "..", "src", "metaonce", "data", "golden_seed.json");

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitForServer(base: string, proc: ChildProcess): Promise<void> {
  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    if (proc.exitCode !== null) {
      throw new Error(`server exited with ${proc.exitCode}`);
    }
    try {
      await fetch(`${base}/scenes`);
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  throw new Error("server did not come up");
}

function testId(id: string): HTMLElement {
  const found = document.querySelector(`[data-testid="${id}"]`);
  if (!found) {
    throw new Error(`missing ${id}`);
  }
  return found as HTMLElement;
}

describe.skipIf(!process.env.RUN_E2E)("browser flows against the live engine", () => {
  let proc: ChildProcess;
  let base: string;
  let dataDir: string;

  beforeAll(async () => {
    const port = await freePort();
    base = `http://127.0.0.1:${port}`;
    dataDir = mkdtempSync(join(tmpdir(), "metaonce-e2e-"));
    proc = spawn("python3", ["-m", "metaonce", "--port", String(port), "--data-dir", dataDir, "--seed", seedPath], {
      stdio: "ignore",
    });
    await waitForServer(base, proc);

    // Iron Man marries Kate so the exclusive constraint has something to defend.
    const login = await (await fetch(`${base}/login`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ entity: "a6" }),
    })).json();
    const marry = await (await fetch(`${base}/actions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        token: login.token,
        actor: "a6",
        verb: "establish",
        subject: "a6",
        relation: "MarryAction",
        object: "a3",
        scene: "s1",
      }),
    })).json();
    expect(marry.decision.outcome).toBe("Accepted");
  }, 30_000);

  afterAll(() => {
    proc?.kill("SIGKILL");
    if (dataDir) {
      rmSync(dataDir, { recursive: true, force: true });
    }
  });

  it("runs the whole session: rejection modal, follow, merged view", async () => {
    document.body.innerHTML = "<div id='app'></div>";
    const app = new App(document.getElementById("app")!, new ApiClient(base));
    await app.start();
    await app.login("a5");
    await app.selectTab("s1");

    // Spiderman proposes to a married Kate: the modal carries the
    // server's exact wording, no client-side interpretation.
    await app.submitAction({ verb: "establish", relation: "MarryAction", target: "a3" });
    expect(testId("modal-message").textContent).toBe(REJECTION);

    // following is unconstrained: the edge shows up after the refresh
    expect(document.querySelector("[data-testid='edge-a5-FollowAction-a3']")).toBeNull();
    await app.submitAction({ verb: "establish", relation: "FollowAction", target: "a3" });
    expect(testId("edge-a5-FollowAction-a3")).toBeTruthy();

    // merged tab renders the union of all three scenes' triples
    await app.selectTab("__merged__");
    const merged = await (await fetch(`${base}/merge`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ scenes: ["s1", "s2", "s3"] }),
    })).json();
    const rendered = document.querySelectorAll("[data-testid^='edge-']");
    expect(rendered.length).toBe(merged.edges.length);
    for (const edge of merged.edges) {
      const element = testId(`edge-${edge.subject}-${edge.relation}-${edge.object}`);
      expect(element.querySelector("text")!.textContent).toContain(`[${edge.scenes.join(",")}]`);
    }
    // the highlighted vertex is the logged-in user
    expect(testId("node-a5").getAttribute("data-highlighted")).toBe("true");
  }, 30_000);
});
