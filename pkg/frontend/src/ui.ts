import { ApiClient, ApiError } from "./api.js";
import { computeLayout } from "./layout.js";
import { mergedView, sceneView, SnapshotFormatError, type GraphView } from "./viewmodel.js";
import type { ActionForm, EntityInfo, SceneListing } from "./types.js";

const WIDTH = 900;
const HEIGHT = 560;
const SVG_NS = "http://www.w3.org/2000/svg";

const MERGED_TAB = "__merged__";

/**
 * Single-page client. All rule outcomes come from the server's decisions;
 * the view refreshes by re-fetching snapshots, never by local edits.
 */
export class App {
  private session: { token: string; entity: string } | null = null;
  private sceneList: SceneListing[] = [];
  private activeTab: string | null = null;
  private seenRelations = new Set<string>();

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
  ) {}

  async start(): Promise<void> {
    this.root.innerHTML = "";
    this.root.appendChild(this.el("div", { class: "panel", "data-testid": "login-panel" }));
    this.root.appendChild(this.el("div", { class: "banner", "data-testid": "banner" }));
    this.root.appendChild(this.el("div", { class: "tabs", "data-testid": "tabs" }));
    this.root.appendChild(this.el("div", { class: "view", "data-testid": "graph-view" }));
    this.root.appendChild(this.el("div", { class: "panel", "data-testid": "action-panel" }));
    this.root.appendChild(this.el("div", { class: "modal hidden", "data-testid": "modal" }));
    await this.renderLogin();
  }

  // -- login ---------------------------------------------------------------

  private async renderLogin(): Promise<void> {
    const panel = this.query("login-panel");
    panel.innerHTML = "";
    const entities = await this.api.entities();
    const select = this.el("select", { "data-testid": "login-select" }) as HTMLSelectElement;
    for (const entity of entities) {
      const option = this.el("option", { value: entity.id }) as HTMLOptionElement;
      option.textContent = `${entity.name} (${entity.id})`;
      select.appendChild(option);
    }
    const button = this.el("button", { "data-testid": "login-button" });
    button.textContent = "Log in";
    button.addEventListener("click", () => void this.login(select.value));
    panel.append(select, button);
  }

  async login(entityId: string): Promise<void> {
    const session = await this.api.login(entityId);
    this.session = session;
    const status = this.query("login-panel");
    status.innerHTML = "";
    const label = this.el("span", { "data-testid": "session-label" });
    label.textContent = `Logged in as ${session.entity}`;
    status.appendChild(label);
    this.sceneList = await this.api.scenes();
    this.renderTabs();
    await this.selectTab(this.sceneList[0]?.id ?? MERGED_TAB);
  }

  // -- tabs ------------------------------------------------------------------

  private renderTabs(): void {
    const tabs = this.query("tabs");
    tabs.innerHTML = "";
    for (const scene of this.sceneList) {
      tabs.appendChild(this.tabButton(scene.id, scene.name));
    }
    tabs.appendChild(this.tabButton(MERGED_TAB, "Merged"));
  }

  private tabButton(id: string, label: string): HTMLElement {
    const button = this.el("button", { "data-testid": `tab-${id}`, class: "tab" });
    button.textContent = label;
    button.addEventListener("click", () => void this.selectTab(id));
    return button;
  }

  async selectTab(id: string): Promise<void> {
    this.activeTab = id;
    await this.refresh();
  }

  // -- graph view --------------------------------------------------------------

  async refresh(): Promise<void> {
    if (this.activeTab === null) {
      return;
    }
    const container = this.query("graph-view");
    const banner = this.query("banner");
    banner.textContent = "";
    try {
      const view =
        this.activeTab === MERGED_TAB
          ? mergedView(await this.api.merge(this.sceneList.map((s) => s.id)), this.session?.entity ?? null)
          : sceneView(await this.api.scene(this.activeTab), this.session?.entity ?? null);
      for (const edge of view.edges) {
        this.seenRelations.add(edge.label);
      }
      container.innerHTML = "";
      container.appendChild(this.renderGraph(view));
      this.renderActionPanel();
    } catch (error) {
      if (error instanceof SnapshotFormatError || error instanceof ApiError) {
        banner.textContent = `Cannot display this view: ${error.message}`;
        return;
      }
      throw error;
    }
  }

  private renderGraph(view: GraphView): SVGSVGElement {
    const positions = computeLayout(
      view.nodes.map((n) => n.id),
      view.edges.map((e) => ({ source: e.subject, target: e.object })),
      this.activeTab ?? "view",
      WIDTH,
      HEIGHT,
    );
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
    svg.setAttribute("width", String(WIDTH));
    svg.setAttribute("height", String(HEIGHT));
    svg.setAttribute("data-testid", "graph-svg");

    const defs = document.createElementNS(SVG_NS, "defs");
    const marker = document.createElementNS(SVG_NS, "marker");
    marker.setAttribute("id", "arrow");
    marker.setAttribute("viewBox", "0 0 10 10");
    marker.setAttribute("refX", "24");
    marker.setAttribute("refY", "5");
    marker.setAttribute("markerWidth", "7");
    marker.setAttribute("markerHeight", "7");
    marker.setAttribute("orient", "auto-start-reverse");
    const tip = document.createElementNS(SVG_NS, "path");
    tip.setAttribute("d", "M 0 0 L 10 5 L 0 10 z");
    tip.setAttribute("fill", "#555");
    marker.appendChild(tip);
    defs.appendChild(marker);
    svg.appendChild(defs);

    const title = document.createElementNS(SVG_NS, "text");
    title.setAttribute("x", "16");
    title.setAttribute("y", "28");
    title.setAttribute("class", "scene-title");
    title.setAttribute("data-testid", "scene-title");
    title.textContent = view.title;
    svg.appendChild(title);

    for (const edge of view.edges) {
      const from = positions.get(edge.subject);
      const to = positions.get(edge.object);
      if (!from || !to) {
        continue;
      }
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("data-testid", `edge-${edge.subject}-${edge.label}-${edge.object}`);
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.x));
      line.setAttribute("y1", String(from.y));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y));
      line.setAttribute("stroke", "#777");
      line.setAttribute("stroke-width", "1.5");
      line.setAttribute("marker-end", "url(#arrow)");
      if (edge.derived) {
        line.setAttribute("stroke-dasharray", "5,4");
      }
      group.appendChild(line);

      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String((from.x + to.x) / 2));
      label.setAttribute("y", String((from.y + to.y) / 2 - 6));
      label.setAttribute("class", "edge-label");
      label.setAttribute("text-anchor", "middle");
      label.textContent = edge.badges.length > 0 ? `${edge.label} [${edge.badges.join(",")}]` : edge.label;
      group.appendChild(label);
      svg.appendChild(group);
    }

    for (const node of view.nodes) {
      const at = positions.get(node.id);
      if (!at) {
        continue;
      }
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("data-testid", `node-${node.id}`);
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(at.x));
      circle.setAttribute("cy", String(at.y));
      circle.setAttribute("r", "16");
      circle.setAttribute("fill", node.color);
      if (node.highlighted) {
        circle.setAttribute("stroke", "#d62728");
        circle.setAttribute("stroke-width", "4");
        group.setAttribute("data-highlighted", "true");
      }
      group.appendChild(circle);
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(at.x));
      label.setAttribute("y", String(at.y + 32));
      label.setAttribute("text-anchor", "middle");
      label.setAttribute("class", "node-label");
      label.textContent = node.label;
      group.appendChild(label);
      svg.appendChild(group);
    }
    return svg;
  }

  // -- action panel ---------------------------------------------------------------

  private renderActionPanel(): void {
    const panel = this.query("action-panel");
    panel.innerHTML = "";
    if (!this.session || this.activeTab === null || this.activeTab === MERGED_TAB) {
      return;
    }
    const scene = this.sceneList.find((s) => s.id === this.activeTab);
    if (!scene) {
      return;
    }

    const verb = this.el("select", { "data-testid": "verb-select" }) as HTMLSelectElement;
    for (const value of ["establish", "cancel"]) {
      const option = this.el("option", { value }) as HTMLOptionElement;
      option.textContent = value;
      verb.appendChild(option);
    }

    const relation = this.el("input", {
      "data-testid": "relation-input",
      list: "relation-suggestions",
      placeholder: "relation (e.g. FollowAction)",
    }) as HTMLInputElement;
    const suggestions = this.el("datalist", { id: "relation-suggestions" });
    for (const id of [...this.seenRelations].sort()) {
      suggestions.appendChild(this.el("option", { value: id }));
    }

    const target = this.el("select", { "data-testid": "target-select" }) as HTMLSelectElement;
    target.appendChild(this.el("option", { value: "" }) as HTMLOptionElement);
    for (const member of scene.members) {
      if (member === this.session.entity) {
        continue;
      }
      const option = this.el("option", { value: member }) as HTMLOptionElement;
      option.textContent = member;
      target.appendChild(option);
    }

    const submit = this.el("button", { "data-testid": "submit-action" });
    submit.textContent = "Submit";
    const error = this.el("span", { class: "form-error", "data-testid": "form-error" });
    submit.addEventListener("click", () =>
      void this.submitAction({
        verb: verb.value as ActionForm["verb"],
        relation: relation.value.trim(),
        target: target.value,
      }),
    );
    panel.append(verb, relation, suggestions, target, submit, error);
  }

  async submitAction(form: ActionForm): Promise<void> {
    if (!this.session || this.activeTab === null || this.activeTab === MERGED_TAB) {
      return;
    }
    const error = this.query("form-error");
    if (!form.target || !form.relation) {
      error.textContent = "Pick a relation and a target first.";
      return;  // client-side validation: nothing is sent
    }
    error.textContent = "";
    const response = await this.api.submitAction({
      token: this.session.token,
      actor: this.session.entity,
      verb: form.verb,
      subject: this.session.entity,
      relation: form.relation,
      object: form.target,
      scene: this.activeTab,
    });
    if (response.decision.outcome === "Rejected") {
      this.showModal(response.decision.message);
      return;
    }
    await this.refresh();
  }

  // -- modal ------------------------------------------------------------------------

  showModal(message: string): void {
    const modal = this.query("modal");
    modal.classList.remove("hidden");
    modal.innerHTML = "";
    const text = this.el("p", { "data-testid": "modal-message" });
    text.textContent = message;
    const close = this.el("button", { "data-testid": "modal-close" });
    close.textContent = "OK";
    close.addEventListener("click", () => modal.classList.add("hidden"));
    modal.append(text, close);
  }

  // -- helpers --------------------------------------------------------------------------

  private el(tag: string, attrs: Record<string, string> = {}): HTMLElement {
    const element = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
      element.setAttribute(key, value);
    }
    return element;
  }

  private query(testId: string): HTMLElement {
    const found = this.root.querySelector(`[data-testid="${testId}"]`);
    if (!found) {
      throw new Error(`missing element ${testId}`);
    }
    return found as HTMLElement;
  }
}

export type { EntityInfo };
