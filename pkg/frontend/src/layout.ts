import {
  forceCenter,
  forceCollide,
  forceLink,
  forceManyBody,
  forceSimulation,
  type SimulationLinkDatum,
  type SimulationNodeDatum,
} from "d3-force";

export interface Point {
  x: number;
  y: number;
}

interface LayoutNode extends SimulationNodeDatum {
  id: string;
}

/** Deterministic hash in [0, 1) used to seed initial node positions. */
function unitHash(value: string): number {
  let hash = 2166136261;
  for (let i = 0; i < value.length; i += 1) {
    hash ^= value.charCodeAt(i);
    hash = Math.imul(hash, 16777619) >>> 0;
  }
  return hash / 4294967296;
}

/**
 * Force-directed positions computed synchronously. Initial positions are
 * seeded from (seedKey, node id), and d3-force itself is deterministic, so
 * the same graph in the same view always lands in the same place.
 */
export function computeLayout(
  nodeIds: string[],
  links: { source: string; target: string }[],
  seedKey: string,
  width: number,
  height: number,
): Map<string, Point> {
  const nodes: LayoutNode[] = nodeIds.map((id) => {
    const angle = unitHash(`${seedKey}:${id}:a`) * 2 * Math.PI;
    const radius = (0.2 + 0.3 * unitHash(`${seedKey}:${id}:r`)) * Math.min(width, height);
    return {
      id,
      x: width / 2 + radius * Math.cos(angle),
      y: height / 2 + radius * Math.sin(angle),
    };
  });
  const byId = new Map(nodes.map((n) => [n.id, n]));
  const linkData: SimulationLinkDatum<LayoutNode>[] = links
    .filter((l) => byId.has(l.source) && byId.has(l.target) && l.source !== l.target)
    .map((l) => ({ source: l.source, target: l.target }));

  const simulation = forceSimulation(nodes)
    .force("charge", forceManyBody().strength(-300))
    .force("link", forceLink<LayoutNode, SimulationLinkDatum<LayoutNode>>(linkData).id((n) => n.id).distance(110))
    .force("center", forceCenter(width / 2, height / 2))
    .force("collide", forceCollide(30))
    .stop();
  for (let i = 0; i < 250; i += 1) {
    simulation.tick();
  }

  const margin = 30;
  const positions = new Map<string, Point>();
  for (const node of nodes) {
    positions.set(node.id, {
      x: Math.max(margin, Math.min(width - margin, node.x ?? width / 2)),
      y: Math.max(margin, Math.min(height - margin, node.y ?? height / 2)),
    });
  }
  return positions;
}
