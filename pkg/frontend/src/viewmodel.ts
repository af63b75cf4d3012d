import type { EntityInfo, MergedSnapshot, SceneSnapshot } from "./types.js";

export interface NodeView {
  id: string;
  label: string;
  concept: string;
  color: string;
  highlighted: boolean;
}

export interface EdgeView {
  subject: string;
  object: string;
  label: string;
  derived: boolean;
  /** Scene provenance badges; empty for single-scene views. */
  badges: string[];
}

export interface GraphView {
  title: string;
  nodes: NodeView[];
  edges: EdgeView[];
}

export class SnapshotFormatError extends Error {}

/** Fixed palette; a concept keeps its color across scenes and sessions. */
const PALETTE = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948", "#9c755f"];

export function topLevelConcept(conceptPath: string): string {
  const segments = conceptPath.split("/").filter(Boolean);
  return segments.length > 1 ? segments[1] : (segments[0] ?? "Thing");
}

export function conceptColor(conceptPath: string): string {
  const key = topLevelConcept(conceptPath);
  let hash = 0;
  for (let i = 0; i < key.length; i += 1) {
    hash = (hash * 31 + key.charCodeAt(i)) >>> 0;
  }
  return PALETTE[hash % PALETTE.length];
}

function nodeViews(entities: EntityInfo[], highlight: string | null): NodeView[] {
  return entities.map((entity) => ({
    id: entity.id,
    label: entity.name,
    concept: entity.concept,
    color: conceptColor(entity.concept),
    highlighted: entity.id === highlight,
  }));
}

export function sceneView(snapshot: SceneSnapshot, highlight: string | null): GraphView {
  if (!snapshot || !Array.isArray(snapshot.entities) || !Array.isArray(snapshot.scenes) || snapshot.scenes.length !== 1) {
    throw new SnapshotFormatError("malformed scene snapshot");
  }
  const scene = snapshot.scenes[0];
  const members = new Set(scene.members);
  return {
    title: scene.name,
    nodes: nodeViews(
      snapshot.entities.filter((e) => members.has(e.id)),
      highlight,
    ),
    edges: scene.edges.map((edge) => ({
      subject: edge.subject,
      object: edge.object,
      label: edge.relation,
      derived: edge.derived,
      badges: [],
    })),
  };
}

export function mergedView(snapshot: MergedSnapshot, highlight: string | null): GraphView {
  if (!snapshot || !Array.isArray(snapshot.entities) || !Array.isArray(snapshot.edges)) {
    throw new SnapshotFormatError("malformed merged snapshot");
  }
  return {
    title: `Merged (${snapshot.source_scenes.join(" + ")})`,
    nodes: nodeViews(snapshot.entities, highlight),
    edges: snapshot.edges.map((edge) => ({
      subject: edge.subject,
      object: edge.object,
      label: edge.relation,
      derived: false,
      badges: [...edge.scenes].sort(),
    })),
  };
}
