/** Wire types of the engine's HTTP/JSON contract. */

export interface EntityInfo {
  id: string;
  name: string;
  concept: string;
}

export interface SceneEdge {
  subject: string;
  relation: string;
  object: string;
  derived: boolean;
}

export interface SceneExport {
  id: string;
  name: string;
  members: string[];
  edges: SceneEdge[];
}

export interface SceneSnapshot {
  entities: EntityInfo[];
  scenes: SceneExport[];
}

export interface MergedEdge {
  subject: string;
  relation: string;
  object: string;
  scenes: string[];
}

export interface MergedSnapshot {
  entities: EntityInfo[];
  edges: MergedEdge[];
  source_scenes: string[];
}

export interface Decision {
  outcome: "Accepted" | "Rejected";
  reason_code: string;
  message: string;
  relation?: string;
  conflicting_edge?: {
    subject: string;
    relation: string;
    object: string;
    scene: string;
    derived: boolean;
  };
}

export interface EdgeDelta {
  subject: string;
  relation: string;
  object: string;
  scene: string;
  derived: boolean;
}

export interface ActionResponse {
  decision: Decision;
  added: EdgeDelta[];
  removed: EdgeDelta[];
}

export interface SceneListing {
  id: string;
  name: string;
  members: string[];
}

export interface ActionForm {
  verb: "establish" | "cancel";
  relation: string;
  target: string;
}
