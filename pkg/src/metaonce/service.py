"""HTTP/JSON surface: sessions, actions, snapshots, merging, analytics, history.

Snapshot bodies are emitted as canonical bytes so repeated reads of an
unchanged world are byte-identical.
"""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .engine import Engine, ServiceConfig
from .errors import (
    EmptySelection,
    EngineError,
    InvalidSession,
    InvalidThreshold,
    NegativeWeight,
    UnknownEntity,
    UnknownQuery,
    UnknownScene,
    UnknownVertex,
)
from .graph import canonical_json
from .rules import ActionRequest

_STATUS_BY_ERROR = {
    InvalidSession: 401,
    UnknownEntity: 404,
    UnknownScene: 404,
    EmptySelection: 400,
    UnknownQuery: 400,
    UnknownVertex: 400,
    NegativeWeight: 400,
    InvalidThreshold: 400,
}


class LoginBody(BaseModel):
    entity: str


class ActionBody(BaseModel):
    token: str
    actor: str
    verb: str
    subject: str
    relation: str
    object: str
    scene: str


class MergeBody(BaseModel):
    scenes: list[str]


class AnalyticsBody(BaseModel):
    target: dict
    query: str
    params: dict = Field(default_factory=dict)


def create_app(engine: Engine, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="metaonce-engine")
    app.state.engine = engine
    app.state.config = config

    @app.exception_handler(EngineError)
    async def engine_error_handler(_: Request, exc: EngineError) -> JSONResponse:
        status = _STATUS_BY_ERROR.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    @app.post("/login")
    def login(body: LoginBody) -> dict:
        session = engine.login(body.entity)
        return {"token": session.token, "entity": session.entity}

    @app.post("/actions")
    def actions(body: ActionBody) -> dict:
        req = ActionRequest(
            actor=body.actor,
            verb=body.verb,
            subject=body.subject,
            relation=body.relation,
            object=body.object,
            scene=body.scene,
        )
        decision, delta = engine.submit_action(body.token, req)
        return {
            "decision": decision.to_dict(),
            "added": delta.added,
            "removed": delta.removed,
        }

    @app.get("/scenes")
    def scenes_index() -> dict:
        return {"scenes": engine.list_scenes()}

    @app.get("/scenes/{scene_id}")
    def scene_snapshot(scene_id: str) -> Response:
        return Response(content=engine.scene_snapshot_bytes(scene_id), media_type="application/json")

    @app.get("/entities")
    def entities_index() -> dict:
        return {"entities": engine.list_entities()}

    @app.post("/merge")
    def merged(body: MergeBody) -> Response:
        return Response(content=engine.merged_snapshot_bytes(body.scenes), media_type="application/json")

    @app.post("/analytics")
    def analytics_query(body: AnalyticsBody) -> Response:
        result = engine.run_analytics(body.target, body.query, body.params, config)
        return Response(content=canonical_json(result), media_type="application/json")

    @app.get("/history")
    def history(subject: str | None = None, object: str | None = None, relation: str | None = None) -> dict:
        return {"events": engine.history(subject, object, relation)}

    return app
