"""HTTP election service.

One process hosts many elections.  Each election lives in its own
directory under the data dir:

- instance.json: the canonical instance snapshot, written once
- meta.json: id, state, voter credentials, schema options
- log.jsonl: append-only vote log, one JSON record per line
- result.json: the canonical tally report, written at close

The effective profile is the last log entry per voter (resubmissions
append, never rewrite), so replaying instance + log after a crash
reconstructs the exact pre-crash state.  Vote submission and the
open->closed transition serialize through one lock; schema and result
reads serve immutable snapshots.

Routes: POST /elections, GET /elections/{id}/schema,
POST /elections/{id}/votes (bearer credential per voter),
POST /elections/{id}/close, GET /elections/{id}/results.
Every error body is {"code", "message", "entity"}.

Env vars: PBTALLY_BIND (host:port for `python -m pbtally.service`),
PBTALLY_DATA_DIR, PBTALLY_SMAX_CAP, PBTALLY_DISTINCT_CAP,
PBTALLY_SPACE_CAP.
"""

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from . import formats, model, solvers
from .errors import CapacityError, Infeasible, PBError

OPEN = "open"
CLOSED = "closed"

DEFAULT_CAPS = {
    "smax_cap": solvers.DEFAULT_SMAX_CAP,
    "distinct_cap": solvers.DEFAULT_DISTINCT_CAP,
}


def _err(status, code, message, entity=None):
    body = {"code": code, "message": message, "entity": entity}
    return JSONResponse(status_code=status, content=body)


class ServiceError(Exception):
    def __init__(self, status, code, message, entity=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.entity = entity


@dataclass
class Election:
    id: str
    instance: model.Instance
    credentials: dict  # token -> voter id
    voters: tuple
    show_constraints: bool
    directory: Path
    state: str = OPEN
    seq: int = 0
    effective: dict = field(default_factory=dict)  # voter id -> Vote
    result_text: str | None = None

    @property
    def token_of(self):
        return {v: t for t, v in self.credentials.items()}


class ElectionStore:
    """All elections under one data directory, plus the write lock."""

    def __init__(self, data_dir, caps=None):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.caps = dict(DEFAULT_CAPS, **(caps or {}))
        self.lock = threading.Lock()
        self.elections = {}
        for meta_path in sorted(self.data_dir.glob("*/meta.json")):
            self._replay(meta_path.parent)

    def _replay(self, directory):
        meta = json.loads((directory / "meta.json").read_text())
        instance = model.validate_instance(
            formats.parse_instance((directory / "instance.json").read_text())
        )
        e = Election(
            id=meta["id"],
            instance=instance,
            credentials=meta["credentials"],
            voters=tuple(meta["voters"]),
            show_constraints=meta.get("show_constraints", False),
            directory=directory,
            state=meta["state"],
        )
        log = directory / "log.jsonl"
        if log.exists():
            for line in log.read_text().splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                vote = formats.vote_from_obj(rec["vote"])
                vote, _ = model.validate_vote(instance, vote)
                e.effective[vote.voter_id] = vote
                e.seq = max(e.seq, rec["seq"])
        result = directory / "result.json"
        if e.state == CLOSED and result.exists():
            e.result_text = result.read_text()
        self.elections[e.id] = e

    def get(self, election_id):
        e = self.elections.get(election_id)
        if e is None:
            raise ServiceError(404, "UnknownElection", f"no election {election_id!r}",
                               election_id)
        return e

    def create(self, instance, voters, show_constraints):
        instance = model.validate_instance(instance)
        if not model.is_laminar(instance):
            raise ServiceError(400, "NonLaminarLabels",
                               "label constraints must nest; overlapping labels are "
                               "not accepted for hosted elections")
        try:
            ok = model.check_feasibility(instance)
        except Infeasible:
            ok = False
        if not ok:
            raise ServiceError(400, "Infeasible",
                               "no outcome satisfies the funding constraints")
        if not voters or len(set(voters)) != len(voters):
            raise ServiceError(400, "DuplicateId",
                               "voters must be a non-empty list of distinct ids")
        with self.lock:
            while True:
                eid = secrets.token_hex(8)
                if eid not in self.elections and not (self.data_dir / eid).exists():
                    break
            directory = self.data_dir / eid
            directory.mkdir()
            credentials = {secrets.token_hex(16): str(v) for v in voters}
            e = Election(
                id=eid, instance=instance, credentials=credentials,
                voters=tuple(str(v) for v in voters),
                show_constraints=show_constraints, directory=directory,
            )
            (directory / "instance.json").write_text(formats.serialize_instance(instance))
            self._write_meta(e)
            (directory / "log.jsonl").touch()
            self.elections[eid] = e
            return e

    def _write_meta(self, e):
        meta = {
            "id": e.id,
            "state": e.state,
            "voters": list(e.voters),
            "credentials": e.credentials,
            "show_constraints": e.show_constraints,
        }
        tmp = e.directory / "meta.json.tmp"
        tmp.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        tmp.replace(e.directory / "meta.json")

    def submit(self, e, voter_id, vote):
        with self.lock:
            if e.state != OPEN:
                raise ServiceError(409, "ElectionClosed",
                                   "votes are no longer accepted", e.id)
            replaced = voter_id in e.effective
            e.seq += 1
            rec = {
                "seq": e.seq,
                "ts": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                "voter": voter_id,
                "vote": formats.vote_to_obj(vote),
            }
            with open(e.directory / "log.jsonl", "a") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            e.effective[voter_id] = vote
            return e.seq, replaced

    def close(self, e, mode):
        with self.lock:
            if e.state != OPEN:
                raise ServiceError(409, "AlreadyClosed",
                                   "the election is already closed", e.id)
            votes = [e.effective[v] for v in sorted(e.effective)]
            try:
                result = solvers.solve(e.instance, votes, mode=mode, **self.caps)
            except CapacityError as exc:
                raise ServiceError(422, exc.code, str(exc), exc.entity) from None
            text = formats.serialize_result(result)
            (e.directory / "result.json").write_text(text)
            e.result_text = text
            e.state = CLOSED
            self._write_meta(e)
            return text


def schema_document(e):
    inst = e.instance
    pm = inst.project_map()
    groups = []
    for g in inst.groups:
        groups.append({
            "id": g.id,
            "name": f"Group {g.id}",
            "kind": model.CONTRADICTORY if g.contradictory else model.STANDARD,
            "max_approvals": g.cap if g.contradictory else None,
            "projects": [
                {"id": p, "name": pm[p].name, "cost": pm[p].cost}
                for p in sorted(g.project_ids)
            ],
        })
    doc = {
        "election": e.id,
        "state": e.state,
        "budget": inst.budget,
        "groups": groups,
        "rules": {
            "total_funds_at_most": inst.budget,
            "contradictory_max_approvals": {
                str(g.id): g.cap for g in inst.groups if g.contradictory
            },
        },
    }
    if e.show_constraints:
        members = model.label_memberships(inst)
        doc["constraints"] = [
            {"id": lab.id, "parent": lab.parent_id, "min": lab.b_min, "max": lab.b_max,
             "projects": sorted(members[lab.id])}
            for lab in inst.labels
        ]
    return doc


def create_app(data_dir=None, caps=None):
    data_dir = data_dir or os.environ.get("PBTALLY_DATA_DIR", "./pbtally-data")
    env_caps = {}
    if os.environ.get("PBTALLY_SMAX_CAP"):
        env_caps["smax_cap"] = int(os.environ["PBTALLY_SMAX_CAP"])
    if os.environ.get("PBTALLY_DISTINCT_CAP"):
        env_caps["distinct_cap"] = int(os.environ["PBTALLY_DISTINCT_CAP"])
    store = ElectionStore(data_dir, caps=dict(env_caps, **(caps or {})))
    app = FastAPI(title="pbtally election service")
    app.state.store = store

    @app.exception_handler(ServiceError)
    async def _service_error(request, exc):
        return _err(exc.status, exc.code, str(exc), exc.entity)

    @app.exception_handler(PBError)
    async def _pb_error(request, exc):
        status = 422 if isinstance(exc, CapacityError) else 400
        return _err(status, exc.code, str(exc), exc.entity)

    @app.exception_handler(RequestValidationError)
    async def _bad_body(request, exc):
        return _err(400, "ParseError", "malformed request body")

    def _json_body(raw, where):
        if not isinstance(raw, dict):
            raise ServiceError(400, "ParseError", f"{where}: expected a JSON object")
        return raw

    @app.post("/elections", status_code=201)
    async def create_election(request: Request):
        try:
            raw = await request.json()
        except json.JSONDecodeError:
            raise ServiceError(400, "ParseError", "request body is not valid JSON")
        body = _json_body(raw, "create")
        if "instance" not in body:
            raise ServiceError(400, "ParseError", "missing 'instance'")
        instance = formats.instance_from_obj(body["instance"])
        voters = body.get("voters", [])
        if not isinstance(voters, list):
            raise ServiceError(400, "ParseError", "'voters' must be a list of ids")
        e = store.create(instance, voters, bool(body.get("show_constraints", False)))
        return JSONResponse(status_code=201, content={
            "id": e.id,
            "credentials": {v: e.token_of[v] for v in e.voters},
        })

    @app.get("/elections/{election_id}/schema")
    async def get_schema(election_id: str):
        return schema_document(store.get(election_id))

    @app.post("/elections/{election_id}/votes")
    async def submit_vote(election_id: str, request: Request):
        e = store.get(election_id)
        auth = request.headers.get("authorization", "")
        token = auth[7:] if auth.lower().startswith("bearer ") else ""
        voter_id = e.credentials.get(token)
        if voter_id is None:
            raise ServiceError(401, "BadCredential",
                               "missing or unrecognized bearer credential")
        try:
            raw = await request.json()
        except json.JSONDecodeError:
            raise ServiceError(400, "ParseError", "request body is not valid JSON")
        body = _json_body(raw, "vote")
        body = dict(body, voter=voter_id, weight=1)
        vote = formats.vote_from_obj(body)
        vote, warnings = model.validate_vote(e.instance, vote)
        seq, replaced = store.submit(e, voter_id, vote)
        return {
            "seq": seq,
            "replaced": replaced,
            "vote": formats.vote_to_obj(vote),
            "warnings": list(warnings),
        }

    @app.post("/elections/{election_id}/close")
    async def close_election(election_id: str, request: Request):
        e = store.get(election_id)
        mode = "auto"
        if (request.headers.get("content-length") or "0") not in ("", "0"):
            try:
                raw = await request.json()
            except json.JSONDecodeError:
                raise ServiceError(400, "ParseError", "request body is not valid JSON")
            body = _json_body(raw, "close")
            mode = body.get("mode", "auto")
            if mode not in solvers.MODES:
                raise ServiceError(400, "ParseError", f"unknown mode {mode!r}")
        text = store.close(e, mode)
        return Response(content=text, media_type="application/json")

    @app.get("/elections/{election_id}/results")
    async def get_results(election_id: str):
        e = store.get(election_id)
        if e.state != CLOSED or e.result_text is None:
            raise ServiceError(409, "NotClosed", "the election is still open", e.id)
        return Response(content=e.result_text, media_type="application/json")

    return app


def main():
    import uvicorn

    bind = os.environ.get("PBTALLY_BIND", "127.0.0.1:8400")
    host, _, port = bind.rpartition(":")
    uvicorn.run(create_app(), host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
