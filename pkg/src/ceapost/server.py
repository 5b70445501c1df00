"""Local HTTP JSON API for interactive what-if analysis.

Sessions wrap an immutable Analysis plus attached extension results. Every
mutation builds a fresh state under the session's lock and swaps it in
atomically with a bumped revision number, so readers never observe a
half-applied change and clients can detect staleness. EVPPI runs as a
background job with polling. All indices on the wire are 1-based.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .core import Analysis, PsaDataset, new_analysis, sim_table, summarize
from .errors import ValidationError
from .extensions import (
    apply_mixed_strategy,
    apply_risk_aversion,
    multi_ce,
    set_comparisons,
    set_kmax,
    set_reference,
)
from .ingest import analysis_from_manifest, archive_hash, archive_payload
from .plotspecs import (
    PlotSpec,
    ceac_spec,
    ceaf_spec,
    ceef_spec,
    ceplane_spec,
    contour_spec,
    contour2_spec,
    eib_spec,
    evi_spec,
    grid_spec,
    ib_density_spec,
)
from .voi import create_inputs, evppi, info_rank

RECOMMENDED_SIMS = 1000


def _error(status: int, loc: list, msg: str) -> HTTPException:
    return HTTPException(status_code=status, detail=[{"loc": loc, "msg": msg}])


# ---------------------------------------------------------------------------
# Session store
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SessionState:
    analysis: Analysis
    extensions: dict
    revision: int


class Session:
    def __init__(self, sid: str, analysis: Analysis, params):
        self.id = sid
        self.lock = threading.Lock()
        self.params = params  # ParameterInputs or None
        self.state = SessionState(analysis=analysis, extensions={}, revision=1)

    def mutate(self, build, expected_revision: Optional[int] = None) -> SessionState:
        """Apply build(state) -> state under the session lock."""
        with self.lock:
            if (expected_revision is not None
                    and expected_revision != self.state.revision):
                raise _error(
                    409, ["header", "If-Match"],
                    f"revision mismatch: expected {expected_revision}, "
                    f"current {self.state.revision}",
                )
            new_state = build(self.state)
            self.state = new_state
            return new_state


class Store:
    def __init__(self):
        self._lock = threading.Lock()
        self.sessions: dict[str, Session] = {}
        self.jobs: dict[str, dict] = {}

    def add(self, session: Session) -> None:
        with self._lock:
            self.sessions[session.id] = session

    def get(self, sid: str) -> Session:
        session = self.sessions.get(sid)
        if session is None:
            raise _error(404, ["path", "session_id"], f"unknown session {sid!r}")
        return session


# ---------------------------------------------------------------------------
# Wire models
# ---------------------------------------------------------------------------

class ParametersBody(BaseModel):
    names: list[str]
    mat: list[list[float]]


class CreateSessionBody(BaseModel):
    effects: Optional[list[list[float]]] = None
    costs: Optional[list[list[float]]] = None
    labels: Optional[list[str]] = None
    ref: int = 1
    comparisons: Optional[list[int]] = None
    kmax: float = 50_000.0
    grid_points: int = 501
    parameters: Optional[ParametersBody] = None
    manifest_path: Optional[str] = None


class PatchBody(BaseModel):
    ref: Optional[int] = None
    comparisons: Optional[list[int]] = None
    kmax: Optional[float] = None


class ExtensionBody(BaseModel):
    riskav: Optional[list[float]] = None
    shares: Optional[list[float]] = None
    multice: Optional[bool] = None


class EvppiBody(BaseModel):
    params: list[str]
    k: Optional[float] = None
    k_subset: Optional[list[float]] = None


def _digest(state: SessionState) -> dict:
    analysis = state.analysis
    return {
        "revision": state.revision,
        "labels": list(analysis.dataset.labels),
        "n_sim": analysis.n_sim,
        "n_int": analysis.n_int,
        "ref": analysis.ref + 1,
        "comparisons": [c + 1 for c in analysis.comparisons],
        "kmax": analysis.kmax,
        "grid_points": analysis.grid_points,
        "icer": [float(x) if d else None
                 for x, d in zip(analysis.icer, analysis.icer_defined)],
        "kstar": list(analysis.kstar),
        "extensions": sorted(state.extensions),
        "digest_hash": archive_hash(analysis, state.extensions),
    }


def create_app() -> FastAPI:
    app = FastAPI(title="ceapost", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"http://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = Store()
    app.state.store = store
    app.state.executor = ThreadPoolExecutor(max_workers=2)

    @app.exception_handler(ValidationError)
    async def _validation_handler(request: Request, exc: ValidationError):
        from fastapi.responses import JSONResponse

        return JSONResponse(
            status_code=422,
            content={"detail": [{"loc": ["body"], "msg": str(exc)}]},
        )

    # -- sessions ----------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        params_inputs = None
        if body.manifest_path is not None:
            analysis, params = analysis_from_manifest(body.manifest_path)
            if params is not None:
                params_inputs = create_inputs(*params)
        else:
            if body.effects is None or body.costs is None:
                raise _error(422, ["body", "effects"],
                             "either effects+costs or manifest_path is required")
            dataset = PsaDataset(body.effects, body.costs, body.labels)
            if not 1 <= body.ref <= dataset.n_int:
                raise _error(422, ["body", "ref"],
                             f"ref {body.ref} out of range 1..{dataset.n_int}")
            comparisons = None
            if body.comparisons is not None:
                comparisons = [c - 1 for c in body.comparisons]
            analysis = new_analysis(
                dataset,
                ref=body.ref - 1,
                comparisons=comparisons,
                kmax=body.kmax,
                grid_points=body.grid_points,
            )
            if body.parameters is not None:
                params_inputs = create_inputs(
                    body.parameters.mat, body.parameters.names
                )
        if params_inputs is not None and params_inputs.n_sim != analysis.n_sim:
            raise _error(422, ["body", "parameters"],
                         "parameter rows do not match the number of simulations")
        session = Session(uuid.uuid4().hex, analysis, params_inputs)
        store.add(session)
        out = _digest(session.state)
        out["id"] = session.id
        out["has_parameters"] = params_inputs is not None
        out["advisories"] = (
            [f"only {analysis.n_sim} simulations; >{RECOMMENDED_SIMS} recommended"]
            if analysis.n_sim < RECOMMENDED_SIMS else []
        )
        return out

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        state = session.state
        out = _digest(state)
        out["id"] = session.id
        out["has_parameters"] = session.params is not None
        if session.params is not None:
            out["parameter_names"] = list(session.params.names)
        return out

    @app.get("/sessions/{session_id}/summary")
    def get_summary(session_id: str, k: float = Query(...)):
        state = store.get(session_id).state
        block = summarize(state.analysis, k)
        return {
            "revision": state.revision,
            "k": block.k,
            "summary": asdict(block),
            "text": block.render(),
        }

    @app.get("/sessions/{session_id}/simtable")
    def get_sim_table(session_id: str, k: float = Query(...), head: int = 6):
        state = store.get(session_id).state
        table = sim_table(state.analysis, k)
        n = table.values.shape[0] if head <= 0 else min(head, table.values.shape[0])
        return {
            "revision": state.revision,
            "k": table.k,
            "columns": list(table.columns),
            "rows": table.values[:n].tolist(),
            "text": table.render(head=None if head <= 0 else head),
        }

    @app.get("/sessions/{session_id}/archive")
    def get_archive(session_id: str):
        state = store.get(session_id).state
        payload = archive_payload(state.analysis, state.extensions)
        payload["content_hash"] = archive_hash(state.analysis, state.extensions)
        return {"revision": state.revision, "archive": payload}

    @app.get("/sessions/{session_id}/report")
    def get_report(
        session_id: str,
        k: Optional[float] = None,
        plots: str = "ceplane,eib,ceac,evi",
    ):
        import tempfile
        from pathlib import Path

        from .report import make_report

        state = store.get(session_id).state
        kinds = [p.strip() for p in plots.split(",") if p.strip()]
        with tempfile.TemporaryDirectory() as tmp:
            doc = make_report(
                state.analysis, tmp, k=k, plots=kinds,
                extensions=state.extensions,
            )
            figures = {
                name: (Path(tmp) / name).read_text(encoding="utf-8")
                for name in doc.assets
            }
            markdown = doc.markdown
        return {"revision": state.revision, "markdown": markdown,
                "figures": figures}

    @app.patch("/sessions/{session_id}")
    def patch_session(session_id: str, body: PatchBody, request: Request):
        session = store.get(session_id)
        if_match = request.headers.get("if-match")
        expected = None
        if if_match is not None:
            try:
                expected = int(if_match.strip('"'))
            except ValueError:
                raise _error(422, ["header", "If-Match"],
                             f"revision must be an integer, got {if_match!r}")

        def build(state: SessionState) -> SessionState:
            analysis = state.analysis
            n_int = analysis.n_int
            if body.ref is not None and not 1 <= body.ref <= n_int:
                raise _error(422, ["body", "ref"],
                             f"ref {body.ref} out of range 1..{n_int}")
            if body.comparisons is not None:
                bad = [c for c in body.comparisons if not 1 <= c <= n_int]
                if bad:
                    raise _error(422, ["body", "comparisons"],
                                 f"comparison indices out of range 1..{n_int}: {bad}")
                if body.ref is not None and body.ref in body.comparisons:
                    raise _error(422, ["body", "comparisons"],
                                 "comparisons must not contain the reference")
            if body.kmax is not None and body.kmax <= 0:
                raise _error(422, ["body", "kmax"], "kmax must be positive")
            if body.ref is not None:
                analysis = set_reference(analysis, body.ref - 1)
            if body.comparisons is not None:
                analysis = set_comparisons(
                    analysis, [c - 1 for c in body.comparisons]
                )
            if body.kmax is not None:
                analysis = set_kmax(analysis, body.kmax)
            # extension overlays hang off the replaced analysis: recompute
            extensions = {}
            for key, value in state.extensions.items():
                if key == "riskav":
                    extensions[key] = apply_risk_aversion(analysis, value.r_values)
                elif key == "mixed":
                    extensions[key] = apply_mixed_strategy(analysis, value.shares)
                elif key == "multice":
                    extensions[key] = multi_ce(analysis)
            return SessionState(
                analysis=analysis,
                extensions=extensions,
                revision=state.revision + 1,
            )

        state = session.mutate(build, expected)
        return _digest(state)

    @app.post("/sessions/{session_id}/extensions")
    def post_extension(session_id: str, body: ExtensionBody):
        session = store.get(session_id)
        given = [name for name in ("riskav", "shares", "multice")
                 if getattr(body, name) is not None]
        if len(given) != 1:
            raise _error(422, ["body"],
                         "provide exactly one of riskav, shares or multice")

        def build(state: SessionState) -> SessionState:
            extensions = dict(state.extensions)
            if body.riskav is not None:
                extensions["riskav"] = apply_risk_aversion(
                    state.analysis, body.riskav
                )
            elif body.shares is not None:
                extensions["mixed"] = apply_mixed_strategy(
                    state.analysis, body.shares
                )
            elif body.multice:
                extensions["multice"] = multi_ce(state.analysis)
            else:
                raise _error(422, ["body", "multice"], "multice must be true")
            return SessionState(
                analysis=state.analysis,
                extensions=extensions,
                revision=state.revision + 1,
            )

        state = session.mutate(build)
        return _digest(state)

    # -- plots ---------------------------------------------------------------

    @app.get("/sessions/{session_id}/plots/{kind}")
    def get_plot(
        session_id: str,
        kind: str,
        k: Optional[float] = None,
        comparison: Optional[int] = None,
        variant: str = "auto",
    ):
        state = store.get(session_id).state
        analysis = state.analysis
        if k is None:
            k = float(analysis.grid.values[analysis.n_k // 2])
        comp = None if comparison is None else comparison - 1
        try:
            spec = _build_plot(analysis, state.extensions, kind, k, comp, variant)
        except KeyError:
            raise _error(404, ["path", "kind"], f"unknown plot kind {kind!r}")
        return {"revision": state.revision, "kind": kind, "spec": spec.to_dict()}

    def _build_plot(
        analysis: Analysis, extensions: dict, kind: str,
        k: float, comparison: Optional[int], variant: str,
    ) -> PlotSpec:
        if kind == "ceplane":
            return ceplane_spec(analysis, comparison=comparison, k=k)
        if kind == "ceac":
            if variant in ("auto", "multice") and "multice" in extensions:
                return ceac_spec(extensions["multice"])
            return ceac_spec(analysis)
        if kind == "ceaf":
            if "multice" not in extensions:
                raise _error(422, ["path", "kind"],
                             "ceaf needs the multice extension")
            return ceaf_spec(extensions["multice"])
        if kind == "eib":
            if variant in ("auto", "riskav") and "riskav" in extensions:
                return eib_spec(extensions["riskav"])
            return eib_spec(analysis)
        if kind == "evi":
            if variant in ("auto", "mixed") and "mixed" in extensions:
                return evi_spec(extensions["mixed"])
            if variant in ("auto", "riskav") and "riskav" in extensions:
                return evi_spec(extensions["riskav"])
            return evi_spec(analysis)
        if kind == "ib-density":
            return ib_density_spec(analysis, comparison=comparison, k=k)
        if kind == "contour":
            return contour_spec(analysis, comparison=comparison)
        if kind == "contour2":
            return contour2_spec(analysis, comparison=comparison, k=k)
        if kind == "ceef":
            return ceef_spec(analysis)
        if kind == "grid":
            return grid_spec(analysis, k=k)
        raise KeyError(kind)

    # -- EVPPI jobs ----------------------------------------------------------

    @app.post("/sessions/{session_id}/evppi", status_code=202)
    def post_evppi(session_id: str, body: EvppiBody):
        session = store.get(session_id)
        if session.params is None:
            raise _error(422, ["body", "params"],
                         "session has no parameter inputs attached")
        unknown = [p for p in body.params if p not in session.params.names]
        if unknown:
            raise _error(422, ["body", "params"],
                         f"unknown parameter names: {', '.join(unknown)}")
        if not body.params:
            raise _error(422, ["body", "params"], "params must not be empty")
        state = session.state
        job_id = uuid.uuid4().hex
        store.jobs[job_id] = {
            "id": job_id,
            "session": session.id,
            "status": "running",
            "revision": state.revision,
            "result": None,
            "error": None,
        }

        def run():
            job = store.jobs[job_id]
            try:
                analysis = state.analysis
                result = evppi(
                    analysis, body.params, session.params,
                    k_subset=body.k_subset,
                )
                k_rank = (body.k if body.k is not None
                          else float(analysis.grid.values[analysis.n_k // 2]))
                ki = analysis.grid.nearest_index(k_rank)
                ranking = None
                if float(analysis.evi[ki]) > 0:
                    ranking = [
                        {"param": name, "proportion": prop}
                        for name, prop in info_rank(
                            analysis, session.params, k_rank
                        )
                    ]
                payload = result.to_dict()
                payload["k_grid"] = analysis.grid.values.tolist()
                payload["info_rank"] = ranking
                payload["info_rank_k"] = float(analysis.grid.values[ki])
                job["result"] = payload
                job["status"] = "done"
            except Exception as exc:  # noqa: BLE001 - reported to the client
                job["error"] = str(exc)
                job["status"] = "error"

        app.state.executor.submit(run)
        return {"job_id": job_id, "status": "running"}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        job = store.jobs.get(job_id)
        if job is None:
            raise _error(404, ["path", "job_id"], f"unknown job {job_id!r}")
        return {k: v for k, v in job.items() if k != "session"}

    return app


def serve(host: str = "127.0.0.1", port: int = 8350) -> None:
    """Run the API under uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port, log_level="info")
