"""HTTP service over the engine: ask, feedback, ingest, eval, health."""

from __future__ import annotations

import json
import logging
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import errors, evaluation
from .engine import Engine, load_benchmark_dataset
from .evaluation import RuleJudge
from .rag import RagConfig

logger = logging.getLogger(__name__)

VERSION = "0.1.0"


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(engine: Engine, bearer_token: str | None = None) -> FastAPI:
    app = FastAPI(title="govqa")
    eval_runs: dict[str, dict] = {}
    eval_lock = threading.Lock()

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if bearer_token and request.headers.get("authorization") != f"Bearer {bearer_token}":
            return _error(401, "missing or invalid bearer token")
        return await call_next(request)

    async def _json_body(request: Request) -> dict | JSONResponse:
        try:
            body = await request.json()
        except Exception:
            return _error(400, "malformed JSON body")
        if not isinstance(body, dict):
            return _error(400, "body must be a JSON object")
        return body

    @app.post("/ask")
    async def ask(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        question = body.get("question")
        if not isinstance(question, str):
            return _error(400, "question must be a string")
        if not question.strip():
            return _error(422, "question must be non-empty")
        overrides = body.get("overrides")
        if overrides is not None and not isinstance(overrides, dict):
            return _error(400, "overrides must be an object")
        try:
            response_id, payload = engine.answer(question, overrides)
        except errors.EmptyIndex:
            return _error(409, "no documents ingested yet")
        except (errors.ProviderUnavailable, errors.Timeout) as e:
            return _error(503, str(e))
        except errors.GovQAError:
            incident = uuid.uuid4().hex
            logger.exception("ask failed, incident %s", incident)
            return _error(500, f"internal error (incident {incident})")
        result = payload.to_dict()
        result["response_id"] = response_id
        return result

    @app.post("/feedback")
    async def feedback(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        try:
            entry = engine.feedback.record_feedback(
                body.get("response_id", ""),
                body.get("rating"),
                body.get("comment"),
            )
        except errors.InvalidRating as e:
            return _error(400, str(e))
        except errors.UnknownResponse as e:
            return _error(404, str(e))
        return JSONResponse(status_code=201, content={"entry_id": entry.id})

    @app.post("/ingest")
    async def ingest_endpoint(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        try:
            if "path" in body:
                root = Path(engine.config.corpus_dir).resolve()
                target = (root / body["path"]).resolve()
                if not target.is_relative_to(root):
                    return _error(400, "path escapes the corpus root")
                counts = engine.ingest_path(str(target))
            elif "document" in body:
                from .ingest import Document, document_id
                d = body["document"]
                text = d.get("text", "")
                if not text.strip():
                    return _error(422, "document text must be non-empty")
                fmt = d.get("format", "txt")
                from .ingest import FORMATS
                if fmt not in FORMATS:
                    return _error(422, f"unsupported format {fmt!r}")
                doc = Document(
                    id=document_id(d.get("source_uri", "inline"), text),
                    source_uri=d.get("source_uri", "inline"),
                    format=fmt,
                    text=text,
                )
                counts = engine.ingest_documents([doc])
            else:
                return _error(400, "need path or document")
        except errors.UnsupportedFormat as e:
            return _error(422, str(e))
        except errors.NotFound as e:
            return _error(404, str(e))
        return counts

    @app.post("/eval/run")
    async def eval_run(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        dataset_path = body.get("dataset")
        if not dataset_path or not Path(dataset_path).is_file():
            return _error(400, "dataset must name a readable file")
        config_specs = body.get("configs") or [{"name": "default"}]
        run_id = uuid.uuid4().hex
        with eval_lock:
            eval_runs[run_id] = {"status": "running", "report": None, "error": None}

        def work():
            try:
                dataset = load_benchmark_dataset(dataset_path)
                configs = []
                for spec in config_specs:
                    overrides = {k: v for k, v in spec.items() if k != "name"}
                    rag_config = RagConfig(model=engine.config.rag.model, **{
                        **{"k": engine.config.rag.k, "chain": engine.config.rag.chain},
                        **overrides,
                    })
                    configs.append(engine.benchmark_config(spec.get("name", "default"), rag_config))
                out_dir = None
                if engine.config.eval_out_dir:
                    out_dir = Path(engine.config.eval_out_dir) / run_id
                report = evaluation.run_benchmark(configs, dataset, RuleJudge(), out_dir=out_dir)
                with eval_lock:
                    eval_runs[run_id] = {"status": "done", "report": report.to_dict(), "error": None}
            except Exception as e:  # failures land in the run status, not the server log only
                logger.exception("eval run %s failed", run_id)
                with eval_lock:
                    eval_runs[run_id] = {"status": "failed", "report": None, "error": str(e)}

        threading.Thread(target=work, daemon=True).start()
        return {"run_id": run_id}

    @app.get("/eval/report/{run_id}")
    async def eval_report(run_id: str):
        with eval_lock:
            run = eval_runs.get(run_id)
        if run is None:
            return _error(404, f"unknown run id {run_id!r}")
        return run

    @app.get("/health")
    async def health():
        return {
            "status": "ok",
            "index_count": len(engine.index),
            "version": VERSION,
        }

    @app.get("/chunks/{chunk_key}")
    async def chunk_preview(chunk_key: str):
        chunk = engine.get_chunk(chunk_key)
        if chunk is None:
            return _error(404, f"unknown chunk {chunk_key!r}")
        return chunk

    @app.get("/answers/{response_id}")
    async def answer_record(response_id: str):
        record = engine.get_answer(response_id)
        if record is None:
            return _error(404, f"unknown response {response_id!r}")
        return record

    return app
