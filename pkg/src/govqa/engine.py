"""Wires the pipeline together behind one object shared by the HTTP
service and the CLI: corpus ingestion, answering with a logged response
id, feedback, and benchmark runs."""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import errors, evaluation, ingest, rag
from .embed import DeterministicEmbedder, EmbeddingCache, embed_texts
from .feedback import FeedbackStore
from .index import VectorIndex
from .llm import ModelConfig, ScriptedProvider, StaticProvider
from .rag import AnswerPayload, RagConfig, TemplateStore


@dataclass
class EngineConfig:
    corpus_dir: str = "."
    index_path: str | None = None
    dims: int = 64
    chunk_size: int = 1000
    overlap: int = 200
    rag: RagConfig = field(default_factory=RagConfig)
    feedback_log: str = "feedback.jsonl"
    answers_log: str | None = None
    eval_out_dir: str | None = None
    templates_dir: str | None = None
    cache_dir: str | None = None
    auto_approve_rating: int | None = 4

    @classmethod
    def from_file(cls, path: str | Path) -> tuple["EngineConfig", dict]:
        """Returns the config plus the raw provider/embedder sections,
        which the caller turns into concrete objects."""
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        rag_section = data.get("rag", {})
        model_section = rag_section.pop("model", {})
        config = cls(
            corpus_dir=data.get("corpus_dir", "."),
            index_path=data.get("index_path"),
            dims=data.get("dims", 64),
            chunk_size=data.get("chunk_size", 1000),
            overlap=data.get("overlap", 200),
            rag=RagConfig(model=ModelConfig(**model_section), **rag_section),
            feedback_log=data.get("feedback_log", "feedback.jsonl"),
            answers_log=data.get("answers_log"),
            eval_out_dir=data.get("eval_out_dir"),
            templates_dir=data.get("templates_dir"),
            cache_dir=data.get("cache_dir"),
            auto_approve_rating=data.get("auto_approve_rating", 4),
        )
        return config, data


def provider_from_section(section: dict):
    kind = section.get("type", "scripted")
    if kind == "scripted":
        return ScriptedProvider.from_file(section["script"], strict=section.get("strict", True))
    if kind == "static":
        return StaticProvider(section.get("text", "No answer configured."))
    raise errors.InvalidParams(f"unknown provider type {kind!r}")


class Engine:
    def __init__(
        self,
        config: EngineConfig,
        embedder=None,
        provider=None,
    ):
        self.config = config
        self.embedder = embedder or DeterministicEmbedder(dims=config.dims)
        self.provider = provider
        self.templates = TemplateStore(config.templates_dir)
        self.cache = EmbeddingCache(config.cache_dir) if config.cache_dir else None
        self.index = VectorIndex()
        if config.index_path and Path(config.index_path).is_file():
            self.index = VectorIndex.load(config.index_path)
        self._index_lock = threading.RLock()
        self._answers: dict[str, dict] = {}
        self._answers_path = Path(config.answers_log) if config.answers_log else None
        if self._answers_path and self._answers_path.is_file():
            with self._answers_path.open(encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        record = json.loads(line)
                        self._answers[record["response_id"]] = record
        self.feedback = FeedbackStore(
            config.feedback_log,
            response_lookup=self._answers.get,
            auto_approve_rating=config.auto_approve_rating,
        )

    # --- ingestion ---

    def ingest_documents(self, docs: list[ingest.Document]) -> dict:
        added_docs = 0
        added_chunks = 0
        with self._index_lock:
            for doc in docs:
                if self.index.get_chunk(f"{doc.id}:0") is not None:
                    continue  # content hash already ingested
                chunks = ingest.split_text(doc, self.config.chunk_size, self.config.overlap)
                vectors = embed_texts(self.embedder, [c.text for c in chunks], cache=self.cache)
                for chunk, vector in zip(chunks, vectors):
                    self.index.upsert(chunk, vector, metadata={
                        "source_uri": doc.source_uri,
                        "format": doc.format,
                    })
                added_docs += 1
                added_chunks += len(chunks)
            if self.config.index_path:
                self.index.persist(self.config.index_path)
        return {"documents": added_docs, "chunks": added_chunks}

    def ingest_path(self, path: str) -> dict:
        p = Path(path)
        if p.is_dir():
            docs, report = ingest.load_directory(p)
            counts = self.ingest_documents(docs)
            counts["failures"] = len(report.failures)
            return counts
        return self.ingest_documents([ingest.load_document(path)])

    # --- answering ---

    def answer(self, question: str, overrides: dict | None = None) -> tuple[str, AnswerPayload]:
        config = self.config.rag
        if overrides:
            allowed = {k: v for k, v in overrides.items()
                       if k in ("k", "chain", "language_policy", "structured_output")}
            config = replace(config, **allowed)
        with self._index_lock:
            payload = rag.answer(
                question, config, self.index, self.embedder, self.provider,
                templates=self.templates, cache=self.cache,
            )
        response_id = secrets.token_hex(16)
        record = {
            "response_id": response_id,
            "question": question,
            "answer": payload.answer,
            "payload": payload.to_dict(),
        }
        self._answers[response_id] = record
        if self._answers_path:
            self._answers_path.parent.mkdir(parents=True, exist_ok=True)
            with self._answers_path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")
        return response_id, payload

    def get_answer(self, response_id: str) -> dict | None:
        return self._answers.get(response_id)

    def get_chunk(self, chunk_key: str) -> dict | None:
        with self._index_lock:
            chunk = self.index.get_chunk(chunk_key)
            if chunk is None:
                return None
            meta = self.index.get_metadata(chunk_key) or {}
        return {
            "chunk_key": chunk_key,
            "text": chunk.text,
            "source_uri": meta.get("source_uri", ""),
            "span": list(chunk.span),
        }

    # --- evaluation ---

    def benchmark_config(self, name: str, rag_config: RagConfig) -> evaluation.BenchmarkConfig:
        def run(question: str) -> evaluation.BenchmarkAnswer:
            with self._index_lock:
                payload = rag.answer(
                    question, rag_config, self.index, self.embedder, self.provider,
                    templates=self.templates, cache=self.cache,
                )
                contexts = []
                for source in payload.sources:
                    chunk = self.index.get_chunk(source["chunk_key"])
                    contexts.append(chunk.text if chunk else "")
            return evaluation.BenchmarkAnswer(
                answer=payload.answer, contexts=contexts, latency=payload.latency,
            )
        return evaluation.BenchmarkConfig(name=name, run=run)


def load_benchmark_dataset(path: str | Path) -> list[evaluation.BenchmarkItem]:
    """JSON Lines, one object per item: question, ground_truth, and an
    optional human_correct label."""
    items = []
    with Path(path).open(encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            data = json.loads(line)
            items.append(evaluation.BenchmarkItem(
                question=data["question"],
                ground_truth=data["ground_truth"],
                human_correct=data.get("human_correct"),
            ))
    return items
