"""User feedback capture, expert curation, and fine-tune dataset export.

The log is append-only JSON Lines: feedback events and curation events are
separate records, and replaying the log reconstructs current state.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from . import errors
from .ingest import Document, document_id

SCHEMA_VERSION = 1

DISPOSITIONS = ("pending", "approve_finetune", "approve_corpus", "rejected")

DEFAULT_FINETUNE_SYSTEM = (
    "You are an assistant for questions about government financial data "
    "and regulations. Answer accurately and cite regulations when relevant."
)


@dataclass(frozen=True)
class FeedbackEntry:
    id: str
    response_id: str
    rating: int
    comment: str | None
    created_at: str
    disposition: str = "pending"
    corrected_answer: str | None = None


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class FeedbackStore:
    """Single-writer feedback log over JSONL; reads replay the log."""

    def __init__(
        self,
        log_path: str | Path,
        response_lookup: Callable[[str], dict | None],
        auto_approve_rating: int | None = 4,
    ):
        self.log_path = Path(log_path)
        self._lookup = response_lookup
        self.auto_approve_rating = auto_approve_rating
        self._entries: dict[str, FeedbackEntry] = {}
        self._replay()

    def _replay(self) -> None:
        if not self.log_path.is_file():
            return
        with self.log_path.open(encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["type"] == "feedback":
                    e = event["entry"]
                    self._entries[e["id"]] = FeedbackEntry(
                        id=e["id"],
                        response_id=e["response_id"],
                        rating=e["rating"],
                        comment=e.get("comment"),
                        created_at=e["created_at"],
                    )
                elif event["type"] == "curation":
                    entry = self._entries[event["entry_id"]]
                    self._entries[event["entry_id"]] = replace(
                        entry,
                        disposition=event["disposition"],
                        corrected_answer=event.get("corrected_answer"),
                    )

    def _append(self, event: dict) -> None:
        event["schema_version"] = SCHEMA_VERSION
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        with self.log_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(event, ensure_ascii=False) + "\n")

    def record_feedback(
        self, response_id: str, rating: int, comment: str | None = None
    ) -> FeedbackEntry:
        if not isinstance(rating, int) or not 1 <= rating <= 5:
            raise errors.InvalidRating(f"rating must be an integer in [1, 5], got {rating!r}")
        if self._lookup(response_id) is None:
            raise errors.UnknownResponse(f"no logged answer with id {response_id!r}")
        entry = FeedbackEntry(
            id=uuid.uuid4().hex,
            response_id=response_id,
            rating=rating,
            comment=comment,
            created_at=_now(),
        )
        self._append({"type": "feedback", "entry": {
            "id": entry.id,
            "response_id": entry.response_id,
            "rating": entry.rating,
            "comment": entry.comment,
            "created_at": entry.created_at,
        }})
        self._entries[entry.id] = entry
        return entry

    def get(self, entry_id: str) -> FeedbackEntry | None:
        return self._entries.get(entry_id)

    def list_entries(self, disposition: str | None = None) -> list[FeedbackEntry]:
        entries = sorted(self._entries.values(), key=lambda e: e.created_at)
        if disposition:
            entries = [e for e in entries if e.disposition == disposition]
        return entries

    def curate(
        self,
        entry_id: str,
        disposition: str,
        corrected_answer: str | None = None,
    ) -> tuple[FeedbackEntry, Document | None]:
        """Applies a curation decision. approve_corpus returns a Document
        built from the question and the corrected (or original) answer,
        queued for ingestion by the caller."""
        if disposition not in DISPOSITIONS or disposition == "pending":
            raise errors.InvalidParams(f"invalid disposition {disposition!r}")
        entry = self._entries.get(entry_id)
        if entry is None:
            raise errors.NotFound(f"no feedback entry {entry_id!r}")
        if entry.disposition != "pending":
            raise errors.AlreadyCurated(f"entry {entry_id} is already {entry.disposition}")

        auto_ok = (
            self.auto_approve_rating is not None
            and entry.rating >= self.auto_approve_rating
        )
        if disposition == "approve_finetune" and corrected_answer is None and not auto_ok:
            raise errors.MissingCorrection(
                "approve_finetune needs a corrected_answer unless rating qualifies as-is"
            )

        self._append({
            "type": "curation",
            "entry_id": entry_id,
            "disposition": disposition,
            "corrected_answer": corrected_answer,
            "curated_at": _now(),
        })
        updated = replace(entry, disposition=disposition, corrected_answer=corrected_answer)
        self._entries[entry_id] = updated

        doc = None
        if disposition == "approve_corpus":
            response = self._lookup(entry.response_id) or {}
            question = response.get("question", "")
            answer = corrected_answer or response.get("answer", "")
            text = f"Q: {question}\nA: {answer}"
            doc = Document(
                id=document_id(f"feedback:{entry_id}", text),
                source_uri=f"feedback:{entry_id}",
                format="txt",
                text=text,
                metadata={"origin": "feedback"},
            )
        return updated, doc

    def export_finetune(
        self,
        out_path: str | Path,
        system_message: str = DEFAULT_FINETUNE_SYSTEM,
        extra_pairs: list[tuple[str, str]] | None = None,
    ) -> dict:
        """Writes a chat-transcript JSONL dataset of approved entries plus a
        manifest; every record passes the three-role validator."""
        out_path = Path(out_path)
        records = []
        entry_ids = []
        for entry in self.list_entries(disposition="approve_finetune"):
            response = self._lookup(entry.response_id) or {}
            question = response.get("question", "")
            answer = entry.corrected_answer or response.get("answer", "")
            record = {"messages": [
                {"role": "system", "content": system_message},
                {"role": "user", "content": question},
                {"role": "assistant", "content": answer},
            ]}
            records.append(record)
            entry_ids.append(entry.id)
        for question, answer in extra_pairs or []:
            records.append({"messages": [
                {"role": "system", "content": system_message},
                {"role": "user", "content": question},
                {"role": "assistant", "content": answer},
            ]})

        if not records:
            raise errors.EmptySelection("no approved fine-tune entries to export")

        invalid = [r for r in records if not validate_finetune_record(r)]
        if invalid:
            raise errors.InvalidParams(f"{len(invalid)} records failed validation")

        out_path.parent.mkdir(parents=True, exist_ok=True)
        with out_path.open("w", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")

        manifest = {
            "count": len(records),
            "source_entry_ids": entry_ids,
            "schema_version": SCHEMA_VERSION,
            "created_at": _now(),
        }
        manifest_path = out_path.with_suffix(out_path.suffix + ".manifest.json")
        manifest_path.write_text(json.dumps(manifest, ensure_ascii=False, indent=2))
        return manifest


def validate_finetune_record(record: dict) -> bool:
    messages = record.get("messages")
    if not isinstance(messages, list) or len(messages) != 3:
        return False
    expected_roles = ["system", "user", "assistant"]
    for message, role in zip(messages, expected_roles):
        if not isinstance(message, dict):
            return False
        if message.get("role") != role:
            return False
        content = message.get("content")
        if not isinstance(content, str) or not content.strip():
            return False
    return True


def validate_finetune_file(path: str | Path) -> tuple[int, int]:
    """Returns (valid, invalid) record counts for a JSONL export."""
    valid = invalid = 0
    with Path(path).open(encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                invalid += 1
                continue
            if validate_finetune_record(record):
                valid += 1
            else:
                invalid += 1
    return valid, invalid
