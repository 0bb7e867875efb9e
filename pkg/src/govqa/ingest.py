"""Document loading, chunking and Q&A dataset cleaning."""

from __future__ import annotations

import csv
import hashlib
import io
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import errors

FORMATS = {"txt", "md", "csv", "json", "pdf_text"}

# .pdf.txt must be checked before .txt when mapping extensions
_EXT_TO_FORMAT = {
    ".pdf.txt": "pdf_text",
    ".txt": "txt",
    ".md": "md",
    ".csv": "csv",
    ".json": "json",
}

_HTML_TAG_RE = re.compile(r"<[^>]+>")
_TOKEN_RE = re.compile(r"[0-9A-Za-z]+")


@dataclass(frozen=True)
class Document:
    id: str
    source_uri: str
    format: str
    text: str
    metadata: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    seq: int
    text: str
    span: tuple[int, int]

    @property
    def key(self) -> str:
        return f"{self.doc_id}:{self.seq}"


@dataclass
class QAPair:
    question: str
    ground_truth: str
    source: str = ""
    origin: str = "scraped"  # scraped | expert_survey | feedback


@dataclass
class CleanReport:
    kept: int = 0
    dropped: int = 0
    empty_question: int = 0
    empty_answer: int = 0
    short_question: int = 0
    short_answer: int = 0
    duplicates: int = 0

    def to_dict(self) -> dict:
        return {
            "kept": self.kept,
            "dropped": self.dropped,
            "per_rule_counts": {
                "empty_question": self.empty_question,
                "empty_answer": self.empty_answer,
                "short_question": self.short_question,
                "short_answer": self.short_answer,
                "duplicates": self.duplicates,
            },
        }


@dataclass
class LoadReport:
    loaded: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)  # (path, reason)


def document_id(source_uri: str, text: str) -> str:
    h = hashlib.sha256()
    h.update(source_uri.encode("utf-8"))
    h.update(b"\x00")
    h.update(text.encode("utf-8"))
    return h.hexdigest()[:16]


def _format_from_path(path: str) -> str | None:
    lower = path.lower()
    for ext, fmt in _EXT_TO_FORMAT.items():
        if lower.endswith(ext):
            return fmt
    return None


def _render_csv(raw: str) -> str:
    reader = csv.reader(io.StringIO(raw))
    rows = [row for row in reader if row]
    if not rows:
        return ""
    header = rows[0]
    lines = []
    for row in rows[1:]:
        parts = [f"{h.strip()}: {v.strip()}" for h, v in zip(header, row)]
        lines.append("; ".join(parts))
    return "\n".join(lines)


def load_document(path_or_uri: str, format_hint: str | None = None) -> Document:
    path = Path(path_or_uri)
    if not path.is_file():
        raise errors.NotFound(f"no such file: {path_or_uri}")

    fmt = format_hint or _format_from_path(str(path))
    if fmt is None or fmt not in FORMATS:
        raise errors.UnsupportedFormat(f"unsupported format for {path_or_uri}")

    try:
        raw = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise errors.Undecodable(f"{path_or_uri}: {e}") from e

    if fmt == "csv":
        try:
            text = _render_csv(raw)
        except csv.Error as e:
            raise errors.Undecodable(f"{path_or_uri}: bad CSV: {e}") from e
    else:
        text = raw

    if not text.strip():
        raise errors.EmptyDocument(f"{path_or_uri} has no content")

    return Document(
        id=document_id(str(path_or_uri), text),
        source_uri=str(path_or_uri),
        format=fmt,
        text=text,
    )


def load_directory(
    root: str | Path,
    recursive: bool = True,
    formats: set[str] | None = None,
) -> tuple[list[Document], LoadReport]:
    root = Path(root)
    if not root.is_dir():
        raise errors.NotADirectory(f"not a directory: {root}")

    pattern = "**/*" if recursive else "*"
    candidates = []
    for p in root.glob(pattern):
        if not p.is_file():
            continue
        fmt = _format_from_path(str(p))
        if fmt is None:
            continue
        if formats is not None and fmt not in formats:
            continue
        candidates.append(p)
    candidates.sort(key=lambda p: str(p.relative_to(root)))

    report = LoadReport()
    docs = []
    for p in candidates:
        try:
            docs.append(load_document(str(p)))
            report.loaded += 1
        except errors.GovQAError as e:
            report.failures.append((str(p.relative_to(root)), str(e)))
    return docs, report


def split_text(doc: Document, chunk_size: int = 1000, overlap: int = 200) -> list[Chunk]:
    if chunk_size <= 0 or overlap < 0 or overlap >= chunk_size:
        raise errors.InvalidParams(
            f"need 0 <= overlap < chunk_size, got chunk_size={chunk_size} overlap={overlap}"
        )
    n = len(doc.text)
    if n == 0:
        raise errors.EmptyDocument("cannot split empty document")

    stride = chunk_size - overlap
    chunks = []
    seq = 0
    start = 0
    while start < n:
        end = min(start + chunk_size, n)
        chunks.append(Chunk(doc_id=doc.id, seq=seq, text=doc.text[start:end], span=(start, end)))
        if end == n:
            break
        start += stride
        seq += 1
    return chunks


def content_tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _normalize_question(q: str) -> str:
    # case-fold and collapse whitespace/punctuation spacing so
    # "Apa itu APBN?" and "apa itu apbn ?" compare equal
    return " ".join(_TOKEN_RE.findall(q.casefold()))


def clean_qa_pairs(raw: list[QAPair]) -> tuple[list[QAPair], CleanReport]:
    report = CleanReport()
    seen: set[str] = set()
    kept: list[QAPair] = []
    for pair in raw:
        q = _HTML_TAG_RE.sub(" ", pair.question).strip()
        a = _HTML_TAG_RE.sub(" ", pair.ground_truth).strip()
        if not q:
            report.empty_question += 1
        elif not a:
            report.empty_answer += 1
        elif len(q) < 8:
            report.short_question += 1
        elif len(content_tokens(a)) < 2:
            report.short_answer += 1
        elif _normalize_question(q) in seen:
            report.duplicates += 1
        else:
            seen.add(_normalize_question(q))
            kept.append(QAPair(question=q, ground_truth=a, source=pair.source, origin=pair.origin))
            report.kept += 1
            continue
        report.dropped += 1
    return kept, report
