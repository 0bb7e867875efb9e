"""The answer pipeline: language detection, retrieval, chain execution,
structured-output parsing, and source attachment."""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import errors, llm
from .embed import EmbeddingCache, EmbeddingProvider, embed_texts
from .index import VectorIndex
from .llm import ModelConfig, complete, render_prompt

CANNOT_ANSWER = "I cannot answer this question from the available documents."
NO_CONTEXT_CLAUSE = "No context was found for this question."

DEFAULT_CONTEXT_BUDGET = 12_000

_FENCED_JSON_RE = re.compile(r"```json\s*(.*?)```", re.DOTALL)

# ~50 common words per language, lowercase; token-level exact match
INDONESIAN_STOPWORDS = frozenset("""
yang dan di ke dari ini itu dengan untuk pada adalah dalam tidak akan ada
juga atau bisa karena oleh sebagai apa siapa berapa bagaimana kapan dimana
mengapa saya kami kita mereka dia anda sudah belum harus dapat tentang
tahun bahwa agar jika namun tetapi serta setiap berasal telah merupakan
""".split())

ENGLISH_STOPWORDS = frozenset("""
the a an is are was were be been to of in on at by for with and or not
what who how when where why which do does did can could will would should
this that these those it its from as about into than then there their we
""".split())

LANGUAGE_INSTRUCTIONS = {
    "id": "Respond in Indonesian.",
    "en": "Respond in English.",
    "other": "Respond in the same language as the question.",
}

FORMAT_INSTRUCTION = (
    ' Return your response as a fenced code block tagged json containing '
    '{"answer": "<answer text>", "table": {"columns": [...], "rows": [[...]]}} '
    'with "table" set to null when no tabular data applies.'
)


@dataclass
class RagConfig:
    k: int = 4
    chain: str = "stuff"  # stuff | map_reduce | refine
    model: ModelConfig = field(default_factory=ModelConfig)
    language_policy: str = "match_input"  # match_input | force:<lang>
    structured_output: bool = False
    context_budget: int = DEFAULT_CONTEXT_BUDGET

    def __post_init__(self):
        if self.k < 1:
            raise errors.InvalidParams(f"k must be >= 1, got {self.k}")
        if self.chain not in ("stuff", "map_reduce", "refine"):
            raise errors.InvalidParams(f"unknown chain {self.chain!r}")


@dataclass
class ContextItem:
    chunk_key: str
    source_uri: str
    text: str
    score: float


@dataclass
class AnswerPayload:
    answer: str
    language: str
    sources: list[dict]
    latency: float
    chain_used: str
    table: dict | None = None
    parse_fallback: bool = False
    template_id: str = ""

    def to_dict(self) -> dict:
        return {
            "answer": self.answer,
            "language": self.language,
            "table": self.table,
            "sources": self.sources,
            "latency": self.latency,
            "chain_used": self.chain_used,
            "parse_fallback": self.parse_fallback,
            "template_id": self.template_id,
        }


class TemplateStore:
    """Versioned prompt templates; ships package defaults, a directory
    override wins per template id."""

    def __init__(self, override_dir: str | Path | None = None):
        self.override_dir = Path(override_dir) if override_dir else None

    def load(self, template_id: str) -> str:
        name = f"{template_id}.txt"
        if self.override_dir:
            candidate = self.override_dir / name
            if candidate.is_file():
                return candidate.read_text(encoding="utf-8")
        ref = resources.files("govqa.templates").joinpath(name)
        if not ref.is_file():
            raise errors.NotFound(f"no template {template_id!r}")
        return ref.read_text(encoding="utf-8")


_WORD_RE = re.compile(r"[0-9a-z]+")


def detect_language(text: str) -> str:
    tokens = _WORD_RE.findall(text.lower())
    id_hits = sum(1 for t in tokens if t in INDONESIAN_STOPWORDS)
    en_hits = sum(1 for t in tokens if t in ENGLISH_STOPWORDS)
    if id_hits == en_hits:
        return "other"
    return "id" if id_hits > en_hits else "en"


def language_instruction(question: str, policy: str) -> tuple[str, str]:
    """Returns (language tag, instruction sentence) for the given policy."""
    if policy.startswith("force:"):
        lang = policy.split(":", 1)[1]
        return lang, LANGUAGE_INSTRUCTIONS.get(lang, f"Respond in {lang}.")
    lang = detect_language(question)
    return lang, LANGUAGE_INSTRUCTIONS[lang]


def _format_contexts(contexts: list[ContextItem]) -> str:
    blocks = []
    for i, ctx in enumerate(contexts, start=1):
        blocks.append(f"[source {i}: {ctx.source_uri}]\n{ctx.text}")
    return "\n\n".join(blocks)


def _common_vars(question: str, lang_instruction: str, structured: bool) -> dict[str, str]:
    return {
        "question": question,
        "cannot_answer": CANNOT_ANSWER,
        "language_instruction": lang_instruction,
        "format_instruction": FORMAT_INSTRUCTION if structured else "",
    }


def chain_stuff(
    question: str,
    contexts: list[ContextItem],
    provider: llm.ChatProvider,
    config: RagConfig,
    lang_instruction: str,
    templates: TemplateStore,
) -> tuple[str, str]:
    total = sum(len(c.text) for c in contexts)
    if total > config.context_budget:
        raise errors.ContextBudgetExceeded(
            f"{total} chars of context exceed budget {config.context_budget}; "
            f"lower k or switch to map_reduce/refine"
        )
    variables = _common_vars(question, lang_instruction, config.structured_output)
    if contexts:
        variables["contexts"] = _format_contexts(contexts)
    else:
        variables["contexts"] = f"{NO_CONTEXT_CLAUSE} State that you cannot answer."
    messages = render_prompt(templates.load("stuff_v1"), variables)
    return complete(provider, messages, config.model).text, "stuff_v1"


def chain_map_reduce(
    question: str,
    contexts: list[ContextItem],
    provider: llm.ChatProvider,
    config: RagConfig,
    lang_instruction: str,
    templates: TemplateStore,
) -> tuple[str, str]:
    if not contexts:
        raise errors.InvalidParams("map_reduce needs at least one context")
    map_template = templates.load("map_v1")
    map_outputs = []
    for ctx in contexts:  # rank order
        variables = _common_vars(question, lang_instruction, False)
        variables["context"] = f"[source: {ctx.source_uri}]\n{ctx.text}"
        messages = render_prompt(map_template, variables)
        map_outputs.append(complete(provider, messages, config.model).text)
    variables = _common_vars(question, lang_instruction, config.structured_output)
    variables["summaries"] = "\n\n".join(map_outputs)
    messages = render_prompt(templates.load("reduce_v1"), variables)
    return complete(provider, messages, config.model).text, "reduce_v1"


def chain_refine(
    question: str,
    contexts: list[ContextItem],
    provider: llm.ChatProvider,
    config: RagConfig,
    lang_instruction: str,
    templates: TemplateStore,
) -> tuple[str, str]:
    if not contexts:
        raise errors.InvalidParams("refine needs at least one context")
    variables = _common_vars(question, lang_instruction, config.structured_output)
    variables["context"] = f"[source: {contexts[0].source_uri}]\n{contexts[0].text}"
    messages = render_prompt(templates.load("refine_init_v1"), variables)
    answer = complete(provider, messages, config.model).text
    step_template = templates.load("refine_step_v1")
    for ctx in contexts[1:]:
        variables = _common_vars(question, lang_instruction, config.structured_output)
        variables["previous_answer"] = answer
        variables["context"] = f"[source: {ctx.source_uri}]\n{ctx.text}"
        messages = render_prompt(step_template, variables)
        answer = complete(provider, messages, config.model).text
    return answer, "refine_step_v1" if len(contexts) > 1 else "refine_init_v1"


_CHAINS = {
    "stuff": chain_stuff,
    "map_reduce": chain_map_reduce,
    "refine": chain_refine,
}


def parse_structured(raw_text: str) -> tuple[str, dict | None, bool]:
    """Returns (answer, table, parse_fallback). Any parse failure falls
    back to the raw text with the fallback flag set."""
    match = _FENCED_JSON_RE.search(raw_text)
    if not match:
        return raw_text, None, True
    try:
        data = json.loads(match.group(1))
    except json.JSONDecodeError:
        return raw_text, None, True
    if not isinstance(data, dict) or not isinstance(data.get("answer"), str):
        return raw_text, None, True
    table = data.get("table")
    if table is not None:
        if (
            not isinstance(table, dict)
            or not isinstance(table.get("columns"), list)
            or not isinstance(table.get("rows"), list)
            or any(not isinstance(r, list) or len(r) != len(table["columns"]) for r in table["rows"])
        ):
            return raw_text, None, True
        table = {
            "columns": [str(c) for c in table["columns"]],
            "rows": [[str(v) for v in row] for row in table["rows"]],
        }
    return data["answer"], table, False


def answer(
    question: str,
    config: RagConfig,
    index: VectorIndex,
    embedder: EmbeddingProvider,
    provider: llm.ChatProvider,
    templates: TemplateStore | None = None,
    cache: EmbeddingCache | None = None,
) -> AnswerPayload:
    if not question.strip():
        raise errors.EmptyText(message="question must be non-empty")
    if len(index) == 0:
        raise errors.EmptyIndex("index has no entries")
    templates = templates or TemplateStore()

    start = time.monotonic()
    lang, instruction = language_instruction(question, config.language_policy)

    query_vec = embed_texts(embedder, [question], cache=cache)[0]
    results = index.query(query_vec, k=config.k)
    contexts = []
    for r in results:
        chunk = index.get_chunk(r.chunk_key)
        meta = index.get_metadata(r.chunk_key) or {}
        contexts.append(ContextItem(
            chunk_key=r.chunk_key,
            source_uri=meta.get("source_uri", ""),
            text=chunk.text if chunk else "",
            score=r.score,
        ))

    raw, template_id = _CHAINS[config.chain](
        question, contexts, provider, config, instruction, templates
    )

    table = None
    fallback = False
    text = raw
    if config.structured_output:
        text, table, fallback = parse_structured(raw)

    return AnswerPayload(
        answer=text,
        language=lang,
        table=table,
        sources=[
            {"chunk_key": c.chunk_key, "source_uri": c.source_uri, "score": c.score}
            for c in contexts
        ],
        latency=time.monotonic() - start,
        chain_used=config.chain,
        parse_fallback=fallback,
        template_id=template_id,
    )
