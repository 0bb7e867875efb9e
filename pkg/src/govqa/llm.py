"""Chat-completion provider abstraction, prompt templating, and the
scripted deterministic provider used for offline end-to-end tests."""

from __future__ import annotations

import hashlib
import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from . import errors

ROLES = ("system", "user", "assistant")

_SECTION_RE = re.compile(r"\[([a-z_]+)\]")
_PLACEHOLDER_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")

LENIENT_FALLBACK = "Maaf, saya tidak dapat menjawab pertanyaan itu. / Sorry, I cannot answer that."


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise errors.InvalidParams(f"unknown role {self.role!r}")
        if not self.content:
            raise errors.InvalidParams("message content must be non-empty")


@dataclass
class ModelConfig:
    provider_id: str = "scripted"
    model_id: str = "scripted-v1"
    temperature: float = 0.0  # deterministic decode by default
    max_tokens: int = 1024
    timeout: float = 60.0


@dataclass
class Completion:
    text: str
    latency: float
    token_usage: dict[str, int] | None = None


class ChatProvider(Protocol):
    def generate(self, messages: list[ChatMessage], config: ModelConfig) -> str: ...


def _validate_messages(messages: list[ChatMessage]) -> None:
    if not messages:
        raise errors.InvalidParams("messages must be non-empty")
    if messages[0].role == "assistant":
        raise errors.InvalidParams("first message must be system or user")


def complete(provider: ChatProvider, messages: list[ChatMessage], config: ModelConfig) -> Completion:
    _validate_messages(messages)
    start = time.monotonic()
    text = provider.generate(messages, config)
    latency = time.monotonic() - start
    if latency > config.timeout:
        raise errors.Timeout(f"provider call took {latency:.3f}s > {config.timeout}s")
    return Completion(text=text.rstrip(), latency=latency)


def normalize_prompt(messages: list[ChatMessage]) -> str:
    lines = [f"{m.role}: {' '.join(m.content.split())}" for m in messages]
    return "\n".join(lines)


def prompt_hash(messages: list[ChatMessage]) -> str:
    return hashlib.sha256(normalize_prompt(messages).encode("utf-8")).hexdigest()


@dataclass
class ScriptRule:
    response: str
    exact: str | None = None
    regex: str | None = None


class ScriptedProvider:
    """Replays configured responses; immutable after load.

    Matching order: exact normalized prompt, then ordered regex rules,
    then ScriptMiss (strict) or a canned apology (lenient).
    """

    def __init__(self, rules: list[ScriptRule], strict: bool = True):
        self._exact = {}
        self._regex: list[tuple[re.Pattern, str]] = []
        for rule in rules:
            if rule.exact is not None:
                self._exact[" ".join(rule.exact.split())] = rule.response
            elif rule.regex is not None:
                self._regex.append((re.compile(rule.regex, re.DOTALL), rule.response))
            else:
                raise errors.InvalidParams("script rule needs exact or regex matcher")
        self.strict = strict
        self.calls: list[list[ChatMessage]] = []

    @classmethod
    def from_file(cls, path: str | Path, strict: bool = True) -> "ScriptedProvider":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        rules = []
        for item in data:
            match = item["match"]
            rules.append(ScriptRule(
                response=item["response"],
                exact=match.get("exact"),
                regex=match.get("regex"),
            ))
        return cls(rules, strict=strict)

    def generate(self, messages: list[ChatMessage], config: ModelConfig) -> str:
        self.calls.append(list(messages))
        normalized = normalize_prompt(messages)
        if normalized in self._exact:
            return self._exact[normalized]
        for pattern, response in self._regex:
            if pattern.search(normalized):
                return response
        if self.strict:
            raise errors.ScriptMiss(prompt_hash(messages))
        return LENIENT_FALLBACK

    @property
    def call_count(self) -> int:
        return len(self.calls)

    def reset_calls(self) -> None:
        self.calls = []


class StaticProvider:
    """Returns one fixed response regardless of prompt. Handy in fixtures."""

    def __init__(self, text: str):
        self.text = text
        self.calls: list[list[ChatMessage]] = []

    def generate(self, messages: list[ChatMessage], config: ModelConfig) -> str:
        self.calls.append(list(messages))
        return self.text

    @property
    def call_count(self) -> int:
        return len(self.calls)


def _substitute(text: str, variables: dict[str, str]) -> str:
    for match in _PLACEHOLDER_RE.finditer(text):
        if match.group(1) not in variables:
            raise errors.MissingVariable(match.group(1))
    # single-pass substitution so braces inside values stay literal
    return _PLACEHOLDER_RE.sub(lambda m: variables[m.group(1)], text)


def render_prompt(template: str, variables: dict[str, str]) -> list[ChatMessage]:
    """Split the template on [system]/[user]/[assistant] section markers,
    then substitute {placeholders} per section. Sections are parsed before
    substitution, so variable values can never introduce role markers."""
    sections: list[tuple[str, str]] = []  # (role, raw text)
    pos = 0
    current_role = None
    for match in _SECTION_RE.finditer(template):
        name = match.group(1)
        if name not in ROLES:
            raise errors.UnknownRoleSection(f"unknown role section [{name}]")
        if current_role is not None:
            sections.append((current_role, template[pos:match.start()]))
        current_role = name
        pos = match.end()
    if current_role is None:
        # no markers: whole template is a single user message
        sections.append(("user", template))
    else:
        sections.append((current_role, template[pos:]))

    messages: list[ChatMessage] = []
    for role, raw in sections:
        content = _substitute(raw, variables).strip()
        if content:
            messages.append(ChatMessage(role=role, content=content))
    if not messages:
        raise errors.InvalidParams("rendered template is empty")
    return messages
