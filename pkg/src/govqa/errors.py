"""Exception hierarchy shared across the engine."""


class GovQAError(Exception):
    """Base class for all engine errors."""


# --- ingest ---

class NotFound(GovQAError):
    pass


class Undecodable(GovQAError):
    pass


class EmptyDocument(GovQAError):
    pass


class UnsupportedFormat(GovQAError):
    pass


class NotADirectory(GovQAError):
    pass


class InvalidParams(GovQAError):
    pass


# --- embed ---

class EmptyText(GovQAError):
    def __init__(self, index: int = 0, message: str | None = None):
        self.index = index
        super().__init__(message or f"empty text at index {index}")


class ProviderUnavailable(GovQAError):
    pass


# --- index ---

class DimensionMismatch(GovQAError):
    pass


class IoError(GovQAError):
    pass


class CorruptFile(GovQAError):
    pass


# --- llm ---

class Timeout(GovQAError):
    pass


class ContextTooLarge(GovQAError):
    pass


class ScriptMiss(GovQAError):
    def __init__(self, prompt_hash: str):
        self.prompt_hash = prompt_hash
        super().__init__(f"no script rule matched prompt (sha256 {prompt_hash})")


class MissingVariable(GovQAError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing template variable {name!r}")


class UnknownRoleSection(GovQAError):
    pass


# --- rag ---

class EmptyIndex(GovQAError):
    pass


class ContextBudgetExceeded(GovQAError):
    pass


# --- eval ---

class NoContexts(GovQAError):
    pass


class EmptyGroundTruth(GovQAError):
    pass


class EmptyDataset(GovQAError):
    pass


# --- feedback ---

class UnknownResponse(GovQAError):
    pass


class InvalidRating(GovQAError):
    pass


class AlreadyCurated(GovQAError):
    pass


class MissingCorrection(GovQAError):
    pass


class EmptySelection(GovQAError):
    pass
