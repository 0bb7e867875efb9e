"""govqa: retrieval-augmented question answering for government
financial documents and regulations."""

__version__ = "0.1.0"
