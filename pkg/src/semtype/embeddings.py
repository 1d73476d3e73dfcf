"""Word-vector table used for semantic header matching and value features."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError
from .textnorm import tokenize


@dataclass
class EmbeddingStore:
    """Token → dense vector map with a fixed dimension.

    Lookups of unknown tokens return None; no hashing fallback, so matching
    stays deterministic.
    """

    dimension: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def vector(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token)

    def embed_tokens(self, tokens: list[str]) -> np.ndarray | None:
        """Mean vector of the known tokens; None if none are known."""
        known = [self.vectors[t] for t in tokens if t in self.vectors]
        if not known:
            return None
        return np.mean(known, axis=0)

    def embed_text(self, text: str) -> np.ndarray | None:
        return self.embed_tokens(tokenize(text))


def load_embeddings(data: bytes) -> EmbeddingStore:
    """Parse the text vector format.

    Optional first line ``<vocab> <dim>``; every other line is
    ``token v1 ... vd`` (space separated decimals). All rows must share one
    dimension.
    """
    text = data.decode("utf-8", errors="replace")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty embedding file")
    start = 0
    first = lines[0].split()
    if len(first) == 2:
        try:
            int(first[0]), int(first[1])
            start = 1
        except ValueError:
            start = 0
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    for lineno, line in enumerate(lines[start:], start=start + 1):
        parts = line.split()
        if len(parts) < 2:
            raise ParseError(f"line {lineno}: expected 'token v1 ... vd'", line=lineno)
        token = parts[0]
        try:
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric component for {token!r}", line=lineno)
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise ParseError(
                f"inconsistent dimension for token {token!r}: "
                f"expected {dim}, got {vec.shape[0]}",
                line=lineno,
            )
        vectors[token] = vec
    if dim is None:
        raise ParseError("empty embedding file")
    return EmbeddingStore(dimension=dim, vectors=vectors)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))
