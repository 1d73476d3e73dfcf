"""The semantic type ontology: the label space every stage predicts over.

Types are loaded from a flat TSV file (one record per line) rather than a
live knowledge base so the label space is versioned and test-stable. The
reserved ``unknown`` type is always present: it is the abstention label and
never participates in name resolution or matching.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .textnorm import normalize_name

UNKNOWN_TYPE_ID = "unknown"

SOURCE_BUILTIN = "builtin"
SOURCE_USER = "user"


@dataclass(frozen=True)
class SemanticType:
    """One label: stable id, display name, synonyms, optional parent."""

    id: str
    canonical_name: str
    synonyms: tuple[str, ...] = ()
    parent_id: str | None = None
    source: str = SOURCE_BUILTIN


class Ontology:
    """Mutable registry of semantic types with a monotone version counter.

    Treated as immutable by readers: the store swaps in a fresh instance on
    mutation, so pipeline runs can share one snapshot concurrently.
    """

    def __init__(self):
        self.types: dict[str, SemanticType] = {}
        self.version: int = 0
        self._by_name: dict[str, list[str]] = {}
        self._register(SemanticType(UNKNOWN_TYPE_ID, UNKNOWN_TYPE_ID), index=False)

    def __contains__(self, type_id: str) -> bool:
        return type_id in self.types

    def __len__(self) -> int:
        return len(self.types)

    def get(self, type_id: str) -> SemanticType | None:
        return self.types.get(type_id)

    def real_types(self) -> list[SemanticType]:
        """All types except the reserved ``unknown``."""
        return [t for t in self.types.values() if t.id != UNKNOWN_TYPE_ID]

    def _register(self, stype: SemanticType, *, index: bool = True) -> None:
        if not stype.id:
            raise ValidationError("type id must be non-empty")
        if stype.id in self.types:
            raise ValidationError(f"duplicate type id: {stype.id!r}")
        if not normalize_name(stype.canonical_name):
            raise ValidationError(f"canonical name of {stype.id!r} normalizes to empty")
        self.types[stype.id] = stype
        if index:
            for name in (stype.canonical_name, *stype.synonyms):
                norm = normalize_name(name)
                if norm:
                    self._by_name.setdefault(norm, []).append(stype.id)

    def resolve_name(self, name: str) -> SemanticType | None:
        """Look a name up by normalized canonical name or synonym.

        The reserved ``unknown`` type is never resolved by name; if a user
        type collides with it the user type wins.
        """
        norm = normalize_name(name)
        if not norm:
            return None
        for type_id in self._by_name.get(norm, ()):
            if type_id != UNKNOWN_TYPE_ID:
                return self.types[type_id]
        return None

    def add_user_type(self, name: str) -> SemanticType:
        """Register a user-introduced type; idempotent by normalized name."""
        norm = normalize_name(name)
        if not norm:
            raise ValidationError("user type name normalizes to empty")
        existing = self.resolve_name(norm)
        if existing is not None:
            return existing
        type_id = self._fresh_id(norm)
        stype = SemanticType(type_id, norm, source=SOURCE_USER)
        self._register(stype)
        self.version += 1
        return stype

    def _fresh_id(self, norm: str) -> str:
        base = norm.replace(" ", "_")
        candidate = base
        n = 2
        while candidate in self.types:
            candidate = f"{base}_{n}"
            n += 1
        return candidate

    def _validate_parents(self) -> None:
        for stype in self.types.values():
            parent = stype.parent_id
            if parent is None:
                continue
            if parent not in self.types:
                raise ValidationError(f"type {stype.id!r} has unknown parent {parent!r}")
        # cycle walk: each chain must terminate at a root
        for stype in self.types.values():
            seen = {stype.id}
            cur = stype.parent_id
            while cur is not None:
                if cur in seen:
                    raise ValidationError(f"parent cycle involving {stype.id!r}")
                seen.add(cur)
                cur = self.types[cur].parent_id


def load_ontology(data: bytes) -> Ontology:
    """Parse an ontology file.

    Format (UTF-8, tab-separated): first non-comment line is
    ``version<TAB><int>``; each record line is
    ``id<TAB>canonical_name<TAB>parent_id_or_-<TAB>comma_separated_synonyms_or_-``.
    Lines starting with ``#`` are comments. The returned ontology starts at
    version 1 regardless of the file's format version.
    """
    text = data.decode("utf-8", errors="replace")
    ontology = Ontology()
    saw_version = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if not saw_version:
            if len(fields) != 2 or fields[0] != "version":
                raise ParseError(
                    f"line {lineno}: expected 'version<TAB><int>' header", line=lineno
                )
            try:
                int(fields[1])
            except ValueError:
                raise ParseError(f"line {lineno}: version is not an integer", line=lineno)
            saw_version = True
            continue
        if len(fields) != 4:
            raise ParseError(
                f"line {lineno}: expected 4 tab-separated fields, got {len(fields)}",
                line=lineno,
            )
        type_id, canonical, parent, synonyms = (f.strip() for f in fields)
        if type_id == UNKNOWN_TYPE_ID:
            if parent != "-" or synonyms != "-":
                raise ValidationError(
                    f"line {lineno}: reserved type {UNKNOWN_TYPE_ID!r} cannot have "
                    "a parent or synonyms"
                )
            continue
        syn_tuple = ()
        if synonyms != "-":
            syn_tuple = tuple(s.strip() for s in synonyms.split(",") if s.strip())
        try:
            ontology._register(
                SemanticType(
                    id=type_id,
                    canonical_name=canonical,
                    synonyms=syn_tuple,
                    parent_id=None if parent == "-" else parent,
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc.message}")
    if not saw_version:
        raise ParseError("missing 'version' header line", line=1)
    ontology._validate_parents()
    ontology.version = 1
    return ontology


def dump_ontology(ontology: Ontology) -> bytes:
    """Serialize back to the flat TSV format (reserved type omitted)."""
    lines = ["version\t1"]
    for stype in ontology.types.values():
        if stype.id == UNKNOWN_TYPE_ID:
            continue
        parent = stype.parent_id or "-"
        synonyms = ",".join(stype.synonyms) if stype.synonyms else "-"
        lines.append(f"{stype.id}\t{stype.canonical_name}\t{parent}\t{synonyms}")
    return ("\n".join(lines) + "\n").encode("utf-8")
