"""Rule-based baselines: keyword dictionaries and version-number heuristics."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .stemming import porter_stem


class UnparseableVersion(Exception):
    """Raised when a requested version field is not a decimal digit run."""


_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def preprocess(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, Porter-stem each token."""
    return [porter_stem(tok) for tok in _TOKEN_RE.findall(text.lower())]


@dataclass(frozen=True)
class KeywordDictionary:
    """A named keyword list stored in stemmed form; matching is stem vs stem."""

    name: str
    stemmed_keywords: frozenset[str]
    char_threshold: int | None = None

    @classmethod
    def from_keywords(
        cls, name: str, keywords: list[str] | tuple[str, ...], char_threshold: int | None = None
    ) -> "KeywordDictionary":
        if not keywords:
            raise ValueError("a keyword dictionary needs at least one keyword")
        stems = frozenset(porter_stem(k.strip().lower()) for k in keywords)
        return cls(name=name, stemmed_keywords=stems, char_threshold=char_threshold)


def _parse_dictionary_text(name: str, text: str) -> KeywordDictionary:
    keywords: list[str] = []
    threshold: int | None = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("threshold:"):
            threshold = int(line.split(":", 1)[1].strip())
            continue
        keywords.append(line)
    return KeywordDictionary.from_keywords(name, keywords, char_threshold=threshold)


def load_builtin_dictionary(name: str) -> KeywordDictionary:
    """Load a dictionary shipped with the package (by file stem under data/)."""
    path = resources.files("innolens").joinpath(f"data/{name}.txt")
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise KeyError(f"no builtin dictionary named {name!r}") from None
    return _parse_dictionary_text(name, text)


def kircher_foerderer_dictionary() -> KeywordDictionary:
    return load_builtin_dictionary("kircher_foerderer")


def agarwal_kapoor_dictionary() -> KeywordDictionary:
    return load_builtin_dictionary("agarwal_kapoor")


def classify_dictionary(text: str, dictionary: KeywordDictionary | None = None) -> bool:
    """Innovative iff any stemmed token matches the dictionary."""
    if dictionary is None:
        dictionary = kircher_foerderer_dictionary()
    if dictionary.char_threshold is not None:
        raise ValueError(
            f"dictionary {dictionary.name!r} carries a character threshold; "
            "use classify_dictionary_character"
        )
    return bool(set(preprocess(text)) & dictionary.stemmed_keywords)


def classify_dictionary_character(text: str, dictionary: KeywordDictionary | None = None) -> bool:
    """Innovative iff the text exceeds the length threshold or any keyword matches."""
    if dictionary is None:
        dictionary = agarwal_kapoor_dictionary()
    if dictionary.char_threshold is None:
        raise ValueError(f"dictionary {dictionary.name!r} has no character threshold")
    if len(text) > dictionary.char_threshold:
        return True
    return bool(set(preprocess(text)) & dictionary.stemmed_keywords)


@dataclass(frozen=True)
class VersionPair:
    prev: str
    next: str


_FIELD_INDEX = {"first": 0, "second": 1}


def _version_field(version: str, index: int) -> int:
    parts = version.strip().split(".")
    if index >= len(parts):
        return 0
    part = parts[index].strip()
    if not re.fullmatch(r"\d+", part):
        raise UnparseableVersion(f"field {index + 1} of version {version!r} is not numeric")
    return int(part)


def classify_version(pair: VersionPair, field: str) -> bool:
    """Innovative iff the chosen version field changed between prev and next.

    field is "first" (major) or "second" (minor). A missing field reads as 0;
    a present but non-numeric field raises UnparseableVersion so callers can
    exclude and count the record rather than score it.
    """
    try:
        index = _FIELD_INDEX[field]
    except KeyError:
        raise ValueError(f"field must be 'first' or 'second', got {field!r}") from None
    return _version_field(pair.prev, index) != _version_field(pair.next, index)
