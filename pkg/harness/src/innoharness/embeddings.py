"""Pretrained word-vector variants: download, cache, and document averaging.

Four GloVe variants are supported. Files are fetched on demand into a local
cache and verified against a SHA-256 digest. Digests for the upstream
archives are recorded into the cache on first successful download and every
later download is checked against the recorded value; a digest can also be
pinned ahead of time via the registry.

A vectors file already present in the cache directory is used as-is, so an
offline deployment can drop pre-downloaded (or locally built) `.txt` files
into the cache and never touch the network.
"""

from __future__ import annotations

import hashlib
import os
import zipfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from .errors import EmbeddingUnavailable, IntegrityError
from .tokens import tokenize

ENV_CACHE_DIR = "INNOHARNESS_EMBEDDINGS"
_DEFAULT_CACHE = Path.home() / ".cache" / "innoharness" / "embeddings"


@dataclass(frozen=True)
class EmbeddingVariant:
    name: str
    url: str
    member: str  # vectors file inside the archive, also the cache file name
    dim: int
    lowercase: bool  # vocabulary casing of the upstream corpus
    sha256: str | None = None  # pinned archive digest; None = record on first fetch


EMBEDDING_VARIANTS: dict[str, EmbeddingVariant] = {
    "6B-100d": EmbeddingVariant(
        name="6B-100d",
        url="https://nlp.stanford.edu/data/glove.6B.zip",
        member="glove.6B.100d.txt",
        dim=100,
        lowercase=True,
    ),
    "6B-300d": EmbeddingVariant(
        name="6B-300d",
        url="https://nlp.stanford.edu/data/glove.6B.zip",
        member="glove.6B.300d.txt",
        dim=300,
        lowercase=True,
    ),
    "42B-300d": EmbeddingVariant(
        name="42B-300d",
        url="https://nlp.stanford.edu/data/glove.42B.300d.zip",
        member="glove.42B.300d.txt",
        dim=300,
        lowercase=True,
    ),
    "840B-300d": EmbeddingVariant(
        name="840B-300d",
        url="https://nlp.stanford.edu/data/glove.840B.300d.zip",
        member="glove.840B.300d.txt",
        dim=300,
        lowercase=False,
    ),
}


def cache_dir(override: str | Path | None = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return _DEFAULT_CACHE


def _digest_path(cache: Path, variant: EmbeddingVariant) -> Path:
    return cache / (Path(variant.url).name + ".sha256")


def _expected_digest(cache: Path, variant: EmbeddingVariant) -> str | None:
    if variant.sha256 is not None:
        return variant.sha256
    recorded = _digest_path(cache, variant)
    if recorded.exists():
        return recorded.read_text(encoding="utf-8").strip()
    return None


def fetch(variant_name: str, cache: str | Path | None = None) -> Path:
    """Return the cached vectors file for a variant, downloading if needed."""
    variant = EMBEDDING_VARIANTS.get(variant_name)
    if variant is None:
        raise EmbeddingUnavailable(
            f"unknown embedding variant {variant_name!r}; "
            f"known: {', '.join(sorted(EMBEDDING_VARIANTS))}"
        )
    cache_path = cache_dir(cache)
    vectors = cache_path / variant.member
    if vectors.exists():
        return vectors
    cache_path.mkdir(parents=True, exist_ok=True)
    archive = cache_path / Path(variant.url).name
    if not archive.exists():
        _download(variant, archive, cache_path)
    with zipfile.ZipFile(archive) as zf:
        zf.extract(variant.member, cache_path)
    return vectors


def _download(variant: EmbeddingVariant, archive: Path, cache: Path) -> None:
    try:
        response = requests.get(variant.url, stream=True, timeout=60)
        response.raise_for_status()
    except requests.RequestException as exc:
        raise EmbeddingUnavailable(
            f"could not fetch {variant.url}: {exc}; place {variant.member} "
            f"in {cache} to use a local copy"
        ) from exc
    digest = hashlib.sha256()
    tmp = archive.with_suffix(archive.suffix + ".part")
    with tmp.open("wb") as fh:
        for chunk in response.iter_content(chunk_size=1 << 20):
            fh.write(chunk)
            digest.update(chunk)
    got = digest.hexdigest()
    expected = _expected_digest(cache, variant)
    if expected is not None and got != expected:
        tmp.unlink()
        raise IntegrityError(
            f"{archive.name}: digest {got} does not match expected {expected}"
        )
    if expected is None:
        _digest_path(cache, variant).write_text(got + "\n", encoding="utf-8")
    tmp.replace(archive)


def load_vectors(path: str | Path, dim: int) -> dict[str, np.ndarray]:
    """Parse a text vectors file ("token v1 ... vdim" per line).

    Tokens containing spaces (present in some upstream files) are handled by
    taking the last dim fields as the vector.
    """
    table: dict[str, np.ndarray] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < dim + 1:
                raise ValueError(f"{path}:{line_no}: expected {dim} vector fields")
            token = " ".join(parts[: len(parts) - dim])
            table[token] = np.asarray(parts[len(parts) - dim :], dtype=np.float64)
    return table


def document_vectors(
    texts: list[str], table: dict[str, np.ndarray], dim: int, lowercase: bool = True
) -> np.ndarray:
    """Mean of the known-token vectors per document; all-unknown rows are zero."""
    out = np.zeros((len(texts), dim), dtype=np.float64)
    for i, text in enumerate(texts):
        hits = [table[tok] for tok in tokenize(text, lowercase=lowercase) if tok in table]
        if hits:
            out[i] = np.mean(hits, axis=0)
    return out


def variant_document_vectors(
    variant_name: str, texts: list[str], cache: str | Path | None = None
) -> np.ndarray:
    variant = EMBEDDING_VARIANTS[variant_name]
    table = load_vectors(fetch(variant_name, cache), variant.dim)
    return document_vectors(texts, table, variant.dim, lowercase=variant.lowercase)
