"""Tokenization and vocabulary building shared by the neural families.

Tokenization is whitespace splitting with punctuation split off as separate
tokens. The reference setups leave the tokenizer unspecified, so this simple
scheme is the documented assumption.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Iterable, Mapping

# word characters (with apostrophes) or one non-space symbol per token
_TOKEN_RE = re.compile(r"[A-Za-z0-9']+|[^\sA-Za-z0-9']")

PAD_INDEX = 0
UNK_INDEX = 1


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    if lowercase:
        text = text.lower()
    return _TOKEN_RE.findall(text)


def build_vocabulary(
    texts: Iterable[str], num_words: int, lowercase: bool = True
) -> dict[str, int]:
    """Map the num_words most frequent tokens to indices 2..num_words+1.

    Indices 0 and 1 are reserved for padding and unknown tokens. Frequency
    ties break alphabetically so the mapping is deterministic.
    """
    if num_words < 1:
        raise ValueError("num_words must be positive")
    counts: Counter[str] = Counter()
    for text in texts:
        counts.update(tokenize(text, lowercase=lowercase))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return {tok: i + 2 for i, (tok, _) in enumerate(ranked[:num_words])}


def encode(tokens: list[str], vocab: Mapping[str, int], seq_len: int) -> list[int]:
    """Index a token list, truncated or right-padded to exactly seq_len."""
    ids = [vocab.get(tok, UNK_INDEX) for tok in tokens[:seq_len]]
    ids.extend([PAD_INDEX] * (seq_len - len(ids)))
    return ids
