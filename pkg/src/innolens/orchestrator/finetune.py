"""Fine-tuning dataset export: labeled documents as prompt/completion chat rows."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..corpus import LabeledCorpus, MissingLabel
from ..prompts import PromptTemplate


@dataclass(frozen=True)
class FineTuneRecord:
    prompt: str
    completion: str


def completion_for(labels: frozenset[int]) -> str:
    """Ascending semicolon-joined labels; single labels serialize bare."""
    return ";".join(str(l) for l in sorted(labels))


def prepare_finetune_export(
    corpus: LabeledCorpus, template: PromptTemplate
) -> list[FineTuneRecord]:
    records = []
    for doc in corpus:
        labels = corpus.labels_of(doc.id)
        if not labels:
            raise MissingLabel(f"document {doc.id!r} has no labels to export")
        records.append(
            FineTuneRecord(
                prompt=template.render(doc.text).text,
                completion=completion_for(labels),
            )
        )
    return records


def _record_row(record: FineTuneRecord, role: str) -> dict:
    return {
        "messages": [
            {"role": role, "content": record.prompt},
            {"role": "assistant", "content": record.completion},
        ]
    }


def serialize_finetune(records: Sequence[FineTuneRecord], role: str = "user") -> str:
    return "".join(
        json.dumps(_record_row(r, role), ensure_ascii=False) + "\n" for r in records
    )


def write_finetune_file(
    records: Sequence[FineTuneRecord], path: str | Path, role: str = "user"
) -> str:
    """Write the chat-format JSONL and return its content hash."""
    text = serialize_finetune(records, role)
    Path(path).write_text(text, encoding="utf-8")
    return export_hash(records, role)


def export_hash(records: Sequence[FineTuneRecord], role: str = "user") -> str:
    return hashlib.sha256(serialize_finetune(records, role).encode("utf-8")).hexdigest()
