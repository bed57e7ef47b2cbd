"""Prompt templates with a fixed three-section layout plus an input slot.

A template file holds four regions separated by ---SECTION--- lines:
section 1 (output definition and task description), section 2 (one line per
category), a decoration block (empty for the plain variant; few-shot examples
or chain-of-thought scaffolding otherwise), and the slot label that prefixes
the document text. Rendering appends the document after the slot label and
never touches the other bytes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

SECTION_SEPARATOR = "\n---SECTION---\n"

TASKS = ("study1_updates", "study2_reviews")
VARIANTS = ("default", "few_shot", "auto_cot", "manual_cot", "contrastive_cot")

AUTO_COT_SENTENCE = "Let's think step by step."

# category-line counts enforced for the built-in tasks
_TASK_LINE_COUNTS = {"study1_updates": 7, "study2_reviews": 9}

_CATEGORY_LINE_RE = re.compile(r"^\((\d+)\)\s")


class UnknownTemplate(Exception):
    """Raised when no built-in template exists for a (task, variant) pair."""


class TemplateFormatError(Exception):
    """Raised when template content violates the section layout."""


@dataclass(frozen=True)
class PromptTemplate:
    task: str
    variant: str
    section1: str
    section2: tuple[str, ...]
    decoration: str
    slot_label: str

    def __post_init__(self) -> None:
        if not self.section1.strip():
            raise TemplateFormatError("section 1 must be non-empty")
        if not self.section2:
            raise TemplateFormatError("section 2 needs at least one category line")
        expected = _TASK_LINE_COUNTS.get(self.task)
        if expected is not None and len(self.section2) != expected:
            raise TemplateFormatError(
                f"task {self.task!r} requires {expected} category lines, "
                f"got {len(self.section2)}"
            )
        ids = []
        for line in self.section2:
            match = _CATEGORY_LINE_RE.match(line)
            if match is None:
                raise TemplateFormatError(f"category line missing (n) prefix: {line[:40]!r}")
            ids.append(int(match.group(1)))
        if ids != list(range(ids[0], ids[0] + len(ids))):
            raise TemplateFormatError(f"category ids must ascend consecutively, got {ids}")
        if self.variant == "auto_cot" and self.decoration != AUTO_COT_SENTENCE:
            raise TemplateFormatError("auto_cot decoration must be the step-by-step sentence")
        if self.variant == "default" and self.decoration != "":
            raise TemplateFormatError("default variant must have an empty decoration")
        if not self.slot_label or not self.slot_label.endswith(":"):
            raise TemplateFormatError("slot label must be non-empty and end with ':'")

    @property
    def scaffold(self) -> str:
        """Everything before the input slot, single newline between regions."""
        parts = [self.section1, "\n".join(self.section2)]
        if self.decoration:
            parts.append(self.decoration)
        return "\n".join(parts)

    def render(self, text: str) -> "RenderedPrompt":
        prompt = f"{self.scaffold}\n{self.slot_label} {text}"
        return RenderedPrompt(text=prompt, task=self.task, variant=self.variant)


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    task: str
    variant: str


def serialize_template(template: PromptTemplate) -> str:
    """Canonical file form: four regions joined by separator lines, final newline."""
    return (
        SECTION_SEPARATOR.join(
            [
                template.section1,
                "\n".join(template.section2),
                template.decoration,
                template.slot_label,
            ]
        )
        + "\n"
    )


def parse_template(content: str, task: str, variant: str) -> PromptTemplate:
    if content.endswith("\n"):
        content = content[:-1]
    regions = content.split(SECTION_SEPARATOR)
    if len(regions) != 4:
        raise TemplateFormatError(
            f"expected 4 regions separated by ---SECTION--- lines, got {len(regions)}"
        )
    section1, section2_block, decoration, slot_label = regions
    return PromptTemplate(
        task=task,
        variant=variant,
        section1=section1,
        section2=tuple(section2_block.split("\n")),
        decoration=decoration,
        slot_label=slot_label,
    )


def load_template_file(path, task: str, variant: str) -> PromptTemplate:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_template(fh.read(), task, variant)


def _builtin_resource(task: str, variant: str):
    return resources.files("innolens").joinpath(f"templates/{task}__{variant}.txt")


def builtin_template_source(task: str, variant: str) -> str:
    """Raw bytes (as text) of a built-in template file."""
    if task not in TASKS or variant not in VARIANTS:
        raise UnknownTemplate(f"no builtin template for ({task!r}, {variant!r})")
    return _builtin_resource(task, variant).read_text(encoding="utf-8")


def load_builtin(task: str, variant: str) -> PromptTemplate:
    """Load one of the ten built-in (task, variant) templates."""
    return parse_template(builtin_template_source(task, variant), task, variant)


def builtin_pairs() -> list[tuple[str, str]]:
    return [(task, variant) for task in TASKS for variant in VARIANTS]
