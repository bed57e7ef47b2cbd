"""Prompt templates: builtin content, structure invariants, rendering."""

from __future__ import annotations

from pathlib import Path

import pytest

from innolens import (
    AUTO_COT_SENTENCE,
    PromptTemplate,
    RenderedPrompt,
    TASKS,
    TemplateFormatError,
    UnknownTemplate,
    VARIANTS,
    builtin_pairs,
    builtin_template_source,
    load_builtin,
    load_template_file,
    parse_template,
    serialize_template,
)

GOLDEN_DIR = Path(__file__).parent / "goldens"


def test_catalog():
    assert TASKS == ("study1_updates", "study2_reviews")
    assert VARIANTS == ("default", "few_shot", "auto_cot", "manual_cot", "contrastive_cot")
    assert builtin_pairs() == [(t, v) for t in TASKS for v in VARIANTS]


def test_builtin_templates_match_goldens_byte_for_byte():
    for task, variant in builtin_pairs():
        golden = (GOLDEN_DIR / f"{task}__{variant}.txt").read_bytes()
        source = builtin_template_source(task, variant).encode("utf-8")
        assert source == golden, f"{task}/{variant} drifted from its golden copy"
        # parse + serialize is the identity on builtin sources
        template = load_builtin(task, variant)
        assert serialize_template(template).encode("utf-8") == golden


def test_unknown_template():
    with pytest.raises(UnknownTemplate):
        load_builtin("study3_emails", "default")
    with pytest.raises(UnknownTemplate):
        load_builtin("study1_updates", "zero_shot")


def test_section_line_counts_and_numbering():
    for task, variant in builtin_pairs():
        template = load_builtin(task, variant)
        expected = 7 if task == "study1_updates" else 9
        first = 1 if task == "study1_updates" else 0
        assert len(template.section2) == expected
        for i, line in enumerate(template.section2, start=first):
            assert line.startswith(f"({i}) "), (task, variant, line)


def test_section1_and_section2_identical_across_variants():
    for task in TASKS:
        templates = [load_builtin(task, v) for v in VARIANTS]
        first = templates[0]
        for other in templates[1:]:
            assert other.section1 == first.section1
            assert other.section2 == first.section2


def test_variant_decorations():
    for task in TASKS:
        assert load_builtin(task, "default").decoration == ""
        auto = load_builtin(task, "auto_cot")
        assert auto.decoration == AUTO_COT_SENTENCE
        assert auto.scaffold.endswith(AUTO_COT_SENTENCE)
        few = load_builtin(task, "few_shot").decoration
        assert few.startswith("EXAMPLES:")
        assert "Response:" in few
        for variant in ("manual_cot", "contrastive_cot"):
            assert load_builtin(task, variant).decoration != ""
    # the worked-reasoning variants for the update task open with the cue line
    for variant in ("manual_cot", "contrastive_cot"):
        assert load_builtin("study1_updates", variant).decoration.startswith(AUTO_COT_SENTENCE)
    assert "WRONG EXAMPLE" in load_builtin("study1_updates", "contrastive_cot").decoration
    assert "WRONG EXAMPLE" in load_builtin("study2_reviews", "contrastive_cot").decoration


def test_known_opening_lines():
    s1 = load_builtin("study1_updates", "default")
    assert s1.section1.startswith("ONLY provide the category number (1-7) in response.")
    s2 = load_builtin("study2_reviews", "default")
    assert s2.section1.endswith("provide the categories separated by ;")


def test_slot_labels():
    assert load_builtin("study1_updates", "default").slot_label == "App Update:"
    assert load_builtin("study2_reviews", "default").slot_label == "Review text:"


def test_templates_are_ascii():
    for task, variant in builtin_pairs():
        source = builtin_template_source(task, variant)
        assert source.isascii(), f"{task}/{variant} contains non-ascii bytes"


def test_render():
    template = load_builtin("study1_updates", "default")
    rendered = template.render("bug fixes and more")
    assert isinstance(rendered, RenderedPrompt)
    assert rendered.task == "study1_updates"
    assert rendered.variant == "default"
    assert rendered.text == template.scaffold + "\nApp Update: bug fixes and more"
    assert rendered.text.endswith("App Update: bug fixes and more")
    # the document text appears exactly once, after the slot label
    assert rendered.text.count("bug fixes and more") == 1


def test_render_distinct_inputs_distinct_outputs():
    template = load_builtin("study2_reviews", "auto_cot")
    a = template.render("great app")
    b = template.render("terrible app")
    assert a.text != b.text
    assert a.text.rsplit("Review text: ", 1)[1] == "great app"


def test_scaffold_default_has_no_decoration_line():
    template = load_builtin("study1_updates", "default")
    assert template.scaffold == template.section1 + "\n" + "\n".join(template.section2)


def test_file_round_trip(tmp_path):
    template = load_builtin("study2_reviews", "manual_cot")
    path = tmp_path / "custom.txt"
    path.write_text(serialize_template(template), encoding="utf-8")
    loaded = load_template_file(path, task="study2_reviews", variant="manual_cot")
    assert loaded == template


def test_parse_template_errors():
    with pytest.raises(TemplateFormatError):
        parse_template("only one region", task="study1_updates", variant="default")
    good = serialize_template(load_builtin("study1_updates", "default"))
    # breaking the category numbering must be rejected
    broken = good.replace("(3) ", "(9) ")
    with pytest.raises(TemplateFormatError):
        parse_template(broken, task="study1_updates", variant="default")
    # a slot label without the trailing colon must be rejected
    broken2 = good.replace("App Update:", "App Update")
    with pytest.raises(TemplateFormatError):
        parse_template(broken2, task="study1_updates", variant="default")


def test_auto_cot_decoration_enforced():
    good = serialize_template(load_builtin("study1_updates", "auto_cot"))
    broken = good.replace(AUTO_COT_SENTENCE, "Think carefully.")
    with pytest.raises(TemplateFormatError):
        parse_template(broken, task="study1_updates", variant="auto_cot")
