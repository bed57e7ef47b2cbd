"""Porter stemmer (original 1980 algorithm).

Implemented in-package because keyword matching in the rule baselines depends
on exact stem-vs-stem equality, and no stemming library ships in this
environment. Longest-matching-suffix semantics: within each step, only the
rule with the longest matching suffix is attempted; if its condition fails,
the word passes through that step unchanged.
"""

from __future__ import annotations

_VOWELS = "aeiou"


def _is_cons(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        # y is a vowel when preceded by a consonant
        return True if i == 0 else not _is_cons(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel-to-consonant transitions ([C](VC)^m[V])."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_cons(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_cons(stem, i) for i in range(len(stem)))


def _ends_double_cons(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _is_cons(word, len(word) - 1)


def _ends_cvc(word: str) -> bool:
    # final consonant must not be w, x or y
    if len(word) < 3:
        return False
    return (
        _is_cons(word, len(word) - 3)
        and not _is_cons(word, len(word) - 2)
        and _is_cons(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _longest_rule(word: str, rules):
    best = None
    for rule in rules:
        suffix = rule[0]
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = rule
    return best


def _apply(word: str, rules) -> str:
    """Apply the longest matching (suffix, replacement, condition) rule."""
    rule = _longest_rule(word, rules)
    if rule is None:
        return word
    suffix, replacement, condition = rule
    stem = word[: len(word) - len(suffix)]
    if condition is None or condition(stem):
        return stem + replacement
    return word


def _m_gt(n: int):
    return lambda stem: _measure(stem) > n


_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]

_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]

_STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def porter_stem(word: str) -> str:
    """Stem one lowercase token. Words of length <= 2 pass through."""
    word = word.lower()
    if len(word) <= 2:
        return word

    # step 1a
    word = _apply(word, [("sses", "ss", None), ("ies", "i", None),
                         ("ss", "ss", None), ("s", "", None)])

    # step 1b
    rule = _longest_rule(word, [("eed", None, None), ("ed", None, None), ("ing", None, None)])
    if rule is not None:
        suffix = rule[0]
        stem = word[: len(word) - len(suffix)]
        if suffix == "eed":
            if _measure(stem) > 0:
                word = stem + "ee"
        elif _has_vowel(stem):
            word = stem
            # cleanup after a bare ed/ing removal
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_cons(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # step 1c
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    word = _apply(word, [(s, r, _m_gt(0)) for s, r in _STEP2])
    word = _apply(word, [(s, r, _m_gt(0)) for s, r in _STEP3])

    # step 4: plain deletions at m > 1; "ion" additionally needs a stem ending s or t
    def _step4_cond(suffix: str):
        if suffix == "ion":
            return lambda stem: _measure(stem) > 1 and stem[-1:] in ("s", "t")
        return _m_gt(1)

    word = _apply(word, [(s, "", _step4_cond(s)) for s in _STEP4])

    # step 5a
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            word = stem

    # step 5b
    if _measure(word) > 1 and _ends_double_cons(word) and word.endswith("l"):
        word = word[:-1]

    return word
