"""Reference metric implementations used only by tests.

Written independently of the package: confusion counts are accumulated as
explicit matrices and all arithmetic is exact (fractions), converted to float
at the very end. Any disagreement beyond float rounding is a bug in one side.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def _f(x: Fraction) -> float:
    return float(x)


def _prf_exact(tp: int, fp: int, fn: int) -> tuple[Fraction, Fraction, Fraction]:
    p = Fraction(tp, tp + fp) if tp + fp > 0 else Fraction(0)
    r = Fraction(tp, tp + fn) if tp + fn > 0 else Fraction(0)
    f1 = 2 * p * r / (p + r) if p + r > 0 else Fraction(0)
    return p, r, f1


def ref_binary_report(preds: dict, truth: dict) -> dict:
    ids = sorted(truth)
    tp = sum(1 for i in ids if preds[i] and truth[i])
    fp = sum(1 for i in ids if preds[i] and not truth[i])
    fn = sum(1 for i in ids if not preds[i] and truth[i])
    correct = sum(1 for i in ids if preds[i] == truth[i])
    p, r, f1 = _prf_exact(tp, fp, fn)
    return {
        "precision": _f(p),
        "recall": _f(r),
        "f1": _f(f1),
        "support": tp + fn,
        "accuracy": _f(Fraction(correct, len(ids))),
        "macro_f1": _f(f1),
        "weighted_f1": _f(f1) if tp + fn > 0 else 0.0,
    }


def ref_multiclass_report(preds: dict, truth: dict, classes: tuple, fallback: int) -> dict:
    ids = sorted(truth)
    # full confusion matrix, fallback column kept separate
    matrix = {t: {p: 0 for p in list(classes) + [fallback]} for t in classes}
    for i in ids:
        (t,) = truth[i]
        (p,) = preds[i]
        matrix[t][p] += 1
    per_class = {}
    f1_sum = Fraction(0)
    weighted_sum = Fraction(0)
    total_support = 0
    for c in classes:
        tp = matrix[c][c]
        fn = sum(v for p, v in matrix[c].items() if p != c)
        fp = sum(matrix[t][c] for t in classes if t != c)
        p, r, f1 = _prf_exact(tp, fp, fn)
        support = tp + fn
        per_class[c] = {"precision": _f(p), "recall": _f(r), "f1": _f(f1), "support": support}
        f1_sum += f1
        weighted_sum += f1 * support
        total_support += support
    correct = sum(matrix[c][c] for c in classes)
    return {
        "per_class": per_class,
        "accuracy": _f(Fraction(correct, len(ids))),
        "macro_f1": _f(f1_sum / len(classes)),
        "weighted_f1": _f(weighted_sum / total_support) if total_support else 0.0,
    }


def ref_multilabel_report(preds: dict, truth: dict, classes: tuple, fallback: int) -> dict:
    ids = sorted(truth)
    effective = {}
    for i in ids:
        p = set(preds[i])
        if p == {fallback}:
            p = set()
        effective[i] = p
    per_class = {}
    f1_sum = Fraction(0)
    weighted_sum = Fraction(0)
    total_support = 0
    for c in classes:
        tp = sum(1 for i in ids if c in truth[i] and c in effective[i])
        fp = sum(1 for i in ids if c not in truth[i] and c in effective[i])
        fn = sum(1 for i in ids if c in truth[i] and c not in effective[i])
        p, r, f1 = _prf_exact(tp, fp, fn)
        support = tp + fn
        per_class[c] = {"precision": _f(p), "recall": _f(r), "f1": _f(f1), "support": support}
        f1_sum += f1
        weighted_sum += f1 * support
        total_support += support
    exact = sum(1 for i in ids if effective[i] == set(truth[i]))
    return {
        "per_class": per_class,
        "accuracy": _f(Fraction(exact, len(ids))),
        "macro_f1": _f(f1_sum / len(classes)),
        "weighted_f1": _f(weighted_sum / total_support) if total_support else 0.0,
    }


def ref_consistency(runs: list, mode: str = "pairwise") -> float:
    ids = sorted(runs[0])
    if mode == "unanimous":
        hits = sum(1 for i in ids if len({frozenset(run[i]) for run in runs}) == 1)
        return _f(Fraction(hits, len(ids)))
    agree = 0
    pairs = list(combinations(runs, 2))
    for i in ids:
        for ra, rb in pairs:
            agree += frozenset(ra[i]) == frozenset(rb[i])
    return _f(Fraction(agree, len(ids) * len(pairs)))


def ref_kappa_single(a: dict, b: dict) -> tuple[float, float]:
    ids = sorted(a)
    n = len(ids)
    va = {i: next(iter(a[i])) for i in ids}
    vb = {i: next(iter(b[i])) for i in ids}
    p_o = Fraction(sum(1 for i in ids if va[i] == vb[i]), n)
    cats = sorted(set(va.values()) | set(vb.values()))
    p_e = Fraction(0)
    for c in cats:
        na = sum(1 for i in ids if va[i] == c)
        nb = sum(1 for i in ids if vb[i] == c)
        p_e += Fraction(na, n) * Fraction(nb, n)
    if p_e == 1:
        return (1.0 if p_o == 1 else 0.0), _f(p_o)
    return _f((p_o - p_e) / (1 - p_e)), _f(p_o)
