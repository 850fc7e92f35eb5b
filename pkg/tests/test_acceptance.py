"""Acceptance criteria, one test per criterion, at the stated scales.

Every criterion runs through the verification-suite machinery (the same
code behind `kqlogic verify ...`) on a fixed seeded corpus: >= 200 structure
pairs, universes <= 4, <= 2 relations of arity <= 2, k <= 2, ranks <= 3,
with >= 500 per-quantifier probes where the criterion is probe-based.
Run with `pytest tests/test_acceptance.py -v -s` to see one verdict line
per criterion.
"""
import math

import pytest

from kqlogic.verify import Corpus, run_suite

CORPUS = Corpus(seed=20240809, count=200, max_size=4, max_relations=2,
                max_arity=2, max_k=2, max_rank=3, probes=500)


def announce(tag: str, report, extra: str = "") -> None:
    verdict = "PASS" if report.passed else "FAIL"
    skipped = f", {report.skipped} skipped" if report.skipped else ""
    tail = f" — {extra}" if extra else ""
    print(f"[{tag}] {verdict} — {report.checks} checks{skipped} "
          f"in {report.duration:.1f}s{tail}")


def fail_summary(report, limit=3):
    return report.failures[:limit]


@pytest.fixture(scope="module")
def minimal_witness_report():
    return run_suite("minimal-witness", CORPUS)


@pytest.fixture(scope="module")
def ef_report():
    return run_suite("ef", CORPUS)


def test_a1_quantifier_oracle_agreement(minimal_witness_report):
    """A1: admits_within agrees with powerset brute force via is_witness,
    >= 500 seeded instances per built-in quantifier, universe <= 4, k <= 2,
    within 60 seconds."""
    report = minimal_witness_report
    announce("A1", report, "per-quantifier powerset agreement")
    assert report.passed, fail_summary(report)
    assert report.duration < 60, f"budget exceeded: {report.duration:.1f}s"


def test_a2_ef_triple_agreement(ef_report):
    """A2: game membership <=> characteristic-formula satisfaction <=>
    definable-set oracle, for every tuple pair, all q <= 3, over >= 200
    seeded pairs, within 10 minutes."""
    report = ef_report
    announce("A2", report, "triple agreement game/chi/oracle")
    assert report.passed, fail_summary(report)
    assert report.duration < 600, f"budget exceeded: {report.duration:.1f}s"


def test_a3_minimal_witness_game_soundness(minimal_witness_report):
    """A3: the minimal-witness solver equals the unrestricted all-witness
    game on small universes for q <= 2 (exhaustive slice + random corpus)."""
    report = minimal_witness_report
    announce("A3", report, "minimal-witness game = all-witness game")
    assert report.passed, fail_summary(report)


def test_a4_upward_monotonicity():
    """A4: >= 500 random nested-extension probes per quantifier, zero
    violations of admits(E) => admits(E')."""
    report = run_suite("monotone", CORPUS)
    announce("A4", report)
    assert report.passed, fail_summary(report)
    assert report.checks >= 500 * 8


def test_a5_bisimulation_invariance():
    """A5: bisimilar pairs agree on every pairwise-inequivalent formula of
    rank <= 3 over the instance registry (closure representatives,
    re-evaluated through the model checker)."""
    report = run_suite("invariance", CORPUS)
    announce("A5", report, f"{report.meta.get('instances_with_bisimilar_pairs', 0)} instances had bisimilar pairs")
    assert report.passed, fail_summary(report)
    assert report.meta.get("instances_with_bisimilar_pairs", 0) >= 20


def test_a6_finite_index():
    """A6: the relation chain refines monotonically, the class count is
    finite and stabilizes within |A^k| + |B^k|, and the stabilized relation
    is the unbounded-game greatest fixed point."""
    report = run_suite("finite-index", CORPUS)
    announce("A6", report)
    assert report.passed, fail_summary(report)


def test_a7_hennessy_milner():
    """A7: stabilized elementary equivalence (oracle fixed point) coincides
    exactly with stabilized bisimilarity (game fixed point)."""
    report = run_suite("hm", CORPUS)
    announce("A7", report)
    assert report.passed, fail_summary(report)


def test_a8_figure1_family(ef_report):
    """A8: for n in {1,2,3} the game, the characteristic formulae, and the
    oracle report the same agreement threshold, and the unbounded game
    reports non-bisimilarity.  Thresholds are derived, not asserted."""
    report = ef_report
    thresholds = report.meta["fig1_thresholds"]
    line = ", ".join(f"t({t['n']})={t['game']}" for t in thresholds)
    announce("A8", report, f"thresholds {line}")
    assert report.passed, fail_summary(report)
    for t in thresholds:
        assert t["game"] == t["oracle"] == t["characteristic"]
        assert t["game"] != math.inf and str(t["game"]) != "inf"
        assert t["unbounded_bisimilar"] is False


def test_a9_products():
    """A9: principal reduced products are isomorphic to their component,
    atomic filter equivalence holds for every validated filter, and the
    Łoś check passes for every rank-<=2 formula class."""
    report = run_suite("products", CORPUS)
    announce("A9", report)
    assert report.passed, fail_summary(report)
    assert report.skipped == 0


def test_a10_chi_self_satisfaction_and_rank():
    """A10: eval(s, a, chi(s, a, q)) is true and qr(chi) <= q across the corpus."""
    report = run_suite("charform", CORPUS)
    announce("A10", report)
    assert report.passed, fail_summary(report)
