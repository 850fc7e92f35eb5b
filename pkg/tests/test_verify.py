import math

import pytest

from kqlogic import charform, games, verify
from kqlogic.quantifiers import parse_quantifier
from kqlogic.semantics import equivalence_partitions, same_class
from kqlogic.structures import Signature, Structure


def test_gen_structures_deterministic_and_counted():
    corpus = verify.Corpus(seed=1, count=10)
    first = verify.gen_structures(corpus)
    second = verify.gen_structures(corpus)
    assert len(first) == 10
    assert all(x == y for x, y in zip(first, second))
    assert len(first[0].universe) == 1
    assert all(not first[0].rel(n) for n in first[0].signature.names())


def test_gen_structures_respects_seed():
    a = verify.gen_structures(verify.Corpus(seed=1, count=10))
    b = verify.gen_structures(verify.Corpus(seed=2, count=10))
    assert any(x != y for x, y in zip(a, b))


def test_gen_instances_deterministic():
    corpus = verify.Corpus(seed=5, count=12)
    first = verify.gen_instances(corpus)
    second = verify.gen_instances(corpus)
    for x, y in zip(first, second):
        assert x.a == y.a and x.b == y.b and x.registry == y.registry


def test_fig1_family_shapes():
    left, right = verify.gen_fig1_family(1)
    assert len(left.structure.universe) == 4
    assert len(right.structure.universe) == 7
    # the left structure embeds into the right: same nodes and edges plus one spoke
    assert set(left.structure.universe) <= set(right.structure.universe)
    assert left.structure.rel("R") <= right.structure.rel("R")
    with pytest.raises(verify.VerifyError):
        verify.gen_fig1_family(0)


@pytest.mark.parametrize("n", [1, 2])
def test_fig1_thresholds_triple_agreement(n):
    result = verify.fig1_thresholds(n)
    assert result["game"] == result["oracle"] == result["characteristic"]
    assert result["game"] != math.inf
    assert not result["unbounded_bisimilar"]


def test_unknown_suite():
    with pytest.raises(verify.VerifyError, match="unknown suite"):
        verify.run_suite("nope")


def test_suite_reports_have_repro_commands():
    report = verify.run_suite("ef", count=4)
    assert report.passed
    # force a failure record through the helper to check its shape
    inst = verify.gen_instances(verify.Corpus(count=1))[0]
    record = verify._failure({"q": 1}, inst, verify._cli_repro(inst, ("a",), ("a",), 1))
    assert "left" in record["instance"] and "command" in record
    assert record["command"].startswith("kqlogic bisim")


def test_mutant_dropping_back_part_is_caught(monkeypatch):
    # crafted pair where only the back responses separate the two roots
    sig = Signature.of({"R": 2})
    lone = Structure(sig, ["a"], {"R": []})
    edge = Structure(sig, ["u", "v"], {"R": [("u", "v")]})
    dia = parse_quantifier("dia[R]", 1)

    healthy = charform.CharContext([lone, edge], [dia], 1)
    assert not charform.check_char(healthy, lone, ("a",), edge, ("u",), 1)

    monkeypatch.setattr(
        charform.CharContext,
        "_max_witness_free",
        lambda self, qd, s, t, ext_here: frozenset(),
    )
    mutated = charform.CharContext([lone, edge], [dia], 1)
    game = games.bisim_rank(lone, edge, 1, 1, [dia]).related(("a",), ("u",), 1)
    oracle = same_class(
        equivalence_partitions(lone, edge, 1, 1, [dia])[1], ("A", ("a",)), ("B", ("u",))
    )
    broken = charform.check_char(mutated, lone, ("a",), edge, ("u",), 1)
    assert not game and not oracle and broken  # the mutant diverges

    report = verify.run_suite("ef", seed=20240809, count=40)
    assert not report.passed
    assert report.failures


def test_quantifier_pool_respects_k_and_families():
    sig = Signature.of({"R": 2})
    names = verify.quantifier_pool(sig, 2)
    assert all(not n.startswith(("dia", "cyc", "reach")) for n in names)
    restricted = verify.quantifier_pool(sig, 1, families=("dia", "all"))
    assert restricted == ["dia[R]", "all"]
    assert all("inf" not in n for n in verify.quantifier_pool(sig, 1))
