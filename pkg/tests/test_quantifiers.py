import itertools
import random

import pytest

from kqlogic.quantifiers import (
    QuantifierDef,
    QuantifierError,
    oracle_admits_within,
    oracle_minimal_witnesses,
    oracle_witnesses,
    parse_quantifier,
    parse_quantifier_list,
)
from kqlogic.structures import Signature, Structure, apply_bijection, reduct

DIA = QuantifierDef("dia", 1, relation="R")


def tuples1(*names):
    return frozenset((n,) for n in names)


def test_name_round_trip():
    for name in ["dia[R]", "dia>=2[R]", "all", "some", "cyc[R]", "inf[R]", "reach[R]", "ex>=3[x2]"]:
        q = parse_quantifier(name, 2 if "x2" in name else 1)
        assert q.name == name
        assert parse_quantifier(q.name, q.k) == q


def test_parameter_validation():
    with pytest.raises(QuantifierError):
        QuantifierDef("dia", 2, relation="R")  # 1-quantifier
    with pytest.raises(QuantifierError):
        QuantifierDef("dia", 1)  # relation required
    with pytest.raises(QuantifierError):
        QuantifierDef("ex_ge", 1, n=0, var_index=1)
    with pytest.raises(QuantifierError):
        QuantifierDef("ex_ge", 2, n=1, var_index=3)
    with pytest.raises(QuantifierError):
        QuantifierDef("all", 1, relation="R")
    with pytest.raises(QuantifierError):
        parse_quantifier("dia[]", 1)
    assert parse_quantifier_list("dia[R], all", 1) == [DIA, QuantifierDef("all", 1)]


def test_sigma(k1):
    assert DIA.sigma == {"R": 2}
    assert QuantifierDef("all", 1).sigma == {}
    only_p = reduct(k1, Signature.of({"P": 1}))
    with pytest.raises(QuantifierError, match="not in structure signature"):
        DIA.is_witness(only_p, ("a",), tuples1("b"))


def test_dia_witness_examples(k1):
    assert DIA.is_witness(k1, ("a",), tuples1("b"))
    assert not DIA.is_witness(k1, ("a",), tuples1("b", "c"))
    assert not DIA.is_witness(k1, ("a",), frozenset())


def test_inf_always_empty(k1):
    inf = QuantifierDef("inf", 1, relation="R")
    assert not inf.is_witness(k1, ("a",), tuples1("a"))
    assert inf.minimal_witnesses(k1, ("a",)) == []
    assert not inf.admits_within(k1, ("a",), frozenset(k1.k_tuples(1)))


def test_minimal_witness_examples(k1):
    assert DIA.minimal_witnesses(k1, ("a",)) == [tuples1("b")]
    assert QuantifierDef("all", 1).minimal_witnesses(k1, ("a",)) == [tuples1("a", "b", "c")]
    ex2 = QuantifierDef("ex_ge", 1, n=2, var_index=1)
    assert len(ex2.minimal_witnesses(k1, ("a",))) == 3
    assert ex2.minimal_witnesses(k1, ("a",)) == oracle_minimal_witnesses(ex2, k1, ("a",))


def test_admits_examples(k1):
    assert DIA.admits_within(k1, ("a",), tuples1("b"))
    assert not DIA.admits_within(k1, ("a",), tuples1("a", "c"))
    reach = QuantifierDef("reach", 1, relation="R")
    assert reach.admits_within(k1, ("a",), tuples1("c"))  # a -> b -> c
    assert reach.admits_within(k1, ("a",), tuples1("a"))  # length-0 path
    cyc = QuantifierDef("cyc", 1, relation="R")
    assert not cyc.admits_within(k1, ("a",), tuples1("a", "b", "c"))  # K1 is acyclic


def test_cycle_quantifier():
    sig = Signature.of({"R": 2})
    triangle = Structure(sig, ["a", "b", "c"], {"R": [("a", "b"), ("b", "c"), ("c", "a")]})
    cyc = QuantifierDef("cyc", 1, relation="R")
    assert cyc.admits_within(triangle, ("a",), tuples1("a", "b", "c"))
    assert cyc.is_witness(triangle, ("a",), tuples1("a", "b", "c"))
    assert cyc.minimal_witnesses(triangle, ("a",)) == [tuples1("a", "b", "c")]
    # two-cycles do not count: length >= 3 with pairwise distinct elements
    two_cycle = Structure(sig, ["a", "b"], {"R": [("a", "b"), ("b", "a")]})
    assert not cyc.admits_within(two_cycle, ("a",), tuples1("a", "b"))
    # the cycle need not pass through the distinguished point
    far = Structure(sig, ["a", "b", "c", "d"],
                    {"R": [("b", "c"), ("c", "d"), ("d", "b")]})
    assert cyc.admits_within(far, ("a",), tuples1("b", "c", "d"))
    assert not cyc.admits_within(far, ("a",), tuples1("a", "b", "c"))


def test_ex_ge_on_lines():
    sig = Signature.of({"R": 2})
    s = Structure(sig, ["a", "b"], {"R": []})
    ex1 = QuantifierDef("ex_ge", 2, n=1, var_index=2)
    line = [("a", "a"), ("a", "b")]
    assert ex1.is_witness(s, ("a", "a"), frozenset(line))
    assert not ex1.is_witness(s, ("a", "a"), frozenset({("b", "a")}))  # varies x1, fixed is x2
    assert ex1.minimal_witnesses(s, ("a", "a")) == [frozenset({t}) for t in line]
    assert ex1.admits_within(s, ("a", "a"), frozenset({("a", "b"), ("b", "b")}))


def _random_structure(rng, size):
    sig = Signature.of({"R": 2, "P": 1})
    universe = ["a", "b", "c", "d"][:size]
    return Structure(
        sig,
        universe,
        {
            "R": [t for t in itertools.product(universe, repeat=2) if rng.random() < 0.5],
            "P": [(e,) for e in universe if rng.random() < 0.5],
        },
    )


ALL_PROBES = [
    QuantifierDef("dia", 1, relation="R"),
    QuantifierDef("dia_ge", 1, relation="R", n=2),
    QuantifierDef("all", 1),
    QuantifierDef("some", 1),
    QuantifierDef("cyc", 1, relation="R"),
    QuantifierDef("inf", 1, relation="R"),
    QuantifierDef("reach", 1, relation="R"),
    QuantifierDef("ex_ge", 1, n=2, var_index=1),
    QuantifierDef("all", 2),
    QuantifierDef("ex_ge", 2, n=1, var_index=2),
]


@pytest.mark.parametrize("qd", ALL_PROBES, ids=lambda q: f"{q.name}@k{q.k}")
def test_admits_matches_powerset_reference(qd):
    rng = random.Random(qd.name)
    for _ in range(40):
        s = _random_structure(rng, rng.randint(1, 4 if qd.k == 1 else 3))
        alpha = tuple(rng.choice(s.universe) for _ in range(qd.k))
        ext = frozenset(t for t in s.k_tuples(qd.k) if rng.random() < 0.5)
        assert qd.admits_within(s, alpha, ext) == oracle_admits_within(qd, s, alpha, ext)


@pytest.mark.parametrize("qd", ALL_PROBES, ids=lambda q: f"{q.name}@k{q.k}")
def test_minimal_witnesses_match_powerset_reference(qd):
    rng = random.Random(qd.name + "min")
    for _ in range(15):
        s = _random_structure(rng, rng.randint(1, 4 if qd.k == 1 else 3))
        alpha = tuple(rng.choice(s.universe) for _ in range(qd.k))
        assert qd.minimal_witnesses(s, alpha) == oracle_minimal_witnesses(qd, s, alpha)


@pytest.mark.parametrize("qd", ALL_PROBES, ids=lambda q: f"{q.name}@k{q.k}")
def test_upward_monotonicity(qd):
    rng = random.Random(qd.name + "mono")
    for _ in range(60):
        s = _random_structure(rng, rng.randint(1, 4))
        alpha = tuple(rng.choice(s.universe) for _ in range(qd.k))
        larger = frozenset(t for t in s.k_tuples(qd.k) if rng.random() < 0.6)
        smaller = frozenset(t for t in larger if rng.random() < 0.6)
        if qd.admits_within(s, alpha, smaller):
            assert qd.admits_within(s, alpha, larger)


@pytest.mark.parametrize("qd", ALL_PROBES, ids=lambda q: f"{q.name}@k{q.k}")
def test_consistency_between_the_three_methods(qd):
    rng = random.Random(qd.name + "cons")
    for _ in range(15):
        s = _random_structure(rng, rng.randint(1, 3))
        alpha = tuple(rng.choice(s.universe) for _ in range(qd.k))
        ext = frozenset(t for t in s.k_tuples(qd.k) if rng.random() < 0.6)
        admits = qd.admits_within(s, alpha, ext)
        via_minimal = any(w <= ext for w in qd.minimal_witnesses(s, alpha))
        via_any = any(w <= ext for w in oracle_witnesses(qd, s, alpha))
        assert admits == via_minimal == via_any
        # minimality: witnesses, mutually incomparable, and every witness contains one
        minimal = qd.minimal_witnesses(s, alpha)
        assert all(qd.is_witness(s, alpha, w) for w in minimal)
        assert not any(a < b for a in minimal for b in minimal)
        assert all(any(m <= w for m in minimal) for w in oracle_witnesses(qd, s, alpha))


@pytest.mark.parametrize("qd", ALL_PROBES, ids=lambda q: f"{q.name}@k{q.k}")
def test_isomorphism_equivariance(qd):
    rng = random.Random(qd.name + "iso")
    fresh = ["u", "v", "w", "x"]
    for _ in range(15):
        s = _random_structure(rng, rng.randint(1, 3))
        names = fresh[: len(s.universe)]
        rng.shuffle(names)
        mapping = dict(zip(s.universe, names))
        image = apply_bijection(s, mapping)
        alpha = tuple(rng.choice(s.universe) for _ in range(qd.k))
        mapped_alpha = tuple(mapping[e] for e in alpha)
        witness = frozenset(t for t in s.k_tuples(qd.k) if rng.random() < 0.4)
        mapped_witness = frozenset(tuple(mapping[e] for e in t) for t in witness)
        assert qd.is_witness(s, alpha, witness) == qd.is_witness(image, mapped_alpha, mapped_witness)
        mapped_minimal = [
            frozenset(tuple(mapping[e] for e in t) for t in w) for w in qd.minimal_witnesses(s, alpha)
        ]
        assert sorted(mapped_minimal, key=lambda w: sorted(map(image.sort_key, w))) == \
            qd.minimal_witnesses(image, mapped_alpha)


@pytest.mark.parametrize("qd", [q for q in ALL_PROBES if q.k == 1], ids=lambda q: q.name)
def test_reduct_independence(qd):
    rng = random.Random(qd.name + "red")
    for _ in range(10):
        s = _random_structure(rng, rng.randint(1, 3))
        needed = Signature.of(dict(list(qd.sigma.items()) or [("P", 1)]))
        restricted = reduct(s, needed)
        alpha = (rng.choice(s.universe),)
        ext = frozenset(t for t in s.k_tuples(1) if rng.random() < 0.5)
        assert qd.admits_within(s, alpha, ext) == qd.admits_within(restricted, alpha, ext)
        assert qd.minimal_witnesses(s, alpha) == qd.minimal_witnesses(restricted, alpha)


def test_oracle_guard():
    sig = Signature.of({"R": 2})
    big = Structure(sig, ["a", "b", "c", "d", "e"], {"R": []})
    with pytest.raises(QuantifierError, match="oracle"):
        oracle_minimal_witnesses(DIA, big, ("a",))


def test_malformed_witness_rejected(k1):
    with pytest.raises(QuantifierError, match="not a valid"):
        DIA.is_witness(k1, ("a",), frozenset({("z",)}))
    with pytest.raises(QuantifierError):
        QuantifierDef("some", 1).is_witness(k1, ("a",), frozenset({("a", "b")}))
