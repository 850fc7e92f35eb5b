import itertools
import json
import random

import pytest

from kqlogic import formulas as fm
from kqlogic import products
from kqlogic.semantics import evaluate
from kqlogic.structures import Signature, Structure, are_isomorphic, load_structure


def test_filter_validation():
    good = products.FiniteFilter.of(("0", "1", "2"), [["0"], ["0", "1"], ["0", "2"], ["0", "1", "2"]])
    assert good.contains({"0", "1"})
    assert good.is_ultrafilter()
    with pytest.raises(products.ProductError, match="empty set"):
        products.FiniteFilter.of(("0",), [[]])
    with pytest.raises(products.ProductError, match="upward"):
        products.FiniteFilter.of(("0", "1"), [["0"]])
    with pytest.raises(products.ProductError, match="intersection"):
        products.FiniteFilter.of(("0", "1"), [["0"], ["1"], ["0", "1"]])
    with pytest.raises(products.ProductError, match="at least one"):
        products.FiniteFilter.of(("0",), [])


def test_filter_file_round_trip():
    doc = {"index": ["0", "1", "2"], "sets": [["0"], ["0", "1"], ["0", "2"], ["0", "1", "2"]]}
    filt = products.load_filter(json.dumps(doc))
    assert products.load_filter(json.dumps(filt.to_dict())) == filt


def test_enumerate_ultrafilters():
    assert len(products.enumerate_ultrafilters(("0",))) == 1
    ultras = products.enumerate_ultrafilters(("0", "1", "2"))
    assert len(ultras) == 3
    for u in ultras:
        assert u.is_ultrafilter()
        generators = [label for label in u.index if u.contains({label})]
        assert len(generators) == 1


def test_generate_filter():
    filt = products.generate_filter(("0", "1", "2"), [["0", "1"], ["0", "2"]])
    assert filt.contains({"0"})  # the intersection closure kicks in
    with pytest.raises(products.ProductError, match="empty set"):
        products.generate_filter(("0", "1"), [["0"], ["1"]])


def test_trivial_filter_is_direct_product(k1):
    via_trivial = products.reduced_product([k1, k1], products.trivial_filter(("0", "1"))).structure
    direct = products.direct_product([k1, k1])
    assert via_trivial == direct


def test_direct_product_k1_squared(k1):
    product = products.direct_product([k1, k1])
    assert len(product.universe) == 9
    assert len(product.rel("R")) == len(k1.rel("R")) ** 2
    for (x, y) in k1.rel("R"):
        for (u, v) in k1.rel("R"):
            assert (f"{x}|{u}", f"{y}|{v}") in product.rel("R")


def test_unary_product_isomorphic(k1):
    product = products.direct_product([k1])
    assert are_isomorphic(product, k1) is not None


def test_product_with_empty_relation(k1, k1_doc):
    k1_doc["relations"]["P"] = []
    stripped = load_structure(json.dumps(k1_doc))
    product = products.direct_product([k1, stripped])
    assert product.rel("P") == frozenset()


def test_principal_ultraproduct_isomorphic_to_component(k1):
    sig = k1.signature
    other = Structure(sig, ["u", "v"], {"R": [("u", "v")], "P": [("v",)]})
    for i, ultra in enumerate(products.enumerate_ultrafilters(("0", "1"))):
        rp = products.reduced_product([k1, other], ultra)
        assert are_isomorphic(rp.structure, [k1, other][i]) is not None


def test_two_index_trivial_filter_classes_are_pairs(k1):
    rp = products.reduced_product([k1, k1], products.trivial_filter(("0", "1")))
    assert all(rp.class_of(t) == "|".join(t) for t in itertools.product(k1.universe, repeat=2))


def test_tuple_factorization_is_componentwise():
    # (a1..ak) ~F (b1..bk) iff ai ~F bi for all i
    sig = Signature.of({"P": 1})
    a = Structure(sig, ["a", "b"], {"P": [("a",)]})
    family = [a, a, a]
    labels = ("0", "1", "2")
    rng = random.Random(7)
    for filt in products.all_filters(labels):
        rp = products.reduced_product(family, filt)
        for _ in range(20):
            k = rng.randint(1, 2)
            left = [tuple(rng.choice(a.universe) for _ in labels) for _ in range(k)]
            right = [tuple(rng.choice(a.universe) for _ in labels) for _ in range(k)]
            jointly = filt.contains(frozenset(
                labels[i] for i in range(3) if all(l[i] == r[i] for l, r in zip(left, right))
            ))
            componentwise = all(rp.class_of(l) == rp.class_of(r) for l, r in zip(left, right))
            assert jointly == componentwise


def test_truth_value_set(k1):
    sig = k1.signature
    family = [k1, k1]
    top = fm.parse_formula("true", 1, sig)
    bottom = fm.parse_formula("false", 1, sig)
    assert products.truth_value_set(family, [("a",), ("a",)], top) == frozenset({"0", "1"})
    assert products.truth_value_set(family, [("a",), ("a",)], bottom) == frozenset()
    p = fm.parse_formula("P(x1)", 1, sig)
    assert products.truth_value_set(family, [("b",), ("a",)], p) == frozenset({"0"})


def test_atomic_equivalence_for_every_filter(k1):
    sig = k1.signature
    other = Structure(sig, ["u", "v"], {"R": [("u", "u")], "P": []})
    family = [k1, other]
    rng = random.Random(19)
    slots = [("R", (1, 2)), ("R", (2, 1)), ("R", (1, 1)), ("P", (1,)), ("P", (2,))]
    for filt in products.all_filters(("0", "1")):
        rp = products.reduced_product(family, filt)
        for _ in range(10):
            assignments = [tuple(rng.choice(s.universe) for _ in range(2)) for s in family]
            transported = rp.transport(assignments)
            for rel, vs in slots:
                atom = fm.Atom(rel, vs)
                assert evaluate(rp.structure, transported, atom) == \
                    filt.contains(products.truth_value_set(family, assignments, atom))


def test_los_check_principal(k1):
    sig = k1.signature
    other = Structure(sig, ["u", "v"], {"R": [("u", "v")], "P": [("v",)]})
    family = [k1, other]
    formulas = ["P(x1)", "dia[R] true", "dia[R] P(x1)", "!dia[R] dia[R] true", "(P(x1) | dia[R] P(x1))"]
    rng = random.Random(23)
    for i, ultra in enumerate(products.enumerate_ultrafilters(("0", "1"))):
        for text in formulas:
            formula = fm.parse_formula(text, 1, sig)
            assignments = [(rng.choice(s.universe),) for s in family]
            report = products.los_check(family, assignments, ultra, formula)
            assert report.agree
            # both sides equal evaluation in the selected component
            expected = evaluate(family[i], assignments[i], formula)
            assert report.satisfied_in_product == expected
            assert report.truth_value_in_ultrafilter == expected
            assert "not the Łoś property" in report.note


def test_los_check_requires_ultrafilter(k1):
    trivial = products.trivial_filter(("0", "1"))
    top = fm.parse_formula("true", 1, k1.signature)
    with pytest.raises(products.ProductError, match="ultrafilter"):
        products.los_check([k1, k1], [("a",), ("a",)], trivial, top)


def test_product_cap():
    sig = Signature.of({"P": 1})
    big = Structure(sig, [f"e{i}" for i in range(9)], {"P": []})
    with pytest.raises(products.ProductError, match="cap"):
        products.reduced_product([big, big, big], products.trivial_filter(("0", "1", "2")))


def test_signature_mismatch():
    a = Structure(Signature.of({"P": 1}), ["a"], {})
    b = Structure(Signature.of({"Q": 1}), ["a"], {})
    with pytest.raises(products.ProductError, match="share the signature"):
        products.direct_product([a, b])
