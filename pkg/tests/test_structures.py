import json
import random

import pytest

from kqlogic.structures import (
    DocumentError,
    Signature,
    Structure,
    StructureError,
    apply_bijection,
    are_isomorphic,
    load_structure,
    parse_assignment,
    reduct,
    serialize_structure,
)


def test_load_k1(k1):
    assert len(k1.universe) == 3
    assert set(k1.signature.names()) == {"R", "P"}
    assert k1.rel("R") == frozenset({("a", "b"), ("b", "c")})
    assert k1.rel("P") == frozenset({("b",)})


def test_load_rejects_unknown_element(k1_doc):
    k1_doc["relations"]["R"].append(["a", "z"])
    with pytest.raises(StructureError, match="z"):
        load_structure(json.dumps(k1_doc))


def test_load_rejects_arity_mismatch(k1_doc):
    k1_doc["relations"]["R"].append(["a"])
    with pytest.raises(StructureError, match="length 1"):
        load_structure(json.dumps(k1_doc))


def test_load_rejects_bad_json():
    with pytest.raises(DocumentError, match="line 1"):
        load_structure("{not json")


def test_load_rejects_empty_universe():
    with pytest.raises(StructureError, match="empty universe"):
        load_structure(json.dumps({"signature": {}, "universe": [], "relations": {}}))


def test_load_rejects_undeclared_relation(k1_doc):
    k1_doc["relations"]["Q"] = []
    with pytest.raises(StructureError, match="undeclared"):
        load_structure(json.dumps(k1_doc))


def test_missing_relation_key_means_empty(k1_doc):
    del k1_doc["relations"]["P"]
    s = load_structure(json.dumps(k1_doc))
    assert s.rel("P") == frozenset()


def test_equality_opt_in(k1_doc):
    s = load_structure(json.dumps(k1_doc), with_equality=True)
    assert "eq" in s.signature
    assert s.rel("eq") == frozenset({("a", "a"), ("b", "b"), ("c", "c")})


def test_serialize_round_trip(k1):
    assert load_structure(serialize_structure(k1)) == k1


def test_signature_validation():
    with pytest.raises(StructureError):
        Signature.of({"R": 0})
    with pytest.raises(StructureError):
        Signature.of([("R", 2), ("R", 1)])
    sig = Signature.of({"R": 2, "P": 1})
    assert sig.arity("R") == 2 and "P" in sig
    assert sig.contains(Signature.of({"P": 1}))
    assert not sig.contains(Signature.of({"P": 2}))


def test_apply_bijection_identity(k1):
    assert apply_bijection(k1, {e: e for e in k1.universe}) == k1


def test_apply_bijection_swap(k1):
    swapped = apply_bijection(k1, {"a": "c", "b": "b", "c": "a"})
    assert swapped.rel("R") == frozenset({("c", "b"), ("b", "a")})
    assert swapped.rel("P") == frozenset({("b",)})


def test_apply_bijection_rejects_non_injective(k1):
    with pytest.raises(StructureError, match="injective"):
        apply_bijection(k1, {"a": "b", "b": "b", "c": "c"})


def test_reduct(k1):
    r_only = reduct(k1, Signature.of({"R": 2}))
    assert r_only.signature.names() == ("R",)
    assert r_only.universe == k1.universe
    bare = reduct(k1, Signature.of({}))
    assert bare.signature.names() == ()
    with pytest.raises(StructureError):
        reduct(k1, Signature.of({"S": 1}))
    with pytest.raises(StructureError):
        reduct(k1, Signature.of({"P": 2}))  # arity mismatch is also an error


def test_are_isomorphic_identity_and_swap(k1):
    assert are_isomorphic(k1, k1) == {e: e for e in k1.universe}
    image = apply_bijection(k1, {"a": "c", "b": "b", "c": "a"})
    found = are_isomorphic(k1, image)
    assert found is not None
    assert apply_bijection(k1, found) == image or all(
        frozenset(tuple(found[e] for e in t) for t in k1.rel(n)) == image.rel(n)
        for n in k1.signature.names()
    )


def test_are_isomorphic_none(k1, k1_doc):
    k1_doc["relations"]["P"] = []
    stripped = load_structure(json.dumps(k1_doc))
    assert are_isomorphic(k1, stripped) is None


def test_are_isomorphic_signature_mismatch(k1):
    other = Structure(Signature.of({"R": 2}), ["a"], {"R": []})
    with pytest.raises(StructureError):
        are_isomorphic(k1, other)


def test_bijection_preserves_isomorphism(k1):
    rng = random.Random(5)
    for _ in range(10):
        names = list("xyzw")[: len(k1.universe)]
        rng.shuffle(names)
        mapping = dict(zip(k1.universe, names))
        image = apply_bijection(k1, mapping)
        assert are_isomorphic(k1, image) is not None


def test_reduct_commutes_with_bijection(k1):
    sub = Signature.of({"R": 2})
    mapping = {"a": "c", "b": "a", "c": "b"}
    assert reduct(apply_bijection(k1, mapping), sub) == apply_bijection(reduct(k1, sub), mapping)


def test_parse_assignment():
    assert parse_assignment("a") == ("a",)
    assert parse_assignment("a, b") == ("a", "b")
    with pytest.raises(StructureError):
        parse_assignment("a,,b")
