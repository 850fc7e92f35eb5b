import json

import pytest

from kqlogic.structures import Structure, Signature, load_structure

K1_DOC = {
    "signature": {"R": 2, "P": 1},
    "universe": ["a", "b", "c"],
    "relations": {"R": [["a", "b"], ["b", "c"]], "P": [["b"]]},
}


@pytest.fixture
def k1() -> Structure:
    return load_structure(json.dumps(K1_DOC))


@pytest.fixture
def k1_doc() -> dict:
    return json.loads(json.dumps(K1_DOC))


@pytest.fixture
def sig_rp() -> Signature:
    return Signature.of({"R": 2, "P": 1})
