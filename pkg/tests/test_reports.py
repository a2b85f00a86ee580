"""Machine-readable report trees round-trip losslessly."""

import numpy as np

from conetheory.audit import audit_dimension, audit_pairing
from conetheory.correlations import normalize
from conetheory.network import evaluate
from conetheory.demo import load_bundled_theory
from conetheory.reports import (
    parse_reports,
    serialize_reports,
)
from conetheory.spaces import make_space, quantum_complex, quantum_real
from conetheory.theoryfile import build_network


def test_audit_report_round_trip():
    rep = audit_pairing(make_space(quantum_complex(2)), samples=50, seed=4)
    [back] = parse_reports(serialize_reports([rep]))
    assert back == rep


def test_census_round_trip():
    census, rep = audit_dimension(
        make_space(quantum_real(2)), make_space(quantum_real(2)), seed=4
    )
    out = parse_reports(serialize_reports([rep, census]))
    assert out == [rep, census]


def test_table_round_trip_with_awkward_floats():
    table = normalize([1 / 3, 2 / 3, 1e-17], labels=[("a",), ("b",), ("c",)])
    [back] = parse_reports(serialize_reports([table]))
    assert back == table  # floats survive exactly via repr encoding


def test_evaluation_round_trip():
    theory = load_bundled_theory("instrument-chain.theory")
    result = evaluate(build_network(theory))
    [back] = parse_reports(serialize_reports([result]))
    assert back.table == result.table
    assert back.normalization == result.normalization
    np.testing.assert_array_equal(back.weights, result.weights)


def test_serialization_is_deterministic():
    rep = audit_pairing(make_space(quantum_complex(3)), samples=100, seed=12)
    assert serialize_reports([rep]) == serialize_reports([rep])
    rep2 = audit_pairing(make_space(quantum_complex(3)), samples=100, seed=12)
    assert serialize_reports([rep]) == serialize_reports([rep2])
