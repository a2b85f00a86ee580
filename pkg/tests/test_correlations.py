"""Multilinear functionals, canonical pairings, normalization."""

import numpy as np
import pytest

from conetheory.correlations import (
    Correlation,
    ProbabilityTable,
    UnphysicalSetupError,
    canonical_pairing,
    correlation_from_operator,
    normalize,
    product_correlation,
    scalar_correlation,
    verify_positivity,
)
from conetheory.spaces import (
    Element,
    classical,
    composite_space,
    from_matrix,
    gram_weights,
    make_space,
    quantum_complex,
    quantum_real,
    sample_cone,
    sample_element,
    spin_factor,
    to_matrix,
)

QC2 = make_space(quantum_complex(2))


def trace_pairing(space):
    return Correlation((space, space), np.diag(gram_weights(space)))


def test_apply_trace_pairing_projectors():
    c = trace_pairing(QC2)
    p0 = from_matrix(QC2, np.diag([1.0, 0.0]))
    p1 = from_matrix(QC2, np.diag([0.0, 1.0]))
    assert c.apply([p0, p0]) == pytest.approx(1.0)
    assert c.apply([p0, p1]) == pytest.approx(0.0)


def test_apply_matches_dense_trace_oracle():
    rng = np.random.default_rng(21)
    c = trace_pairing(QC2)
    for _ in range(100):
        x, y = sample_element(QC2, rng), sample_element(QC2, rng)
        oracle = np.trace(to_matrix(x) @ to_matrix(y)).real
        assert c.apply([x, y]) == pytest.approx(oracle, abs=1e-12)


def test_apply_multilinearity():
    rng = np.random.default_rng(22)
    c = trace_pairing(QC2)
    for _ in range(50):
        x, y, z = (sample_element(QC2, rng) for _ in range(3))
        a, b = rng.standard_normal(2)
        lhs = c.apply([Element(QC2, a * x.coords + b * y.coords), z])
        rhs = a * c.apply([x, z]) + b * c.apply([y, z])
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_apply_validation():
    c = trace_pairing(QC2)
    with pytest.raises(ValueError, match="expected 2 elements"):
        c.apply([QC2.unit])
    cl = make_space(classical(4))
    with pytest.raises(ValueError, match="lives in"):
        c.apply([QC2.unit, cl.unit])


def test_product_correlation_factorizes():
    rng = np.random.default_rng(23)
    c1, c2 = trace_pairing(QC2), trace_pairing(QC2)
    prod = product_correlation(c1, c2)
    for _ in range(100):
        xs = [sample_element(QC2, rng) for _ in range(4)]
        lhs = prod.apply(xs)
        rhs = c1.apply(xs[:2]) * c2.apply(xs[2:])
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_product_with_scalar_is_identity():
    rng = np.random.default_rng(24)
    triv = make_space(quantum_complex(1))
    c1 = trace_pairing(QC2)
    prod = product_correlation(c1, scalar_correlation(triv))
    for _ in range(20):
        x, y = sample_element(QC2, rng), sample_element(QC2, rng)
        assert prod.apply([x, y, triv.unit]) == pytest.approx(
            c1.apply([x, y]), abs=1e-12
        )


def test_correlation_from_operator_identity():
    # W = |0><0| (x) |0><0| gives value <0|X|0><0|Y|0>
    rng = np.random.default_rng(25)
    w = np.kron(np.diag([1.0, 0.0]), np.diag([1.0, 0.0])).astype(complex)
    c = correlation_from_operator([QC2, QC2], w)
    assert c.certificate is not None
    for _ in range(20):
        x, y = sample_element(QC2, rng), sample_element(QC2, rng)
        oracle = np.trace(w @ np.kron(to_matrix(x), to_matrix(y))).real
        assert c.apply([x, y]) == pytest.approx(oracle, abs=1e-12)


def test_correlation_from_operator_rejects_indefinite():
    swap = np.zeros((4, 4))
    for k in range(2):
        for l in range(2):
            swap[2 * k + l, 2 * l + k] = 1.0
    with pytest.raises(ValueError, match="not PSD"):
        correlation_from_operator([QC2, QC2], swap.astype(complex))


def test_verify_positivity_certificate_and_sampling():
    rng = np.random.default_rng(26)
    w = np.kron(np.eye(2), np.eye(2)).astype(complex)
    c = correlation_from_operator([QC2, QC2], w)
    ok, value, method = verify_positivity(c, rng=rng)
    assert ok and method == "psd-certificate"
    # trace pairing is positive on cone pairs but has no PSD certificate
    ok, worst, method = verify_positivity(trace_pairing(QC2), samples=2000, rng=rng)
    assert ok and method.startswith("sampled")
    assert worst >= -1e-12
    # an indefinite functional is caught by sampling
    bad = Correlation((QC2, QC2), -np.diag(gram_weights(QC2)))
    ok, worst, _ = verify_positivity(bad, samples=500, rng=rng)
    assert not ok and worst < 0


@pytest.mark.parametrize(
    "kind",
    [classical(3), quantum_complex(2), quantum_complex(3), quantum_real(2), spin_factor(3)],
)
def test_canonical_pairing_flags(kind):
    s = make_space(kind)
    p = canonical_pairing(s, samples=300, rng=np.random.default_rng(27))
    assert p.symmetric
    assert p.distinguishing
    assert p.evidence["min_normalized_diagonal"] > 0.0
    if kind.family == "spin_factor":
        assert p.evidence["factorization"] == "undefined"
        assert not p.factorizable
    else:
        assert p.factorizable
        assert p.evidence["factorization_gap"] <= 1e-10


def test_canonical_pairing_positive_definite_diagonal():
    rng = np.random.default_rng(28)
    for kind in [classical(4), quantum_complex(3), spin_factor(4)]:
        s = make_space(kind)
        p = canonical_pairing(s, samples=10, rng=rng)
        for _ in range(1000):
            x = sample_element(s, rng)
            if np.linalg.norm(x.coords) > 1e-9:
                assert p.apply(x, x) > 0.0


def test_canonical_pairing_distinguishing_example():
    p = canonical_pairing(QC2, samples=10, rng=np.random.default_rng(29))
    a = from_matrix(QC2, np.diag([1.0, -1.0]))
    probe = from_matrix(QC2, np.diag([0.0, 1.0]))
    assert p.apply(a, probe) == pytest.approx(-1.0)


def test_skewed_pairing_fails_symmetry():
    coeff = np.diag(gram_weights(QC2))
    coeff[0, 1] += 0.25  # break symmetry
    skewed = Correlation((QC2, QC2), coeff)
    gap = np.abs(skewed.coefficients - skewed.coefficients.T).max()
    assert gap == pytest.approx(0.25)


def test_normalize_examples():
    t = normalize([2.0, 2.0])
    np.testing.assert_allclose(t.probabilities(), [0.5, 0.5])
    t = normalize([3.0, 0.0, 1.0])
    np.testing.assert_allclose(t.probabilities(), [0.75, 0.0, 0.25])
    assert t.total_weight == pytest.approx(4.0)
    assert t.probability_of(("0",)) == pytest.approx(0.75)


def test_normalize_rejects_zero_total():
    with pytest.raises(UnphysicalSetupError, match="unphysical setup"):
        normalize([0.0, 0.0])


def test_normalize_rejects_negative():
    with pytest.raises(ValueError, match="nonnegative"):
        normalize([1.0, -0.5])


def test_table_probabilities_sum_to_one():
    rng = np.random.default_rng(30)
    for _ in range(50):
        w = rng.exponential(size=rng.integers(1, 8))
        t = normalize(w)
        assert t.probabilities().sum() == pytest.approx(1.0, abs=1e-12)
        for row in t.rows:
            assert row.probability == row.weight / t.total_weight
