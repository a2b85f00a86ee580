"""Positive multilinear functionals over cone spaces and probability tables.

A correlation maps a tuple of recorded-data elements to an unnormalized
probability weight.  Weights only carry meaning relative to each other;
:func:`normalize` turns a weight list into absolute probabilities and
rejects the all-zero case, which cannot arise from a physically
meaningful arrangement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spaces import (
    QUANTUM_COMPLEX,
    ConeSpace,
    Element,
    basis_matrices,
    composite_space,
    dual_pairing,
    gram_weights,
    negative_witness,
    product_element,
    sample_cone,
    sample_extremal,
    sample_outside,
)


class UnphysicalSetupError(ValueError):
    """Total probability weight is zero: no outcome can ever be recorded."""


@dataclass(frozen=True, eq=False)
class Correlation:
    """A multilinear functional, stored as a dense coefficient tensor.

    ``coefficients[a1, ..., ak]`` is the value on the a_i-th canonical
    basis elements of the k spaces.  ``certificate``, when present, is a
    PSD operator W on the joint Hilbert space of quantum-complex factors
    with  value(X1, ..., Xk) = Tr[W (X1 (x) ... (x) Xk)];  positivity of
    the functional on cone tuples follows from W >= 0.
    """

    spaces: tuple[ConeSpace, ...]
    coefficients: np.ndarray
    certificate: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.spaces:
            raise ValueError("correlation needs at least one space")
        coeff = np.asarray(self.coefficients, dtype=float)
        want = tuple(s.dim for s in self.spaces)
        if coeff.shape != want:
            raise ValueError(f"coefficient shape {coeff.shape} != {want}")
        coeff = coeff.copy()
        coeff.flags.writeable = False
        object.__setattr__(self, "coefficients", coeff)
        if self.certificate is not None:
            cert = np.asarray(self.certificate, dtype=complex)
            m = int(np.prod([s.matrix_dim for s in self.spaces]))
            if cert.shape != (m, m):
                raise ValueError(f"certificate must be {m}x{m}")
            cert.flags.writeable = False
            object.__setattr__(self, "certificate", cert)

    @property
    def arity(self) -> int:
        return len(self.spaces)

    def apply(self, elems: list[Element] | tuple[Element, ...]) -> float:
        """Contract the coefficient tensor with the elements' coordinates."""
        if len(elems) != self.arity:
            raise ValueError(f"expected {self.arity} elements, got {len(elems)}")
        value = self.coefficients
        for i, (el, space) in enumerate(zip(elems, self.spaces)):
            if el.space.kind != space.kind:
                raise ValueError(f"element {i} lives in {el.space}, expected {space}")
            value = np.tensordot(value, el.coords, axes=([0], [0]))
        return float(value)


def correlation_from_operator(
    spaces: tuple[ConeSpace, ...] | list[ConeSpace],
    operator: np.ndarray,
    check_psd_tol: float | None = 1e-9,
) -> Correlation:
    """Build the functional Tr[W (X1 (x) ... (x) Xk)] from its operator W.

    All spaces must be quantum-complex.  When ``check_psd_tol`` is given,
    W must be PSD within that tolerance and is attached as a positivity
    certificate.
    """
    spaces = tuple(spaces)
    if any(s.family != QUANTUM_COMPLEX for s in spaces):
        raise ValueError("operator form requires quantum-complex spaces")
    w = np.asarray(operator, dtype=complex)
    m = int(np.prod([s.matrix_dim for s in spaces]))
    if w.shape != (m, m):
        raise ValueError(f"operator must be {m}x{m}")
    if np.abs(w - w.conj().T).max(initial=0.0) > 1e-12:
        raise ValueError("operator must be Hermitian")
    certificate = None
    if check_psd_tol is not None:
        if np.linalg.eigvalsh(w).min() < -check_psd_tol:
            raise ValueError("operator is not PSD; no positivity certificate")
        certificate = w
    dims = [s.matrix_dim for s in spaces]
    k = len(spaces)
    # coeff[a1..ak] = sum_W W[i1..ik, j1..jk] * prod_s basis_s[a_s, j_s, i_s]
    letters = "abcdefgh"
    rows = "ijklmnop"
    cols = "qrstuvwx"
    w_sub = rows[:k] + cols[:k]
    terms = [w.reshape(dims + dims)]
    subs = [w_sub]
    for s in range(k):
        terms.append(basis_matrices(spaces[s]))
        subs.append(letters[s] + cols[s] + rows[s])
    out = letters[:k]
    coeff = np.einsum(",".join(subs) + "->" + out, *terms)
    if np.abs(coeff.imag).max(initial=0.0) > 1e-10:
        raise ValueError("operator produced non-real coefficients")
    return Correlation(spaces, coeff.real, certificate)


def product_correlation(c1: Correlation, c2: Correlation) -> Correlation:
    """The correlation on the concatenated spaces; weights multiply on products."""
    coeff = np.multiply.outer(c1.coefficients, c2.coefficients)
    certificate = None
    if c1.certificate is not None and c2.certificate is not None:
        certificate = np.kron(c1.certificate, c2.certificate)
    return Correlation(c1.spaces + c2.spaces, coeff, certificate)


def scalar_correlation(space: ConeSpace, value_on_unit: float = 1.0) -> Correlation:
    """The unique (up to scale) functional on a trivial (d = 1) space."""
    if space.dim != 1:
        raise ValueError("scalar correlation requires a trivial system")
    return Correlation((space,), np.array([value_on_unit]))


def verify_positivity(
    c: Correlation,
    samples: int = 10_000,
    tol: float = 1e-9,
    rng: np.random.Generator | None = None,
) -> tuple[bool, float, str]:
    """Check positivity on cone tuples; returns (ok, worst value, method).

    A PSD certificate short-circuits the sampling: the certificate is
    re-checked for positive semidefiniteness and spot-checked against the
    coefficient tensor.  Without one, the functional is sampled on random
    extremal cone tuples.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    if c.certificate is not None:
        min_eig = float(np.linalg.eigvalsh(c.certificate).min())
        for _ in range(16):
            elems = [sample_extremal(s, rng) for s in c.spaces]
            via_op = _apply_operator(c, elems)
            if abs(via_op - c.apply(elems)) > 1e-8 * max(1.0, abs(via_op)):
                return False, via_op - c.apply(elems), "certificate-mismatch"
        return min_eig >= -tol, min_eig, "psd-certificate"
    worst = np.inf
    for _ in range(samples):
        elems = [sample_extremal(s, rng) for s in c.spaces]
        worst = min(worst, c.apply(elems))
    return worst >= -tol, float(worst), f"sampled-{samples}"


def _apply_operator(c: Correlation, elems) -> float:
    from .spaces import to_matrix

    x = to_matrix(elems[0])
    for el in elems[1:]:
        x = np.kron(x, to_matrix(el))
    return float(np.trace(c.certificate @ x).real)


# ---------------------------------------------------------------------------
# Pairings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pairing:
    """A bipartite correlation between a space and its copy, with audit flags."""

    base: Correlation
    symmetric: bool
    distinguishing: bool
    factorizable: bool
    evidence: dict

    @property
    def space(self) -> ConeSpace:
        return self.base.spaces[0]

    def apply(self, x: Element, y: Element) -> float:
        return self.base.apply([x, y])


def canonical_pairing(
    space: ConeSpace,
    samples: int = 200,
    rng: np.random.Generator | None = None,
) -> Pairing:
    """The self-dualizing pairing of the family, with audit evidence.

    Dot product for classical and spin-factor spaces, the trace form for
    the matrix families.  The attached evidence records the symmetry gap,
    the smallest sampled diagonal value, the count of non-cone samples
    left without a negative witness, and (when composites are defined)
    the worst factorization gap on product pairs.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    coeff = np.diag(gram_weights(space))
    base = Correlation((space, space), coeff)

    symmetry_gap = float(np.abs(coeff - coeff.T).max())

    min_diag = np.inf
    for _ in range(samples):
        x = _sample_nonzero(space, rng)
        min_diag = min(min_diag, base.apply([x, x]) / np.dot(x.coords, x.coords))

    witness_failures = 0
    witness_worst = 0.0
    for _ in range(samples):
        x = sample_outside(space, rng)
        w = negative_witness(x)
        if w is None:
            witness_failures += 1
            continue
        val = base.apply([x, w])
        witness_worst = min(witness_worst, val)
        if val >= 0.0:
            witness_failures += 1
    for _ in range(samples):
        x = sample_cone(space, rng)
        probe = sample_cone(space, rng)
        if base.apply([x, probe]) < -1e-12:
            witness_failures += 1

    evidence = {
        "symmetry_gap": symmetry_gap,
        "min_normalized_diagonal": float(min_diag),
        "witness_failures": witness_failures,
        "witness_worst_pairing": witness_worst,
    }

    factorizable = False
    try:
        comp = composite_space(space, space)
    except ValueError:
        evidence["factorization"] = "undefined"
    else:
        comp_pairing = np.diag(gram_weights(comp))
        gap = 0.0
        for _ in range(min(samples, 100)):
            x1, y1 = _sample_nonzero(space, rng), _sample_nonzero(space, rng)
            x2, y2 = _sample_nonzero(space, rng), _sample_nonzero(space, rng)
            lhs = float(
                product_element(x1, x2).coords
                @ comp_pairing
                @ product_element(y1, y2).coords
            )
            rhs = dual_pairing(x1, y1) * dual_pairing(x2, y2)
            gap = max(gap, abs(lhs - rhs) / max(1.0, abs(rhs)))
        evidence["factorization_gap"] = gap
        factorizable = gap <= 1e-10

    return Pairing(
        base=base,
        symmetric=symmetry_gap == 0.0,
        distinguishing=witness_failures == 0,
        factorizable=factorizable,
        evidence=evidence,
    )


def _sample_nonzero(space: ConeSpace, rng: np.random.Generator) -> Element:
    while True:
        x = Element(space, rng.standard_normal(space.dim))
        if np.linalg.norm(x.coords) > 1e-6:
            return x


# ---------------------------------------------------------------------------
# Probability tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    outcome: tuple[str, ...]
    weight: float
    probability: float


@dataclass(frozen=True)
class ProbabilityTable:
    rows: tuple[TableRow, ...]
    total_weight: float

    def probabilities(self) -> np.ndarray:
        return np.array([r.probability for r in self.rows])

    def weights(self) -> np.ndarray:
        return np.array([r.weight for r in self.rows])

    def probability_of(self, outcome: tuple[str, ...]) -> float:
        for r in self.rows:
            if r.outcome == tuple(outcome):
                return r.probability
        raise KeyError(f"no outcome {outcome}")


def normalize(weights, labels=None) -> ProbabilityTable:
    """Absolute probabilities p_i = w_i / sum(w) from nonnegative weights.

    Raises :class:`UnphysicalSetupError` when the total weight is zero:
    some outcome has to occur in any physically meaningful arrangement.
    """
    w = np.asarray(list(weights), dtype=float)
    if w.size and w.min() < 0.0:
        raise ValueError(f"weights must be nonnegative, got min {w.min()}")
    total = float(w.sum())
    if total <= 0.0:
        raise UnphysicalSetupError("unphysical setup")
    if labels is None:
        labels = [(str(i),) for i in range(w.size)]
    labels = [tuple(lab) if isinstance(lab, (tuple, list)) else (str(lab),) for lab in labels]
    if len(labels) != w.size:
        raise ValueError("label/weight length mismatch")
    rows = tuple(
        TableRow(lab, float(wi), float(wi / total)) for lab, wi in zip(labels, w)
    )
    return ProbabilityTable(rows, total)
