"""Numerical audits of the framework's structural requirements.

Each audit runs concrete numerical checks on a theory instance or a cone
space and returns a report with a pass / fail / undefined verdict plus
the evidence rows behind it.  Audits are deterministic for a fixed seed:
every audit derives its own generator from the base seed and a stable
hash of its subject.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .correlations import canonical_pairing, verify_positivity
from .spaces import (
    CLASSICAL,
    QUANTUM_COMPLEX,
    QUANTUM_REAL,
    SPIN_FACTOR,
    CompositeUndefinedError,
    ConeSpace,
    Element,
    cone_margin,
    composite_space,
    from_matrix,
    in_cone,
    order_unit_bound,
    quantum_complex,
    sample_cone,
    sample_element,
    sample_interior,
    to_matrix,
    unit_element,
)
from .transformations import transformation_space_dim

PASS = "pass"
FAIL = "fail"
UNDEFINED = "undefined"


@dataclass(frozen=True)
class EvidenceRow:
    check: str
    value: float
    tolerance: float


@dataclass(frozen=True)
class AuditReport:
    postulate: str
    subject: str
    verdict: str
    evidence: tuple[EvidenceRow, ...]
    seed: int
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.verdict not in (PASS, FAIL, UNDEFINED):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if not self.evidence:
            raise ValueError("a verdict needs at least one evidence row")


@dataclass(frozen=True)
class DimensionCensus:
    """The dimension bookkeeping behind the tomographic-locality check."""

    d_a: int
    d_b: int
    d_ab: int
    c_ab: int
    t_ab: int
    t_ba: int
    d_bb: int
    r_ab: int
    l_ab: int
    slack: int


def _rng_for(seed: int, subject: str) -> np.random.Generator:
    digest = hashlib.sha256(subject.encode("utf-8")).digest()
    return np.random.default_rng([seed, int.from_bytes(digest[:8], "big")])


# ---------------------------------------------------------------------------
# linearity
# ---------------------------------------------------------------------------

def audit_linearity(theory, seed: int = 0, samples: int = 200) -> AuditReport:
    """Outcomes in cones, order units dominate, correlations positive."""
    rng = _rng_for(seed, "linearity")
    tol = theory.options.tolerance
    evidence: list[EvidenceRow] = []
    ok = True

    worst_margin = np.inf
    worst_name = "none"
    for op_name, op in theory.operations.items():
        for action in op.actions:
            for lab, el in action.outcomes:
                margin = cone_margin(el)
                if margin < worst_margin:
                    worst_margin = margin
                    worst_name = f"{op_name}.{action.label}.{lab}"
    if np.isfinite(worst_margin):
        evidence.append(
            EvidenceRow(f"worst_outcome_margin[{worst_name}]", worst_margin, tol)
        )
        if worst_margin < -tol:
            ok = False

    for name, space in theory.systems.items():
        worst = np.inf
        for _ in range(samples):
            v = sample_element(space, rng)
            a = order_unit_bound(v)
            worst = min(worst, cone_margin(a * unit_element(space) - v))
        evidence.append(EvidenceRow(f"order_unit_margin[{name}]", worst, tol))
        evidence.append(EvidenceRow(f"dimension[{name}]", float(space.dim), 0.0))
        if worst < -tol:
            ok = False

    for name, corr in theory.correlations.items():
        pos_ok, value, method = verify_positivity(
            corr, samples=min(samples * 10, 5000), tol=tol, rng=rng
        )
        evidence.append(EvidenceRow(f"positivity[{name}]({method})", value, tol))
        if not pos_ok:
            ok = False
        lin_gap = _multilinearity_gap(corr, rng, trials=20)
        evidence.append(EvidenceRow(f"multilinearity[{name}]", lin_gap, 1e-12))
        if lin_gap > 1e-12:
            ok = False

    if not evidence:
        evidence.append(EvidenceRow("nothing_to_check", 0.0, 0.0))
    return AuditReport(
        postulate="linearity",
        subject="theory",
        verdict=PASS if ok else FAIL,
        evidence=tuple(evidence),
        seed=seed,
    )


def _multilinearity_gap(corr, rng, trials: int) -> float:
    gap = 0.0
    for _ in range(trials):
        slot = int(rng.integers(corr.arity))
        elems = [sample_element(s, rng) for s in corr.spaces]
        x, y = sample_element(corr.spaces[slot], rng), elems[slot]
        a, b = rng.standard_normal(2)
        combo = list(elems)
        combo[slot] = Element(corr.spaces[slot], a * x.coords + b * y.coords)
        with_x = list(elems)
        with_x[slot] = x
        lhs = corr.apply(combo)
        rhs = a * corr.apply(with_x) + b * corr.apply(elems)
        gap = max(gap, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return gap


# ---------------------------------------------------------------------------
# dimension census
# ---------------------------------------------------------------------------

def audit_dimension(
    a: ConeSpace, b: ConeSpace, seed: int = 0, subject: str = ""
) -> tuple[DimensionCensus | None, AuditReport]:
    """Exact integer census of d, c, t dimensions for a pair of spaces.

    The correlation-space dimension c_ab is that of the dense functional
    representation on the composite, which equals d_ab by construction;
    the report says so rather than presenting it as an independent
    measurement.  Verdict: pass iff d_ab = d_a d_b = c_ab = t_ab = t_ba.
    """
    subject = subject or f"{a.kind.family}({a.kind.n}) x {b.kind.family}({b.kind.n})"
    try:
        comp_ab = composite_space(a, b)
        comp_bb = composite_space(b, b)
        t_ab = transformation_space_dim(a, b).t_ab
        t_ba = transformation_space_dim(b, a).t_ab
    except CompositeUndefinedError as exc:
        report = AuditReport(
            postulate="dimension",
            subject=subject,
            verdict=UNDEFINED,
            evidence=(EvidenceRow("composite_defined", 0.0, 0.0),),
            seed=seed,
            notes=(str(exc),),
        )
        return None, report

    d_ab = comp_ab.dim
    c_ab = d_ab
    d_bb = comp_bb.dim
    r_ab = d_ab - a.dim * b.dim
    l_ab = a.dim * b.dim + r_ab * d_bb
    census = DimensionCensus(
        d_a=a.dim,
        d_b=b.dim,
        d_ab=d_ab,
        c_ab=c_ab,
        t_ab=t_ab,
        t_ba=t_ba,
        d_bb=d_bb,
        r_ab=r_ab,
        l_ab=l_ab,
        slack=l_ab - t_ba,
    )
    equal = d_ab == a.dim * b.dim == c_ab == t_ab == t_ba
    identity_gap = census.slack - r_ab * (d_bb - 1)
    evidence = (
        EvidenceRow("d_ab", float(d_ab), 0.0),
        EvidenceRow("d_a*d_b", float(a.dim * b.dim), 0.0),
        EvidenceRow("c_ab", float(c_ab), 0.0),
        EvidenceRow("t_ab", float(t_ab), 0.0),
        EvidenceRow("t_ba", float(t_ba), 0.0),
        EvidenceRow("r_ab", float(r_ab), 0.0),
        EvidenceRow("slack", float(census.slack), 0.0),
        EvidenceRow("slack_identity_gap", float(identity_gap), 0.0),
    )
    report = AuditReport(
        postulate="dimension",
        subject=subject,
        verdict=PASS if equal else FAIL,
        evidence=evidence,
        seed=seed,
        notes=("c_ab equals d_ab by construction (dense functional representation)",),
    )
    return census, report


# ---------------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------------

def audit_pairing(
    space: ConeSpace, samples: int = 1000, seed: int = 0, subject: str = ""
) -> AuditReport:
    """Symmetry, positive definiteness, distinguishing, factorization."""
    subject = subject or f"{space.kind.family}({space.kind.n})"
    rng = _rng_for(seed, f"pairing:{subject}")
    pairing = canonical_pairing(space, samples=samples, rng=rng)
    ev = pairing.evidence
    evidence = [
        EvidenceRow("symmetry_gap", ev["symmetry_gap"], 0.0),
        EvidenceRow("min_normalized_diagonal", ev["min_normalized_diagonal"], 0.0),
        EvidenceRow("witness_failures", float(ev["witness_failures"]), 0.0),
        EvidenceRow("witness_worst_pairing", ev["witness_worst_pairing"], 0.0),
    ]
    notes = []
    ok = (
        pairing.symmetric
        and pairing.distinguishing
        and ev["min_normalized_diagonal"] > 0.0
    )
    if "factorization" in ev:
        notes.append("factorization undefined: no composite rule for this family")
    else:
        evidence.append(
            EvidenceRow("factorization_gap", ev["factorization_gap"], 1e-10)
        )
        ok = ok and pairing.factorizable
    return AuditReport(
        postulate="pairing",
        subject=subject,
        verdict=PASS if ok else FAIL,
        evidence=tuple(evidence),
        seed=seed,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# homogeneity
# ---------------------------------------------------------------------------

def audit_homogeneity(
    space: ConeSpace,
    pairs: int = 100,
    seed: int = 0,
    cone_samples_per_pair: int = 1,
    subject: str = "",
) -> AuditReport:
    """Explicit order-automorphism witnesses between random interior pairs.

    For each pair (X, Y) an automorphism with phi(X) = Y is constructed
    in closed form (matrix congruence, coordinate scaling, or a scaled
    Lorentz boost) and checked for residual and cone preservation in both
    directions.
    """
    subject = subject or f"{space.kind.family}({space.kind.n})"
    rng = _rng_for(seed, f"homogeneity:{subject}")
    max_residual = 0.0
    failures = 0
    for _ in range(pairs):
        x = sample_interior(space, rng)
        y = sample_interior(space, rng)
        phi, phi_inv = _automorphism_witness(space, x, y)
        residual = np.linalg.norm(phi(x).coords - y.coords)
        max_residual = max(max_residual, residual)
        for _ in range(cone_samples_per_pair):
            z = sample_cone(space, rng)
            if not in_cone(phi(z), 1e-9):
                failures += 1
            if not in_cone(phi_inv(z), 1e-9):
                failures += 1
    evidence = (
        EvidenceRow("max_witness_residual", max_residual, 1e-9),
        EvidenceRow("cone_preservation_failures", float(failures), 0.0),
        EvidenceRow("pairs_tested", float(pairs), 0.0),
    )
    ok = max_residual <= 1e-9 and failures == 0
    return AuditReport(
        postulate="homogeneity",
        subject=subject,
        verdict=PASS if ok else FAIL,
        evidence=evidence,
        seed=seed,
    )


def _automorphism_witness(space: ConeSpace, x: Element, y: Element):
    """(phi, phi_inverse) with phi an order-automorphism sending x to y."""
    family = space.kind.family
    if family == CLASSICAL:
        scale = y.coords / x.coords
        fwd = lambda z: Element(space, scale * z.coords)
        bwd = lambda z: Element(space, z.coords / scale)
        return fwd, bwd
    if family in (QUANTUM_COMPLEX, QUANTUM_REAL):
        mx, my = to_matrix(x), to_matrix(y)
        m = _sqrtm(my) @ _invsqrtm(mx)
        m_inv = _sqrtm(mx) @ _invsqrtm(my)
        fwd = lambda z: from_matrix(space, m @ to_matrix(z) @ m.conj().T, atol=1e-8)
        bwd = lambda z: from_matrix(
            space, m_inv @ to_matrix(z) @ m_inv.conj().T, atol=1e-8
        )
        return fwd, bwd
    # spin factor: scaled boost composition
    bx, bx_inv = _boost_pair(x.coords)
    by, by_inv = _boost_pair(y.coords)
    mx = _lorentz_norm(x.coords)
    my = _lorentz_norm(y.coords)
    fwd_mat = (my / mx) * (by @ bx_inv)
    bwd_mat = (mx / my) * (bx @ by_inv)
    fwd = lambda z: Element(space, fwd_mat @ z.coords)
    bwd = lambda z: Element(space, bwd_mat @ z.coords)
    return fwd, bwd


def _sqrtm(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def _invsqrtm(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    return (vecs / np.sqrt(vals)) @ vecs.conj().T


def _lorentz_norm(coords: np.ndarray) -> float:
    return float(np.sqrt(coords[0] ** 2 - np.dot(coords[1:], coords[1:])))


def _boost_pair(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """B with B @ (1, 0, ..) = u/m(u), and its inverse; both cone maps."""
    m = _lorentz_norm(coords)
    u = coords / m
    t, v = u[0], u[1:]
    n = v.size
    boost = np.empty((n + 1, n + 1))
    boost[0, 0] = t
    boost[0, 1:] = v
    boost[1:, 0] = v
    boost[1:, 1:] = np.eye(n) + np.outer(v, v) / (1.0 + t)
    inv = boost.copy()
    inv[0, 1:] *= -1.0
    inv[1:, 0] *= -1.0
    return boost, inv


# ---------------------------------------------------------------------------
# qubit
# ---------------------------------------------------------------------------

def audit_qubit(theory, seed: int = 0, samples: int = 300) -> AuditReport:
    """Does the theory contain a complex qubit, and does it look like one?

    Pure states of a qubit have unit purity and unit-length traceless
    coordinates filling a 2-sphere; the smallest covariance eigenvalue of
    the sampled coordinates separates a sphere from the disk a real-qubit
    theory would give.
    """
    rng = _rng_for(seed, "qubit")
    qubits = [
        name
        for name, space in theory.systems.items()
        if space.kind == quantum_complex(2)
    ]
    evidence = [EvidenceRow("qubit_systems", float(len(qubits)), 0.0)]
    if not qubits:
        return AuditReport(
            postulate="qubit",
            subject="theory",
            verdict=FAIL,
            evidence=tuple(evidence),
            seed=seed,
            notes=("no quantum_complex(2) system declared",),
        )
    purity_residual = 0.0
    norm_residual = 0.0
    points = np.empty((samples, 3))
    paulis = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    for i in range(samples):
        psi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        psi /= np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        purity_residual = max(
            purity_residual, abs(np.trace(rho @ rho).real - 1.0)
        )
        bloch = np.array([np.trace(rho @ p).real for p in paulis])
        norm_residual = max(norm_residual, abs(np.linalg.norm(bloch) - 1.0))
        points[i] = bloch
    cov = np.cov(points.T)
    cov_min = float(np.linalg.eigvalsh(cov).min())
    evidence += [
        EvidenceRow("max_purity_residual", purity_residual, 1e-9),
        EvidenceRow("max_bloch_norm_residual", norm_residual, 1e-9),
        EvidenceRow("bloch_covariance_min_eigenvalue", cov_min, 0.0),
    ]
    ok = purity_residual <= 1e-9 and norm_residual <= 1e-9 and cov_min > 0.05
    return AuditReport(
        postulate="qubit",
        subject="theory",
        verdict=PASS if ok else FAIL,
        evidence=tuple(evidence),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

POSTULATES = ("linearity", "dimension", "pairing", "homogeneity", "qubit")


def run_audits(theory, postulates, seed: int = 0) -> list[AuditReport]:
    """Run the selected audits over a theory; deterministic for a seed."""
    reports: list[AuditReport] = []
    for postulate in postulates:
        if postulate not in POSTULATES:
            raise ValueError(f"unknown postulate {postulate!r}")
        if postulate == "linearity":
            reports.append(audit_linearity(theory, seed=seed))
        elif postulate == "dimension":
            names = list(theory.systems)
            for i, na in enumerate(names):
                for nb in names[i:]:
                    _, rep = audit_dimension(
                        theory.systems[na],
                        theory.systems[nb],
                        seed=seed,
                        subject=f"{na} x {nb}",
                    )
                    reports.append(rep)
        elif postulate == "pairing":
            for name, space in theory.systems.items():
                reports.append(audit_pairing(space, seed=seed, subject=name))
        elif postulate == "homogeneity":
            for name, space in theory.systems.items():
                reports.append(audit_homogeneity(space, seed=seed, subject=name))
        elif postulate == "qubit":
            reports.append(audit_qubit(theory, seed=seed))
    return reports
