"""Ordered vector spaces with a positive cone and order unit.

Four concrete families are supported, each stored as a real coordinate
vector in a fixed canonical basis:

* ``classical(n)``     -- R^n with the nonnegative orthant; unit (1,...,1).
* ``quantum_complex(n)`` -- Hermitian n x n matrices (d = n^2) with the PSD
  cone; unit is the identity.
* ``quantum_real(n)``  -- real symmetric n x n matrices (d = n(n+1)/2) with
  the PSD cone; unit is the identity.
* ``spin_factor(n)``   -- R^{n+1} with the Lorentz cone t >= ||x||; unit
  (1, 0, ..., 0).

Composites are defined within a single family (Kronecker product of the
matrix representations); spin factors have no composition rule and
composite construction raises for them.

Hermitian coordinates: for ``quantum_complex(n)`` the basis is, in order,
the n diagonal units E_kk, then for each pair j < k (lexicographic) the
symmetric element |j><k| + |k><j| followed by the antisymmetric element
i(|k><j| - |j><k|).  ``quantum_real(n)`` uses the diagonal units followed
by the symmetric pairs.  Conversion to and from matrix form is exact and
deterministic.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

# Eigenvalue / coordinate tolerance for cone membership checks.
DEFAULT_TOL = 1e-9

CLASSICAL = "classical"
QUANTUM_COMPLEX = "quantum_complex"
QUANTUM_REAL = "quantum_real"
SPIN_FACTOR = "spin_factor"

FAMILIES = (CLASSICAL, QUANTUM_COMPLEX, QUANTUM_REAL, SPIN_FACTOR)


class CompositeUndefinedError(ValueError):
    """Raised when a composite has no defined rule (spin factors, mixed families)."""


@dataclass(frozen=True)
class ConeKind:
    """Family tag plus size parameter n (n >= 1)."""

    family: str
    n: int

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown cone family {self.family!r}")
        if self.n < 1:
            raise ValueError(f"cone size must be >= 1, got {self.n}")


def classical(n: int) -> ConeKind:
    return ConeKind(CLASSICAL, n)


def quantum_complex(n: int) -> ConeKind:
    return ConeKind(QUANTUM_COMPLEX, n)


def quantum_real(n: int) -> ConeKind:
    return ConeKind(QUANTUM_REAL, n)


def spin_factor(n: int) -> ConeKind:
    return ConeKind(SPIN_FACTOR, n)


def _ambient_dim(kind: ConeKind) -> int:
    if kind.family == CLASSICAL:
        return kind.n
    if kind.family == QUANTUM_COMPLEX:
        return kind.n * kind.n
    if kind.family == QUANTUM_REAL:
        return kind.n * (kind.n + 1) // 2
    return kind.n + 1  # spin factor


@dataclass(frozen=True)
class ConeSpace:
    """An ordered vector space; ``factors`` lists the atomic tensor factors.

    An atomic space has ``factors == ()``.  A composite space of family
    ``f`` with sizes n_1, ..., n_k is the space ``f(n_1 * ... * n_k)``
    together with the factor bookkeeping needed for product elements and
    wire networks.
    """

    kind: ConeKind
    factors: tuple["ConeSpace", ...] = ()

    def __post_init__(self) -> None:
        if self.factors:
            n = 1
            for f in self.factors:
                if f.kind.family != self.kind.family:
                    raise CompositeUndefinedError("cross-family composite undefined")
                if f.factors:
                    raise ValueError("factors must be atomic spaces")
                n *= f.kind.n
            if n != self.kind.n:
                raise ValueError("factor sizes do not multiply to the composite size")

    @property
    def family(self) -> str:
        return self.kind.family

    @property
    def dim(self) -> int:
        """Real ambient dimension d."""
        return _ambient_dim(self.kind)

    @property
    def matrix_dim(self) -> int:
        """Side length of the square matrix representation.

        For the matrix families this is n; for spin factors the coordinate
        vector is carried on the diagonal of an (n+1) x (n+1) matrix.
        """
        if self.kind.family == SPIN_FACTOR:
            return self.kind.n + 1
        return self.kind.n

    @property
    def is_composite(self) -> bool:
        return bool(self.factors)

    def atoms(self) -> tuple["ConeSpace", ...]:
        """The atomic factors (itself when atomic)."""
        return self.factors if self.factors else (self,)

    def factor_matrix_dims(self) -> tuple[int, ...]:
        """Matrix side length of each atomic factor, in order."""
        return tuple(a.matrix_dim for a in self.atoms())

    @property
    def unit(self) -> "Element":
        """The order unit: all-ones / identity / (1, 0, ..., 0)."""
        return unit_element(self)

    def basis(self) -> list["Element"]:
        """The canonical basis as coordinate Elements."""
        return [Element(self, row) for row in np.eye(self.dim)]

    def __repr__(self) -> str:
        inner = f"{self.kind.family}({self.kind.n})"
        if self.factors:
            inner += " = " + " (x) ".join(
                f"{f.kind.family}({f.kind.n})" for f in self.factors
            )
        return f"ConeSpace[{inner}]"


def make_space(kind: ConeKind) -> ConeSpace:
    """Build the atomic space for ``kind`` with its canonical basis and unit."""
    return ConeSpace(kind)


def composite_space(*spaces: ConeSpace) -> ConeSpace:
    """The composite of same-family spaces, factors kept in order.

    Raises :class:`CompositeUndefinedError` for spin factors and for mixed
    families; no composition rule exists for those.
    """
    if not spaces:
        raise ValueError("composite of zero spaces")
    if len(spaces) == 1:
        return spaces[0]
    family = spaces[0].kind.family
    for s in spaces:
        if s.kind.family != family:
            raise CompositeUndefinedError("cross-family composite undefined")
    if family == SPIN_FACTOR:
        raise CompositeUndefinedError("spin-factor composite undefined")
    atoms: list[ConeSpace] = []
    n = 1
    for s in spaces:
        atoms.extend(s.atoms())
        n *= s.kind.n
    return ConeSpace(ConeKind(family, n), tuple(atoms))


@dataclass(frozen=True, eq=False)
class Element:
    """A vector in a cone space, as real coordinates in the canonical basis."""

    space: ConeSpace
    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=float)
        if coords.shape != (self.space.dim,):
            raise ValueError(
                f"coordinate length {coords.shape} does not match "
                f"ambient dimension {self.space.dim}"
            )
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    def __add__(self, other: "Element") -> "Element":
        _require_same_space(self, other)
        return Element(self.space, self.coords + other.coords)

    def __sub__(self, other: "Element") -> "Element":
        _require_same_space(self, other)
        return Element(self.space, self.coords - other.coords)

    def __mul__(self, scalar: float) -> "Element":
        return Element(self.space, self.coords * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Element":
        return Element(self.space, -self.coords)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


def _require_same_space(x: Element, y: Element) -> None:
    if x.space.kind != y.space.kind:
        raise ValueError(f"space mismatch: {x.space} vs {y.space}")


def unit_element(space: ConeSpace) -> Element:
    kind = space.kind
    if kind.family == CLASSICAL:
        return Element(space, np.ones(kind.n))
    if kind.family in (QUANTUM_COMPLEX, QUANTUM_REAL):
        coords = np.zeros(space.dim)
        coords[: kind.n] = 1.0  # diagonal units come first
        return Element(space, coords)
    coords = np.zeros(kind.n + 1)
    coords[0] = 1.0
    return Element(space, coords)


# ---------------------------------------------------------------------------
# matrix <-> coordinate conversion
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _offdiag_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def to_matrix(x: Element) -> np.ndarray:
    """The square-matrix representation of ``x`` (diagonal for the vector families)."""
    kind = x.space.kind
    c = x.coords
    if kind.family in (CLASSICAL, SPIN_FACTOR):
        return np.diag(c)
    n = kind.n
    rows, cols = _offdiag_indices(n)
    if kind.family == QUANTUM_REAL:
        m = np.zeros((n, n))
        m[np.arange(n), np.arange(n)] = c[:n]
        m[rows, cols] = c[n:]
        m[cols, rows] = c[n:]
        return m
    m = np.zeros((n, n), dtype=complex)
    m[np.arange(n), np.arange(n)] = c[:n]
    sym = c[n::2]
    asym = c[n + 1 :: 2]
    m[rows, cols] = sym - 1j * asym
    m[cols, rows] = sym + 1j * asym
    return m


def from_matrix(space: ConeSpace, m: np.ndarray, atol: float = 1e-12) -> Element:
    """Inverse of :func:`to_matrix`; validates the family's matrix shape.

    Raises ValueError when the matrix is not Hermitian / symmetric /
    diagonal (asymmetry beyond ``atol``) for the respective family.
    """
    m = np.asarray(m)
    nm = space.matrix_dim
    if m.shape != (nm, nm):
        raise ValueError(f"expected a {nm}x{nm} matrix, got shape {m.shape}")
    kind = space.kind
    if kind.family in (CLASSICAL, SPIN_FACTOR):
        off = m - np.diag(np.diagonal(m))
        if np.abs(off).max(initial=0.0) > atol:
            raise ValueError("matrix must be diagonal for this family")
        if np.abs(np.imag(np.diagonal(m))).max(initial=0.0) > atol:
            raise ValueError("matrix entries must be real for this family")
        return Element(space, np.real(np.diagonal(m)))
    if kind.family == QUANTUM_REAL:
        if np.abs(np.imag(m)).max(initial=0.0) > atol:
            raise ValueError("matrix entries must be real for this family")
        mr = np.real(m)
        if np.abs(mr - mr.T).max(initial=0.0) > atol:
            raise ValueError("non-symmetric matrix")
        mr = (mr + mr.T) / 2.0
        rows, cols = _offdiag_indices(kind.n)
        return Element(space, np.concatenate([np.diagonal(mr), mr[rows, cols]]))
    if np.abs(m - m.conj().T).max(initial=0.0) > atol:
        raise ValueError("non-Hermitian matrix")
    mh = (m + m.conj().T) / 2.0
    rows, cols = _offdiag_indices(kind.n)
    coords = np.empty(space.dim)
    coords[: kind.n] = np.real(np.diagonal(mh))
    coords[kind.n :: 2] = np.real(mh[rows, cols])
    coords[kind.n + 1 :: 2] = -np.imag(mh[rows, cols])
    return Element(space, coords)


@functools.lru_cache(maxsize=None)
def basis_matrices(space: ConeSpace) -> np.ndarray:
    """Stack of the d canonical basis matrices, shape (d, m, m)."""
    eye = np.eye(space.dim)
    return np.stack([to_matrix(Element(space, row)) for row in eye])


@functools.lru_cache(maxsize=None)
def gram_weights(space: ConeSpace) -> np.ndarray:
    """Diagonal of the Gram matrix <B_a, B_b> of the canonical basis.

    The canonical bases are orthogonal under the self-dualizing inner
    product; off-diagonal matrix units have squared norm 2.
    """
    kind = space.kind
    if kind.family in (CLASSICAL, SPIN_FACTOR):
        return np.ones(space.dim)
    w = np.full(space.dim, 2.0)
    w[: kind.n] = 1.0
    return w


def dual_pairing(x: Element, probe: Element) -> float:
    """The self-dualizing inner product <x, probe>.

    Dot product for classical and spin-factor spaces, trace form
    Tr[X P] for the matrix families.
    """
    _require_same_space(x, probe)
    return float(np.dot(x.coords * gram_weights(x.space), probe.coords))


# ---------------------------------------------------------------------------
# cone membership
# ---------------------------------------------------------------------------

def cone_margin(x: Element) -> float:
    """Signed distance-like margin; nonnegative iff x is in the cone.

    Minimum coordinate (classical), minimum eigenvalue (matrix families)
    or t - ||v|| (spin factor).
    """
    kind = x.space.kind
    if kind.family == CLASSICAL:
        return float(x.coords.min())
    if kind.family == SPIN_FACTOR:
        return float(x.coords[0] - np.linalg.norm(x.coords[1:]))
    return float(np.linalg.eigvalsh(to_matrix(x)).min())


def in_cone(x: Element, tol: float = DEFAULT_TOL) -> bool:
    """True iff x lies in the positive cone up to ``tol``."""
    return cone_margin(x) >= -tol


def order_unit_bound(v: Element) -> float:
    """The least a >= 0 such that a * unit - v is in the cone."""
    kind = v.space.kind
    if kind.family == CLASSICAL:
        val = float(v.coords.max())
    elif kind.family == SPIN_FACTOR:
        val = float(v.coords[0] + np.linalg.norm(v.coords[1:]))
    else:
        val = float(np.linalg.eigvalsh(to_matrix(v)).max())
    return max(val, 0.0)


def negative_witness(x: Element, tol: float = DEFAULT_TOL) -> Element | None:
    """A cone element pairing strictly negatively with ``x``, or None.

    Returns None when x is in the cone (margin >= -tol).  Otherwise the
    probe certifies non-membership through the self-dualizing inner
    product: <x, probe> = margin-scale < 0.
    """
    kind = x.space.kind
    if kind.family == CLASSICAL:
        i = int(np.argmin(x.coords))
        if x.coords[i] >= -tol:
            return None
        probe = np.zeros(x.space.dim)
        probe[i] = 1.0
        return Element(x.space, probe)
    if kind.family == SPIN_FACTOR:
        t, v = x.coords[0], x.coords[1:]
        r = float(np.linalg.norm(v))
        if t - r >= -tol:
            return None
        if r == 0.0:
            return unit_element(x.space)
        return Element(x.space, np.concatenate([[r], -v]))
    vals, vecs = np.linalg.eigh(to_matrix(x))
    if vals[0] >= -tol:
        return None
    v0 = vecs[:, 0]
    return from_matrix(x.space, np.outer(v0, v0.conj()))


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------

def product_element(x: Element, y: Element) -> Element:
    """The product A B in the composite space (Kronecker of matrix forms)."""
    cs = composite_space(x.space, y.space)
    if cs.kind.family == CLASSICAL:
        return Element(cs, np.kron(x.coords, y.coords))
    return from_matrix(cs, np.kron(to_matrix(x), to_matrix(y)))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def sample_element(space: ConeSpace, rng: np.random.Generator) -> Element:
    """A generic element: standard-normal coordinates."""
    return Element(space, rng.standard_normal(space.dim))


def sample_interior(space: ConeSpace, rng: np.random.Generator) -> Element:
    """A strictly interior cone point.

    Quantum families: G G* + 1e-6 I with Gaussian G; classical:
    exponential coordinates; spin factor: t = ||x|| + |g|.
    """
    kind = space.kind
    if kind.family == CLASSICAL:
        return Element(space, rng.exponential(size=kind.n))
    if kind.family == SPIN_FACTOR:
        v = rng.standard_normal(kind.n)
        t = np.linalg.norm(v) + abs(rng.standard_normal())
        return Element(space, np.concatenate([[t], v]))
    n = kind.n
    if kind.family == QUANTUM_COMPLEX:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    else:
        g = rng.standard_normal((n, n))
    return from_matrix(space, g @ g.conj().T + 1e-6 * np.eye(n))


def sample_cone(space: ConeSpace, rng: np.random.Generator) -> Element:
    """A cone point, boundary included."""
    kind = space.kind
    if kind.family == CLASSICAL:
        return Element(space, rng.standard_normal(kind.n) ** 2)
    if kind.family == SPIN_FACTOR:
        v = rng.standard_normal(kind.n)
        return Element(space, np.concatenate([[np.linalg.norm(v)], v]))
    n = kind.n
    if kind.family == QUANTUM_COMPLEX:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    else:
        g = rng.standard_normal((n, n))
    return from_matrix(space, g @ g.conj().T)


def sample_extremal(space: ConeSpace, rng: np.random.Generator) -> Element:
    """An extreme ray of the cone (rank-1 projector, basis ray, light ray)."""
    kind = space.kind
    if kind.family == CLASSICAL:
        coords = np.zeros(kind.n)
        coords[rng.integers(kind.n)] = 1.0
        return Element(space, coords)
    if kind.family == SPIN_FACTOR:
        v = rng.standard_normal(kind.n)
        r = np.linalg.norm(v)
        if r == 0.0:
            v[0], r = 1.0, 1.0
        return Element(space, np.concatenate([[1.0], v / r]))
    n = kind.n
    if kind.family == QUANTUM_COMPLEX:
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    else:
        v = rng.standard_normal(n)
    v = v / np.linalg.norm(v)
    return from_matrix(space, np.outer(v, v.conj()))


def sample_outside(
    space: ConeSpace,
    rng: np.random.Generator,
    margin: float = -1e-8,
    max_tries: int = 10_000,
) -> Element:
    """A clearly non-cone element (cone margin below ``margin``)."""
    for _ in range(max_tries):
        x = sample_element(space, rng)
        if cone_margin(x) < margin:
            return x
    raise RuntimeError(f"could not sample outside the cone of {space}")
