"""Transformations: families of cone-preserving linear maps acting locally.

A transformation from a source space to a target space is stored by its
base map on coordinates.  On a composite source (x) extension it acts as
base map (x) identity.  For the classical and quantum-complex families
the product elements span the whole composite, so that extension is a
well-defined linear map; for the complex family its validity (cone
preservation under every extension) is exactly positive semidefiniteness
of the Choi operator, which is the test used.

The quantum-real family is different: products span a proper subspace of
the composite (dim Sym(n m) exceeds dim Sym(n) * dim Sym(m)), so a base
map fixes the extended action only on the product span.  Extended
application is therefore restricted to that span, and validity is checked
by sampling the unextended cone.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .spaces import (
    CLASSICAL,
    DEFAULT_TOL,
    QUANTUM_COMPLEX,
    QUANTUM_REAL,
    SPIN_FACTOR,
    CompositeUndefinedError,
    ConeSpace,
    Element,
    basis_matrices,
    composite_space,
    from_matrix,
    in_cone,
    product_element,
    sample_cone,
    to_matrix,
)


@dataclass(frozen=True, eq=False)
class Transformation:
    """A linear map between cone spaces plus its product-local extensions."""

    source: ConeSpace
    target: ConeSpace
    base_map: np.ndarray

    def __post_init__(self) -> None:
        if self.source.family != self.target.family:
            raise ValueError("source and target must share a family")
        m = np.array(self.base_map, dtype=float)
        if m.shape != (self.target.dim, self.source.dim):
            raise ValueError(
                f"base map must be {self.target.dim}x{self.source.dim}, got {m.shape}"
            )
        m.flags.writeable = False
        object.__setattr__(self, "base_map", m)

    def __call__(self, x: Element) -> Element:
        if x.space.kind != self.source.kind:
            raise ValueError(f"input lives in {x.space}, expected {self.source}")
        return Element(self.target, self.base_map @ x.coords)

    def superoperator(self) -> np.ndarray:
        """S[p, q, k, l]: the matrix-level action, image(E_kl)[p,q] = S[p,q,k,l].

        The complex-linear extension to all matrices; quantum-complex only
        (the Hermitian basis spans the full matrix algebra over C).
        """
        if self.source.family != QUANTUM_COMPLEX:
            raise ValueError("superoperator form exists for the complex family only")
        dual = _dual_tensor(self.source)
        tgt = basis_matrices(self.target)
        return np.einsum("ca,akl,cpq->pqkl", self.base_map, dual, tgt)

    def choi(self) -> np.ndarray:
        """The Choi operator sum_kl E_kl (x) image(E_kl) on source (x) target."""
        s = self.superoperator()
        n_t, _, n_s, _ = s.shape
        return s.transpose(2, 0, 3, 1).reshape(n_s * n_t, n_s * n_t)


@functools.lru_cache(maxsize=None)
def _dual_tensor(space: ConeSpace) -> np.ndarray:
    """D[b, k, l] with X = sum_b (sum_kl D[b,k,l] X[k,l]) * basis[b]."""
    mats = basis_matrices(space)
    d, m, _ = mats.shape
    flat = mats.reshape(d, m * m)
    dual = np.linalg.pinv(flat.T)
    return dual.reshape(d, m, m)


@functools.lru_cache(maxsize=None)
def _product_span(source: ConeSpace, extension: ConeSpace) -> np.ndarray:
    """Columns: composite coordinates of basis_source (x) basis_extension."""
    comp_dim = composite_space(source, extension).dim
    cols = np.empty((comp_dim, source.dim * extension.dim))
    i = 0
    for ea in source.basis():
        for eb in extension.basis():
            cols[:, i] = product_element(ea, eb).coords
            i += 1
    return cols


def identity_transformation(space: ConeSpace) -> Transformation:
    return Transformation(space, space, np.eye(space.dim))


def transformation_from_matrix_map(
    source: ConeSpace, target: ConeSpace, fn
) -> Transformation:
    """Build the base map from a function on matrix representations."""
    cols = [from_matrix(target, fn(to_matrix(e))).coords for e in source.basis()]
    return Transformation(source, target, np.stack(cols, axis=1))


def apply_extended(
    t: Transformation, x: Element, extension: ConeSpace | None
) -> Element:
    """(base map (x) identity)(x) in target (x) extension coordinates.

    ``extension=None`` or a one-dimensional extension means no extension:
    the composite with a trivial system is order-isomorphic to the space
    itself.  For the quantum-real family the input must lie in the span
    of product elements; the action elsewhere is not determined by the
    base map.
    """
    if extension is None or extension.dim == 1:
        return t(x)
    src = composite_space(t.source, extension)
    tgt = composite_space(t.target, extension)
    if x.space.kind != src.kind:
        raise ValueError(f"input lives in {x.space}, expected {src}")
    if t.source.family == CLASSICAL:
        block = x.coords.reshape(t.source.dim, extension.dim)
        return Element(tgt, (t.base_map @ block).reshape(-1))
    if t.source.family == QUANTUM_REAL:
        span = _product_span(t.source, extension)
        c, *_ = np.linalg.lstsq(span, x.coords, rcond=None)
        residual = np.linalg.norm(span @ c - x.coords)
        if residual > 1e-9 * max(1.0, np.linalg.norm(x.coords)):
            raise ValueError(
                "extension action undefined off the product span for the real family"
            )
        out_span = _product_span(t.target, extension)
        block = c.reshape(t.source.dim, extension.dim)
        return Element(tgt, out_span @ (t.base_map @ block).reshape(-1))
    s = t.superoperator()
    m_ext = extension.matrix_dim
    xm = to_matrix(x).reshape(
        t.source.matrix_dim, m_ext, t.source.matrix_dim, m_ext
    )
    ym = np.einsum("pqkl,kalb->paqb", s, xm).reshape(
        t.target.matrix_dim * m_ext, t.target.matrix_dim * m_ext
    )
    return from_matrix(tgt, ym, atol=1e-9)


def validate(
    t: Transformation,
    extension: ConeSpace | None = None,
    samples: int = 10_000,
    tol: float = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
) -> bool:
    """Whether the extended map sends the composite cone into the cone.

    The complex family uses the exact Choi eigenvalue criterion (a PSD
    Choi operator is equivalent to cone preservation under every
    extension, so the ``extension`` argument does not change the
    verdict).  Other families are checked on sampled cone points: the
    composite cone where the extension is defined by products (classical),
    the unextended cone otherwise.
    """
    if t.source.family == QUANTUM_COMPLEX:
        return bool(np.linalg.eigvalsh(t.choi()).min() >= -tol)
    if extension is not None and extension.dim > 1 and t.source.family == SPIN_FACTOR:
        raise CompositeUndefinedError("spin-factor composite undefined")
    rng = rng if rng is not None else np.random.default_rng(0)
    extended = (
        t.source.family == CLASSICAL
        and extension is not None
        and extension.dim > 1
    )
    src = composite_space(t.source, extension) if extended else t.source
    for _ in range(samples):
        x = sample_cone(src, rng)
        y = apply_extended(t, x, extension) if extended else t(x)
        if not in_cone(y, tol):
            return False
    return True


@dataclass(frozen=True)
class TransformationSpaceReport:
    """Dimension count of the span of valid source-to-target transformations."""

    t_ab: int
    method: str
    composite_dim: int
    product_dim: int

    @property
    def matches_composite(self) -> bool:
        return self.t_ab == self.composite_dim

    @property
    def matches_product(self) -> bool:
        return self.t_ab == self.product_dim


def transformation_space_dim(
    source: ConeSpace, target: ConeSpace
) -> TransformationSpaceReport:
    """Real dimension of the transformation space between two spaces.

    The valid transformations form a convex cone; its span is counted
    through the operator representation: all Hermitian operators on
    source (x) target for the complex family (Choi operators), all
    symmetric operators on the real tensor space for the real family
    (bilinear forms of K (x) K conjugations), all matrices for the
    classical family.
    """
    if source.family != target.family:
        raise CompositeUndefinedError("cross-family composite undefined")
    if source.family == SPIN_FACTOR:
        raise CompositeUndefinedError("spin-factor composite undefined")
    n = source.kind.n * target.kind.n
    if source.family == CLASSICAL:
        t_ab = n
        method = "span of entrywise-nonnegative matrices: all maps"
    elif source.family == QUANTUM_COMPLEX:
        t_ab = n * n
        method = "span of PSD Choi operators: Hermitian operators on source (x) target"
    else:
        t_ab = n * (n + 1) // 2
        method = "span of K (x) K conjugations: symmetric operators on source (x) target"
    comp = composite_space(source, target)
    return TransformationSpaceReport(
        t_ab=t_ab,
        method=method,
        composite_dim=comp.dim,
        product_dim=source.dim * target.dim,
    )
