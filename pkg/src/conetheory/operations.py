"""Operations: indexed families of general actions with cone-element outcomes.

A general action records one piece of data per outcome; an operation is a
nonempty family of general actions, each possibly on its own system.
Quantum instruments (lists of CP-map Choi operators) are the worked
special case and convert into general actions on the input (x) output
composite space.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .spaces import (
    DEFAULT_TOL,
    ConeSpace,
    Element,
    composite_space,
    cone_margin,
    from_matrix,
    in_cone,
    make_space,
    quantum_complex,
)

VOID_LABEL = "void"


def is_void_label(label: str) -> bool:
    """True for outcomes appended by padding; never triggered."""
    return label == VOID_LABEL or (
        label.startswith(VOID_LABEL) and label[len(VOID_LABEL) :].isdigit()
    )


@dataclass(frozen=True)
class GeneralAction:
    """One choice of action: a system and its labelled outcome elements."""

    label: str
    system: ConeSpace
    outcomes: tuple[tuple[str, Element], ...]

    def __post_init__(self) -> None:
        if not self.outcomes:
            raise ValueError(f"action {self.label!r} needs at least one outcome")
        labels = [lab for lab, _ in self.outcomes]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate outcome labels in action {self.label!r}")
        for lab, el in self.outcomes:
            if el.space.kind != self.system.kind:
                raise ValueError(
                    f"outcome {lab!r} lives in {el.space}, not in {self.system}"
                )

    @property
    def outcome_labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.outcomes)

    @property
    def elements(self) -> tuple[Element, ...]:
        return tuple(el for _, el in self.outcomes)

    def total(self) -> Element:
        """Sum of all outcome elements."""
        total = self.outcomes[0][1]
        for _, el in self.outcomes[1:]:
            total = total + el
        return total


def general_action(
    label: str,
    system: ConeSpace,
    outcomes,
    tol: float = DEFAULT_TOL,
) -> GeneralAction:
    """Validated constructor: every outcome must lie in the system's cone."""
    out = tuple((str(lab), el) for lab, el in outcomes)
    for lab, el in out:
        if not in_cone(el, tol):
            raise ValueError(
                f"outcome {lab!r} is outside the positive cone "
                f"(margin {cone_margin(el):.3e})"
            )
    return GeneralAction(label, system, out)


@dataclass(frozen=True)
class Operation:
    """An indexed family of general actions."""

    name: str
    actions: tuple[GeneralAction, ...]

    def __post_init__(self) -> None:
        if not self.actions:
            raise ValueError(f"operation {self.name!r} needs at least one action")
        labels = [a.label for a in self.actions]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate action labels in operation {self.name!r}")

    def action(self, label: str) -> GeneralAction:
        for a in self.actions:
            if a.label == label:
                return a
        raise KeyError(f"operation {self.name!r} has no action {label!r}")


def pad_outcomes(a: GeneralAction, count: int) -> GeneralAction:
    """Append zero-element void outcomes until the action has ``count`` outcomes."""
    have = len(a.outcomes)
    if count < have:
        raise ValueError(f"cannot pad {have} outcomes down to {count}")
    if count == have:
        return a
    zero = Element(a.outcomes[0][1].space, np.zeros(a.outcomes[0][1].space.dim))
    existing = set(a.outcome_labels)
    padded = list(a.outcomes)
    k = 0
    while len(padded) < count:
        label = VOID_LABEL if k == 0 else f"{VOID_LABEL}{k + 1}"
        k += 1
        if label in existing:
            continue
        padded.append((label, zero))
    return replace(a, outcomes=tuple(padded))


@dataclass(frozen=True)
class QuantumInstrument:
    """CP-map branches of a quantum operation, as Choi operators.

    Each Choi operator is Hermitian on the input (x) output Hilbert space
    (dimension input_dim * output_dim); complete positivity of a branch is
    positive semidefiniteness of its Choi operator.
    """

    input_dim: int
    output_dim: int
    choi_operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.input_dim < 1 or self.output_dim < 1:
            raise ValueError("instrument dimensions must be positive")
        if not self.choi_operators:
            raise ValueError("instrument needs at least one branch")
        d = self.input_dim * self.output_dim
        ops = []
        for i, c in enumerate(self.choi_operators):
            c = np.asarray(c, dtype=complex)
            if c.shape != (d, d):
                raise ValueError(f"branch {i}: expected {d}x{d} Choi operator")
            if np.abs(c - c.conj().T).max(initial=0.0) > 1e-12:
                raise ValueError(f"branch {i}: Choi operator is not Hermitian")
            c = (c + c.conj().T) / 2.0
            c.flags.writeable = False
            ops.append(c)
        object.__setattr__(self, "choi_operators", tuple(ops))

    def is_channel_normalized(self, atol: float = 1e-9) -> bool:
        """Whether the branch sum is trace preserving: Tr_out sum_i C_i = I_in."""
        total = sum(self.choi_operators)
        reduced = np.trace(
            total.reshape(self.input_dim, self.output_dim, self.input_dim, self.output_dim),
            axis1=1,
            axis2=3,
        )
        return bool(np.abs(reduced - np.eye(self.input_dim)).max() <= atol)


def instrument_to_action(
    q: QuantumInstrument,
    label: str = "instrument",
    tol: float = DEFAULT_TOL,
) -> GeneralAction:
    """The instrument as a general action on input (x) output.

    Raises ValueError("not completely positive") when any branch's Choi
    operator has an eigenvalue below -tol.
    """
    system = composite_space(
        make_space(quantum_complex(q.input_dim)),
        make_space(quantum_complex(q.output_dim)),
    )
    outcomes = []
    for i, c in enumerate(q.choi_operators):
        if np.linalg.eigvalsh(c).min() < -tol:
            raise ValueError(f"branch {i}: not completely positive")
        outcomes.append((str(i), from_matrix(system, c)))
    return GeneralAction(label, system, tuple(outcomes))


@dataclass(frozen=True)
class Mixture:
    """Probabilistic mixing of two actions on the same system."""

    action_a: GeneralAction
    action_b: GeneralAction
    w_a: float
    w_b: float

    def __post_init__(self) -> None:
        if self.action_a.system.kind != self.action_b.system.kind:
            raise ValueError("mixed actions must share a system")
        if len(self.action_a.outcomes) != len(self.action_b.outcomes):
            raise ValueError("mixed actions must have equal outcome counts (pad first)")
        if self.w_a < 0 or self.w_b < 0 or self.w_a + self.w_b <= 0:
            raise ValueError("mixing weights must be nonnegative with positive sum")


def mix(m: Mixture, weights_a: np.ndarray, weights_b: np.ndarray) -> np.ndarray:
    """Outcome weights of the mixture from the two actions' predicted weights.

    Returns w_A wbar_B w(i|A) + w_B wbar_A w(i|B) componentwise, where
    wbar is the total predicted weight of each action.  The wbar factors
    cancel the per-action rescaling freedom, so normalized mixture
    probabilities do not depend on either action's overall scale.
    """
    wa = np.asarray(weights_a, dtype=float)
    wb = np.asarray(weights_b, dtype=float)
    if wa.shape != wb.shape:
        raise ValueError("weight vectors must have equal length")
    return m.w_a * wb.sum() * wa + m.w_b * wa.sum() * wb


def mixed_action(
    m: Mixture,
    wbar_a: float,
    wbar_b: float,
    label: str | None = None,
) -> GeneralAction:
    """The element-level mixture: outcomes w_A wbar_B A_i + w_B wbar_A B_i.

    Evaluating this action in a network reproduces :func:`mix` of the two
    actions' separate evaluations, by multilinearity of the correlation.
    The caller supplies the total weights wbar of each action under the
    same network condition.
    """
    ca = m.w_a * wbar_b
    cb = m.w_b * wbar_a
    outcomes = tuple(
        (la, ca * ea + cb * eb)
        for (la, ea), (_, eb) in zip(m.action_a.outcomes, m.action_b.outcomes)
    )
    name = label if label is not None else f"mix({m.action_a.label},{m.action_b.label})"
    return GeneralAction(name, m.action_a.system, outcomes)
