"""Wire networks of chosen general actions and their probability weights.

A network is a hypergraph: nodes are the chosen general actions of a set
of operations, and each wire is an edge joining two subsystems of equal
Hilbert dimension.  A wire carries the unnormalized maximally entangled
projector |Phi><Phi| with |Phi> = sum_k |kk> in the canonical basis; the
weight of an outcome tuple (i, j, ...) is

    w(i, j, ...) = Tr[(M_i (x) N_j (x) ...) W_wires],

with W_wires the product of all wire projectors, and absolute
probabilities follow by normalizing over the outcome-tuple product.
Weights are unnormalized and only their ratios carry physical meaning,
so rescaling any operation's events by a positive factor cancels.

Tensor convention: operations in listing order, each action's subsystems
in declared order.  In this basis Tr[(A (x) B)|Phi><Phi|] = Tr[A^T B];
the chain builder :func:`born_chain_network` therefore transposes the
preparation-side operators (state and instrument Choi matrices) so that
causally ordered chains reproduce the textbook density-matrix rule
Tr[E_j E_i(rho)].  This is a representation convention, not physics.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass

import numpy as np

from .correlations import ProbabilityTable, normalize
from .operations import GeneralAction, Operation
from .spaces import (
    DEFAULT_TOL,
    QUANTUM_COMPLEX,
    ConeSpace,
    cone_margin,
    composite_space,
    from_matrix,
    make_space,
    quantum_complex,
    to_matrix,
)

MAX_OUTCOME_TUPLES = 1_000_000


@dataclass(frozen=True)
class Wire:
    """An edge joining two subsystem slots (node index, subsystem index)."""

    endpoint_a: tuple[int, int]
    endpoint_b: tuple[int, int]
    dim: int

    def __post_init__(self) -> None:
        if self.endpoint_a == self.endpoint_b:
            raise ValueError("wire endpoints must be distinct subsystems")
        if self.dim < 1:
            raise ValueError("wire dimension must be positive")


@dataclass(frozen=True)
class NetworkNode:
    """An operation together with the chosen general action."""

    operation: Operation
    action_label: str

    @property
    def action(self) -> GeneralAction:
        return self.operation.action(self.action_label)


@dataclass(frozen=True)
class Network:
    """Chosen actions joined by wires; every subsystem covered exactly once."""

    nodes: tuple[NetworkNode, ...]
    wires: tuple[Wire, ...]

    def __post_init__(self) -> None:
        if not self.nodes:
            raise ValueError("network needs at least one node")
        dims: list[tuple[int, ...]] = []
        for i, node in enumerate(self.nodes):
            system = node.action.system
            if system.family != QUANTUM_COMPLEX:
                raise ValueError(
                    f"node {i}: wire networks are defined for quantum_complex "
                    f"systems, got {system.family}"
                )
            dims.append(system.factor_matrix_dims())
        seen: dict[tuple[int, int], int] = {}
        for w_idx, wire in enumerate(self.wires):
            for end in (wire.endpoint_a, wire.endpoint_b):
                node_i, sub_i = end
                if not (0 <= node_i < len(self.nodes)):
                    raise ValueError(f"wire {w_idx}: no node {node_i}")
                if not (0 <= sub_i < len(dims[node_i])):
                    raise ValueError(
                        f"wire {w_idx}: node {node_i} has no subsystem {sub_i}"
                    )
                if end in seen:
                    raise ValueError(
                        f"subsystem {end} covered by wires {seen[end]} and {w_idx}"
                    )
                seen[end] = w_idx
                if dims[node_i][sub_i] != wire.dim:
                    raise ValueError(
                        f"wire {w_idx}: dimension mismatch at {end}: "
                        f"subsystem has dimension {dims[node_i][sub_i]}, "
                        f"wire declares {wire.dim}"
                    )
        uncovered = [
            (i, s)
            for i, ds in enumerate(dims)
            for s in range(len(ds))
            if (i, s) not in seen
        ]
        if uncovered:
            raise ValueError(f"uncovered subsystems: {uncovered}")

    def subsystem_dims(self) -> tuple[tuple[int, ...], ...]:
        return tuple(node.action.system.factor_matrix_dims() for node in self.nodes)


@dataclass(frozen=True)
class NormalizationReport:
    """Trace of the summed event operator against the product of dimensions."""

    operation: str
    action: str
    trace_total: float
    expected: float
    satisfied: bool
    note: str = ""


@dataclass(frozen=True)
class EvaluationResult:
    table: ProbabilityTable
    weights: np.ndarray
    normalization: tuple[NormalizationReport, ...]


def evaluate(
    network: Network,
    tol: float = DEFAULT_TOL,
    strict_normalization: bool = False,
) -> EvaluationResult:
    """Probability weights and normalized probabilities of a network.

    All event operators must be PSD within ``tol``.  Raises
    UnphysicalSetupError when the total weight vanishes.  With
    ``strict_normalization`` the sum-of-events trace convention
    Tr[sum_i M_i] = prod(dims) is enforced per node instead of merely
    reported.
    """
    actions = [node.action for node in network.nodes]
    counts = [len(a.outcomes) for a in actions]
    total_tuples = int(np.prod(counts, dtype=np.int64))
    if total_tuples > MAX_OUTCOME_TUPLES:
        raise ValueError(
            f"{total_tuples} outcome tuples exceed the cap of {MAX_OUTCOME_TUPLES}"
        )

    for i, a in enumerate(actions):
        for lab, el in a.outcomes:
            margin = cone_margin(el)
            if margin < -tol:
                raise ValueError(
                    f"node {i}: event {lab!r} is not PSD (margin {margin:.3e})"
                )

    norm_reports = tuple(
        _normalization_report(network.nodes[i].operation.name, a)
        for i, a in enumerate(actions)
    )
    if strict_normalization:
        for rep in norm_reports:
            if not rep.satisfied:
                raise ValueError(
                    f"operation {rep.operation!r} action {rep.action!r} violates "
                    f"the trace normalization convention: Tr = {rep.trace_total}, "
                    f"expected {rep.expected}"
                )

    weights = _contract_weights(network, actions)

    scale = max(1.0, float(np.abs(weights).max(initial=0.0)))
    floor = -1e-12 * scale
    if weights.min(initial=0.0) < floor:
        raise ValueError(
            f"negative weight {weights.min():.3e} beyond numerical tolerance; "
            "a non-PSD event slipped through"
        )
    weights = np.where(weights < 0.0, 0.0, weights)

    labels = [
        tuple(combo)
        for combo in itertools.product(*[a.outcome_labels for a in actions])
    ]
    table = normalize(weights.reshape(-1), labels)
    return EvaluationResult(table=table, weights=weights, normalization=norm_reports)


def _contract_weights(network: Network, actions: list[GeneralAction]) -> np.ndarray:
    """One einsum over all nodes: wires identify bra and ket indices."""
    dims = network.subsystem_dims()
    letters = iter(string.ascii_letters)
    outcome_letters = [next(letters) for _ in actions]
    row_of: dict[tuple[int, int], str] = {}
    col_of: dict[tuple[int, int], str] = {}
    try:
        for wire in network.wires:
            r, c = next(letters), next(letters)
            for end in (wire.endpoint_a, wire.endpoint_b):
                row_of[end] = r
                col_of[end] = c
    except StopIteration:
        raise ValueError("network too large for a single contraction") from None

    operands = []
    subscripts = []
    for i, a in enumerate(actions):
        ds = dims[i]
        stack = np.stack([to_matrix(el) for el in a.elements])
        operands.append(stack.reshape((len(a.outcomes),) + ds + ds))
        rows = "".join(row_of[(i, s)] for s in range(len(ds)))
        cols = "".join(col_of[(i, s)] for s in range(len(ds)))
        subscripts.append(outcome_letters[i] + rows + cols)
    out = "".join(outcome_letters)
    raw = np.einsum(
        ",".join(subscripts) + "->" + out, *operands, optimize=True
    )
    raw = np.asarray(raw)
    imag_max = float(np.abs(raw.imag).max(initial=0.0))
    if imag_max > 1e-9 * max(1.0, float(np.abs(raw.real).max(initial=0.0))):
        raise ValueError(f"non-real weight (imaginary part {imag_max:.3e})")
    return np.ascontiguousarray(raw.real)


def _normalization_report(op_name: str, action: GeneralAction) -> NormalizationReport:
    total = to_matrix(action.total())
    trace_total = float(np.trace(total).real)
    expected = float(np.prod(action.system.factor_matrix_dims()))
    note = ""
    if abs(trace_total) <= 1e-12:
        note = "singular null operation"
    satisfied = abs(trace_total - expected) <= 1e-9 * expected
    return NormalizationReport(
        operation=op_name,
        action=action.label,
        trace_total=trace_total,
        expected=expected,
        satisfied=satisfied,
        note=note,
    )


def check_oc_normalization(op: Operation) -> tuple[NormalizationReport, ...]:
    """Per-action trace-convention reports; informational by default."""
    return tuple(_normalization_report(op.name, a) for a in op.actions)


def rescale_operation(op: Operation, factor: float) -> Operation:
    """Multiply every outcome element of every action by ``factor`` (> 0)."""
    if not factor > 0.0:
        raise ValueError(f"rescaling factor must be positive, got {factor}")
    actions = tuple(
        GeneralAction(
            a.label,
            a.system,
            tuple((lab, factor * el) for lab, el in a.outcomes),
        )
        for a in op.actions
    )
    return Operation(op.name, actions)


# ---------------------------------------------------------------------------
# causally ordered chains
# ---------------------------------------------------------------------------

def born_chain_network(
    rho: np.ndarray,
    instrument_chois: list[list[np.ndarray]],
    povm: list[np.ndarray],
    dims: list[int] | None = None,
) -> Network:
    """A preparation -> instruments -> measurement chain as a wire network.

    ``rho`` is a density matrix, each instrument a list of Choi-operator
    branches (convention sum_kl |k><l| (x) E(|k><l|) on input (x) output),
    and ``povm`` a list of effects.  Preparation-side operators enter the
    network transposed (see the module docstring), so evaluation
    reproduces Tr[E_j ... E_i(rho)] exactly.
    """
    rho = np.asarray(rho, dtype=complex)
    d0 = rho.shape[0]
    if dims is None:
        dims = [d0] * (len(instrument_chois) + 1)
    if len(dims) != len(instrument_chois) + 1:
        raise ValueError("need one dimension per hop")
    if dims[0] != d0:
        raise ValueError("rho dimension does not match dims[0]")

    nodes = []
    prep_space = make_space(quantum_complex(d0))
    prep = Operation(
        "prep",
        (
            GeneralAction(
                "state", prep_space, (("0", from_matrix(prep_space, rho.T)),)
            ),
        ),
    )
    nodes.append(NetworkNode(prep, "state"))

    for k, branches in enumerate(instrument_chois):
        d_in, d_out = dims[k], dims[k + 1]
        sys = composite_space(
            make_space(quantum_complex(d_in)), make_space(quantum_complex(d_out))
        )
        outcomes = tuple(
            (str(i), from_matrix(sys, np.asarray(c, dtype=complex).T))
            for i, c in enumerate(branches)
        )
        op = Operation(f"hop{k}", (GeneralAction("instrument", sys, outcomes),))
        nodes.append(NetworkNode(op, "instrument"))

    meas_space = make_space(quantum_complex(dims[-1]))
    meas = Operation(
        "meas",
        (
            GeneralAction(
                "measure",
                meas_space,
                tuple(
                    (str(j), from_matrix(meas_space, np.asarray(e, dtype=complex)))
                    for j, e in enumerate(povm)
                ),
            ),
        ),
    )
    nodes.append(NetworkNode(meas, "measure"))

    wires = []
    n_inst = len(instrument_chois)
    for k in range(n_inst + 1):
        src = (0, 0) if k == 0 else (k, 1)
        dst = (k + 1, 0)
        wires.append(Wire(src, dst, dims[k]))
    return Network(tuple(nodes), tuple(wires))
