"""The theory file format: systems, operations, wires, correlations.

A theory file is a YAML document with the following shape (all matrices
are row-major lists of rows whose entries are two-element ``[re, im]``
pairs; imaginary parts must be 0 for the classical, quantum_real and
spin_factor families, and matrices for those families are diagonal resp.
symmetric):

    systems:
      - {name: q, family: quantum_complex, n: 2}
    operations:
      - name: prep
        actions:
          - label: state
            systems: [q]            # one or more system names; >1 = composite
            outcomes:
              - label: "0"
                matrix: [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]
    wires:
      - {from: prep.state.0, to: meas.measure.0}
    correlations:
      - name: game
        spaces: [[a1, a2], [b1, b2]]  # names or name lists (composites)
        operator: ...                  # joint-Hilbert-space matrix, or
        # coefficients: [[...]]        # dense real tensor in coordinates
    options:
      tolerance: 1.0e-9
      seed: 0
      strict_oc_normalization: false

Spin-factor elements are carried as diagonal matrices of size n + 1
holding the coordinate vector.  Parsing is fully validated; error
messages name the offending field path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .correlations import Correlation, correlation_from_operator
from .network import Network, NetworkNode, Wire
from .operations import GeneralAction, Operation
from .spaces import (
    FAMILIES,
    QUANTUM_COMPLEX,
    ConeKind,
    ConeSpace,
    Element,
    composite_space,
    cone_margin,
    from_matrix,
    make_space,
    to_matrix,
)


class TheoryError(ValueError):
    """A parse or validation failure, carrying the field location."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


@dataclass(frozen=True)
class WireDecl:
    """A wire between two named endpoints operation.action.subsystem."""

    op_a: str
    action_a: str
    sub_a: int
    op_b: str
    action_b: str
    sub_b: int

    def endpoint_names(self) -> tuple[str, str]:
        return (
            f"{self.op_a}.{self.action_a}.{self.sub_a}",
            f"{self.op_b}.{self.action_b}.{self.sub_b}",
        )


@dataclass(frozen=True)
class TheoryOptions:
    tolerance: float = 1e-9
    seed: int = 0
    strict_oc_normalization: bool = False


@dataclass
class Theory:
    """A validated in-memory theory."""

    systems: dict[str, ConeSpace]
    operations: dict[str, Operation]
    wires: tuple[WireDecl, ...]
    correlations: dict[str, Correlation]
    options: TheoryOptions
    action_system_names: dict[str, dict[str, tuple[str, ...]]] = field(
        default_factory=dict
    )
    correlation_space_names: dict[str, tuple[tuple[str, ...], ...]] = field(
        default_factory=dict
    )
    correlation_forms: dict[str, str] = field(default_factory=dict)


def load_theory(path, strict: bool = False) -> Theory:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_theory(fh.read(), strict=strict)


def parse_theory(text: str, strict: bool = False) -> Theory:
    """Parse and validate a theory document.

    With ``strict`` every outcome must lie in its cone within the file's
    tolerance; otherwise out-of-cone outcomes are admitted so that audits
    can load and fail deliberately broken theories.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise TheoryError("document", f"not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise TheoryError("document", "top level must be a mapping")
    known = {"systems", "operations", "wires", "correlations", "options"}
    for key in doc:
        if key not in known:
            raise TheoryError(str(key), "unknown top-level section")

    options = _parse_options(doc.get("options") or {})

    systems: dict[str, ConeSpace] = {}
    for i, entry in enumerate(_as_list(doc.get("systems"), "systems")):
        loc = f"systems[{i}]"
        name = _req_str(entry, "name", loc)
        if name in systems:
            raise TheoryError(loc, f"duplicate system name {name!r}")
        family = _req_str(entry, "family", loc)
        if family not in FAMILIES:
            raise TheoryError(f"{loc}.family", f"unknown family {family!r}")
        n = _req_int(entry, "n", loc)
        if n < 1:
            raise TheoryError(f"{loc}.n", "system size must be >= 1")
        systems[name] = make_space(ConeKind(family, n))
    if not systems:
        raise TheoryError("systems", "at least one system is required")

    operations: dict[str, Operation] = {}
    action_system_names: dict[str, dict[str, tuple[str, ...]]] = {}
    for i, entry in enumerate(_as_list(doc.get("operations"), "operations")):
        loc = f"operations[{i}]"
        name = _req_str(entry, "name", loc)
        if name in operations:
            raise TheoryError(loc, f"duplicate operation name {name!r}")
        actions = []
        names_by_action: dict[str, tuple[str, ...]] = {}
        for j, araw in enumerate(_as_list(entry.get("actions"), f"{loc}.actions")):
            aloc = f"{loc}.actions[{j}]"
            label = _req_str(araw, "label", aloc)
            sys_names = _as_list(araw.get("systems"), f"{aloc}.systems")
            space = _resolve_space(sys_names, systems, f"{aloc}.systems")
            outcomes = []
            for k, oraw in enumerate(_as_list(araw.get("outcomes"), f"{aloc}.outcomes")):
                oloc = f"{aloc}.outcomes[{k}]"
                olabel = _req_str(oraw, "label", oloc)
                matrix = _parse_matrix(
                    oraw.get("matrix"), space, f"{oloc}.matrix"
                )
                el = _matrix_to_element(space, matrix, f"{oloc}.matrix")
                if strict and cone_margin(el) < -options.tolerance:
                    raise TheoryError(
                        f"{oloc}.matrix",
                        f"outcome has negative eigenvalue {cone_margin(el):.3e}",
                    )
                outcomes.append((olabel, el))
            try:
                actions.append(GeneralAction(label, space, tuple(outcomes)))
            except ValueError as exc:
                raise TheoryError(aloc, str(exc)) from exc
            names_by_action[label] = tuple(str(s) for s in sys_names)
        try:
            operations[name] = Operation(name, tuple(actions))
        except ValueError as exc:
            raise TheoryError(loc, str(exc)) from exc
        action_system_names[name] = names_by_action

    wires = []
    for i, entry in enumerate(_as_list(doc.get("wires"), "wires")):
        loc = f"wires[{i}]"
        if not isinstance(entry, dict) or set(entry) != {"from", "to"}:
            raise TheoryError(loc, "a wire is a mapping with keys 'from' and 'to'")
        end_a = _parse_endpoint(entry["from"], operations, f"{loc}.from")
        end_b = _parse_endpoint(entry["to"], operations, f"{loc}.to")
        decl = WireDecl(*end_a, *end_b)
        dim_a = _endpoint_dim(decl.op_a, decl.action_a, decl.sub_a, operations)
        dim_b = _endpoint_dim(decl.op_b, decl.action_b, decl.sub_b, operations)
        if dim_a != dim_b:
            names = decl.endpoint_names()
            raise TheoryError(
                loc,
                f"wire dimension mismatch: {names[0]} has dimension {dim_a}, "
                f"{names[1]} has dimension {dim_b}",
            )
        wires.append(decl)

    correlations: dict[str, Correlation] = {}
    correlation_space_names: dict[str, tuple[tuple[str, ...], ...]] = {}
    correlation_forms: dict[str, str] = {}
    for i, entry in enumerate(_as_list(doc.get("correlations"), "correlations")):
        loc = f"correlations[{i}]"
        name = _req_str(entry, "name", loc)
        if name in correlations:
            raise TheoryError(loc, f"duplicate correlation name {name!r}")
        raw_spaces = _as_list(entry.get("spaces"), f"{loc}.spaces")
        space_names = tuple(
            tuple([s] if isinstance(s, str) else [str(x) for x in s])
            for s in raw_spaces
        )
        spaces = tuple(
            _resolve_space(list(names), systems, f"{loc}.spaces[{k}]")
            for k, names in enumerate(space_names)
        )
        has_op = "operator" in entry
        has_coeff = "coefficients" in entry
        if has_op == has_coeff:
            raise TheoryError(
                loc, "exactly one of 'operator' or 'coefficients' is required"
            )
        if has_op:
            if any(s.family != QUANTUM_COMPLEX for s in spaces):
                raise TheoryError(
                    f"{loc}.operator",
                    "operator form requires quantum_complex spaces",
                )
            m = int(np.prod([s.matrix_dim for s in spaces]))
            op = _parse_complex_matrix(entry["operator"], m, f"{loc}.operator")
            try:
                correlations[name] = correlation_from_operator(
                    spaces, op, check_psd_tol=options.tolerance
                )
            except ValueError as exc:
                raise TheoryError(f"{loc}.operator", str(exc)) from exc
            correlation_forms[name] = "operator"
        else:
            coeff = np.asarray(entry["coefficients"], dtype=float)
            want = tuple(s.dim for s in spaces)
            if coeff.shape != want:
                raise TheoryError(
                    f"{loc}.coefficients",
                    f"shape {coeff.shape} does not match space dimensions {want}",
                )
            correlations[name] = Correlation(spaces, coeff)
            correlation_forms[name] = "coefficients"
        correlation_space_names[name] = space_names

    return Theory(
        systems=systems,
        operations=operations,
        wires=tuple(wires),
        correlations=correlations,
        options=options,
        action_system_names=action_system_names,
        correlation_space_names=correlation_space_names,
        correlation_forms=correlation_forms,
    )


def serialize_theory(theory: Theory) -> str:
    """The canonical YAML form; parse(serialize(t)) reproduces t."""
    doc: dict = {"systems": []}
    for name, space in theory.systems.items():
        doc["systems"].append(
            {"name": name, "family": space.kind.family, "n": space.kind.n}
        )
    if theory.operations:
        doc["operations"] = []
        for name, op in theory.operations.items():
            actions = []
            for a in op.actions:
                sys_names = theory.action_system_names.get(name, {}).get(
                    a.label, ()
                )
                actions.append(
                    {
                        "label": a.label,
                        "systems": list(sys_names),
                        "outcomes": [
                            {"label": lab, "matrix": _matrix_to_pairs(to_matrix(el))}
                            for lab, el in a.outcomes
                        ],
                    }
                )
            doc["operations"].append({"name": name, "actions": actions})
    if theory.wires:
        doc["wires"] = [
            {"from": w.endpoint_names()[0], "to": w.endpoint_names()[1]}
            for w in theory.wires
        ]
    if theory.correlations:
        doc["correlations"] = []
        for name, corr in theory.correlations.items():
            names = theory.correlation_space_names.get(name, ())
            entry: dict = {
                "name": name,
                "spaces": [list(ns) for ns in names],
            }
            if theory.correlation_forms.get(name) == "operator":
                entry["operator"] = _matrix_to_pairs(corr.certificate)
            else:
                entry["coefficients"] = corr.coefficients.tolist()
            doc["correlations"].append(entry)
    doc["options"] = {
        "tolerance": theory.options.tolerance,
        "seed": theory.options.seed,
        "strict_oc_normalization": theory.options.strict_oc_normalization,
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def theories_equal(a: Theory, b: Theory) -> bool:
    """Structural equality including coordinates, up to nothing."""
    if set(a.systems) != set(b.systems) or any(
        a.systems[k].kind != b.systems[k].kind for k in a.systems
    ):
        return False
    if set(a.operations) != set(b.operations):
        return False
    for name in a.operations:
        oa, ob = a.operations[name], b.operations[name]
        if [x.label for x in oa.actions] != [x.label for x in ob.actions]:
            return False
        for aa, ab in zip(oa.actions, ob.actions):
            if aa.system.kind != ab.system.kind:
                return False
            if aa.outcome_labels != ab.outcome_labels:
                return False
            for (_, ea), (_, eb) in zip(aa.outcomes, ab.outcomes):
                if not np.array_equal(ea.coords, eb.coords):
                    return False
    if a.wires != b.wires:
        return False
    if set(a.correlations) != set(b.correlations):
        return False
    for name in a.correlations:
        ca, cb = a.correlations[name], b.correlations[name]
        if not np.array_equal(ca.coefficients, cb.coefficients):
            return False
    return a.options == b.options


def build_network(theory: Theory) -> Network:
    """The wire network of a theory: every operation wired, one action each."""
    if not theory.wires:
        raise TheoryError("wires", "theory declares no wires")
    chosen: dict[str, str] = {}
    for i, w in enumerate(theory.wires):
        for op_name, action in ((w.op_a, w.action_a), (w.op_b, w.action_b)):
            if chosen.setdefault(op_name, action) != action:
                raise TheoryError(
                    f"wires[{i}]",
                    f"operation {op_name!r} is wired through two different "
                    f"actions ({chosen[op_name]!r} and {action!r})",
                )
    unwired = [name for name in theory.operations if name not in chosen]
    if unwired:
        raise TheoryError("wires", f"operations without wires: {unwired}")
    order = list(theory.operations)
    index = {name: i for i, name in enumerate(order)}
    nodes = tuple(
        NetworkNode(theory.operations[name], chosen[name]) for name in order
    )
    wires = []
    for w in theory.wires:
        dim = _endpoint_dim(w.op_a, w.action_a, w.sub_a, theory.operations)
        wires.append(
            Wire((index[w.op_a], w.sub_a), (index[w.op_b], w.sub_b), dim)
        )
    return Network(nodes, tuple(wires))


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _as_list(value, location: str) -> list:
    if value is None:
        return []
    if not isinstance(value, list):
        raise TheoryError(location, "expected a list")
    return value


def _req_str(entry, key: str, location: str) -> str:
    if not isinstance(entry, dict) or key not in entry:
        raise TheoryError(location, f"missing required key {key!r}")
    value = entry[key]
    if not isinstance(value, (str, int)):
        raise TheoryError(f"{location}.{key}", "expected a string")
    return str(value)


def _req_int(entry, key: str, location: str) -> int:
    if key not in entry:
        raise TheoryError(location, f"missing required key {key!r}")
    value = entry[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise TheoryError(f"{location}.{key}", "expected an integer")
    return value


def _parse_options(raw) -> TheoryOptions:
    if not isinstance(raw, dict):
        raise TheoryError("options", "expected a mapping")
    known = {"tolerance", "seed", "strict_oc_normalization"}
    for key in raw:
        if key not in known:
            raise TheoryError(f"options.{key}", "unknown option")
    tol = raw.get("tolerance", 1e-9)
    if not isinstance(tol, (int, float)) or tol < 0:
        raise TheoryError("options.tolerance", "expected a nonnegative number")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise TheoryError("options.seed", "expected an integer")
    strict = raw.get("strict_oc_normalization", False)
    if not isinstance(strict, bool):
        raise TheoryError("options.strict_oc_normalization", "expected a boolean")
    return TheoryOptions(float(tol), seed, strict)


def _resolve_space(names, systems: dict[str, ConeSpace], location: str) -> ConeSpace:
    if not names:
        raise TheoryError(location, "at least one system name is required")
    parts = []
    for name in names:
        name = str(name)
        if name not in systems:
            raise TheoryError(location, f"unresolved system name {name!r}")
        parts.append(systems[name])
    try:
        return composite_space(*parts)
    except ValueError as exc:
        raise TheoryError(location, str(exc)) from exc


def _parse_matrix(raw, space: ConeSpace, location: str) -> np.ndarray:
    m = int(np.prod(space.factor_matrix_dims()))
    return _parse_complex_matrix(raw, m, location)


def _parse_complex_matrix(raw, m: int, location: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != m:
        raise TheoryError(
            location, f"dimension mismatch: expected {m} rows"
        )
    out = np.empty((m, m), dtype=complex)
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != m:
            raise TheoryError(
                f"{location}[{r}]", f"dimension mismatch: expected {m} entries"
            )
        for c, pair in enumerate(row):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(v, (int, float)) for v in pair)
            ):
                raise TheoryError(
                    f"{location}[{r}][{c}]",
                    "every entry must be a two-element [re, im] pair",
                )
            out[r, c] = complex(float(pair[0]), float(pair[1]))
    return out


def _matrix_to_element(space: ConeSpace, matrix: np.ndarray, location: str) -> Element:
    if space.family != QUANTUM_COMPLEX and np.abs(matrix.imag).max(initial=0.0) > 0.0:
        raise TheoryError(
            location, "imaginary parts must be 0 for this family"
        )
    try:
        return from_matrix(space, matrix)
    except ValueError as exc:
        raise TheoryError(location, str(exc)) from exc


def _parse_endpoint(raw, operations: dict[str, Operation], location: str):
    if not isinstance(raw, str) or raw.count(".") != 2:
        raise TheoryError(
            location, "an endpoint is a string 'operation.action.subsystem'"
        )
    op_name, action, sub_raw = raw.split(".")
    if op_name not in operations:
        raise TheoryError(location, f"unresolved operation name {op_name!r}")
    try:
        act = operations[op_name].action(action)
    except KeyError:
        raise TheoryError(
            location, f"operation {op_name!r} has no action {action!r}"
        ) from None
    try:
        sub = int(sub_raw)
    except ValueError:
        raise TheoryError(location, f"subsystem index {sub_raw!r} is not an integer") from None
    n_subs = len(act.system.factor_matrix_dims())
    if not (0 <= sub < n_subs):
        raise TheoryError(
            location,
            f"subsystem index {sub} out of range for {op_name}.{action} "
            f"({n_subs} subsystems)",
        )
    return op_name, action, sub


def _endpoint_dim(op, action, sub, operations: dict[str, Operation]) -> int:
    return operations[op].action(action).system.factor_matrix_dims()[sub]


def _matrix_to_pairs(matrix: np.ndarray) -> list:
    m = np.asarray(matrix, dtype=complex)
    return [
        [[float(v.real), float(v.imag)] for v in row]
        for row in m
    ]
