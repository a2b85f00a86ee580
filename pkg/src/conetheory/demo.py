"""Bundled demonstrations: the causal game and the Born-rule cross-check.

The causal game draws its process-matrix correlation and instrument
strategies from the bundled ``ocb.correlation`` data file.  Two parties
receive uniform random bits (a for the first party; b and a direction
bit d for the second); when d = 0 the second party must output the
first's bit, when d = 1 the first must output the second's.  Over the
bundled process-matrix correlation the bundled strategies win with
probability (2 + sqrt 2)/4, above the 3/4 ceiling that the bundled
causally ordered correlation admits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .correlations import Correlation, ProbabilityTable, TableRow
from .network import born_chain_network, evaluate
from .operations import Operation
from .theoryfile import Theory, parse_theory


def load_bundled_theory(name: str) -> Theory:
    text = resources.files("conetheory.data").joinpath(name).read_text()
    return parse_theory(text)


@dataclass(frozen=True)
class OcbDemoResult:
    table: ProbabilityTable
    game_success: float
    causal_successes: dict[str, float]

    @property
    def causal_best(self) -> float:
        return max(self.causal_successes.values())


def ocb_demo() -> OcbDemoResult:
    """Evaluate the bundled causal game and its causally ordered ceiling."""
    theory = load_bundled_theory("ocb.correlation")
    game = theory.correlations["game"]
    causal = theory.correlations["causal"]
    alice = theory.operations["alice"]
    bob = theory.operations["bob"]

    table_rows, success = _play(game, alice, bob)
    causal_successes = {}
    for a_op, b_op in itertools.product(
        (alice, theory.operations["alice_flip"]),
        (bob, theory.operations["bob_const"]),
    ):
        _, s = _play(causal, a_op, b_op)
        causal_successes[f"{a_op.name}+{b_op.name}"] = s
    return OcbDemoResult(
        table=ProbabilityTable(tuple(table_rows), 1.0),
        game_success=success,
        causal_successes=causal_successes,
    )


def _play(
    correlation: Correlation, alice: Operation, bob: Operation
) -> tuple[list[TableRow], float]:
    """Joint outcome table (uniform settings) and game success probability."""
    rows: list[TableRow] = []
    success = 0.0
    for a, b, d in itertools.product((0, 1), repeat=3):
        act_a = alice.action(f"a{a}")
        act_b = bob.action(f"b{b}d{d}")
        weights = np.array(
            [
                [correlation.apply([ea, eb]) for _, eb in act_b.outcomes]
                for _, ea in act_a.outcomes
            ]
        )
        total = weights.sum()
        if total <= 0:
            raise ValueError(f"degenerate condition (a={a}, b={b}, d={d})")
        for (xl, _), w_row in zip(act_a.outcomes, weights):
            for (yl, _), w in zip(act_b.outcomes, w_row):
                p_joint = w / total / 8.0
                rows.append(
                    TableRow(
                        (str(a), str(b), str(d), xl, yl), p_joint, p_joint
                    )
                )
                won = (yl == str(a)) if d == 0 else (xl == str(b))
                if won:
                    success += p_joint
    return rows, float(success)


# ---------------------------------------------------------------------------
# Born-rule comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BornDemoResult:
    trials: int
    max_deviation: float


def born_demo(seed: int = 0, trials: int = 50) -> BornDemoResult:
    """Compare chain networks against direct density-matrix simulation.

    Each trial draws a random causally ordered chain (preparation, zero
    or one instrument, destructive measurement) on a qubit or qutrit,
    evaluates it as a wire network, and simulates the same chain with
    plain matrix algebra.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        d = int(rng.choice([2, 3]))
        rho = _random_density(d, rng)
        povm = _random_povm(d, int(rng.integers(2, 4)), rng)
        if rng.random() < 0.5:
            instruments = []
        else:
            instruments = [_random_instrument(d, int(rng.integers(1, 4)), rng)]
        chois = [[_kraus_to_choi(k, d) for k in branches] for branches in instruments]
        net = born_chain_network(rho, chois, povm, dims=[d] * (len(chois) + 1))
        network_probs = evaluate(net).table.probabilities()

        direct = []
        branch_sets = [range(len(b)) for b in instruments]
        for combo in itertools.product(*branch_sets):
            state = rho
            for inst, i in zip(instruments, combo):
                k = inst[i]
                state = k @ state @ k.conj().T
            for effect in povm:
                direct.append(np.trace(effect @ state).real)
        direct = np.array(direct)
        direct /= direct.sum()
        worst = max(worst, float(np.abs(network_probs - direct).max()))
    return BornDemoResult(trials=trials, max_deviation=worst)


def _random_density(d: int, rng) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _random_povm(d: int, n: int, rng) -> list[np.ndarray]:
    effects = []
    for _ in range(n):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        effects.append(g @ g.conj().T)
    total = sum(effects)
    w, v = np.linalg.eigh(total)
    isqrt = (v / np.sqrt(w)) @ v.conj().T
    return [isqrt @ e @ isqrt for e in effects]


def _random_instrument(d: int, branches: int, rng) -> list[np.ndarray]:
    ks = [
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for _ in range(branches)
    ]
    total = sum(k.conj().T @ k for k in ks)
    w, v = np.linalg.eigh(total)
    isqrt = (v / np.sqrt(w)) @ v.conj().T
    return [k @ isqrt for k in ks]


def _kraus_to_choi(k: np.ndarray, d_in: int) -> np.ndarray:
    d_out = k.shape[0]
    choi = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for a in range(d_in):
        for b in range(d_in):
            e_ab = np.zeros((d_in, d_in), dtype=complex)
            e_ab[a, b] = 1.0
            choi += np.kron(e_ab, k @ e_ab @ k.conj().T)
    return choi
