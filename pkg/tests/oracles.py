"""Independent oracles used by the test suite.

These deliberately avoid the package's contraction machinery: the Born
oracle is a direct density-matrix simulation from Kraus operators, and
the wire oracle materializes the full wire projector and takes a plain
matrix trace.
"""

import itertools

import numpy as np


# ---------------------------------------------------------------------------
# density-matrix Born oracle
# ---------------------------------------------------------------------------

def apply_kraus(rho, kraus_ops):
    return sum(k @ rho @ k.conj().T for k in kraus_ops)


def born_probabilities(rho, instruments, povm):
    """p(i1, ..., ik, j) = Tr[E_j  K_ik(... K_i1(rho) ...)] normalized.

    ``instruments`` is a list of instruments, each a list of branches,
    each branch a list of Kraus operators.
    """
    branch_counts = [len(inst) for inst in instruments]
    shape = branch_counts + [len(povm)]
    probs = np.zeros(shape)
    for branch_choice in itertools.product(*[range(c) for c in branch_counts]):
        state = rho
        for inst, b in zip(instruments, branch_choice):
            state = apply_kraus(state, inst[b])
        for j, effect in enumerate(povm):
            probs[branch_choice + (j,)] = np.trace(effect @ state).real
    total = probs.sum()
    if total <= 0:
        raise ValueError("degenerate scenario")
    return probs / total


def kraus_to_choi(kraus_ops, d_in):
    """sum_kl |k><l| (x) E(|k><l|)."""
    d_out = kraus_ops[0].shape[0]
    choi = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for k in range(d_in):
        for l in range(d_in):
            e_kl = np.zeros((d_in, d_in), dtype=complex)
            e_kl[k, l] = 1.0
            choi += np.kron(e_kl, apply_kraus(e_kl, kraus_ops))
    return choi


# ---------------------------------------------------------------------------
# random scenarios
# ---------------------------------------------------------------------------

def random_density(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_povm(d, n, rng):
    effects = []
    for _ in range(n):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        effects.append(g @ g.conj().T)
    total = sum(effects)
    w, v = np.linalg.eigh(total)
    t_isqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    return [t_isqrt @ e @ t_isqrt for e in effects]


def random_instrument(d_in, d_out, n_branch, rng):
    """Branches of a channel: each branch one Kraus operator."""
    ks = [
        rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))
        for _ in range(n_branch)
    ]
    total = sum(k.conj().T @ k for k in ks)
    w, v = np.linalg.eigh(total)
    t_isqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    return [[k @ t_isqrt] for k in ks]


# ---------------------------------------------------------------------------
# brute-force wire contraction
# ---------------------------------------------------------------------------

def wire_weight_bruteforce(event_mats, subsystem_dims, wires):
    """Tr[(M_1 (x) ... (x) M_n) W_wires] via dense matrices.

    ``event_mats[i]`` acts on the subsystems of node i (dims
    ``subsystem_dims[i]``); ``wires`` is a list of ((node, sub), (node, sub))
    pairs.  The wire projector is built explicitly on the full space in
    listing order and contracted with an ordinary matrix trace.
    """
    flat_dims = [d for ds in subsystem_dims for d in ds]
    offsets = {}
    pos = 0
    for i, ds in enumerate(subsystem_dims):
        for s in range(len(ds)):
            offsets[(i, s)] = pos
            pos += 1
    total_dim = int(np.prod(flat_dims))

    big = event_mats[0]
    for m in event_mats[1:]:
        big = np.kron(big, m)

    w_wires = np.zeros((total_dim, total_dim), dtype=complex)
    axes = [range(d) for d in flat_dims]
    for row in itertools.product(*axes):
        for col in itertools.product(*axes):
            ok = True
            for (end_a, end_b) in wires:
                pa, pb = offsets[end_a], offsets[end_b]
                if row[pa] != row[pb] or col[pa] != col[pb]:
                    ok = False
                    break
            if ok:
                r = np.ravel_multi_index(row, flat_dims)
                c = np.ravel_multi_index(col, flat_dims)
                w_wires[r, c] = 1.0
    return np.trace(big @ w_wires)
