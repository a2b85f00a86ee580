"""Actions, instruments, padding, and the mixing law."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conetheory.operations import (
    GeneralAction,
    Mixture,
    Operation,
    QuantumInstrument,
    general_action,
    instrument_to_action,
    is_void_label,
    mix,
    mixed_action,
    pad_outcomes,
)
from conetheory.spaces import (
    Element,
    from_matrix,
    in_cone,
    make_space,
    quantum_complex,
    to_matrix,
)

QC2 = make_space(quantum_complex(2))


def z_measurement(label="meas"):
    return general_action(
        label,
        QC2,
        [("0", from_matrix(QC2, np.diag([1.0, 0.0]))),
         ("1", from_matrix(QC2, np.diag([0.0, 1.0])))],
    )


def test_action_validation():
    with pytest.raises(ValueError, match="outside the positive cone"):
        general_action("bad", QC2, [("0", from_matrix(QC2, np.diag([1.0, -0.5])))])
    with pytest.raises(ValueError, match="duplicate outcome"):
        GeneralAction("dup", QC2, (("0", QC2.unit), ("0", QC2.unit)))
    with pytest.raises(ValueError, match="at least one outcome"):
        GeneralAction("empty", QC2, ())


def test_operation_validation():
    a = z_measurement()
    with pytest.raises(ValueError, match="duplicate action"):
        Operation("op", (a, a))
    op = Operation("op", (a,))
    assert op.action("meas") is a
    with pytest.raises(KeyError):
        op.action("nope")


def test_pad_outcomes():
    a = z_measurement()
    padded = pad_outcomes(a, 4)
    assert len(padded.outcomes) == 4
    assert padded.outcome_labels[:2] == ("0", "1")
    for lab, el in padded.outcomes[2:]:
        assert is_void_label(lab)
        assert np.all(el.coords == 0.0)
    assert pad_outcomes(a, 2) is a
    with pytest.raises(ValueError):
        pad_outcomes(a, 1)


def test_instrument_to_action_identity_channel():
    phi = np.zeros((4, 4), dtype=complex)
    for k in range(2):
        for l in range(2):
            phi[2 * k + k, 2 * l + l] = 1.0
    inst = QuantumInstrument(2, 2, (phi,))
    act = instrument_to_action(inst)
    assert act.system.dim == 16
    assert len(act.outcomes) == 1
    assert in_cone(act.outcomes[0][1])
    assert inst.is_channel_normalized()


def test_instrument_to_action_measure_reprepare():
    branches = tuple(
        np.kron(np.diag(e).astype(complex), np.diag(e)) for e in ([1.0, 0], [0, 1.0])
    )
    inst = QuantumInstrument(2, 2, branches)
    act = instrument_to_action(inst)
    assert len(act.outcomes) == 2
    assert all(in_cone(el) for _, el in act.outcomes)


def test_instrument_rejects_transpose_choi():
    swap = np.zeros((4, 4))
    for k in range(2):
        for l in range(2):
            swap[2 * k + l, 2 * l + k] = 1.0
    inst = QuantumInstrument(2, 2, (swap.astype(complex),))
    with pytest.raises(ValueError, match="not completely positive"):
        instrument_to_action(inst)


def test_instrument_shape_and_hermiticity_checks():
    with pytest.raises(ValueError, match="Hermitian"):
        QuantumInstrument(2, 2, (np.triu(np.ones((4, 4))),))
    with pytest.raises(ValueError, match="4x4"):
        QuantumInstrument(2, 2, (np.eye(3),))


def test_mix_example():
    m = Mixture(z_measurement("a"), z_measurement("b"), 1.0, 1.0)
    out = mix(m, np.array([1.0, 0.0]), np.array([0.0, 2.0]))
    np.testing.assert_allclose(out, [2.0, 2.0])
    np.testing.assert_allclose(out / out.sum(), [0.5, 0.5])


def test_mix_degenerate_weight():
    m = Mixture(z_measurement("a"), z_measurement("b"), 1.0, 0.0)
    wa = np.array([0.3, 0.7])
    out = mix(m, wa, np.array([5.0, 1.0]))
    np.testing.assert_allclose(out / out.sum(), wa / wa.sum())


@settings(max_examples=200, deadline=None)
@given(
    wa=st.lists(st.floats(0.0, 10.0), min_size=1, max_size=5),
    wb=st.lists(st.floats(0.0, 10.0), min_size=1, max_size=5),
    pa=st.floats(0.01, 10.0),
    pb=st.floats(0.01, 10.0),
    scale=st.floats(0.01, 100.0),
)
def test_mix_symmetry_and_rescaling(wa, wb, pa, pb, scale):
    n = min(len(wa), len(wb))
    wa, wb = np.array(wa[:n]), np.array(wb[:n])
    a, b = z_measurement("a"), z_measurement("b")
    # symmetry under swapping the two actions
    fwd = mix(Mixture(a, b, pa, pb), wa, wb)
    rev = mix(Mixture(b, a, pb, pa), wb, wa)
    np.testing.assert_allclose(fwd, rev, atol=1e-9)
    # rescaling either weight vector leaves normalized probabilities alone
    scaled = mix(Mixture(a, b, pa, pb), wa, scale * wb)
    if fwd.sum() > 1e-9:
        np.testing.assert_allclose(
            scaled / scaled.sum(), fwd / fwd.sum(), atol=1e-9
        )


def test_mixed_action_elements():
    a, b = z_measurement("a"), z_measurement("b")
    m = Mixture(a, b, 2.0, 3.0)
    mixed = mixed_action(m, wbar_a=1.0, wbar_b=4.0)
    # outcome i = w_a*wbar_b*A_i + w_b*wbar_a*B_i = 8 A_i + 3 B_i
    want = 8.0 * to_matrix(a.outcomes[0][1]) + 3.0 * to_matrix(b.outcomes[0][1])
    np.testing.assert_allclose(to_matrix(mixed.outcomes[0][1]), want)


def test_mixture_validation():
    a = z_measurement("a")
    with pytest.raises(ValueError, match="equal outcome counts"):
        Mixture(a, pad_outcomes(a, 3), 1.0, 1.0)
    with pytest.raises(ValueError, match="nonnegative"):
        Mixture(a, z_measurement("b"), -1.0, 0.5)
    with pytest.raises(ValueError, match="positive sum"):
        Mixture(a, z_measurement("b"), 0.0, 0.0)
