"""The bundled causal-game and Born demos."""

import numpy as np
import pytest

from conetheory.correlations import verify_positivity
from conetheory.demo import born_demo, load_bundled_theory, ocb_demo

PINNED_GAME_SUCCESS = 0.8535533905932737  # (2 + sqrt 2)/4, from the contraction oracle


def test_game_success_matches_pinned_value():
    result = ocb_demo()
    assert result.game_success == pytest.approx(PINNED_GAME_SUCCESS, abs=1e-9)
    assert result.game_success == pytest.approx((2 + np.sqrt(2)) / 4, abs=1e-9)


def test_causal_strategies_stay_below_three_quarters():
    result = ocb_demo()
    for name, s in result.causal_successes.items():
        assert s <= 0.75 + 1e-9, name
    assert result.causal_best == pytest.approx(0.75, abs=1e-9)


def test_game_table_is_a_distribution_with_nonnegative_weights():
    result = ocb_demo()
    probs = result.table.probabilities()
    assert probs.min() >= 0.0
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert len(result.table.rows) == 8 * 4  # settings x outcomes


def test_bundled_correlations_are_positive():
    theory = load_bundled_theory("ocb.correlation")
    for name, corr in theory.correlations.items():
        ok, value, method = verify_positivity(corr, rng=np.random.default_rng(0))
        assert ok, (name, value)
        assert method == "psd-certificate"


def test_bundled_strategies_are_cone_valued():
    from conetheory.spaces import in_cone

    theory = load_bundled_theory("ocb.correlation")
    for op in theory.operations.values():
        for action in op.actions:
            for _, el in action.outcomes:
                assert in_cone(el, 1e-12)


def test_born_demo_deviation_tiny():
    result = born_demo(seed=1, trials=20)
    assert result.trials == 20
    assert result.max_deviation < 1e-10


def test_born_demo_deterministic():
    a = born_demo(seed=2, trials=5)
    b = born_demo(seed=2, trials=5)
    assert a == b
