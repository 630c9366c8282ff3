import numpy as np
import pytest

from dgd_adversary.attack import (AttackError, AttackSpec, attack_from_config, common_epsilon,
                                  epsilon_for, epsilon_schedule, malicious_target)


def coop(**kw):
    return AttackSpec(adversaries=frozenset({2, 5}), mode="cooperative_fixed", **kw)


def indep(seed=4):
    return AttackSpec(adversaries=frozenset({1, 3}), mode="independent_per_step", seed=seed)


def test_no_attack_returns_none():
    spec = AttackSpec()
    assert epsilon_for(spec, 1, 0, 2) is None


def test_honest_agent_gets_none():
    assert epsilon_for(coop(), 1, 0, 1) is None


def test_cooperative_fixed_epsilon_everywhere():
    spec = coop(fixed_epsilon=(0.5,))
    assert epsilon_for(spec, 2, 0, 1).tolist() == [0.5]
    assert epsilon_for(spec, 5, 99, 1).tolist() == [0.5]


def test_cooperative_draw_bit_identical_across_agents_and_rounds():
    spec = coop(seed=17)
    ref = epsilon_for(spec, 2, 0, 3)
    for agent in (2, 5):
        for k in range(0, 200, 7):
            assert epsilon_for(spec, agent, k, 3).tobytes() == ref.tobytes()


def test_independent_sampler_range_and_mean():
    spec = indep(seed=123)
    draws = np.concatenate([epsilon_for(spec, a, k, 1) for a in (1, 3) for k in range(500)])
    assert draws.size == 1000
    assert np.all((draws >= 0.0) & (draws < 1.0))
    assert abs(draws.mean() - 0.5) <= 0.05


def test_independent_draws_change_each_round():
    spec = indep()
    seq = [epsilon_for(spec, 1, k, 2) for k in range(100)]
    assert all(not np.array_equal(a, b) for a, b in zip(seq, seq[1:]))


def test_independent_agents_differ():
    spec = indep()
    assert not np.array_equal(epsilon_for(spec, 1, 3, 2), epsilon_for(spec, 3, 3, 2))


def test_replay_is_deterministic_and_order_free():
    a, b = indep(seed=9), indep(seed=9)
    forward = [epsilon_for(a, 1, k, 2) for k in range(20)]
    backward = [epsilon_for(b, 1, k, 2) for k in reversed(range(20))][::-1]
    assert all(np.array_equal(x, y) for x, y in zip(forward, backward))


def test_custom_interval():
    spec = AttackSpec(adversaries=frozenset({1}), mode="independent_per_step",
                      dist_low=-2.0, dist_high=-1.0, seed=1)
    vals = np.concatenate([epsilon_for(spec, 1, k, 4) for k in range(50)])
    assert np.all((vals >= -2.0) & (vals < -1.0))


def test_schedule_matches_pointwise_queries():
    spec = indep()
    E = epsilon_schedule(spec, 4, 2, 6)
    for k in range(6):
        for agent in range(1, 5):
            e = epsilon_for(spec, agent, k, 2)
            np.testing.assert_array_equal(E[k, agent - 1], np.zeros(2) if e is None else e)
    np.testing.assert_array_equal(epsilon_schedule(spec, 4, 2, 2, start=3), E[3:5])


def test_schedule_cooperative():
    spec = coop(seed=3)
    E = epsilon_schedule(spec, 5, 1, 4)
    assert np.all(E[:, [1, 4]] == common_epsilon(spec, 1))
    assert np.all(E[:, [0, 2, 3]] == 0)


@pytest.mark.parametrize("kwargs", [
    dict(adversaries=frozenset(), mode="cooperative_fixed"),
    dict(adversaries=frozenset({1}), mode="none"),
    dict(adversaries=frozenset({1}), mode="sometimes"),
    dict(adversaries=frozenset({1}), mode="cooperative_fixed", dist_low=1.0, dist_high=1.0),
    dict(adversaries=frozenset({1}), mode="independent_per_step", fixed_epsilon=(0.1,)),
    dict(adversaries=frozenset({0}), mode="cooperative_fixed"),
])
def test_invalid_specs(kwargs):
    with pytest.raises(AttackError):
        AttackSpec(**kwargs)


def test_validate_for_bounds():
    with pytest.raises(AttackError):
        coop().validate_for(4, 1)
    with pytest.raises(AttackError):
        coop(fixed_epsilon=(0.1, 0.2)).validate_for(5, 1)


def test_malicious_target():
    np.testing.assert_array_equal(malicious_target([0.0], [0.5]), [0.5])
    np.testing.assert_array_equal(malicious_target([1.0, 2.0], [0.0, 0.0]), [1.0, 2.0])
    np.testing.assert_allclose(malicious_target([1.0, 2.0], [0.1, -0.1]), [1.1, 1.9])
    with pytest.raises(AttackError):
        malicious_target([0.0, 0.0], [0.5])


def test_config_block_and_seed_offset():
    block = {"adversaries": [1, 3], "mode": "independent_per_step", "low": 0.0, "high": 1.0, "seed": 4}
    assert attack_from_config(block, seed_offset=0) == indep(seed=4)
    assert attack_from_config(block, seed_offset=2).seed == 6
    with pytest.raises(AttackError):
        attack_from_config({"mode": "none", "bogus": 1})
