import numpy as np
import pytest

from qvoterlab.dynamics import (
    Configuration,
    OPINION_A,
    OPINION_B,
    OPINION_U,
    SimulationParams,
    elementary_update,
    independence_transition,
    panel_verdict,
    run,
)
from qvoterlab.graphs import build
from qvoterlab.rng import Xoshiro256PP

from conftest import random_multiplex


def test_independence_frequencies_from_decided():
    rng = Xoshiro256PP(1)
    n = 1_000_000
    to_u = sum(independence_transition(OPINION_A, rng) == OPINION_U for _ in range(n))
    assert abs(to_u / n - 0.5) < 0.01


def test_independence_never_flips_decided_to_opposite():
    rng = Xoshiro256PP(2)
    for _ in range(10000):
        assert independence_transition(OPINION_A, rng) != OPINION_B
        assert independence_transition(OPINION_B, rng) != OPINION_A


def test_independence_frequencies_from_undecided():
    rng = Xoshiro256PP(3)
    n = 1_000_000
    counts = {OPINION_A: 0, OPINION_B: 0, OPINION_U: 0}
    for _ in range(n):
        counts[independence_transition(OPINION_U, rng)] += 1
    for c in counts.values():
        assert abs(c / n - 1 / 3) < 0.01


def _two_node_net():
    return build(2, [[(0, 1)], [(0, 1)]])


def test_panel_unanimous_everywhere():
    net = _two_node_net()
    config = Configuration.from_states(np.array([OPINION_U, OPINION_A], dtype=np.int8))
    assert panel_verdict(net, config, 0, 4, Xoshiro256PP(0)) == OPINION_A


def test_panel_conflicting_layers_blocks():
    # node 0 sees only A in layer 0 and only B in layer 1
    net = build(3, [[(0, 1)], [(0, 2)]])
    config = Configuration.from_states(
        np.array([OPINION_U, OPINION_A, OPINION_B], dtype=np.int8))
    for seed in range(50):
        assert panel_verdict(net, config, 0, 4, Xoshiro256PP(seed)) is None


def test_panel_zero_degree_layer_vetoes():
    # degree 1 in layer 0, degree 0 in layer 1: no pressure possible
    net = build(3, [[(0, 1)], [(1, 2)]])
    config = Configuration.from_states(
        np.array([OPINION_U, OPINION_A, OPINION_A], dtype=np.int8))
    for seed in range(50):
        assert panel_verdict(net, config, 0, 4, Xoshiro256PP(seed)) is None


def test_panel_single_neighbor_fills_all_slots():
    net = _two_node_net()
    config = Configuration.from_states(np.array([OPINION_B, OPINION_A], dtype=np.int8))
    assert panel_verdict(net, config, 0, 4, Xoshiro256PP(9)) == OPINION_A


def test_panel_undecided_neighbor_blocks():
    net = _two_node_net()
    config = Configuration.from_states(np.array([OPINION_A, OPINION_U], dtype=np.int8))
    for seed in range(20):
        assert panel_verdict(net, config, 0, 4, Xoshiro256PP(seed)) is None


def test_absorbing_all_a_at_p_zero():
    net = random_multiplex(30, 2, 0.2, np.random.default_rng(0))
    config = Configuration.all_of(30, OPINION_A)
    params = SimulationParams(q=4, p=0.0, mcs_budget=0, master_seed=3)
    rng = Xoshiro256PP(3)
    for _ in range(500):
        elementary_update(net, config, params, rng)
    assert config.counts() == (30, 0, 0)


def test_undecided_target_adopts_unanimous_opinion():
    net = _two_node_net()
    config = Configuration.from_states(np.array([OPINION_U, OPINION_A], dtype=np.int8))
    params = SimulationParams(q=4, p=0.0, mcs_budget=0, master_seed=1)
    rng = Xoshiro256PP(1)
    for _ in range(50):
        elementary_update(net, config, params, rng)
    assert config.counts() == (2, 0, 0)


def test_counts_conserved_and_consistent():
    net = random_multiplex(40, 2, 0.15, np.random.default_rng(1))
    states = np.random.default_rng(2).choice(
        [OPINION_A, OPINION_B, OPINION_U], size=40).astype(np.int8)
    config = Configuration.from_states(states)
    params = SimulationParams(q=3, p=0.2, mcs_budget=0, master_seed=4)
    rng = Xoshiro256PP(4)
    for _ in range(100000):
        elementary_update(net, config, params, rng)
        assert config.n_a + config.n_b + config.n_u == 40
    recount = np.bincount(config.states + 1, minlength=3)
    assert (recount[2], recount[0], recount[1]) == config.counts()


def test_no_direct_decided_flip_under_pure_noise():
    net = random_multiplex(40, 2, 0.2, np.random.default_rng(3))
    states = np.random.default_rng(4).choice(
        [OPINION_A, OPINION_B], size=40).astype(np.int8)
    config = Configuration.from_states(states)
    params = SimulationParams(q=4, p=1.0, mcs_budget=0, master_seed=5)
    rng = Xoshiro256PP(5)
    flips = 0
    for _ in range(100000):
        before = config.states.copy()
        i = elementary_update(net, config, params, rng)
        after = config.states[i]
        if before[i] == OPINION_A and after == OPINION_B:
            flips += 1
        if before[i] == OPINION_B and after == OPINION_A:
            flips += 1
    assert flips == 0


def test_run_zero_budget_returns_initial_only():
    net = _two_node_net()
    config = Configuration.from_states(np.array([OPINION_A, OPINION_B], dtype=np.int8))
    traj = run(net, config, SimulationParams(q=4, p=0.3, mcs_budget=0, master_seed=0))
    assert traj.shape == (1, 3)
    assert traj[0].tolist() == [0.5, 0.5, 0.0]


def test_run_all_a_stays_absorbing():
    net = random_multiplex(50, 2, 0.2, np.random.default_rng(5))
    config = Configuration.all_of(50, OPINION_A)
    traj = run(net, config, SimulationParams(q=4, p=0.0, mcs_budget=50, master_seed=6))
    assert (traj[:, 0] == 1.0).all()


def test_pure_noise_time_average_near_independence_equilibrium():
    net = random_multiplex(300, 2, 0.05, np.random.default_rng(6))
    config = Configuration.all_of(300, OPINION_A)
    traj = run(net, config, SimulationParams(q=4, p=1.0, mcs_budget=1500, master_seed=7))
    tail = traj[500:]
    avg = tail.mean(axis=0)
    assert abs(avg[0] - 2 / 7) < 0.02
    assert abs(avg[1] - 2 / 7) < 0.02
    assert abs(avg[2] - 3 / 7) < 0.02


def test_kernel_and_reference_are_bit_identical():
    net = random_multiplex(40, 2, 0.15, np.random.default_rng(7))
    states = np.random.default_rng(8).choice(
        [OPINION_A, OPINION_B, OPINION_U], size=40).astype(np.int8)
    config = Configuration.from_states(states)
    for p in (0.0, 0.3, 1.0):
        params = SimulationParams(q=4, p=p, mcs_budget=30, master_seed=11)
        t_kernel = run(net, config, params, engine="kernel")
        t_ref = run(net, config, params, engine="reference")
        assert np.array_equal(t_kernel, t_ref)


def test_run_is_deterministic():
    net = random_multiplex(60, 2, 0.1, np.random.default_rng(9))
    config = Configuration.all_of(60, OPINION_A)
    params = SimulationParams(q=4, p=0.1, mcs_budget=40, master_seed=123)
    assert np.array_equal(run(net, config, params), run(net, config, params))


def test_run_does_not_mutate_initial_configuration():
    net = random_multiplex(30, 2, 0.2, np.random.default_rng(10))
    config = Configuration.all_of(30, OPINION_A)
    run(net, config, SimulationParams(q=4, p=0.5, mcs_budget=20, master_seed=1))
    assert config.counts() == (30, 0, 0)


def test_observer_receives_every_mcs():
    net = _two_node_net()
    config = Configuration.all_of(2, OPINION_U)
    seen = []
    run(net, config, SimulationParams(q=2, p=0.5, mcs_budget=7, master_seed=2),
        observer=lambda mcs, a, b, u: seen.append((mcs, a + b + u)))
    assert [m for m, _ in seen] == list(range(8))
    assert all(abs(total - 1.0) < 1e-12 for _, total in seen)


def test_a_b_relabeling_symmetry():
    # final outcomes are bimodal at these parameters, so the ensembles need
    # to be large for a 3-sigma comparison to be meaningful
    net = random_multiplex(100, 2, 0.08, np.random.default_rng(11))
    rng = np.random.default_rng(12)
    states = np.where(rng.random(100) < 0.3, OPINION_A, OPINION_U).astype(np.int8)
    swapped = np.where(states == OPINION_A, OPINION_B, states).astype(np.int8)
    finals_a, finals_b = [], []
    for r in range(200):
        pa = SimulationParams(q=4, p=0.05, mcs_budget=150, master_seed=1000 + r)
        pb = SimulationParams(q=4, p=0.05, mcs_budget=150, master_seed=500000 + r)
        finals_a.append(run(net, Configuration.from_states(states), pa)[-1, 0])
        finals_b.append(run(net, Configuration.from_states(swapped), pb)[-1, 1])
    finals_a, finals_b = np.array(finals_a), np.array(finals_b)
    se = np.hypot(finals_a.std(ddof=1) / np.sqrt(len(finals_a)),
                  finals_b.std(ddof=1) / np.sqrt(len(finals_b)))
    assert abs(finals_a.mean() - finals_b.mean()) <= 3 * max(se, 1e-9)


def test_mean_field_consistency_on_complete_graph():
    # stationary c_A on a complete graph tracks the ODE prediction
    from qvoterlab.meanfield import MfaParams, MfaState, integrate

    n = 200
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    net = build(n, [edges])
    p = 0.3
    ode = integrate(MfaState(1.0, 0.0), MfaParams(p=p, q=2, layer_count=1)).final
    finals = []
    for r in range(4):
        traj = run(net, Configuration.all_of(n, OPINION_A),
                   SimulationParams(q=2, p=p, mcs_budget=800, master_seed=300 + r))
        finals.append(traj[500:, 0].mean())
    assert abs(np.mean(finals) - ode.c_a) <= 0.05


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        SimulationParams(q=0, p=0.5).validate()
    with pytest.raises(ValueError):
        SimulationParams(q=4, p=1.5).validate()
    with pytest.raises(ValueError):
        SimulationParams(q=4, p=0.5, mcs_budget=-1).validate()
