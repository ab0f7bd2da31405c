"""Acceptance suite: every release criterion at its stated tolerance.

Each test prints one pass/fail line (visible with `pytest -v -s`); the test
status itself is the criterion verdict. The heavy Monte Carlo fixtures are
shared across criteria and run once per session with a fixed master seed.

Known red: `test_criterion_seeding_cim_near_random` encodes the CIM-vs-Random
tolerance exactly as specified; on ABCD-style topologies the whole-clique
seeding converts its own communities, which puts CIM above Random by far more
than 2 pooled standard errors. See README.md for the analysis.
"""

import itertools
import subprocess
import sys

import numpy as np
import pytest

from qvoterlab.dynamics import (
    Configuration,
    OPINION_A,
    SimulationParams,
    elementary_update,
    run,
)
from qvoterlab.graphs import aggregate, build
from qvoterlab.harness import ExperimentSpec, run_phase1, run_phase2
from qvoterlab.meanfield import MfaParams, MfaState, integrate, phase_portrait, stationary_scan
from qvoterlab.rng import Xoshiro256PP
from qvoterlab.scenarios import PRESETS, generate_scenario, preset
from qvoterlab.seeding import Strategy, core_numbers, maximal_cliques, select_seeds

from conftest import random_multiplex
from test_seeding import (
    _adjacency,
    brute_force_core_numbers,
    brute_force_maximal_cliques,
)

MASTER_SEED = 20240801
ALL_PRESETS = ("fortress-chaos", "fortress-elite", "fortress-clan",
               "open-chaos", "open-elite", "open-clan")
ALL_STRATEGIES = ("random", "degree", "pagerank", "voterank", "kshell", "cim")


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'} | {detail}")


# ----------------------------------------------------------- shared fixtures

@pytest.fixture(scope="session")
def phase1_result():
    spec = ExperimentSpec(
        scenarios=ALL_PRESETS,
        p_values=(0.0, 0.02, 0.04, 0.06, 0.08, 0.10, 0.12),
        realizations=20, mcs_budget=1000, q=4, master_seed=MASTER_SEED)
    return run_phase1(spec)


@pytest.fixture(scope="session")
def phase2_result():
    spec = ExperimentSpec(
        scenarios=("fortress-chaos", "fortress-clan", "open-clan"),
        strategies=ALL_STRATEGIES, budgets=(0.05,), p_values=(0.0,),
        realizations=30, mcs_budget=500, q=4, master_seed=MASTER_SEED)
    return run_phase2(spec)


@pytest.fixture(scope="session")
def fidelity_scenarios():
    out = {}
    for name in ALL_PRESETS:
        out[name] = [generate_scenario(preset(name), np.random.default_rng(seed))
                     for seed in range(10)]
    return out


def _cell_stats(result, scenario, strategy):
    for cell in result.summary["cells"]:
        if cell["scenario"] == scenario and cell["strategy"] == strategy:
            return cell["mean_final_c_a"], cell["se_final_c_a"]
    raise LookupError((scenario, strategy))


def _pooled_se(se1, se2):
    return float(np.hypot(se1, se2))


# ------------------------------------------------------------- MFA criteria

def test_criterion_mfa_critical_points():
    grid = np.arange(0.0, 0.3001, 0.005)
    scan4 = stationary_scan(grid, q=4, layer_count=2)
    q4_ok = abs(scan4.critical_point - 0.10) <= 0.02 and scan4.max_jump > 0.4

    scan2 = stationary_scan(grid, q=2, layer_count=2)
    c_as = [pt.c_a for pt in scan2.points]
    ps = [pt.p for pt in scan2.points]
    pre_steps = [abs(c_as[i + 1] - c_as[i]) for i in range(len(c_as) - 1)
                 if ps[i + 1] < scan2.critical_point]
    q2_ok = scan2.critical_point > 0.2 and max(pre_steps) <= 0.2

    ok = q4_ok and q2_ok
    _report("mfa-critical-points", ok,
            f"q=4: p_c={scan4.critical_point:.4f} jump={scan4.max_jump:.3f}; "
            f"q=2: p_c={scan2.critical_point:.4f} max pre-critical step={max(pre_steps):.4f}")
    assert q4_ok, "q=4 transition must sit at 0.10 +/- 0.02 with a > 0.4 jump"
    assert q2_ok, "q=2 threshold must exceed 0.2 with a gradual pre-critical decline"


def test_criterion_mfa_noise_equilibrium():
    traj = integrate(MfaState(1.0, 0.0), MfaParams(p=1.0, q=4, layer_count=2))
    final = np.array([traj.final.c_a, traj.final.c_b, traj.final.c_u])

    # independent oracle: stationary vector of the single-agent noise chain
    transition = np.array([
        [0.5, 0.0, 0.5],        # A -> {A, B, U}
        [0.0, 0.5, 0.5],        # B
        [1 / 3, 1 / 3, 1 / 3],  # U
    ])
    lhs = np.vstack([transition.T - np.eye(3), np.ones(3)])
    rhs = np.array([0.0, 0.0, 0.0, 1.0])
    stationary, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)

    dev_exact = np.abs(final - np.array([2 / 7, 2 / 7, 3 / 7])).max()
    dev_oracle = np.abs(final - stationary).max()
    ok = dev_exact < 1e-6 and dev_oracle < 1e-6
    _report("mfa-noise-equilibrium", ok,
            f"max deviation from (2/7, 2/7, 3/7): {dev_exact:.2e}; "
            f"vs stationary-vector oracle: {dev_oracle:.2e}")
    assert ok


def test_criterion_phase_portrait_collapse():
    above = phase_portrait(10, MfaParams(p=0.15, q=4, layer_count=2))
    ok_above = len(above.attractors) == 1
    counts = {}
    for p in (0.05, 0.07):
        below = phase_portrait(10, MfaParams(p=p, q=4, layer_count=2))
        counts[p] = len(below.attractors)
    ok_below = all(c >= 2 for c in counts.values())
    ok = ok_above and ok_below
    _report("phase-portrait-collapse", ok,
            f"clusters: p=0.15 -> {len(above.attractors)}; "
            f"p=0.05 -> {counts[0.05]}; p=0.07 -> {counts[0.07]}")
    assert ok_above, "supercritical portrait must collapse to a single attractor"
    assert ok_below, "subcritical portraits must stay multistable"


# --------------------------------------------------------- network dynamics

def test_criterion_network_phase_transition(phase1_result):
    cps = phase1_result.summary["critical_points"]
    detail = ", ".join(f"{name}: {cps[name]['p_c']:.3f}" for name in ALL_PRESETS)
    ok = all(0.05 <= cps[name]["p_c"] <= 0.08 for name in ALL_PRESETS)
    _report("network-phase-transition", ok, detail)
    assert ok, f"estimated p_c outside [0.05, 0.08]: {detail}"


def test_fortress_clan_decays_most_gradually(phase1_result):
    # high modularity with aligned layers confines consensus locally, so the
    # fortress-clan transition is the least abrupt of the six
    jumps = {name: cp["max_jump"]
             for name, cp in phase1_result.summary["critical_points"].items()}
    others = {k: v for k, v in jumps.items() if k != "fortress-clan"}
    ok = jumps["fortress-clan"] < min(others.values())
    _report("fortress-clan-gradual-decay", ok,
            f"max single-step drop per preset: " +
            ", ".join(f"{k}={v:.3f}" for k, v in sorted(jumps.items())))
    assert ok


def test_criterion_seeding_voterank_beats_cim(phase2_result):
    details = []
    ok = True
    for scen in ("fortress-chaos", "fortress-clan"):
        vr, vr_se = _cell_stats(phase2_result, scen, "voterank")
        cim, cim_se = _cell_stats(phase2_result, scen, "cim")
        margin = vr - cim
        threshold = 2 * _pooled_se(vr_se, cim_se)
        ok = ok and margin > threshold
        details.append(f"{scen}: VR-CIM={margin:.4f} (2SE={threshold:.4f})")
    _report("seeding-voterank-beats-cim", ok, "; ".join(details))
    assert ok


def test_criterion_seeding_voterank_beats_random(phase2_result):
    details = []
    ok = True
    for scen in ("fortress-chaos", "fortress-clan"):
        vr, vr_se = _cell_stats(phase2_result, scen, "voterank")
        rnd, rnd_se = _cell_stats(phase2_result, scen, "random")
        margin = vr - rnd
        threshold = 2 * _pooled_se(vr_se, rnd_se)
        ok = ok and margin > threshold
        details.append(f"{scen}: VR-RND={margin:.4f} (2SE={threshold:.4f})")
    _report("seeding-voterank-beats-random", ok, "; ".join(details))
    assert ok


def test_criterion_seeding_cim_near_random(phase2_result):
    # Encoded exactly as specified: CIM within 2 pooled SE of Random or
    # below. Documented red: whole-clique seeds convert their own
    # communities, leaving CIM above Random on these topologies.
    details = []
    ok = True
    for scen in ("fortress-chaos", "fortress-clan"):
        cim, cim_se = _cell_stats(phase2_result, scen, "cim")
        rnd, rnd_se = _cell_stats(phase2_result, scen, "random")
        gap = cim - rnd
        threshold = 2 * _pooled_se(cim_se, rnd_se)
        ok = ok and gap <= threshold
        details.append(f"{scen}: CIM-RND={gap:.4f} (2SE={threshold:.4f})")
    _report("seeding-cim-near-random", ok, "; ".join(details))
    assert ok, ("CIM exceeds Random by more than 2 pooled standard errors; "
                "whole-clique seed sets convert their own communities "
                "(see README.md, known red)")


def test_criterion_gap_compression(phase2_result):
    spreads = {}
    for scen in ("fortress-clan", "open-clan"):
        means = [_cell_stats(phase2_result, scen, s)[0] for s in ALL_STRATEGIES]
        spreads[scen] = max(means) - min(means)
    ok = spreads["open-clan"] < spreads["fortress-clan"]
    _report("gap-compression", ok,
            f"spread fortress-clan={spreads['fortress-clan']:.4f}, "
            f"open-clan={spreads['open-clan']:.4f}")
    assert ok


# ---------------------------------------------------------------- generator

def test_criterion_generator_fidelity(fidelity_scenarios):
    mixing_dev = 0.0
    spearman_dev = 0.0
    identical = True
    for name, gens in fidelity_scenarios.items():
        spec = PRESETS[name]
        for gen in gens:
            for stats in gen.report["layers"]:
                mixing_dev = max(mixing_dev, abs(stats["realized_mixing"] - spec.xi))
            if spec.rho == 0.9:
                spearman_dev = max(spearman_dev,
                                   abs(gen.report["spearman_rho"][0] - spec.rho))
            if spec.r == 1.0:
                identical = identical and gen.report["identical_partitions"][0]
    ok = mixing_dev <= 0.05 and spearman_dev <= 0.1 and identical
    _report("generator-fidelity", ok,
            f"max |mixing - xi| = {mixing_dev:.4f} (<= 0.05); "
            f"max |spearman - 0.9| = {spearman_dev:.4f} (<= 0.1); "
            f"r=1 partitions identical: {identical}")
    assert ok


# ---------------------------------------------------------- property suites

def test_criterion_count_conservation_million_updates():
    net = random_multiplex(50, 2, 0.12, np.random.default_rng(1))
    states = np.random.default_rng(2).choice([1, -1, 0], size=50).astype(np.int8)
    config = Configuration.from_states(states)
    params = SimulationParams(q=4, p=0.15, mcs_budget=0, master_seed=MASTER_SEED)
    rng = Xoshiro256PP(MASTER_SEED)
    violations = 0
    for step in range(1_000_000):
        elementary_update(net, config, params, rng)
        if config.n_a + config.n_b + config.n_u != 50:
            violations += 1
    recount = np.bincount(config.states + 1, minlength=3)
    consistent = (recount[2], recount[0], recount[1]) == config.counts()
    ok = violations == 0 and consistent
    _report("count-conservation", ok,
            f"violations over 10^6 updates: {violations}; final recount consistent: {consistent}")
    assert ok


def test_criterion_determinism_byte_identical_csv(tmp_path):
    from qvoterlab.cli import main

    args = ["phase2", "--presets", "fortress-chaos", "--strategies",
            "voterank,cim", "--f", "0.05", "--p", "0", "--realizations", "5",
            "--mcs", "50", "--seed", "1", "--workers", "1"]
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    same = (out1 / "rows.csv").read_bytes() == (out2 / "rows.csv").read_bytes()
    _report("determinism-byte-identical", same,
            "repeated seeded phase2 runs produce identical rows.csv")
    assert same


def test_criterion_relabeling_symmetry():
    net = random_multiplex(100, 2, 0.08, np.random.default_rng(11))
    rng = np.random.default_rng(12)
    states = np.where(rng.random(100) < 0.3, 1, 0).astype(np.int8)
    swapped = np.where(states == 1, -1, states).astype(np.int8)
    finals_a, finals_b = [], []
    for r in range(200):
        pa = SimulationParams(q=4, p=0.05, mcs_budget=150, master_seed=1000 + r)
        pb = SimulationParams(q=4, p=0.05, mcs_budget=150, master_seed=500000 + r)
        finals_a.append(run(net, Configuration.from_states(states), pa)[-1, 0])
        finals_b.append(run(net, Configuration.from_states(swapped), pb)[-1, 1])
    finals_a, finals_b = np.array(finals_a), np.array(finals_b)
    gap = abs(finals_a.mean() - finals_b.mean())
    se = np.hypot(finals_a.std(ddof=1) / np.sqrt(len(finals_a)),
                  finals_b.std(ddof=1) / np.sqrt(len(finals_b)))
    ok = gap <= 3 * se
    _report("relabeling-symmetry", ok, f"|mean_A - mean_B| = {gap:.4f}, 3SE = {3 * se:.4f}")
    assert ok


def test_criterion_independence_only_equilibrium():
    gen = generate_scenario(preset("open-chaos"), np.random.default_rng(3))
    config = Configuration.all_of(gen.network.n, OPINION_A)
    traj = run(gen.network, config,
               SimulationParams(q=4, p=1.0, mcs_budget=2000, master_seed=MASTER_SEED))
    avg = traj[1000:].mean(axis=0)
    target = np.array([2 / 7, 2 / 7, 3 / 7])
    dev = np.abs(avg - target).max()
    ok = dev <= 0.02
    _report("independence-only-equilibrium", ok,
            f"time-averaged concentrations deviate by {dev:.4f} (<= 0.02)")
    assert ok


def test_criterion_kshell_and_clique_oracles():
    rng = np.random.default_rng(4)
    checked = 0
    for _ in range(8):
        n = int(rng.integers(15, 51))
        net = random_multiplex(n, 2, 0.1, rng)
        agg = aggregate(net)
        brute = brute_force_core_numbers(_adjacency(agg))
        assert [int(x) for x in core_numbers(agg)] == [brute[v] for v in range(n)]
        checked += 1
    for _ in range(8):
        n = int(rng.integers(6, 15))
        net = random_multiplex(n, 2, 0.35, rng)
        agg = aggregate(net)
        assert set(maximal_cliques(agg, min_size=3)) == \
            brute_force_maximal_cliques(_adjacency(agg), 3)
        checked += 1
    _report("kshell-clique-oracles", True,
            f"{checked} random graphs matched the brute-force oracles")


def test_criterion_budget_exactness(fidelity_scenarios):
    rng = np.random.default_rng(5)
    checked = 0
    for name in ALL_PRESETS:
        net = fidelity_scenarios[name][0].network
        for kind in ALL_STRATEGIES:
            for f in (0.03, 0.05, 0.10):
                plan = select_seeds(net, Strategy(kind), f, rng)
                expected = int(np.ceil(f * net.n))
                assert len(plan.seed_set) == expected, (name, kind, f)
                assert len(set(plan.seed_set)) == expected
                checked += 1
    _report("budget-exactness", True,
            f"{checked} (preset, strategy, budget) combinations exact")


def test_criterion_desk_scale_exclusions_documented():
    # pixel-level figure replication and exact mABCD/CIM internals are out of
    # scope; the band and property criteria above stand in for them.
    _report("desk-scale-exclusions", True,
            "excluded: pixel-exact figures, exact mABCD/CIM internals")
