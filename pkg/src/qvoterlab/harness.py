"""Experiment orchestration: Phase I (baseline stability) and Phase II
(seeding effectiveness) grids with reproducible RNG streams.

One network instance is generated per scenario (randomness then enters only
through the dynamics and the `random` strategy); `resample_network=True`
switches to per-realization topologies. Every realization draws from its own
xoshiro stream derived from (master_seed, domain, cell indices, realization
index), so any grid cell reproduces in isolation. Output rows follow the
canonical order (cell, realization, mcs) regardless of worker scheduling.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .dynamics import Configuration, OPINION_A, SimulationParams, run
from .scenarios import GeneratedScenario, generate_scenario, preset
from .seeding import SeedPlan, Strategy, apply_seeds, select_seeds

CSV_HEADER = "scenario,strategy,f,p,realization,mcs,c_A,c_B,c_U"

_DOMAIN_PHASE1 = 3
_DOMAIN_PHASE2 = 4


@dataclass(frozen=True)
class ExperimentSpec:
    """Grid definition shared by both phases."""

    scenarios: tuple[str, ...] = tuple(
        ("fortress-chaos", "fortress-elite", "fortress-clan",
         "open-chaos", "open-elite", "open-clan"))
    p_values: tuple[float, ...] = (0.0, 0.03, 0.06)
    budgets: tuple[float, ...] = (0.03, 0.05, 0.10)
    strategies: tuple[str, ...] = ("random", "degree", "pagerank",
                                   "voterank", "kshell", "cim")
    realizations: int = 50
    mcs_budget: int = 1000
    q: int = 4
    master_seed: int = 0
    workers: int = 1
    resample_network: bool = False

    def validate(self) -> None:
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if not self.scenarios:
            raise ValueError("at least one scenario is required")
        for name in self.scenarios:
            preset(name)  # raises on unknown preset


@dataclass
class ResultRecord:
    """One realization: identifying cell plus its full trajectory."""

    scenario: str
    strategy: str
    f: float
    p: float
    realization: int
    trajectory: np.ndarray  # (mcs+1, 3) concentrations

    def rows(self):
        for mcs in range(len(self.trajectory)):
            c = self.trajectory[mcs]
            yield (self.scenario, self.strategy, self.f, self.p,
                   self.realization, mcs, float(c[0]), float(c[1]), float(c[2]))


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    records: list[ResultRecord]
    summary: dict
    seed_plans: dict = field(default_factory=dict)

    def iter_rows(self):
        for rec in self.records:
            yield from rec.rows()

    def row_count(self) -> int:
        return sum(len(rec.trajectory) for rec in self.records)


def _generate_networks(spec: ExperimentSpec) -> dict[tuple, GeneratedScenario]:
    """One network per scenario (or per scenario x realization when resampling)."""
    nets: dict[tuple, GeneratedScenario] = {}
    for s_idx, name in enumerate(spec.scenarios):
        scen = preset(name)
        if spec.resample_network:
            for r_idx in range(spec.realizations):
                seed = rngmod.derive_seed(spec.master_seed, rngmod.DOMAIN_NETWORK,
                                          s_idx, r_idx)
                nets[(s_idx, r_idx)] = generate_scenario(scen, np.random.default_rng(seed))
        else:
            seed = rngmod.derive_seed(spec.master_seed, rngmod.DOMAIN_NETWORK, s_idx)
            nets[(s_idx,)] = generate_scenario(scen, np.random.default_rng(seed))
    return nets


def _network_for(nets, spec: ExperimentSpec, s_idx: int, r_idx: int) -> GeneratedScenario:
    return nets[(s_idx, r_idx)] if spec.resample_network else nets[(s_idx,)]


def _run_tasks(tasks, workers: int) -> list[ResultRecord]:
    """Execute (record-key, net, initial, params) tasks, canonical order out."""
    def execute(task):
        key, net, initial, params = task
        traj = run(net, initial, params)
        return ResultRecord(*key, trajectory=traj)

    if workers <= 1:
        return [execute(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(execute, tasks))


def run_phase1(spec: ExperimentSpec) -> ExperimentResult:
    """Spontaneous consensus breakdown from the ordered all-A state.

    For every scenario and every p in the grid, runs `realizations`
    independent chains and records per-MCS concentrations. The summary holds
    mean final concentrations per (scenario, p) and the estimated critical
    noise p_c per scenario (largest-jump midpoint across the grid).
    """
    spec.validate()
    nets = _generate_networks(spec)
    tasks = []
    for s_idx, name in enumerate(spec.scenarios):
        for p_idx, p in enumerate(spec.p_values):
            for r_idx in range(spec.realizations):
                gen = _network_for(nets, spec, s_idx, r_idx)
                initial = Configuration.all_of(gen.network.n, OPINION_A)
                seed = rngmod.derive_seed(spec.master_seed, _DOMAIN_PHASE1,
                                          s_idx, p_idx, r_idx)
                params = SimulationParams(q=spec.q, p=float(p),
                                          mcs_budget=spec.mcs_budget,
                                          master_seed=seed)
                tasks.append(((name, "none", 1.0, float(p), r_idx),
                              gen.network, initial, params))
    records = _run_tasks(tasks, spec.workers)
    result = ExperimentResult(spec=spec, records=records, summary={})
    result.summary = summarize(result.iter_rows())
    return result


def run_phase2(spec: ExperimentSpec) -> ExperimentResult:
    """Seeding effectiveness from a globally undecided state.

    Full grid over scenarios x strategies x budgets x noise levels; each cell
    runs `realizations` chains from the seeded configuration.
    """
    spec.validate()
    nets = _generate_networks(spec)
    tasks = []
    seed_plans: dict[str, list[int]] = {}
    plan_cache: dict[tuple, SeedPlan] = {}
    for s_idx, name in enumerate(spec.scenarios):
        for strat_idx, kind in enumerate(spec.strategies):
            strategy = Strategy(kind=kind)
            for f_idx, f in enumerate(spec.budgets):
                for r_idx in range(spec.realizations):
                    gen = _network_for(nets, spec, s_idx, r_idx)
                    plan_key = (s_idx, strat_idx, f_idx,
                                r_idx if spec.resample_network else -1)
                    plan = plan_cache.get(plan_key)
                    if plan is None:
                        seed_rng = np.random.default_rng(rngmod.derive_seed(
                            spec.master_seed, rngmod.DOMAIN_SEEDS,
                            s_idx, strat_idx, f_idx,
                            r_idx if spec.resample_network else 0))
                        plan = select_seeds(gen.network, strategy, float(f), seed_rng)
                        plan_cache[plan_key] = plan
                        seed_plans[f"{name}|{kind}|{f!r}"] = list(plan.seed_set)
                    initial = apply_seeds(plan, gen.network.n)
                    for p_idx, p in enumerate(spec.p_values):
                        seed = rngmod.derive_seed(spec.master_seed, _DOMAIN_PHASE2,
                                                  s_idx, strat_idx, f_idx, p_idx, r_idx)
                        params = SimulationParams(q=spec.q, p=float(p),
                                                  mcs_budget=spec.mcs_budget,
                                                  master_seed=seed)
                        tasks.append(((name, kind, float(f), float(p), r_idx),
                                      gen.network, initial, params))
    # canonical cell order: (scenario, strategy, f, p, realization)
    tasks.sort(key=lambda t: (spec.scenarios.index(t[0][0]),
                              spec.strategies.index(t[0][1]),
                              t[0][2], t[0][3], t[0][4]))
    records = _run_tasks(tasks, spec.workers)
    result = ExperimentResult(spec=spec, records=records, summary={},
                              seed_plans=seed_plans)
    result.summary = summarize(result.iter_rows())
    return result


def summarize(rows) -> dict:
    """Aggregate result rows into per-cell statistics and rankings.

    Works on any iterable of row tuples (or an open CSV's parsed rows):
    mean/standard error of the final-MCS concentrations per cell, strategy
    rankings per (scenario, f, p), and the estimated critical point per
    scenario for baseline (strategy == "none") grids. Cells with unequal
    realization or step counts are flagged incomplete rather than rejected.
    """
    finals: dict[tuple, dict[int, tuple[float, float, float]]] = {}
    max_mcs: dict[tuple, int] = {}
    for row in rows:
        scenario, strategy, f, p, realization, mcs, c_a, c_b, c_u = row
        key = (scenario, strategy, float(f), float(p))
        cell = finals.setdefault(key, {})
        mcs = int(mcs)
        if mcs >= max_mcs.get(key, -1):
            max_mcs[key] = mcs
        prev = cell.get(int(realization))
        if prev is None or mcs >= prev[0]:
            cell[int(realization)] = (mcs, float(c_a), float(c_b), float(c_u))

    cells = []
    for key in sorted(finals):
        scenario, strategy, f, p = key
        per_real = finals[key]
        values = np.array([[v[1], v[2], v[3]] for _, v in sorted(per_real.items())])
        n_real = len(values)
        mean = values.mean(axis=0)
        if n_real > 1:
            se = (values.std(axis=0, ddof=1) / math.sqrt(n_real)).tolist()
        else:
            se = [None, None, None]
        cells.append({
            "scenario": scenario, "strategy": strategy, "f": f, "p": p,
            "realizations": n_real,
            "final_mcs": max_mcs[key],
            "mean_final_c_a": float(mean[0]),
            "mean_final_c_b": float(mean[1]),
            "mean_final_c_u": float(mean[2]),
            "se_final_c_a": se[0],
            "se_final_c_b": se[1],
            "se_final_c_u": se[2],
        })

    complete = (len({c["realizations"] for c in cells}) <= 1
                and len({c["final_mcs"] for c in cells}) <= 1)

    rankings: dict[str, list[dict]] = {}
    groups: dict[tuple, list[dict]] = {}
    for c in cells:
        if c["strategy"] == "none":
            continue
        groups.setdefault((c["scenario"], c["f"], c["p"]), []).append(c)
    for (scenario, f, p), group in sorted(groups.items()):
        ordered = sorted(group, key=lambda c: (-c["mean_final_c_a"], c["strategy"]))
        entries = []
        for c in ordered:
            better = sum(1 for o in group
                         if o["mean_final_c_a"] > c["mean_final_c_a"])
            entries.append({"strategy": c["strategy"],
                            "mean_final_c_a": c["mean_final_c_a"],
                            "rank": better + 1})
        rankings[f"{scenario}|f={f!r}|p={p!r}"] = entries

    critical_points: dict[str, dict] = {}
    baseline: dict[str, list[tuple[float, float]]] = {}
    for c in cells:
        if c["strategy"] == "none":
            baseline.setdefault(c["scenario"], []).append((c["p"], c["mean_final_c_a"]))
    for scenario, pts in sorted(baseline.items()):
        pts.sort()
        if len(pts) >= 2:
            ps = np.array([x[0] for x in pts])
            cas = np.array([x[1] for x in pts])
            jumps = np.abs(np.diff(cas))
            j = int(np.argmax(jumps))
            critical_points[scenario] = {
                "p_c": float((ps[j] + ps[j + 1]) / 2.0),
                "max_jump": float(jumps[j]),
            }

    return {
        "cells": cells,
        "rankings": rankings,
        "critical_points": critical_points,
        "complete": complete,
    }


def rows_to_csv(rows, fh) -> None:
    fh.write(CSV_HEADER + "\n")
    for row in rows:
        scenario, strategy, f, p, realization, mcs, c_a, c_b, c_u = row
        fh.write(f"{scenario},{strategy},{f!r},{p!r},{realization},{mcs},"
                 f"{c_a!r},{c_b!r},{c_u!r}\n")


def rows_to_csv_text(rows) -> str:
    buf = io.StringIO()
    rows_to_csv(rows, buf)
    return buf.getvalue()


def rows_to_jsonl_text(rows) -> str:
    keys = CSV_HEADER.split(",")
    buf = io.StringIO()
    for row in rows:
        buf.write(json.dumps(dict(zip(keys, row)), sort_keys=True) + "\n")
    return buf.getvalue()


def parse_rows_csv(text: str):
    """Parse CSV text produced by `rows_to_csv` back into row tuples."""
    lines = text.strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    out = []
    for line in lines[1:]:
        scenario, strategy, f, p, realization, mcs, c_a, c_b, c_u = line.split(",")
        out.append((scenario, strategy, float(f), float(p), int(realization),
                    int(mcs), float(c_a), float(c_b), float(c_u)))
    return out


def summary_to_json_text(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"
