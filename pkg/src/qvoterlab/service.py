"""HTTP service wrapping the simulation engine.

Every CLI subcommand maps onto one endpoint; requests are pydantic models
whose defaults are the single source of resolved configuration, and every
response carries the fully resolved config plus named text artifacts (edge
files, CSV tables, JSON reports) that the client writes to disk. Handlers
are synchronous pure computation, so the service is deterministic given the
request (seeds included).
"""

from __future__ import annotations

import json

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, harness, meanfield
from .dynamics import Configuration, OPINION_A, OPINION_B, OPINION_U, SimulationParams, run
from .graphs import GraphError, read_edge_text, write_edge_text
from .harness import ExperimentSpec
from .scenarios import PRESETS, ScenarioError, ScenarioSpec, generate_scenario, preset
from .seeding import SeedingError, Strategy, apply_seeds, select_seeds
from . import rng as rngmod

app = FastAPI(title="qvoterlab", version=__version__)


class Artifact(BaseModel):
    name: str
    content: str


class RunResponse(BaseModel):
    resolved: dict
    artifacts: list[Artifact]


def _fail(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


# ---------------------------------------------------------------- scenario IO

class ScenarioParams(BaseModel):
    """Either a named preset or explicit generator parameters."""

    preset: str | None = None
    n: int = 1000
    layer_count: int = 2
    xi: float = 0.05
    rho: float = 0.9
    r: float = 1.0
    gamma: float = 2.5
    delta: int = 2
    max_degree: int = Field(25, alias="Delta")
    beta: float = 1.5
    s_min: int = 16
    s_max: int = 25

    model_config = {"populate_by_name": True}

    def to_spec(self) -> ScenarioSpec:
        if self.preset is not None:
            return preset(self.preset)
        return ScenarioSpec(
            name="custom", n=self.n, layer_count=self.layer_count, xi=self.xi,
            rho=self.rho, r=self.r, gamma=self.gamma, min_degree=self.delta,
            max_degree=self.max_degree, beta=self.beta, s_min=self.s_min,
            s_max=self.s_max,
        )


def _network_from(scenario: ScenarioParams, gen_seed: int,
                  edges_content: str | None):
    """Network either parsed from an uploaded edge file or freshly generated."""
    if edges_content is not None:
        net = read_edge_text(edges_content)
        return net, {"source": "edge-file", "n": net.n, "layer_count": net.layer_count}
    spec = scenario.to_spec()
    gen = generate_scenario(spec, np.random.default_rng(gen_seed))
    return gen.network, {"source": "generated", "scenario": spec.as_dict(),
                         "gen_seed": gen_seed, "report": gen.report}


# ------------------------------------------------------------------ endpoints

@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/presets")
def presets() -> dict:
    return {name: spec.as_dict() for name, spec in PRESETS.items()}


class GenerateRequest(BaseModel):
    scenario: ScenarioParams = ScenarioParams(preset="fortress-clan")
    seed: int = 0


@app.post("/generate", response_model=RunResponse)
def generate(req: GenerateRequest) -> RunResponse:
    try:
        spec = req.scenario.to_spec()
        gen = generate_scenario(spec, np.random.default_rng(req.seed))
    except (ScenarioError, GraphError) as exc:
        raise _fail(exc)
    resolved = {"command": "generate", "scenario": spec.as_dict(), "seed": req.seed}
    return RunResponse(resolved=resolved, artifacts=[
        Artifact(name="network.edges", content=write_edge_text(gen.network)),
        Artifact(name="generation_report.json",
                 content=json.dumps(gen.report, indent=2, sort_keys=True) + "\n"),
    ])


class SeedsRequest(BaseModel):
    scenario: ScenarioParams = ScenarioParams(preset="fortress-clan")
    gen_seed: int = 0
    edges_content: str | None = None
    strategy: str = "voterank"
    f: float = 0.05
    seed: int = 0   # RNG stream for the `random` strategy


@app.post("/seeds", response_model=RunResponse)
def seeds(req: SeedsRequest) -> RunResponse:
    try:
        net, source = _network_from(req.scenario, req.gen_seed, req.edges_content)
        plan = select_seeds(net, Strategy(kind=req.strategy), req.f,
                            np.random.default_rng(req.seed))
    except (ScenarioError, GraphError, SeedingError) as exc:
        raise _fail(exc)
    resolved = {"command": "seeds", "network": source, "strategy": req.strategy,
                "f": req.f, "seed": req.seed}
    payload = {"strategy": req.strategy, "f": req.f,
               "budget": len(plan.seed_set), "seeds": list(plan.seed_set)}
    return RunResponse(resolved=resolved, artifacts=[
        Artifact(name="seeds.json",
                 content=json.dumps(payload, indent=2, sort_keys=True) + "\n"),
    ])


class SimulateRequest(BaseModel):
    scenario: ScenarioParams = ScenarioParams(preset="fortress-clan")
    gen_seed: int = 0
    edges_content: str | None = None
    initial: str = "all-a"          # all-a | all-b | all-u | seeded
    strategy: str = "voterank"      # used when initial == "seeded"
    f: float = 0.05
    q: int = 4
    p: float = 0.0
    mcs: int = 1000
    master_seed: int = 0


@app.post("/simulate", response_model=RunResponse)
def simulate(req: SimulateRequest) -> RunResponse:
    try:
        net, source = _network_from(req.scenario, req.gen_seed, req.edges_content)
        if req.initial == "seeded":
            seed_rng = np.random.default_rng(
                rngmod.derive_seed(req.master_seed, rngmod.DOMAIN_SEEDS, 0, 0, 0))
            plan = select_seeds(net, Strategy(kind=req.strategy), req.f, seed_rng)
            config = apply_seeds(plan, net.n)
            strategy_label, f_label = req.strategy, req.f
        elif req.initial in ("all-a", "all-b", "all-u"):
            opinion = {"all-a": OPINION_A, "all-b": OPINION_B, "all-u": OPINION_U}[req.initial]
            config = Configuration.all_of(net.n, opinion)
            strategy_label, f_label = "none", 1.0 if req.initial == "all-a" else 0.0
        else:
            raise SeedingError(f"unknown initial state {req.initial!r}")
        params = SimulationParams(q=req.q, p=req.p, mcs_budget=req.mcs,
                                  master_seed=req.master_seed)
        traj = run(net, config, params)
    except (ScenarioError, GraphError, SeedingError, ValueError) as exc:
        raise _fail(exc)
    scenario_label = (req.scenario.preset or "custom") if req.edges_content is None else "edge-file"
    rows = ((scenario_label, strategy_label, f_label, req.p, 0, mcs,
             float(traj[mcs, 0]), float(traj[mcs, 1]), float(traj[mcs, 2]))
            for mcs in range(len(traj)))
    resolved = {"command": "simulate", "network": source, "initial": req.initial,
                "strategy": strategy_label, "f": f_label, "q": req.q, "p": req.p,
                "mcs": req.mcs, "master_seed": req.master_seed}
    return RunResponse(resolved=resolved, artifacts=[
        Artifact(name="trajectory.csv", content=harness.rows_to_csv_text(rows)),
    ])


class MfaScanRequest(BaseModel):
    q: int = 4
    layer_count: int = Field(2, alias="L")
    p_min: float = 0.0
    p_max: float = 0.3
    p_step: float = 0.005
    initial_c_a: float = 1.0
    initial_c_b: float = 0.0
    dt: float = 0.01
    t_max: float = 500.0
    tol: float = 1e-10
    hysteresis: bool = False

    model_config = {"populate_by_name": True}


@app.post("/mfa/scan", response_model=RunResponse)
def mfa_scan(req: MfaScanRequest) -> RunResponse:
    if req.p_step <= 0 or req.p_max < req.p_min:
        raise _fail(ValueError("need p_step > 0 and p_max >= p_min"))
    grid = np.arange(req.p_min, req.p_max + req.p_step / 2, req.p_step)
    try:
        result = meanfield.stationary_scan(
            grid, req.q, req.layer_count,
            meanfield.MfaState(req.initial_c_a, req.initial_c_b),
            dt=req.dt, t_max=req.t_max, tol=req.tol, hysteresis=req.hysteresis)
    except ValueError as exc:
        raise _fail(exc)
    resolved = req.model_dump() | {"command": "mfa-scan"}
    summary = {"critical_point": result.critical_point, "max_jump": result.max_jump,
               "unconverged": [pt.p for pt in result.points if not pt.converged]}
    return RunResponse(resolved=resolved, artifacts=[
        Artifact(name="mfa_scan.csv", content="\n".join(result.csv_rows()) + "\n"),
        Artifact(name="mfa_scan_summary.json",
                 content=json.dumps(summary, indent=2, sort_keys=True) + "\n"),
    ])


class MfaPortraitRequest(BaseModel):
    q: int = 4
    layer_count: int = Field(2, alias="L")
    p: float = 0.15
    grid_resolution: int = 10
    dt: float = 0.01
    t_max: float = 500.0
    tol: float = 1e-10

    model_config = {"populate_by_name": True}


@app.post("/mfa/portrait", response_model=RunResponse)
def mfa_portrait(req: MfaPortraitRequest) -> RunResponse:
    try:
        params = meanfield.MfaParams(p=req.p, q=req.q, layer_count=req.layer_count,
                                     dt=req.dt, t_max=req.t_max, tol=req.tol)
        result = meanfield.phase_portrait(req.grid_resolution, params)
    except ValueError as exc:
        raise _fail(exc)
    resolved = req.model_dump() | {"command": "mfa-portrait"}
    attractors = [{"id": i, "c_a": float(a), "c_b": float(b), "label": lab}
                  for i, ((a, b), lab) in enumerate(zip(result.attractors, result.labels))]
    return RunResponse(resolved=resolved, artifacts=[
        Artifact(name="mfa_portrait.csv", content="\n".join(result.csv_rows()) + "\n"),
        Artifact(name="mfa_attractors.json",
                 content=json.dumps(attractors, indent=2, sort_keys=True) + "\n"),
    ])


class Phase1Request(BaseModel):
    scenarios: list[str] = list(PRESETS)
    p_values: list[float] = [0.0, 0.02, 0.04, 0.06, 0.08, 0.10, 0.12]
    realizations: int = 20
    mcs: int = 1000
    q: int = 4
    master_seed: int = 0
    workers: int = 1
    resample_network: bool = False
    format: str = "csv"


@app.post("/phase1", response_model=RunResponse)
def phase1(req: Phase1Request) -> RunResponse:
    try:
        spec = ExperimentSpec(
            scenarios=tuple(req.scenarios), p_values=tuple(req.p_values),
            realizations=req.realizations, mcs_budget=req.mcs, q=req.q,
            master_seed=req.master_seed, workers=req.workers,
            resample_network=req.resample_network)
        result = harness.run_phase1(spec)
    except (ScenarioError, ValueError) as exc:
        raise _fail(exc)
    resolved = req.model_dump() | {"command": "phase1"}
    rows_name, rows_text = _format_rows(result, req.format)
    return RunResponse(resolved=resolved, artifacts=[
        Artifact(name=rows_name, content=rows_text),
        Artifact(name="summary.json",
                 content=harness.summary_to_json_text(result.summary)),
    ])


class Phase2Request(BaseModel):
    scenarios: list[str] = list(PRESETS)
    strategies: list[str] = ["random", "degree", "pagerank", "voterank", "kshell", "cim"]
    budgets: list[float] = [0.03, 0.05, 0.10]
    p_values: list[float] = [0.0, 0.03, 0.06]
    realizations: int = 50
    mcs: int = 1000
    q: int = 4
    master_seed: int = 0
    workers: int = 1
    resample_network: bool = False
    format: str = "csv"


@app.post("/phase2", response_model=RunResponse)
def phase2(req: Phase2Request) -> RunResponse:
    try:
        spec = ExperimentSpec(
            scenarios=tuple(req.scenarios), strategies=tuple(req.strategies),
            budgets=tuple(req.budgets), p_values=tuple(req.p_values),
            realizations=req.realizations, mcs_budget=req.mcs, q=req.q,
            master_seed=req.master_seed, workers=req.workers,
            resample_network=req.resample_network)
        result = harness.run_phase2(spec)
    except (ScenarioError, SeedingError, ValueError) as exc:
        raise _fail(exc)
    resolved = req.model_dump() | {"command": "phase2"}
    rows_name, rows_text = _format_rows(result, req.format)
    return RunResponse(resolved=resolved, artifacts=[
        Artifact(name=rows_name, content=rows_text),
        Artifact(name="summary.json",
                 content=harness.summary_to_json_text(result.summary)),
        Artifact(name="seed_sets.json",
                 content=json.dumps(result.seed_plans, indent=2, sort_keys=True) + "\n"),
    ])


def _format_rows(result, fmt: str) -> tuple[str, str]:
    if fmt == "jsonl":
        return "rows.jsonl", harness.rows_to_jsonl_text(result.iter_rows())
    if fmt == "csv":
        return "rows.csv", harness.rows_to_csv_text(result.iter_rows())
    raise _fail(ValueError(f"unknown format {fmt!r}"))


class SummarizeRequest(BaseModel):
    csv: str


@app.post("/summarize", response_model=RunResponse)
def summarize_rows(req: SummarizeRequest) -> RunResponse:
    try:
        rows = harness.parse_rows_csv(req.csv)
    except ValueError as exc:
        raise _fail(exc)
    summary = harness.summarize(rows)
    return RunResponse(resolved={"command": "summarize", "rows": len(rows)},
                       artifacts=[Artifact(name="summary.json",
                                           content=harness.summary_to_json_text(summary))])
