"""3-state multilayer q-voter dynamics with random sequential updating.

Opinions live in {A, B, U}. Each elementary update targets one uniformly
random agent: with probability p it acts independently (decided agents decay
to U with probability 1/2; undecided agents pick A, B or U uniformly), and
otherwise it conforms only under unanimous pressure: a q-panel sampled with
replacement in every layer must be unanimous within each layer and agree
across layers. A layer where the target has no neighbors exerts no pressure,
which under the all-layers rule blocks conformity entirely.

`run` drives the compiled kernel; the module-level operations are the pure
Python reference with the identical draw sequence, so both engines produce
bit-identical trajectories from the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import MultiplexNetwork
from .rng import Xoshiro256PP

OPINION_A = 1
OPINION_B = -1
OPINION_U = 0

_NAMES = {OPINION_A: "A", OPINION_B: "B", OPINION_U: "U"}


def opinion_name(code: int) -> str:
    return _NAMES[int(code)]


@dataclass
class Configuration:
    """Per-node opinions plus running tallies (kept consistent on update)."""

    states: np.ndarray  # int8 in {+1, -1, 0}
    n_a: int
    n_b: int
    n_u: int

    @classmethod
    def from_states(cls, states: np.ndarray) -> "Configuration":
        states = np.asarray(states, dtype=np.int8)
        return cls(
            states=states,
            n_a=int((states == OPINION_A).sum()),
            n_b=int((states == OPINION_B).sum()),
            n_u=int((states == OPINION_U).sum()),
        )

    @classmethod
    def all_of(cls, n: int, opinion: int) -> "Configuration":
        return cls.from_states(np.full(n, opinion, dtype=np.int8))

    @property
    def n(self) -> int:
        return len(self.states)

    def counts(self) -> tuple[int, int, int]:
        return (self.n_a, self.n_b, self.n_u)

    def concentrations(self) -> tuple[float, float, float]:
        n = self.n
        return (self.n_a / n, self.n_b / n, self.n_u / n)

    def set_state(self, i: int, opinion: int) -> None:
        old = int(self.states[i])
        if old == opinion:
            return
        for code, delta in ((old, -1), (opinion, +1)):
            if code == OPINION_A:
                self.n_a += delta
            elif code == OPINION_B:
                self.n_b += delta
            else:
                self.n_u += delta
        self.states[i] = opinion

    def copy(self) -> "Configuration":
        return Configuration(self.states.copy(), self.n_a, self.n_b, self.n_u)


@dataclass(frozen=True)
class SimulationParams:
    """Dynamics parameters: panel size q, independence probability p,
    Monte Carlo step budget and the RNG seed of this run."""

    q: int = 4
    p: float = 0.0
    mcs_budget: int = 1000
    master_seed: int = 0

    def validate(self) -> None:
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.mcs_budget < 0:
            raise ValueError("mcs_budget must be >= 0")


def independence_transition(current: int, rng: Xoshiro256PP) -> int:
    """Noise response: decided agents decay to U with probability 1/2;
    an undecided agent moves to A, B or U with probability 1/3 each."""
    if current == OPINION_U:
        u = rng.random()
        if u < 1.0 / 3.0:
            return OPINION_A
        if u < 2.0 / 3.0:
            return OPINION_B
        return OPINION_U
    return OPINION_U if rng.random() < 0.5 else current


def panel_verdict(net: MultiplexNetwork, config: Configuration, i: int, q: int,
                  rng: Xoshiro256PP) -> int | None:
    """Unanimous cross-layer panel opinion, or None when pressure is absent.

    Per layer, q neighbors are sampled with replacement (a single neighbor
    may fill several slots); the layer verdict exists only if all q share one
    decided opinion. A verdict is returned only if every layer produced one
    and they all coincide. A zero-degree layer yields no verdict at all.
    """
    states = config.states
    verdict: int | None = None
    for a in range(net.layer_count):
        lo = int(net.offsets[a, i])
        k = int(net.offsets[a, i + 1]) - lo
        if k == 0:
            return None
        first = int(states[net.neighbors[lo + rng.below(k)]])
        if first == OPINION_U:
            return None
        for _ in range(q - 1):
            if int(states[net.neighbors[lo + rng.below(k)]]) != first:
                return None
        if a == 0:
            verdict = first
        elif first != verdict:
            return None
    return verdict


def elementary_update(net: MultiplexNetwork, config: Configuration,
                      params: SimulationParams, rng: Xoshiro256PP) -> int:
    """One elementary event; returns the updated node id."""
    i = rng.below(net.n)
    if rng.random() < params.p:
        config.set_state(i, independence_transition(int(config.states[i]), rng))
    else:
        verdict = panel_verdict(net, config, i, params.q, rng)
        if verdict is not None and verdict != int(config.states[i]):
            config.set_state(i, verdict)
    return i


def run(net: MultiplexNetwork, initial: Configuration, params: SimulationParams,
        observer=None, *, engine: str = "kernel") -> np.ndarray:
    """Execute mcs_budget MCS (N elementary updates each) from `initial`.

    Returns concentrations sampled at every MCS boundary, shape
    (mcs_budget + 1, 3) with columns (c_A, c_B, c_U); row 0 is the initial
    state. Deterministic given (network, initial, params.master_seed); the
    "reference" engine is the slow pure-Python twin of the compiled kernel.
    """
    params.validate()
    if len(initial.states) != net.n:
        raise ValueError("configuration size does not match network")
    counts_out = np.empty((params.mcs_budget + 1, 3), dtype=np.int64)

    if engine == "kernel":
        from ._kernels import run_chain

        states = initial.states.copy()
        counts = np.array(initial.counts(), dtype=np.int64)
        rstate = Xoshiro256PP(params.master_seed).state_array()
        run_chain(net.offsets, net.neighbors, net.layer_count, net.n, states,
                  counts, float(params.p), int(params.q),
                  int(params.mcs_budget), counts_out, rstate)
    elif engine == "reference":
        config = initial.copy()
        rng = Xoshiro256PP(params.master_seed)
        counts_out[0] = config.counts()
        for step in range(params.mcs_budget):
            for _ in range(net.n):
                elementary_update(net, config, params, rng)
            counts_out[step + 1] = config.counts()
    else:
        raise ValueError(f"unknown engine {engine!r}")

    traj = counts_out / float(net.n)
    if observer is not None:
        for mcs in range(params.mcs_budget + 1):
            observer(mcs, traj[mcs, 0], traj[mcs, 1], traj[mcs, 2])
    return traj
