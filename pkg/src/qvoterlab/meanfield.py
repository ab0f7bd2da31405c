"""Mean-field analysis of the multilayer 3-state q-voter model.

The concentrations (c_A, c_B, c_U) evolve under coupled ODEs in which the
probability of assembling a unanimous panel in all layers scales as
c^(q*L). Fixed-step RK4 integration locates stationary states; scans over
the noise level p expose the order/disorder transition, and simplex-grid
phase portraits expose the basins of attraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class MfaState:
    """Point on the concentration simplex; c_U is derived."""

    c_a: float
    c_b: float

    @property
    def c_u(self) -> float:
        return 1.0 - self.c_a - self.c_b

    def validate(self) -> None:
        if min(self.c_a, self.c_b, self.c_u) < -1e-12 or max(self.c_a, self.c_b) > 1 + 1e-12:
            raise ValueError(f"state off the simplex: ({self.c_a}, {self.c_b})")


@dataclass(frozen=True)
class MfaParams:
    p: float = 0.0
    q: int = 4
    layer_count: int = 2
    dt: float = 0.01
    t_max: float = 500.0
    tol: float = 1e-10

    def validate(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.dt <= 0 or self.tol <= 0 or self.t_max <= 0:
            raise ValueError("dt, t_max and tol must be positive")


def _deriv(c_a, c_b, p, exponent):
    """Right-hand side of the concentration ODEs (vectorized)."""
    c_u = 1.0 - c_a - c_b
    pa = c_a ** exponent   # unanimity probability for opinion A across layers
    pb = c_b ** exponent
    cp = 1.0 - p
    d_a = c_u * (p / 3.0 + cp * pa) + c_b * cp * pa - c_a * (p / 2.0) - c_a * cp * pb
    d_b = c_u * (p / 3.0 + cp * pb) + c_a * cp * pb - c_b * (p / 2.0) - c_b * cp * pa
    return d_a, d_b


def derivatives(state: MfaState, params: MfaParams) -> tuple[float, float]:
    """(dc_A/dt, dc_B/dt) at a state; dc_U/dt is minus their sum."""
    params.validate()
    d_a, d_b = _deriv(state.c_a, state.c_b, params.p, params.q * params.layer_count)
    return float(d_a), float(d_b)


def _integrate_batch(c_a, c_b, p, q, layer_count, dt, t_max, tol,
                     record_every: int = 0):
    """RK4 on a batch of starts; per-point stop when |derivative| < tol.

    Returns (c_a, c_b, converged, max_violation, path). `max_violation` is
    the largest pre-clip excursion outside the simplex seen along the way;
    `path` is the recorded trajectory (steps, m, 2) when record_every > 0.
    """
    c_a = np.atleast_1d(np.asarray(c_a, dtype=np.float64)).copy()
    c_b = np.atleast_1d(np.asarray(c_b, dtype=np.float64)).copy()
    p = np.broadcast_to(np.asarray(p, dtype=np.float64), c_a.shape).copy()
    e = q * layer_count
    n_steps = int(np.ceil(t_max / dt))
    active = np.ones(c_a.shape, dtype=bool)
    converged = np.zeros(c_a.shape, dtype=bool)
    max_violation = 0.0
    path = [] if record_every else None
    if record_every:
        path.append(np.stack([c_a.copy(), c_b.copy()], axis=-1))

    for step in range(n_steps):
        k1a, k1b = _deriv(c_a, c_b, p, e)
        norm = np.hypot(k1a, k1b)
        newly = active & (norm < tol)
        converged |= newly
        active &= ~newly
        if not active.any():
            break
        h = dt
        k2a, k2b = _deriv(c_a + 0.5 * h * k1a, c_b + 0.5 * h * k1b, p, e)
        k3a, k3b = _deriv(c_a + 0.5 * h * k2a, c_b + 0.5 * h * k2b, p, e)
        k4a, k4b = _deriv(c_a + h * k3a, c_b + h * k3b, p, e)
        da = (h / 6.0) * (k1a + 2 * k2a + 2 * k3a + k4a)
        db = (h / 6.0) * (k1b + 2 * k2b + 2 * k3b + k4b)
        na = np.where(active, c_a + da, c_a)
        nb = np.where(active, c_b + db, c_b)
        if not (np.isfinite(na).all() and np.isfinite(nb).all()):
            raise FloatingPointError("integration produced a non-finite value")
        nu = 1.0 - na - nb
        max_violation = max(
            max_violation,
            float(np.max(np.maximum(0.0, -na))),
            float(np.max(np.maximum(0.0, -nb))),
            float(np.max(np.maximum(0.0, -nu))),
            float(np.max(np.maximum(0.0, na - 1.0))),
            float(np.max(np.maximum(0.0, nb - 1.0))),
        )
        na = np.clip(na, 0.0, 1.0)
        nb = np.clip(nb, 0.0, 1.0)
        s = na + nb
        over = s > 1.0
        if over.any():
            na = np.where(over, na / s, na)
            nb = np.where(over, nb / s, nb)
        c_a, c_b = na, nb
        if record_every and (step + 1) % record_every == 0:
            path.append(np.stack([c_a.copy(), c_b.copy()], axis=-1))

    if active.any():
        k1a, k1b = _deriv(c_a, c_b, p, e)
        converged |= active & (np.hypot(k1a, k1b) < tol)
    path_arr = np.array(path) if record_every else None
    return c_a, c_b, converged, max_violation, path_arr


@dataclass
class MfaTrajectory:
    states: np.ndarray      # (m, 2): recorded (c_A, c_B) points
    final: MfaState
    converged: bool
    max_violation: float

    @property
    def final_state(self) -> tuple[float, float, float]:
        return (self.final.c_a, self.final.c_b, self.final.c_u)


def integrate(initial: MfaState, params: MfaParams, *, record_every: int = 1) -> MfaTrajectory:
    """Integrate a single start until stationarity or t_max."""
    params.validate()
    initial.validate()
    c_a, c_b, conv, viol, path = _integrate_batch(
        [initial.c_a], [initial.c_b], params.p, params.q, params.layer_count,
        params.dt, params.t_max, params.tol, record_every=record_every,
    )
    states = path[:, 0, :] if path is not None else np.array([[c_a[0], c_b[0]]])
    return MfaTrajectory(
        states=states,
        final=MfaState(float(c_a[0]), float(c_b[0])),
        converged=bool(conv[0]),
        max_violation=viol,
    )


@dataclass(frozen=True)
class ScanPoint:
    p: float
    c_a: float
    converged: bool


@dataclass
class ScanResult:
    points: list[ScanPoint]
    critical_point: float | None
    max_jump: float

    def csv_rows(self) -> list[str]:
        rows = ["p,c_A_stationary,converged"]
        for pt in self.points:
            rows.append(f"{pt.p!r},{pt.c_a!r},{str(pt.converged).lower()}")
        return rows


def estimate_critical_point(ps: np.ndarray, c_as: np.ndarray) -> tuple[float | None, float]:
    """Midpoint of the largest jump in c_A across the grid, and its size."""
    if len(ps) < 2:
        return None, 0.0
    jumps = np.abs(np.diff(c_as))
    j = int(np.argmax(jumps))
    return float((ps[j] + ps[j + 1]) / 2.0), float(jumps[j])


def stationary_scan(p_grid, q: int = 4, layer_count: int = 2,
                    initial: MfaState = MfaState(1.0, 0.0), *,
                    dt: float = 0.01, t_max: float = 500.0, tol: float = 1e-10,
                    hysteresis: bool = False) -> ScanResult:
    """Stationary c_A for each p on an ordered grid, from `initial`.

    With hysteresis=True each grid point starts from the previous stationary
    state instead of restarting from `initial`, which traces one branch of a
    discontinuous transition.
    """
    p_grid = np.asarray(list(p_grid), dtype=np.float64)
    points: list[ScanPoint] = []
    if hysteresis:
        state = (initial.c_a, initial.c_b)
        for p in p_grid:
            c_a, c_b, conv, _, _ = _integrate_batch(
                [state[0]], [state[1]], p, q, layer_count, dt, t_max, tol)
            state = (float(c_a[0]), float(c_b[0]))
            points.append(ScanPoint(float(p), state[0], bool(conv[0])))
    else:
        c_a0 = np.full(len(p_grid), initial.c_a)
        c_b0 = np.full(len(p_grid), initial.c_b)
        c_a, c_b, conv, _, _ = _integrate_batch(
            c_a0, c_b0, p_grid, q, layer_count, dt, t_max, tol)
        points = [ScanPoint(float(p), float(a), bool(c))
                  for p, a, c in zip(p_grid, c_a, conv)]
    pc, jump = estimate_critical_point(p_grid, np.array([pt.c_a for pt in points]))
    return ScanResult(points=points, critical_point=pc, max_jump=jump)


@dataclass
class PortraitResult:
    starts: np.ndarray        # (m, 2)
    ends: np.ndarray          # (m, 2)
    attractor_id: np.ndarray  # (m,)
    attractors: np.ndarray    # (k, 2) cluster representatives
    labels: list[str]         # per-attractor classification

    def csv_rows(self) -> list[str]:
        rows = ["start_cA,start_cB,end_cA,end_cB,attractor_id"]
        for s, e, aid in zip(self.starts, self.ends, self.attractor_id):
            rows.append(f"{s[0]!r},{s[1]!r},{e[0]!r},{e[1]!r},{int(aid)}")
        return rows


def _classify(c_a: float, c_b: float) -> str:
    if c_a - c_b > 0.05:
        return "consensus-a"
    if c_b - c_a > 0.05:
        return "consensus-b"
    return "noise-equilibrium"


def phase_portrait(grid_resolution: int, params: MfaParams, *,
                   cluster_radius: float = 1e-3) -> PortraitResult:
    """Integrate every simplex-grid start and cluster the terminal states."""
    params.validate()
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    axis = np.linspace(0.0, 1.0, grid_resolution)
    starts = [(a, b) for a in axis for b in axis if a + b <= 1.0 + 1e-12]
    starts = np.array(starts)
    c_a, c_b, _, _, _ = _integrate_batch(
        starts[:, 0], starts[:, 1], params.p, params.q, params.layer_count,
        params.dt, params.t_max, params.tol)
    ends = np.stack([c_a, c_b], axis=-1)

    reps: list[np.ndarray] = []
    ids = np.empty(len(ends), dtype=np.int64)
    for idx, pt in enumerate(ends):
        for cid, rep in enumerate(reps):
            if np.hypot(pt[0] - rep[0], pt[1] - rep[1]) < cluster_radius:
                ids[idx] = cid
                break
        else:
            reps.append(pt)
            ids[idx] = len(reps) - 1
    attractors = np.array(reps)
    labels = [_classify(a, b) for a, b in attractors]
    return PortraitResult(starts=starts, ends=ends, attractor_id=ids,
                          attractors=attractors, labels=labels)
