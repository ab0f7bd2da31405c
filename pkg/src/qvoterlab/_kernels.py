"""Hot loops for the Monte Carlo engine, compiled with numba.

The xoshiro256++ helpers mirror `rng.Xoshiro256PP` bit for bit; the tests
assert that a kernel run and the pure-Python reference engine produce
identical trajectories from the same seed. Kernels release the GIL so
independent realizations can run on a thread pool.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U64 = np.uint64
_DOUBLE_SCALE = 1.0 / 9007199254740992.0  # 2^-53


@njit(nogil=True, cache=True, inline="always")
def _rotl(x, k):
    return _U64((x << k) | (x >> _U64(64 - k)))


@njit(nogil=True, cache=True, inline="always")
def _xo_next(s):
    x = _U64(s[0] + s[3])
    result = _U64(_rotl(x, _U64(23)) + s[0])
    t = _U64(s[1] << _U64(17))
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], _U64(45))
    return result


@njit(nogil=True, cache=True, inline="always")
def _xo_random(s):
    return (_xo_next(s) >> _U64(11)) * _DOUBLE_SCALE


@njit(nogil=True, cache=True, inline="always")
def _xo_below(s, bound):
    return np.int64(((_xo_next(s) >> _U64(32)) * _U64(bound)) >> _U64(32))


@njit(nogil=True, cache=True)
def run_chain(offsets, neigh, n_layers, n, states, counts, p, q, n_mcs, out, rstate):
    """Random sequential updating; concentrations recorded once per MCS.

    states: int8 in {+1 (A), -1 (B), 0 (U)}; counts: int64[3] = (n_A, n_B, n_U);
    out: int64[(n_mcs+1), 3]; rstate: uint64[4] xoshiro256++ state (mutated).
    """
    na, nb, nu = counts[0], counts[1], counts[2]
    out[0, 0] = na
    out[0, 1] = nb
    out[0, 2] = nu
    for step in range(n_mcs):
        for _ in range(n):
            i = _xo_below(rstate, n)
            old = states[i]
            new = old
            if _xo_random(rstate) < p:
                # independence: decided agents decay to U, undecided roam
                if old == 0:
                    u = _xo_random(rstate)
                    if u < 1.0 / 3.0:
                        new = 1
                    elif u < 2.0 / 3.0:
                        new = -1
                else:
                    if _xo_random(rstate) < 0.5:
                        new = 0
            else:
                # conformity: unanimous q-panel in every layer, all agreeing
                verdict = np.int8(0)
                ok = True
                for a in range(n_layers):
                    lo = offsets[a, i]
                    k = offsets[a, i + 1] - lo
                    if k == 0:
                        ok = False
                        break
                    c = states[neigh[lo + _xo_below(rstate, k)]]
                    if c == 0:
                        ok = False
                        break
                    for _j in range(q - 1):
                        if states[neigh[lo + _xo_below(rstate, k)]] != c:
                            ok = False
                            break
                    if not ok:
                        break
                    if a == 0:
                        verdict = c
                    elif c != verdict:
                        ok = False
                        break
                if ok and verdict != old:
                    new = verdict
            if new != old:
                if old == 1:
                    na -= 1
                elif old == -1:
                    nb -= 1
                else:
                    nu -= 1
                if new == 1:
                    na += 1
                elif new == -1:
                    nb += 1
                else:
                    nu += 1
                states[i] = new
        out[step + 1, 0] = na
        out[step + 1, 1] = nb
        out[step + 1, 2] = nu
    counts[0] = na
    counts[1] = nb
    counts[2] = nu
