"""Compiled trial loop for Monte Carlo curves.

Mirrors ``repair.run_sequence`` + ``policies.select_spare`` step for step,
including the SplitMix64 stream layout, so a trial computed here equals the
same trial replayed through the reference path.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .network import SpareNetwork
from .policies import Policy, PolicyKind, TieBreak

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S32 = np.uint64(32)

_INF = 1 << 30

# stage codes: 0 none, 1 PE (max essentiality), 2 PP (min spare degree)
POLICY_STAGES = {
    PolicyKind.RANDOM: (0, 0),
    PolicyKind.PE: (1, 0),
    PolicyKind.PP: (2, 0),
    PolicyKind.PE_PP: (1, 2),
    PolicyKind.PP_PE: (2, 1),
}


@njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def _derive(seed, k):
    return _mix64(_mix64(seed) ^ (np.uint64(k) * _GOLDEN + _GOLDEN))


@njit(cache=True, nogil=True)
def _randbelow(state, n):
    state = state + _GOLDEN
    x = _mix64(state)
    return state, np.int64(((x >> _S32) * np.uint64(n)) >> _S32)


@njit(cache=True, nogil=True)
def simulate_trials(
    n_units, n_spares, u_ptr, u_sp, s_ptr, s_un,
    stage1, stage2, lowest, exclude, master_seed, start, stop, f_max,
):
    """Survival time of trials ``start..stop-1``, plus decision and tie counts."""
    out = np.empty(stop - start, dtype=np.int32)
    deg0 = np.empty(n_units, dtype=np.int64)
    for u in range(n_units):
        deg0[u] = u_ptr[u + 1] - u_ptr[u]
    sdeg = np.empty(n_spares, dtype=np.int64)
    for s in range(n_spares):
        sdeg[s] = s_ptr[s + 1] - s_ptr[s]
    deg = np.empty(n_units, dtype=np.int64)
    consumed = np.zeros(n_spares, dtype=np.bool_)
    faults = np.empty(max(f_max, 1), dtype=np.int64)
    surv = np.empty(max(n_spares, 1), dtype=np.int64)
    score = np.empty(max(n_spares, 1), dtype=np.int64)
    decisions = 0
    ties = 0

    for t in range(start, stop):
        ts = _derive(master_seed, t)
        fs = _derive(ts, 0)
        rs = _derive(ts, 1)
        for k in range(f_max):
            fs, faults[k] = _randbelow(fs, n_units)
        deg[:] = deg0
        consumed[:] = False
        T = f_max
        for k in range(f_max):
            u = faults[k]
            nsurv = 0
            for p in range(u_ptr[u], u_ptr[u + 1]):
                s = u_sp[p]
                if not consumed[s]:
                    surv[nsurv] = s
                    nsurv += 1
            if nsurv == 0:
                T = k
                break
            decisions += 1
            for stage_i in range(2):
                stage = stage1 if stage_i == 0 else stage2
                if stage == 0:
                    break
                best = _INF + 1
                for i in range(nsurv):
                    s = surv[i]
                    if stage == 2:
                        sc = sdeg[s]
                    else:
                        m = _INF
                        for q in range(s_ptr[s], s_ptr[s + 1]):
                            v = s_un[q]
                            if exclude and v == u:
                                continue
                            if deg[v] < m:
                                m = deg[v]
                        sc = -m
                    score[i] = sc
                    if sc < best:
                        best = sc
                n = 0
                for i in range(nsurv):
                    if score[i] == best:
                        surv[n] = surv[i]
                        n += 1
                nsurv = n
                if stage_i == 0 and nsurv > 1:
                    ties += 1
                if nsurv == 1:
                    break
            if nsurv == 1 or lowest:
                chosen = surv[0]
            else:
                rs, j = _randbelow(rs, nsurv)
                chosen = surv[j]
            consumed[chosen] = True
            for q in range(s_ptr[chosen], s_ptr[chosen + 1]):
                deg[s_un[q]] -= 1
        out[t - start] = T
    return out, decisions, ties


def csr_arrays(net: SpareNetwork):
    """Sorted CSR adjacency for both sides of the network."""
    u_ptr = np.zeros(net.n_units + 1, dtype=np.int64)
    s_ptr = np.zeros(net.n_spares + 1, dtype=np.int64)
    u_sp = []
    for u, adj in enumerate(net.unit_adj):
        u_sp.extend(sorted(adj))
        u_ptr[u + 1] = len(u_sp)
    s_un = []
    for s, adj in enumerate(net.spare_adj):
        s_un.extend(sorted(adj))
        s_ptr[s + 1] = len(s_un)
    return u_ptr, np.array(u_sp, dtype=np.int64), s_ptr, np.array(s_un, dtype=np.int64)


def run_trials(net: SpareNetwork, policy: Policy, seed: int, start: int, stop: int, f_max: int):
    stage1, stage2 = POLICY_STAGES[policy.kind]
    return simulate_trials(
        net.n_units, net.n_spares, *csr_arrays(net),
        stage1, stage2,
        policy.tiebreak is TieBreak.LOWEST_INDEX, policy.exclude_faulty,
        np.uint64(seed & ((1 << 64) - 1)), start, stop, f_max,
    )
