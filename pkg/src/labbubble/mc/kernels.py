"""Session kernels for the batch-clearing simulator.

Two implementations with identical arithmetic: ``simulate_numba`` loops
session by session, ``simulate_numpy`` vectorises over sessions and loops
over agents in the same order so the per-session sums come out bit-equal.

Inputs (A assets, N agents, T periods):
    types      int64[N]      agent type codes below
    kappa, alpha, mean_div, alpha_f, gamma1, gamma2   float64[A]
    fv         float64[A, T+1]   FV_1..FV_{T+1}
    pi         float64[A, T]     noise buyer probability
    keys       uint64[2*A]       stream keys: side of asset a at 2a, quote at 2a+1
Outputs are documented on ``KernelOutput`` in oracle.py.
"""

import numpy as np

from ._backend import njit
from .rng import uniform, uniform_np

NOISE, DIRECTIONAL, MARKET_NEUTRAL, FUNDAMENTALIST, SPECULATOR = 0, 1, 2, 3, 4
ANCHOR_QUOTE_MEAN, ANCHOR_MID, ANCHOR_IMBALANCE = 0, 1, 2


def _alloc(S, T, A):
    shape = (S, T, A)
    return (np.zeros(shape, np.int64), np.zeros(shape, np.int64),
            np.zeros(shape), np.zeros(shape), np.zeros(shape), np.zeros(shape))


@njit(cache=True)
def simulate_numba(sessions, types, kappa, alpha, mean_div, alpha_f, gamma1, gamma2,
                   fv, pi, keys, funding, anchor_mode):
    A, T = pi.shape
    N = types.shape[0]
    S = sessions.shape[0]
    buyers = np.zeros((S, T, A), np.int64)
    sellers = np.zeros((S, T, A), np.int64)
    sum_bid = np.zeros((S, T, A))
    sum_ask = np.zeros((S, T, A))
    anchor_out = np.zeros((S, T, A))
    max_quote = np.zeros((S, T, A))
    min_cash = np.zeros(S)
    first_violation = np.zeros(S, np.int64)
    cash = np.empty(N)
    side1 = np.zeros(N, np.bool_)
    anchor = np.empty(A)
    belief = np.empty(A)
    for si in range(S):
        s = sessions[si]
        for j in range(N):
            cash[j] = funding
        lowest = funding
        for a in range(A):
            anchor[a] = fv[a, 0]
            belief[a] = fv[a, 0] + mean_div[a]
        for t in range(T):
            tt = np.uint64(t + 1)
            for a in range(A):
                f = fv[a, t]
                belief[a] = alpha_f[a] * belief[a] + (1.0 - alpha_f[a]) * anchor[a] - mean_div[a]
                e_now = gamma1[a] * anchor[a] + gamma2[a] * f
                e_next = gamma1[a] * e_now + gamma2[a] * fv[a, t + 1]
                fund_buys = belief[a] <= f
                spec_buys = e_next > e_now
                nb = 0
                ns = 0
                sb = 0.0
                ss = 0.0
                top = 0.0
                for j in range(N):
                    typ = types[j]
                    jj = np.uint64(j)
                    if typ == FUNDAMENTALIST:
                        buy = fund_buys
                    elif typ == SPECULATOR:
                        buy = spec_buys
                    elif a == 0 or typ == NOISE:
                        buy = uniform(keys[2 * a], s, tt, jj) < pi[a, t]
                        if a == 0:
                            side1[j] = buy
                    elif typ == DIRECTIONAL:
                        buy = side1[j]
                    else:
                        buy = not side1[j]
                    r = uniform(keys[2 * a + 1], s, tt, jj)
                    if typ == FUNDAMENTALIST:
                        lo = min(belief[a], f)
                        quote = lo + (max(belief[a], f) - lo) * r
                    elif typ == SPECULATOR:
                        lo = min(e_now, e_next)
                        quote = lo + (max(e_now, e_next) - lo) * r
                    else:
                        quote = (1.0 - alpha[a]) * (kappa[a] * f * r) + alpha[a] * anchor[a]
                    if quote > top:
                        top = quote
                    if buy:
                        nb += 1
                        sb += quote
                        cash[j] -= quote
                        if cash[j] < lowest:
                            lowest = cash[j]
                        if cash[j] < 0.0 and first_violation[si] == 0:
                            first_violation[si] = t + 1
                    else:
                        ns += 1
                        ss += quote
                buyers[si, t, a] = nb
                sellers[si, t, a] = ns
                sum_bid[si, t, a] = sb
                sum_ask[si, t, a] = ss
                max_quote[si, t, a] = top
                if nb > 0 and ns > 0:
                    if anchor_mode == ANCHOR_MID:
                        anchor[a] = 0.5 * (sb / ns + ss / nb)
                    elif anchor_mode == ANCHOR_IMBALANCE:
                        anchor[a] = (sb + ss) / N + (nb / ns - 1.0)
                    else:
                        anchor[a] = (sb + ss) / N
                anchor_out[si, t, a] = anchor[a]
        min_cash[si] = lowest
    return buyers, sellers, sum_bid, sum_ask, anchor_out, max_quote, min_cash, first_violation


def simulate_numpy(sessions, types, kappa, alpha, mean_div, alpha_f, gamma1, gamma2,
                   fv, pi, keys, funding, anchor_mode):
    A, T = pi.shape
    N = types.shape[0]
    S = sessions.shape[0]
    buyers, sellers, sum_bid, sum_ask, anchor_out, max_quote = _alloc(S, T, A)
    cash = np.full((N, S), float(funding))
    lowest = np.full(S, float(funding))
    first_violation = np.zeros(S, np.int64)
    side1 = np.zeros((N, S), bool)
    anchor = np.repeat(fv[:, :1], S, axis=1)
    belief = anchor + mean_div[:, None]
    for t in range(T):
        for a in range(A):
            f = fv[a, t]
            belief[a] = alpha_f[a] * belief[a] + (1.0 - alpha_f[a]) * anchor[a] - mean_div[a]
            e_now = gamma1[a] * anchor[a] + gamma2[a] * f
            e_next = gamma1[a] * e_now + gamma2[a] * fv[a, t + 1]
            fund_buys = belief[a] <= f
            spec_buys = e_next > e_now
            nb = np.zeros(S, np.int64)
            ns = np.zeros(S, np.int64)
            sb = np.zeros(S)
            ss = np.zeros(S)
            top = np.zeros(S)
            for j in range(N):
                typ = types[j]
                if typ == FUNDAMENTALIST:
                    buy = fund_buys
                elif typ == SPECULATOR:
                    buy = spec_buys
                elif a == 0 or typ == NOISE:
                    buy = uniform_np(keys[2 * a], sessions, t + 1, j) < pi[a, t]
                    if a == 0:
                        side1[j] = buy
                elif typ == DIRECTIONAL:
                    buy = side1[j]
                else:
                    buy = ~side1[j]
                r = uniform_np(keys[2 * a + 1], sessions, t + 1, j)
                if typ == FUNDAMENTALIST:
                    lo = np.minimum(belief[a], f)
                    quote = lo + (np.maximum(belief[a], f) - lo) * r
                elif typ == SPECULATOR:
                    lo = np.minimum(e_now, e_next)
                    quote = lo + (np.maximum(e_now, e_next) - lo) * r
                else:
                    quote = (1.0 - alpha[a]) * (kappa[a] * f * r) + alpha[a] * anchor[a]
                top = np.maximum(top, quote)
                nb += buy
                ns += ~buy
                sb = np.where(buy, sb + quote, sb)
                ss = np.where(buy, ss, ss + quote)
                cash[j] = np.where(buy, cash[j] - quote, cash[j])
                lowest = np.minimum(lowest, cash[j])
                newly = (cash[j] < 0.0) & (first_violation == 0)
                first_violation[newly] = t + 1
            buyers[:, t, a] = nb
            sellers[:, t, a] = ns
            sum_bid[:, t, a] = sb
            sum_ask[:, t, a] = ss
            max_quote[:, t, a] = top
            ok = (nb > 0) & (ns > 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                if anchor_mode == ANCHOR_MID:
                    new = 0.5 * (sb / ns + ss / nb)
                elif anchor_mode == ANCHOR_IMBALANCE:
                    new = (sb + ss) / N + (nb / ns - 1.0)
                else:
                    new = (sb + ss) / N
            anchor[a] = np.where(ok, new, anchor[a])
            anchor_out[:, t, a] = anchor[a]
    return buyers, sellers, sum_bid, sum_ask, anchor_out, max_quote, lowest, first_violation


KERNELS = {"numba": simulate_numba, "numpy": simulate_numpy}
