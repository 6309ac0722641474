"""Completability test for partial grids filled in row-major order.

Every row and column carries a lower estimate A (symbols it must end up
containing) and an upper estimate B (symbols it may end up containing); every
cell carries the set B_cell of symbols it may hold.  Rules tighten these sets
until nothing changes or a contradiction shows that the partial grid cannot be
completed.

The kernels are numba-compiled and work on int64 bitmasks.  Lines are indexed
0..r-1 for rows and r..r+c-1 for columns.  A profile is packed into an int64
vector, see ``pack_profile``.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from numba import njit

from .grid import EMPTY

UNCHANGED, CHANGED, CONTRADICTION = 0, 1, 2


class RuleResult(IntEnum):
    UNCHANGED = UNCHANGED
    CHANGED = CHANGED
    CONTRADICTION = CONTRADICTION


# dimension modes
BOUNDS, WINDOW, FREE = 0, 1, 2
RC, RR, CC = 0, 1, 2
# packed profile layout
P_R, P_C, P_V, P_REP_LO, P_REP_HI, P_VPLUS, P_DIMS = 0, 1, 2, 3, 4, 5, 6
NO_BOUND = 64

_PC16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.int64)


@njit(cache=True)
def popcount(x):
    return (_PC16[x & 0xFFFF] + _PC16[(x >> 16) & 0xFFFF]
            + _PC16[(x >> 32) & 0xFFFF] + _PC16[(x >> 48) & 0xFFFF])


@njit(cache=True)
def rule_full_content_k(LA, LB, line, cap):
    a = popcount(LA[line])
    b = popcount(LB[line])
    if a > cap or b < cap:
        return CONTRADICTION
    if a == cap and LB[line] != LA[line]:
        LB[line] = LA[line]
        return CHANGED
    if b == cap and LA[line] != LB[line]:
        LA[line] = LB[line]
        return CHANGED
    return UNCHANGED


@njit(cache=True)
def _merge(LA, LB, a, b, nAa, nBa, nAb, nBb):
    if (nAa & ~nBa) != 0 or (nAb & ~nBb) != 0:
        return CONTRADICTION
    res = UNCHANGED
    if nAa != LA[a] or nBa != LB[a] or nAb != LA[b] or nBb != LB[b]:
        res = CHANGED
    LA[a] = nAa
    LB[a] = nBa
    LA[b] = nAb
    LB[b] = nBb
    return res


@njit(cache=True)
def rule_pair_lower_k(LA, LB, a, b, cap_a, cap_b, hi):
    Aa = LA[a]
    Ba = LB[a]
    Ab = LA[b]
    Bb = LB[b]
    common = popcount(Aa & Ab)
    Xa = Ba & ~Aa & Ab
    Xb = Bb & ~Ab & Aa
    Y = Ba & ~Aa & ~Ab & Bb
    Za = Ba & ~Aa & ~Ab & ~Bb
    Zb = Bb & ~Ab & ~Aa & ~Ba
    fa = max(0, cap_a - popcount(Aa) - popcount(Za))
    fb = max(0, cap_b - popcount(Ab) - popcount(Zb))
    y = popcount(Y)
    lmin = common + max(0, fa + fb - y)
    if lmin > hi:
        return CONTRADICTION
    if lmin < hi:
        return UNCHANGED
    if y > fa + fb or (fa == 0 and fb == 0):
        Ba &= ~Xa
        Bb &= ~Xb
    elif fb == 0:
        Aa |= Y | Za
        Bb &= ~(Xb | Y)
    elif fa == 0:
        Ab |= Y | Zb
        Ba &= ~(Xa | Y)
    else:
        Aa |= Za
        Ab |= Zb
        if y == fa + fb:
            Ba &= ~Xa
            Bb &= ~Xb
    return _merge(LA, LB, a, b, Aa, Ba, Ab, Bb)


@njit(cache=True)
def rule_pair_upper_k(LA, LB, a, b, cap_a, cap_b, lo):
    Aa = LA[a]
    Ba = LB[a]
    Ab = LA[b]
    Bb = LB[b]
    common = popcount(Aa & Ab)
    Xa = Ba & ~Aa & Ab
    Xb = Bb & ~Ab & Aa
    Y = Ba & ~Aa & ~Ab & Bb
    Za = Ba & ~Aa & ~Ab & ~Bb
    Zb = Bb & ~Ab & ~Aa & ~Ba
    ka = cap_a - popcount(Aa)
    kb = cap_b - popcount(Ab)
    xa = popcount(Xa)
    xb = popcount(Xb)
    y = popcount(Y)
    sa = max(0, ka - xa)
    sb = max(0, kb - xb)
    lmax = common + min(ka, xa) + min(kb, xb) + min(y, min(sa, sb))
    if lmax < lo:
        return CONTRADICTION
    if lmax > lo:
        return UNCHANGED
    if sa == 0 and sb == 0:
        Ba &= ~(Y | Za)
        Bb &= ~(Y | Zb)
    elif sa >= y and sb >= y:
        # every common candidate is used; a side with no slack is filled from X alone
        if y > 0:
            Aa |= Y
            Ab |= Y
        if sa > 0:
            Aa |= Xa
        else:
            Ba &= ~Za
            if ka == xa:
                Aa |= Xa
        if sb > 0:
            Ab |= Xb
        else:
            Bb &= ~Zb
            if kb == xb:
                Ab |= Xb
    elif sa > sb:
        Aa |= Xa
        Bb &= ~Zb
    elif sb > sa:
        Ab |= Xb
        Ba &= ~Za
    else:
        Aa |= Xa
        Ab |= Xb
        Ba &= ~Za
        Bb &= ~Zb
    return _merge(LA, LB, a, b, Aa, Ba, Ab, Bb)


@njit(cache=True)
def rule_rc_empty_k(cells, LA, CB, L, r, c, i, j, lo, hi):
    Ri = L[i]
    Cj = L[r + j]
    k = popcount(Ri & Cj)
    res = UNCHANGED
    if k + 1 > hi:
        return CONTRADICTION
    if k + 1 == hi:
        strip_row = LA[r + j]
        strip_col = LA[i]
        for jj in range(c):
            if jj != j and cells[i * c + jj] == -1:
                nb = CB[i * c + jj] & ~strip_row
                if nb != CB[i * c + jj]:
                    CB[i * c + jj] = nb
                    res = CHANGED
        for ii in range(r):
            if ii != i and cells[ii * c + j] == -1:
                nb = CB[ii * c + j] & ~strip_col
                if nb != CB[ii * c + j]:
                    CB[ii * c + j] = nb
                    res = CHANGED
    lmax = k + (c - popcount(Ri)) + (r - popcount(Cj)) - 1
    if lmax < lo:
        return CONTRADICTION
    if lmax == lo:
        for jj in range(c):
            if jj != j and cells[i * c + jj] == -1:
                nb = CB[i * c + jj] & Cj
                if nb != CB[i * c + jj]:
                    CB[i * c + jj] = nb
                    res = CHANGED
        for ii in range(r):
            if ii != i and cells[ii * c + j] == -1:
                nb = CB[ii * c + j] & Ri
                if nb != CB[ii * c + j]:
                    CB[ii * c + j] = nb
                    res = CHANGED
    return res


@njit(cache=True)
def rule_cells_k(cells, LA, LB, CB, L, r, c):
    res = UNCHANGED
    for i in range(r):
        for j in range(c):
            p = i * c + j
            if cells[p] == -1:
                nb = CB[p] & (LB[i] & ~L[i]) & (LB[r + j] & ~L[r + j])
                if nb == 0:
                    return CONTRADICTION
                if nb != CB[p]:
                    CB[p] = nb
                    res = CHANGED
    for i in range(r):
        u = 0
        for j in range(c):
            u |= CB[i * c + j]
        nb = LB[i] & u
        if nb != LB[i]:
            if LA[i] & ~nb:
                return CONTRADICTION
            LB[i] = nb
            res = CHANGED
    for j in range(c):
        u = 0
        for i in range(r):
            u |= CB[i * c + j]
        nb = LB[r + j] & u
        if nb != LB[r + j]:
            if LA[r + j] & ~nb:
                return CONTRADICTION
            LB[r + j] = nb
            res = CHANGED
    return res


@njit(cache=True)
def _line_complete(cells, r, c, line):
    if line < r:
        for j in range(c):
            if cells[line * c + j] == -1:
                return False
        return True
    j = line - r
    for i in range(r):
        if cells[i * c + j] == -1:
            return False
    return True


@njit(cache=True)
def _pair_lines(dim, idx, r, c):
    # idx enumerates pairs of the dimension; returns (line_a, line_b, cap_a, cap_b)
    if dim == RC:
        i = idx // c
        j = idx % c
        return i, r + j, c, r
    n = r if dim == RR else c
    off = 0 if dim == RR else r
    cap = c if dim == RR else r
    a = 0
    while idx >= n - 1 - a:
        idx -= n - 1 - a
        a += 1
    return off + a, off + a + 1 + idx, cap, cap


@njit(cache=True)
def _num_pairs(dim, r, c):
    if dim == RC:
        return r * c
    n = r if dim == RR else c
    return n * (n - 1) // 2


@njit(cache=True)
def init_estimates_k(cells, k, prof, LA, LB, CB, L, bounds):
    r = prof[P_R]
    c = prof[P_C]
    v = prof[P_V]
    rep_lo = prof[P_REP_LO]
    rep_hi = prof[P_REP_HI]
    v_plus = prof[P_VPLUS]
    counts = np.zeros(v, dtype=np.int64)
    vmax = -1
    for i in range(r + c):
        L[i] = 0
    for i in range(r):
        for j in range(c):
            x = cells[i * c + j]
            if x != -1:
                counts[x] += 1
                if x > vmax:
                    vmax = x
                L[i] |= 1 << x
                L[r + j] |= 1 << x
    vmay = 0
    if rep_lo == rep_hi:
        for x in range(v):
            if counts[x] < rep_hi:
                vmay |= 1 << x
    else:
        n_hi = 0
        for x in range(v):
            if counts[x] >= rep_hi:
                n_hi += 1
        limit = rep_lo if n_hi < v_plus else rep_lo - 1
        for x in range(v):
            if counts[x] <= limit:
                vmay |= 1 << x
    top = min(vmax + 1, v - 1)
    vnext = vmay & ((1 << (top + 1)) - 1)
    for line in range(r + c):
        LA[line] = L[line]
        if _line_complete(cells, r, c, line):
            LB[line] = L[line]
        else:
            LB[line] = L[line] | vmay
    for i in range(r):
        for j in range(c):
            p = i * c + j
            x = cells[p]
            if x != -1:
                CB[p] = 1 << x
            elif p == k:
                CB[p] = vnext & ~L[i] & ~L[r + j]
            else:
                CB[p] = vmay & ~L[i] & ~L[r + j]
    for d in range(3):
        mode = prof[P_DIMS + 4 * d]
        lo = prof[P_DIMS + 4 * d + 1]
        hi = prof[P_DIMS + 4 * d + 2]
        w = prof[P_DIMS + 4 * d + 3]
        if mode == WINDOW:
            mn = NO_BOUND
            mx = -1
            for idx in range(_num_pairs(d, r, c)):
                la, lb, ca, cb = _pair_lines(d, idx, r, c)
                if _line_complete(cells, r, c, la) and _line_complete(cells, r, c, lb):
                    s = popcount(L[la] & L[lb])
                    mn = min(mn, s)
                    mx = max(mx, s)
            if mx >= 0:
                lo = max(0, mx - (w - 1))
                hi = mn + (w - 1)
            else:
                lo = 0
                hi = NO_BOUND
        bounds[2 * d] = lo
        bounds[2 * d + 1] = hi


@njit(cache=True)
def fixpoint_k(cells, prof, LA, LB, CB, L, bounds):
    r = prof[P_R]
    c = prof[P_C]
    for d in range(3):
        if prof[P_DIMS + 4 * d] != FREE and bounds[2 * d] > bounds[2 * d + 1]:
            return CONTRADICTION
    changed = True
    while changed:
        changed = False
        for line in range(r + c):
            cap = c if line < r else r
            res = rule_full_content_k(LA, LB, line, cap)
            if res == CONTRADICTION:
                return CONTRADICTION
            if res == CHANGED:
                changed = True
        if prof[P_DIMS] != FREE:
            for i in range(r):
                for j in range(c):
                    if cells[i * c + j] == -1:
                        res = rule_rc_empty_k(cells, LA, CB, L, r, c, i, j, bounds[0], bounds[1])
                        if res == CONTRADICTION:
                            return CONTRADICTION
                        if res == CHANGED:
                            changed = True
        for d in range(3):
            if prof[P_DIMS + 4 * d] == FREE:
                continue
            lo = bounds[2 * d]
            hi = bounds[2 * d + 1]
            for idx in range(_num_pairs(d, r, c)):
                la, lb, ca, cb = _pair_lines(d, idx, r, c)
                res = rule_pair_lower_k(LA, LB, la, lb, ca, cb, hi)
                if res == CONTRADICTION:
                    return CONTRADICTION
                if res == CHANGED:
                    changed = True
                res = rule_pair_upper_k(LA, LB, la, lb, ca, cb, lo)
                if res == CONTRADICTION:
                    return CONTRADICTION
                if res == CHANGED:
                    changed = True
        res = rule_cells_k(cells, LA, LB, CB, L, r, c)
        if res == CONTRADICTION:
            return CONTRADICTION
        if res == CHANGED:
            changed = True
    return UNCHANGED


@njit(cache=True)
def propagate_k(cells, k, prof):
    """Returns (ok, candidates for cell k); candidates is 0 when k == rc."""
    r = prof[P_R]
    c = prof[P_C]
    LA = np.empty(r + c, dtype=np.int64)
    LB = np.empty(r + c, dtype=np.int64)
    L = np.empty(r + c, dtype=np.int64)
    CB = np.empty(r * c, dtype=np.int64)
    bounds = np.empty(6, dtype=np.int64)
    init_estimates_k(cells, k, prof, LA, LB, CB, L, bounds)
    if fixpoint_k(cells, prof, LA, LB, CB, L, bounds) == CONTRADICTION:
        return False, 0
    if k < r * c:
        return True, CB[k]
    return True, 0


# Python-facing layer


def pack_profile(params, profile):
    """Packs a bound profile into the kernel vector, or returns None when infeasible."""
    from .grid import MAX_SYMBOLS, bind_profile
    if params.v > MAX_SYMBOLS:
        raise ValueError(f"the search supports at most {MAX_SYMBOLS} symbols, got v={params.v}")
    bound = bind_profile(params, profile)
    if bound is None:
        return None
    rep_lo, rep_hi, v_plus, dims = bound
    vec = [params.r, params.c, params.v, rep_lo, rep_hi, v_plus]
    for mode, lo, hi, w in dims:
        vec += [mode, lo, hi, w]
    return np.array(vec, dtype=np.int64)


@dataclass
class EstimateState:
    r: int
    c: int
    cells: np.ndarray
    prof: np.ndarray
    A: np.ndarray
    B: np.ndarray
    B_cell: np.ndarray
    content: np.ndarray
    bounds: np.ndarray

    def row(self, i):
        return i

    def col(self, j):
        return self.r + j

    def cap(self, line):
        return self.c if line < self.r else self.r

    def cell(self, i, j):
        return int(self.B_cell[i * self.c + j])


def flat_cells(g):
    return np.ascontiguousarray(g.cells.ravel(), dtype=np.int64)


def init_estimates(g, params, profile, next_cell=None):
    """Builds the estimate sets of a prefix-filled grid; next_cell defaults to the first empty cell."""
    prof = pack_profile(params, profile)
    if prof is None:
        raise ValueError("profile cannot be satisfied for these parameters")
    cells = flat_cells(g)
    k = g.filled_count if next_cell is None else next_cell[0] * g.c + next_cell[1]
    r, c = g.r, g.c
    st = EstimateState(
        r, c, cells, prof,
        np.empty(r + c, dtype=np.int64), np.empty(r + c, dtype=np.int64),
        np.empty(r * c, dtype=np.int64), np.empty(r + c, dtype=np.int64),
        np.empty(6, dtype=np.int64))
    init_estimates_k(cells, k, prof, st.A, st.B, st.B_cell, st.content, st.bounds)
    return st


def rule_full_content(st, line):
    return RuleResult(rule_full_content_k(st.A, st.B, line, st.cap(line)))


def rule_cells(st):
    return RuleResult(rule_cells_k(st.cells, st.A, st.B, st.B_cell, st.content, st.r, st.c))


def rule_rc_empty(st, i, j):
    return RuleResult(rule_rc_empty_k(st.cells, st.A, st.B_cell, st.content, st.r, st.c, i, j,
                                      st.bounds[0], st.bounds[1]))


_KINDS = {"RC": RC, "RR": RR, "CC": CC}


def _pair(st, kind, a, b):
    d = _KINDS[kind]
    if d == RC:
        return a, st.r + b, st.c, st.r, d
    if d == RR:
        return a, b, st.c, st.c, d
    return st.r + a, st.r + b, st.r, st.r, d


def rule_pair_lower(st, kind, a, b):
    la, lb, ca, cb, d = _pair(st, kind, a, b)
    return RuleResult(rule_pair_lower_k(st.A, st.B, la, lb, ca, cb, st.bounds[2 * d + 1]))


def rule_pair_upper(st, kind, a, b):
    la, lb, ca, cb, d = _pair(st, kind, a, b)
    return RuleResult(rule_pair_upper_k(st.A, st.B, la, lb, ca, cb, st.bounds[2 * d]))


class NonCompletable:
    def __repr__(self):
        return "NonCompletable"


NON_COMPLETABLE = NonCompletable()


def propagate_state(st):
    return RuleResult(fixpoint_k(st.cells, st.prof, st.A, st.B, st.B_cell, st.content, st.bounds))


def propagate_fixpoint(g, params, profile, next_cell=None):
    """NON_COMPLETABLE, or the candidate set (bitmask) for the next cell."""
    st = init_estimates(g, params, profile, next_cell)
    if propagate_state(st) == RuleResult.CONTRADICTION:
        return NON_COMPLETABLE
    k = g.filled_count if next_cell is None else next_cell[0] * g.c + next_cell[1]
    return int(st.B_cell[k]) if k < g.r * g.c else 0


def symbols(m):
    out = []
    m = int(m)
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out
