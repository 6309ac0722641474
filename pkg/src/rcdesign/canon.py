"""Lexicographic canonicity and autotopism counting.

A grid is canonical when no admissible row and column permutation, followed by
relabelling symbols in order of first appearance, gives a smaller row-major
sequence.  For a prefix of i = q*c + s filled cells the admissible maps permute
the q full rows among themselves, fix row q+1, and keep the column blocks
{0..s-1} and {s..c-1} in place.

The search compares images cell by cell.  The first image row always reads
0..c-1, so columns are not chosen there; a column gets its position either
when the second image row reaches it, or when its row-0 symbol shows up
elsewhere and must take the smallest free position to stay minimal.
"""

from itertools import permutations

import numpy as np
from numba import njit

MODE_CANON, MODE_COUNT = 0, 1


@njit(cache=True)
def _block(x, s):
    if s > 0 and x < s:
        return 0
    return 1


@njit(cache=True)
def canon_k(T, r, c, k, mode, limit):
    """Returns (canonical, matches).

    In MODE_CANON the sweep stops at the first smaller image; matches counts
    the admissible maps reproducing T.  In MODE_COUNT smaller images are just
    skipped, so matches is the autotopism count of a symbol-normalized T.
    A positive limit stops the count there and reports matches = -1.
    """
    q = k // c
    s = k % c
    if q == 0:
        for j in range(s):
            if T[j] != j:
                return False, 0
        return True, 1
    for j in range(c):
        if T[j] != j:
            if mode == MODE_CANON:
                return False, 0
    N = k
    if N == c:
        return True, 1
    nfree = q
    maxsym = 0
    for t in range(N):
        if T[t] > maxsym:
            maxsym = T[t]
    nsym = maxsym + 1
    rowsrc = np.full(r, -1, dtype=np.int64)
    rowused = np.zeros(r, dtype=np.int64)
    colpos = np.full(c, -1, dtype=np.int64)
    possrc = np.full(c, -1, dtype=np.int64)
    label = np.full(nsym, -1, dtype=np.int64)
    symcol0 = np.full(nsym, -1, dtype=np.int64)
    nlev = N - c
    idx = np.zeros(nlev, dtype=np.int64)
    applied = np.zeros(nlev, dtype=np.int64)
    set_row = np.full(nlev, -1, dtype=np.int64)
    set_col = np.full(nlev, -1, dtype=np.int64)
    forced = np.full(nlev, -1, dtype=np.int64)
    fresh_sym = np.full(nlev, -1, dtype=np.int64)
    matches = 0
    for rho0 in range(nfree):
        rowsrc[0] = rho0
        rowused[rho0] = 1
        for x in range(nsym):
            symcol0[x] = -1
            label[x] = -1
        for j in range(c):
            symcol0[T[rho0 * c + j]] = j
            colpos[j] = -1
            possrc[j] = -1
        fresh = c
        lev = 0
        idx[0] = 0
        applied[0] = 0
        while lev >= 0:
            t = c + lev
            a = t // c
            b = t % c
            if applied[lev]:
                # undo the previous alternative of this level
                if fresh_sym[lev] >= 0:
                    label[fresh_sym[lev]] = -1
                    fresh -= 1
                    fresh_sym[lev] = -1
                if forced[lev] >= 0:
                    possrc[colpos[forced[lev]]] = -1
                    colpos[forced[lev]] = -1
                    forced[lev] = -1
                if set_col[lev] >= 0:
                    colpos[set_col[lev]] = -1
                    possrc[b] = -1
                    set_col[lev] = -1
                if set_row[lev] >= 0:
                    rowused[set_row[lev]] = 0
                    rowsrc[a] = -1
                    set_row[lev] = -1
                applied[lev] = 0
            found = False
            while idx[lev] < nfree * c:
                ii = idx[lev]
                idx[lev] += 1
                ri = ii // c
                ci = ii % c
                if b == 0 and a < q:
                    rho = ri
                    if rowused[rho]:
                        continue
                elif b == 0:
                    if ri != 0:
                        continue
                    rho = q
                else:
                    if ri != 0:
                        continue
                    rho = rowsrc[a]
                if possrc[b] >= 0:
                    if ci != 0:
                        continue
                    col = possrc[b]
                    newcol = False
                else:
                    col = ci
                    if colpos[col] >= 0 or _block(col, s) != _block(b, s):
                        continue
                    newcol = True
                if b == 0:
                    rowsrc[a] = rho
                    if a < q:
                        rowused[rho] = 1
                        set_row[lev] = rho
                    else:
                        set_row[lev] = -1
                if newcol:
                    colpos[col] = b
                    possrc[b] = col
                    set_col[lev] = col
                applied[lev] = 1
                y = T[rho * c + col]
                col2 = symcol0[y]
                if col2 >= 0:
                    if colpos[col2] >= 0:
                        lab = colpos[col2]
                    else:
                        blk = _block(col2, s)
                        if mode == MODE_CANON:
                            # the smallest free position gives the smallest image
                            p = s if (blk == 1 and s > 0) else 0
                            while possrc[p] >= 0:
                                p += 1
                        else:
                            # exact matching: the column must land where T has it
                            p = T[t]
                            if p >= c or possrc[p] >= 0 or _block(p, s) != blk:
                                p = -1
                        if p >= 0:
                            colpos[col2] = p
                            possrc[p] = col2
                            forced[lev] = col2
                            lab = p
                        else:
                            lab = c + nsym
                else:
                    if label[y] >= 0:
                        lab = label[y]
                    else:
                        lab = fresh
                        label[y] = fresh
                        fresh += 1
                        fresh_sym[lev] = y
                tv = T[t]
                if lab < tv and mode == MODE_CANON:
                    return False, 0
                if lab != tv:
                    # undo and try the next alternative
                    if fresh_sym[lev] >= 0:
                        label[fresh_sym[lev]] = -1
                        fresh -= 1
                        fresh_sym[lev] = -1
                    if forced[lev] >= 0:
                        possrc[colpos[forced[lev]]] = -1
                        colpos[forced[lev]] = -1
                        forced[lev] = -1
                    if set_col[lev] >= 0:
                        colpos[set_col[lev]] = -1
                        possrc[b] = -1
                        set_col[lev] = -1
                    if set_row[lev] >= 0:
                        rowused[set_row[lev]] = 0
                        set_row[lev] = -1
                    if b == 0:
                        rowsrc[a] = -1
                    applied[lev] = 0
                    continue
                found = True
                break
            if not found:
                idx[lev] = 0
                lev -= 1
                continue
            if lev + 1 == nlev:
                matches += 1
                if limit > 0 and matches >= limit:
                    return True, -1
            else:
                lev += 1
                idx[lev] = 0
                applied[lev] = 0
        rowused[rho0] = 0
        rowsrc[0] = -1
    return True, matches


def _flat(g):
    return np.ascontiguousarray(g.cells.ravel(), dtype=np.int64)


def normalize_symbols(g):
    """Relabels symbols in order of first appearance (row-major)."""
    from .grid import EMPTY
    out = g.copy()
    relabel = {}
    flat = out.cells.ravel()
    for idx, x in enumerate(flat):
        if x == EMPTY:
            continue
        if x not in relabel:
            relabel[x] = len(relabel)
        flat[idx] = relabel[x]
    out.cells = flat.reshape(g.r, g.c)
    return out


def induced_symbol_perm(g, pi_r, pi_c):
    """Symbol relabelling making first appearances increasing in the permuted grid.

    pi_r[i] is the new position of row i (likewise pi_c).  Returns a dict
    old symbol -> new symbol over the symbols present.
    """
    from .grid import EMPTY
    inv_r = [0] * g.r
    inv_c = [0] * g.c
    for i, p in enumerate(pi_r):
        inv_r[p] = i
    for j, p in enumerate(pi_c):
        inv_c[p] = j
    perm = {}
    for a in range(g.r):
        for b in range(g.c):
            x = int(g.cells[inv_r[a], inv_c[b]])
            if x != EMPTY and x not in perm:
                perm[x] = len(perm)
    return perm


def apply_isotopism(g, pi_r, pi_c, pi_v=None):
    """Image of g: row i goes to pi_r[i], column j to pi_c[j], symbol x to pi_v[x].

    Without pi_v the induced relabelling is used.
    """
    from .grid import EMPTY, Grid
    if pi_v is None:
        pi_v = induced_symbol_perm(g, pi_r, pi_c)
    out = np.full((g.r, g.c), EMPTY, dtype=np.int64)
    for i in range(g.r):
        for j in range(g.c):
            x = int(g.cells[i, j])
            out[pi_r[i], pi_c[j]] = EMPTY if x == EMPTY else pi_v[x]
    return Grid(g.r, g.c, g.v, out)


def is_canonical(g, partial=None):
    """Whether g is the lexicographically least member of its class.

    For partial grids only the maps preserving the filled prefix count.
    """
    k = g.filled_count
    if partial is False and k != g.r * g.c:
        raise ValueError("grid is not complete")
    ok, _ = canon_k(_flat(g), g.r, g.c, k, MODE_CANON, 0)
    return bool(ok)


def autotopism_count(g, limit=0):
    """Order of the autotopism group of a complete binary grid.

    With a positive limit, returns None once limit autotopisms are found.
    """
    if not g.complete:
        raise ValueError("autotopism_count needs a complete grid")
    h = normalize_symbols(g)
    _, n = canon_k(_flat(h), h.r, h.c, h.r * h.c, MODE_COUNT, limit)
    return None if n < 0 else int(n)


def canonical_check(cells, r, c, k):
    """Kernel entry used by the search: (canonical, matches)."""
    return canon_k(cells, r, c, k, MODE_CANON, 0)


def brute_force_autotopisms(g):
    """Counts autotopisms by trying every row and column permutation (tiny grids only)."""
    h = normalize_symbols(g)
    n = 0
    for pr in permutations(range(g.r)):
        for pc in permutations(range(g.c)):
            if apply_isotopism(h, pr, pc) == h:
                n += 1
    return n
