"""Explicit constructions of near triple arrays.

Every function validates its output with ``classify`` before returning it; a
failure there means a bug, not bad input, and raises InternalConsistencyError.
"""

import os
from functools import lru_cache
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .grid import Grid, classify, intersections, read_grids, write_grids
from .params import derive

DATA_VERSION = "v1"
BASES_FILE = "three_row_bases.arrays"


class ConstructionError(ValueError):
    """An input violates a construction's precondition."""


class InternalConsistencyError(AssertionError):
    pass


def _checked(g, what):
    if not classify(g).nta:
        raise InternalConsistencyError(f"{what} produced a grid that is not a near triple array: {g}")
    return g


def _require_nta(g, what):
    if not g.complete or not classify(g).nta:
        raise ConstructionError(f"{what}: input is not a near triple array")


def _small_v_bound(r, c):
    # v >= rc - c * min(r, c - 1) / 2, kept in integers
    return 2 * r * c - c * min(r, c - 1)


def replace_repeats(g, i):
    """Gives i repeated occurrences fresh symbols, one step at a time."""
    _require_nta(g, "replace_repeats")
    r, c, v = g.r, g.c, g.v
    if 2 * v < _small_v_bound(r, c):
        raise ConstructionError(f"replace_repeats needs v >= rc - c*min(r, c-1)/2, got v={v}")
    if not 0 < i <= r * c - v:
        raise ConstructionError(f"replace_repeats needs 0 < i <= rc - v = {r * c - v}")
    cur = g.copy()
    for _ in range(i):
        p = derive(r, c, cur.v)
        rows = [set(int(x) for x in row) for row in cur.cells]
        pair = next(((a, b) for a, b in combinations(range(r), 2)
                     if len(rows[a] & rows[b]) == p.lrr_hi), None)
        if pair is None:
            raise InternalConsistencyError("no row pair meets the upper row intersection value")
        a, b = pair
        sym = min(rows[a] & rows[b])
        j = int(np.nonzero(cur.cells[b] == sym)[0][0])
        cells = cur.cells.copy()
        cells[b, j] = cur.v
        cur = Grid(r, c, cur.v + 1, cells)
    return _checked(cur, "replace_repeats")


def add_fresh_column(g):
    """Appends a column of r new symbols."""
    _require_nta(g, "add_fresh_column")
    r, c, v = g.r, g.c, g.v
    if 2 * v < _small_v_bound(r, c):
        raise ConstructionError(f"add_fresh_column needs v >= rc - c*min(r, c-1)/2, got v={v}")
    col = np.arange(v, v + r, dtype=np.int64).reshape(r, 1)
    return _checked(Grid(r, c + 1, v + r, np.hstack([g.cells, col])), "add_fresh_column")


def tail_construction(r, c, v):
    """Near triple array with t = rc - v <= c/2 symbols used twice, all others once."""
    derive(r, c, v)
    t = r * c - v
    if 2 * t > c:
        raise ConstructionError(f"tail construction needs v >= rc - c/2, got v={v} for {r}x{c}")
    pairs = list(combinations(range(r), 2))
    cells = np.full((r, c), -1, dtype=np.int64)
    for s in range(t):
        j1, j2 = pairs[s % len(pairs)]
        cells[j1, 2 * s] = s
        cells[j2, 2 * s + 1] = s
    nxt = t
    for i in range(r):
        for j in range(c):
            if cells[i, j] == -1:
                cells[i, j] = nxt
                nxt += 1
    return _checked(Grid(r, c, v, cells), "tail_construction")


def concatenate(g1, g2):
    """Side by side juxtaposition, g2's symbols shifted past g1's."""
    if g1.r != g2.r:
        raise ConstructionError("concatenate: row counts differ")
    _require_nta(g1, "concatenate")
    _require_nta(g2, "concatenate")
    p1 = derive(g1.r, g1.c, g1.v)
    p2 = derive(g2.r, g2.c, g2.v)
    if max(p1.e_hi, p2.e_hi) - min(p1.e_lo, p2.e_lo) > 1:
        raise ConstructionError("concatenate: replication ranges differ by more than one")
    if p1.lambda_rr.denominator != 1 and p2.lambda_rr.denominator != 1:
        raise ConstructionError("concatenate: neither input has an integral row intersection value")
    if p1.lambda_cc > 1 or p2.lambda_cc > 1:
        raise ConstructionError("concatenate: a column intersection value exceeds 1")
    cells = np.hstack([g1.cells, g2.cells + g1.v])
    return _checked(Grid(g1.r, g1.c + g2.c, g1.v + g2.v, cells), "concatenate")


def _is_near_youden(g):
    return g.v == g.c and g.r <= g.c and g.complete and classify(g).nta


def delete_column(g, j):
    if not _is_near_youden(g):
        raise ConstructionError("delete_column needs an (r x n, n) near triple array with r <= n")
    if not 0 <= j < g.c:
        raise ConstructionError(f"column {j} out of range")
    cells = np.delete(g.cells, j, axis=1)
    return _checked(Grid(g.r, g.c - 1, g.v, cells), "delete_column")


def cyclic_latin(n):
    i, j = np.indices((n, n))
    return Grid(n, n, n, (i + j) % n)


def drop_last_rows(g, k):
    if k > 2:
        raise ConstructionError("only one or two rows can be dropped")
    if k == 2 and g.c < 4:
        raise ConstructionError("dropping two rows needs n >= 4")
    out = Grid(g.r - k, g.c, g.v, g.cells[: g.r - k])
    return _checked(out, "drop_last_rows")


def complete_latin(g):
    """Completes a Latin rectangle to a Latin square, one perfect matching per row."""
    n = g.c
    if g.v != n or not g.complete:
        raise ConstructionError("complete_latin needs a full k x n Latin rectangle on n symbols")
    rows = [list(map(int, row)) for row in g.cells]
    for line in rows + [list(map(int, col)) for col in g.cells.T]:
        if len(set(line)) != len(line):
            raise ConstructionError("complete_latin: input is not a Latin rectangle")
    cols_used = [set(g.cells[:, j].tolist()) for j in range(n)]
    while len(rows) < n:
        # column j may take symbol x if x is not yet in column j
        adj = np.array([[0 if x in cols_used[j] else 1 for x in range(n)] for j in range(n)])
        match = maximum_bipartite_matching(csr_matrix(adj), perm_type="column")
        if (match < 0).any():
            raise InternalConsistencyError("no perfect matching while completing a Latin rectangle")
        row = [int(x) for x in match]
        rows.append(row)
        for j, x in enumerate(row):
            cols_used[j].add(x)
    return Grid(n, n, n, rows)


def complement_in_latin(g):
    """The rows a Latin completion adds to a (k x n, n) near triple array."""
    if not _is_near_youden(g):
        raise ConstructionError("complement_in_latin needs a (k x n, n) near triple array")
    square = complete_latin(g)
    out = Grid(g.c - g.r, g.c, g.c, square.cells[g.r:])
    return _checked(out, "complement_in_latin")


def three_row_explicit(k, odd=False):
    """(3 x 2k, 3k) array, or with odd=True the (3 x (2k+1), 3k+2) extension."""
    if k < 3:
        raise ConstructionError("three_row_explicit needs k >= 3")
    cells = np.full((3, 2 * k), -1, dtype=np.int64)
    for a in range(k):
        for b in range(3):
            s = 3 * a + b
            cells[b, a] = s
            cells[(b + 1) % 3, k + (a + b) % k] = s
    if not odd:
        return _checked(Grid(3, 2 * k, 3 * k, cells), "three_row_explicit")
    cells[0, 0] = 3 * k
    col = np.array([[0], [3 * k], [3 * k + 1]], dtype=np.int64)
    return _checked(Grid(3, 2 * k + 1, 3 * k + 2, np.hstack([cells, col])), "three_row_explicit")


# three-row recursion


def data_dir():
    override = os.environ.get("RCDESIGN_DATA")
    if override:
        return Path(override)
    return Path(__file__).parent / "data" / DATA_VERSION


@lru_cache(maxsize=None)
def _bases(path):
    text = Path(path).read_text()
    return {(g.c, g.v): g for g in read_grids(text)}


def base_arrays():
    return _bases(str(data_dir() / BASES_FILE))


def base_parameters():
    """(c, v) pairs stored as fixtures: 6 <= c <= 13 below the tail threshold."""
    return [(c, v) for c in range(6, 14) for v in range(c, 3 * c + 1) if 2 * v < 5 * c]


def regenerate_bases(path=None):
    """Recomputes the fixture file with the enumerator (first array found per case)."""
    from .search import first_designs
    grids = []
    for c, v in base_parameters():
        found = first_designs(3, c, v)
        if not found:
            raise InternalConsistencyError(f"no (3 x {c}, {v}) array found")
        grids.append(found[0])
    path = Path(path) if path else data_dir() / BASES_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    header = "# (3 x c, v) near triple arrays, 6 <= c <= 13, one per case, from the enumerator\n"
    path.write_text(header + write_grids(grids))
    _bases.cache_clear()
    return path


def build_3xc(c, v):
    """A (3 x c, v) near triple array for any c >= 6 and v >= c."""
    if c < 6 or not c <= v <= 3 * c:
        raise ConstructionError(f"build_3xc needs c >= 6 and c <= v <= 3c, got c={c}, v={v}")
    return _checked(_build_3xc(c, v), "build_3xc")


def _build_3xc(c, v):
    if 2 * v >= 5 * c:
        return tail_construction(3, c, v)
    if c <= 13:
        bases = base_arrays()
        if (c, v) not in bases:
            raise ConstructionError(f"fixture for (3 x {c}, {v}) is missing from {data_dir()}")
        return bases[(c, v)]
    if v >= c + 4:
        if v - 9 > 3 * (c - 6):
            # the smaller part would need more symbols than cells; grow from c - 1 instead
            return add_fresh_column(_build_3xc(c - 1, v - 3))
        return concatenate(_build_3xc(6, 9), _build_3xc(c - 6, v - 9))
    return concatenate(base_arrays()[(7, 7)], _build_3xc(c - 7, v - 7))
