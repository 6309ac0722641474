"""Brute-force reference enumerator for tiny parameter sets.

Deliberately simple and independent of the search engine: it fills every cell
in turn with binary and replication checks plus a window test on completed
line pairs, keeps grids accepted by ``classify``, and removes duplicates by
minimizing each survivor over every row and column permutation.
"""

import math
from collections import Counter
from itertools import combinations, permutations

from .grid import Grid, classify, satisfies
from .search import EnumerationReport


class OracleGuardError(ValueError):
    pass


def _width(cond):
    kind = cond[0]
    if kind == "exact":
        return 1
    if kind == "two":
        return 2
    if kind == "window":
        return cond[1]
    return None


def _relabel(seq):
    seen = {}
    return tuple(seen.setdefault(x, len(seen)) for x in seq)


def min_over_group(g, max_perms=10 ** 6):
    """Lexicographically least isotope of a complete grid, by exhaustive search."""
    cost = math.factorial(g.r) * math.factorial(g.c)
    if cost > max_perms:
        raise OracleGuardError(f"{g.r}! * {g.c}! = {cost} permutations exceeds the limit {max_perms}")
    rows = g.rows()
    best = None
    for pr in permutations(range(g.r)):
        prow = [rows[i] for i in pr]
        for pc in permutations(range(g.c)):
            seq = _relabel(row[j] for row in prow for j in pc)
            if best is None or seq < best:
                best = seq
    return Grid(g.r, g.c, g.v, [list(best[i * g.c:(i + 1) * g.c]) for i in range(g.r)])


def _orbit(g):
    """All symbol-normalized isotopes of g, as row-major tuples."""
    rows = g.rows()
    out = set()
    for pr in permutations(range(g.r)):
        prow = [rows[i] for i in pr]
        for pc in permutations(range(g.c)):
            out.add(_relabel(row[j] for row in prow for j in pc))
    return out


def _stabilizer_size(g):
    rows = g.rows()
    target = _relabel(x for row in rows for x in row)
    n = 0
    for pr in permutations(range(g.r)):
        prow = [rows[i] for i in pr]
        for pc in permutations(range(g.c)):
            if _relabel(row[j] for row in prow for j in pc) == target:
                n += 1
    return n


def naive_enumerate(r, c, v, profile, emit=True, max_v=8, max_cells=20):
    """Canonical designs for the profile, found by exhaustive filling.

    The report also carries ``labeled``: the number of symbol-normalized grids
    accepted, i.e. labelled designs divided by v!.
    """
    if v > max_v or r * c > max_cells:
        est = math.factorial(v) * math.factorial(r) * math.factorial(c)
        raise OracleGuardError(
            f"({r}x{c},{v}) is beyond the oracle guard (v <= {max_v}, rc <= {max_cells}); "
            f"group size about {est}")
    rep = EnumerationReport((r, c, v), profile.name)
    if profile.square and v != c:
        raise ValueError(f"profile {profile.name} needs v = c")
    n = r * c
    if profile.replication == "exact" and n % v:
        rep.labeled = 0
        rep.grids = [] if emit else None
        return rep
    cap = -(-n // v)
    floor = n // v
    widths = [_width(cond) for cond in profile.dims()]
    cells = [-1] * n
    rowmask = [0] * r
    colmask = [0] * c
    count = [0] * v
    found = set()
    seen = set()
    labeled = 0
    nodes = 0

    def window_ok(values, w):
        return w is None or not values or max(values) - min(values) < w

    def pairs_ok(i, j):
        # called after filling (i, j); checks pairs that just became complete
        w_rc, w_rr, w_cc = widths
        if j == c - 1 and w_rr is not None:
            vals = [(rowmask[a] & rowmask[b]).bit_count() for a, b in combinations(range(i + 1), 2)]
            if not window_ok(vals, w_rr):
                return False
        if i == r - 1:
            if w_cc is not None:
                vals = [(colmask[a] & colmask[b]).bit_count() for a, b in combinations(range(j + 1), 2)]
                if not window_ok(vals, w_cc):
                    return False
            if w_rc is not None:
                vals = [(rowmask[a] & colmask[b]).bit_count()
                        for a in range(r - 1) for b in range(j + 1)]
                if j == c - 1:
                    vals += [(rowmask[r - 1] & colmask[b]).bit_count() for b in range(c)]
                if not window_ok(vals, w_rc):
                    return False
        return True

    def fill(k, top):
        nonlocal labeled, nodes
        nodes += 1
        if k == n:
            if max(count) - min(count) > (0 if profile.replication == "exact" else 1):
                return
            g = Grid(r, c, v, [cells[i * c:(i + 1) * c] for i in range(r)])
            if satisfies(classify(g), profile):
                labeled += 1
                seq = tuple(cells)
                if seq not in seen:
                    orbit = _orbit(g)
                    seen.update(orbit)
                    best = min(orbit)
                    found.add(Grid(r, c, v, [list(best[i * c:(i + 1) * c]) for i in range(r)]))
            return
        i, j = divmod(k, c)
        for x in range(min(top + 1, v)):
            bit = 1 << x
            if rowmask[i] & bit or colmask[j] & bit or count[x] >= cap:
                continue
            cells[k] = x
            rowmask[i] |= bit
            colmask[j] |= bit
            count[x] += 1
            # every symbol must still be able to reach floor(rc/v) occurrences
            short = sum(floor - m for m in count if m < floor)
            if pairs_ok(i, j) and short <= n - k - 1:
                fill(k + 1, max(top, x + 1))
            count[x] -= 1
            rowmask[i] ^= bit
            colmask[j] ^= bit
            cells[k] = -1

    fill(0, 0)
    grids = sorted(found, key=lambda g: g.rows())
    rep.by_aut = Counter(_stabilizer_size(g) for g in grids)
    rep.total = len(grids)
    rep.nodes = nodes
    rep.labeled = labeled
    rep.grids = grids if emit else None
    return rep


def naive_enumerate_proper(r, c, v, kind):
    from .grid import PROFILES, PROPER
    rep = naive_enumerate(r, c, v, PROFILES[kind])
    keep = [g for g in rep.grids if getattr(classify(g), PROPER[kind])]
    out = EnumerationReport((r, c, v), f"proper-{kind}")
    out.grids = keep
    out.total = len(keep)
    return out
