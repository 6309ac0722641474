"""Row-column arrays: statistics, classification and the text file format.

A grid is an r x c numpy array of symbols with -1 marking an empty cell.
Symbol sets are plain ints used as bitmasks (v < 64).
"""

import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import params as _params

EMPTY = -1
MAX_SYMBOLS = 63  # search kernels keep one symbol per int64 bit


class GridParseError(ValueError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(eq=False)
class Grid:
    r: int
    c: int
    v: int
    cells: np.ndarray = None

    def __post_init__(self):
        if self.cells is None:
            self.cells = np.full((self.r, self.c), EMPTY, dtype=np.int64)
        else:
            self.cells = np.array(self.cells, dtype=np.int64).reshape(self.r, self.c)

    @classmethod
    def from_rows(cls, rows, v=None):
        rows = [list(row) for row in rows]
        if v is None:
            v = 1 + max(x for row in rows for x in row)
        return cls(len(rows), len(rows[0]), v, rows)

    @property
    def filled_count(self):
        return int((self.cells != EMPTY).sum())

    @property
    def complete(self):
        return bool((self.cells != EMPTY).all())

    def rows(self):
        return [[int(x) for x in row] for row in self.cells]

    def copy(self):
        return Grid(self.r, self.c, self.v, self.cells.copy())

    def key(self):
        return (self.r, self.c, self.v, self.cells.tobytes())

    def __eq__(self, other):
        return isinstance(other, Grid) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.rows())
        return f"Grid({self.r}x{self.c}, v={self.v}: {body})"


def mask(symbols):
    m = 0
    for x in symbols:
        if x != EMPTY:
            m |= 1 << int(x)
    return m


def row_sets(g):
    return [mask(row) for row in g.cells]


def col_sets(g):
    return [mask(col) for col in g.cells.T]


def is_binary(g):
    for line in list(g.cells) + list(g.cells.T):
        filled = line[line != EMPTY]
        if len(set(filled.tolist())) != len(filled):
            return False
    return True


def replication(g):
    counts = Counter(int(x) for x in g.cells.ravel() if x != EMPTY)
    return [counts.get(x, 0) for x in range(g.v)]


def intersections(g):
    """Intersection sizes per dimension: dict with keys 'rc', 'rr', 'cc'."""
    rs, cs = row_sets(g), col_sets(g)
    return {
        "rc": [(a & b).bit_count() for a in rs for b in cs],
        "rr": [(a & b).bit_count() for a, b in combinations(rs, 2)],
        "cc": [(a & b).bit_count() for a, b in combinations(cs, 2)],
    }


def covering_numbers(g, scope="rows_and_columns"):
    """For each symbol pair a < b, the number of lines containing both.

    scope is 'columns' or 'rows_and_columns'.
    """
    lines = [mask(col) for col in g.cells.T]
    if scope == "rows_and_columns":
        lines += [mask(row) for row in g.cells]
    elif scope != "columns":
        raise ValueError(f"unknown scope {scope!r}")
    out = {}
    for a, b in combinations(range(g.v), 2):
        pair = (1 << a) | (1 << b)
        out[(a, b)] = sum(1 for m in lines if m & pair == pair)
    return out


def transpose(g):
    return Grid(g.c, g.r, g.v, g.cells.T.copy())


def spread(values):
    return max(values) - min(values) if values else 0


def two_valued(values):
    return spread(values) <= 1


def constant(values):
    return spread(values) == 0


@dataclass
class ClassReport:
    binary: bool = False
    equireplicate: bool = False
    near_equireplicate: bool = False
    nta: bool = False
    ta: bool = False
    near_youden: bool = False
    youden: bool = False
    latin: bool = False
    balanced_grid: bool = False
    near_balanced_grid: bool = False
    double: bool = False
    sesqui: bool = False
    mono_t: bool = False
    ao: bool = False
    proper_double: bool = False
    proper_sesqui: bool = False
    proper_mono_t: bool = False
    proper_ao: bool = False
    omega: tuple = None
    intersections: dict = field(default_factory=dict)
    covering_columns: Counter = field(default_factory=Counter)
    covering_all: Counter = field(default_factory=Counter)

    def is_gta(self, w_rc, w_rr, w_cc):
        return (self.binary and (self.equireplicate or self.near_equireplicate)
                and self.omega[0] <= w_rc and self.omega[1] <= w_rr and self.omega[2] <= w_cc)

    def flags(self):
        names = ["binary", "equireplicate", "near_equireplicate", "nta", "ta",
                 "near_youden", "youden", "latin", "balanced_grid", "near_balanced_grid",
                 "double", "sesqui", "mono_t", "ao", "proper_double", "proper_sesqui",
                 "proper_mono_t", "proper_ao"]
        return {n: getattr(self, n) for n in names}


def classify(g):
    if not g.complete:
        raise ValueError("classify needs a completely filled grid")
    rep = ClassReport()
    rep.binary = is_binary(g)
    inter = intersections(g)
    rep.intersections = {k: Counter(vals) for k, vals in inter.items()}
    rep.omega = tuple(spread(inter[k]) + 1 for k in ("rc", "rr", "cc"))
    if not rep.binary:
        return rep

    counts = replication(g)
    rep.covering_columns = Counter(covering_numbers(g, "columns").values())
    cover = list(covering_numbers(g, "rows_and_columns").values())
    rep.covering_all = Counter(cover)

    rep.equireplicate = constant(counts)
    rep.near_equireplicate = spread(counts) == 1
    two_rep = rep.equireplicate or rep.near_equireplicate
    rc, rr, cc = (inter[k] for k in ("rc", "rr", "cc"))

    rep.nta = two_rep and two_valued(rc) and two_valued(rr) and two_valued(cc)
    rep.ta = rep.equireplicate and constant(rc) and constant(rr) and constant(cc)
    rep.latin = g.r == g.c == g.v
    rep.near_youden = g.v == g.c and g.r <= g.c and two_valued(cc)
    rep.youden = g.v == g.c and g.r <= g.c and constant(cc)
    rep.balanced_grid = constant(cover)
    rep.near_balanced_grid = two_rep and two_valued(cover)

    eq = rep.equireplicate
    rep.double = eq and constant(rr) and constant(cc)
    rep.sesqui = eq and constant(rc) and constant(rr)
    rep.mono_t = eq and constant(rr)
    rep.ao = eq and constant(rc)
    rep.proper_double = rep.double and not constant(rc)
    rep.proper_sesqui = rep.sesqui and not constant(cc)
    rep.proper_mono_t = rep.mono_t and not constant(rc) and not constant(cc)
    rep.proper_ao = rep.ao and not constant(rr) and not constant(cc)
    return rep


def nta_by_definition(g):
    """Checks the near triple array conditions against the derived floor/ceiling values."""
    p = _params.derive(g.r, g.c, g.v)
    if not is_binary(g):
        return False
    counts = set(replication(g))
    if not counts <= {p.e_lo, p.e_hi}:
        return False
    inter = intersections(g)
    return (set(inter["rc"]) <= {p.lrc_lo, p.lrc_hi}
            and set(inter["rr"]) <= {p.lrr_lo, p.lrr_hi}
            and set(inter["cc"]) <= {p.lcc_lo, p.lcc_hi})


# file format

_INT = re.compile(r"^-?\d+$")


def _ints(text, lineno):
    parts = text.split()
    for tok in parts:
        if not _INT.match(tok):
            raise GridParseError(lineno, f"not an integer: {tok!r}")
    return [int(tok) for tok in parts]


def read_grids(text, permissive=False):
    """Parses every array in text.

    Unless permissive, each array must use exactly the symbols 0..v-1.
    """
    lines = text.splitlines()
    grids = []
    i = 0
    n = len(lines)

    def skip_blank(i):
        while i < n and (not lines[i].strip() or lines[i].lstrip().startswith("#")):
            i += 1
        return i

    i = skip_blank(i)
    while i < n:
        header = _ints(lines[i], i + 1)
        if len(header) != 3:
            raise GridParseError(i + 1, "header must be 'r c v'")
        r, c, v = header
        if r < 1 or c < 1 or v < 1:
            raise GridParseError(i + 1, "r, c, v must be positive")
        header_line = i + 1
        i += 1
        rows = []
        while len(rows) < r:
            if i >= n or not lines[i].strip():
                raise GridParseError(min(i + 1, n), f"expected {r} rows, got {len(rows)}")
            if lines[i].lstrip().startswith("#"):
                i += 1
                continue
            row = _ints(lines[i], i + 1)
            if len(row) != c:
                raise GridParseError(i + 1, f"row has {len(row)} symbols, expected {c}")
            for x in row:
                if not 0 <= x < v:
                    raise GridParseError(i + 1, f"symbol {x} out of range 0..{v - 1}")
            rows.append(row)
            i += 1
        if not permissive:
            used = {x for row in rows for x in row}
            if used != set(range(v)):
                raise GridParseError(
                    header_line, f"array uses {len(used)} distinct symbols, expected exactly 0..{v - 1}")
        grids.append(Grid(r, c, v, rows))
        i = skip_blank(i)
    if not grids:
        raise GridParseError(max(n, 1), "no array found")
    return grids


def read_grid(text, permissive=False):
    grids = read_grids(text, permissive)
    if len(grids) != 1:
        raise GridParseError(1, f"expected one array, found {len(grids)}")
    return grids[0]


def write_grid(g):
    out = [f"{g.r} {g.c} {g.v}"]
    out += [" ".join(str(x) for x in row) for row in g.rows()]
    return "\n".join(out) + "\n"


def write_grids(grids):
    return "\n".join(write_grid(g) for g in grids)


# constraint profiles

EXACT = ("exact",)
TWO = ("two",)
FREE = ("free",)


def window(w):
    if w < 1:
        raise ValueError("window width must be at least 1")
    return ("window", int(w))


@dataclass(frozen=True)
class ConstraintProfile:
    """Which replication and intersection conditions a design must meet.

    replication is 'exact' or 'two'; each of rc, rr, cc is EXACT, TWO,
    window(w) or FREE.
    """
    name: str
    replication: str
    rc: tuple
    rr: tuple
    cc: tuple
    square: bool = False  # v must equal c

    def dims(self):
        return (self.rc, self.rr, self.cc)


NTA = ConstraintProfile("nta", "two", TWO, TWO, TWO)
TA = ConstraintProfile("ta", "exact", EXACT, EXACT, EXACT)
NEAR_YOUDEN = ConstraintProfile("near-youden", "two", TWO, TWO, TWO, square=True)
DOUBLE = ConstraintProfile("double", "exact", FREE, EXACT, EXACT)
SESQUI = ConstraintProfile("sesqui", "exact", EXACT, EXACT, FREE)
MONO_T = ConstraintProfile("monot", "exact", FREE, EXACT, FREE)
AO = ConstraintProfile("ao", "exact", EXACT, FREE, FREE)


def gta(w_rc, w_rr, w_cc):
    return ConstraintProfile(f"gta:{w_rc},{w_rr},{w_cc}", "two",
                             window(w_rc), window(w_rr), window(w_cc))


PROFILES = {p.name: p for p in (NTA, TA, NEAR_YOUDEN, DOUBLE, SESQUI, MONO_T, AO)}
PROPER = {"double": "proper_double", "sesqui": "proper_sesqui",
          "monot": "proper_mono_t", "ao": "proper_ao"}


def parse_profile(text):
    text = text.strip().lower()
    if text.startswith("gta:"):
        parts = text[4:].split(",")
        if len(parts) != 3:
            raise ValueError("gta profile needs three widths, e.g. gta:2,2,3")
        return gta(*(int(x) for x in parts))
    if text not in PROFILES:
        raise ValueError(f"unknown profile {text!r}")
    return PROFILES[text]


def bind_profile(p, profile):
    """Turns a profile into numeric bounds for parameters p.

    Returns (rep_lo, rep_hi, v_plus, [(mode, lo, hi, w)] for rc, rr, cc),
    with mode 0 = fixed bounds, 1 = window, 2 = unconstrained, or None when
    an exact condition asks for a non-integer value.
    """
    if profile.square and p.v != p.c:
        raise ValueError(f"profile {profile.name} needs v = c")
    if profile.replication == "exact":
        if not p.equireplicate:
            return None
        rep = (p.e_lo, p.e_lo, p.v)
    else:
        rep = (p.e_lo, p.e_hi, p.v_plus)
    targets = ((p.lambda_rc, p.lrc_lo, p.lrc_hi),
               (p.lambda_rr, p.lrr_lo, p.lrr_hi),
               (p.lambda_cc, p.lcc_lo, p.lcc_hi))
    dims = []
    for cond, (lam, lo, hi) in zip(profile.dims(), targets):
        kind = cond[0]
        if kind == "exact":
            if lo != hi:
                return None
            dims.append((0, lo, hi, 0))
        elif kind == "two":
            dims.append((0, lo, hi, 0))
        elif kind == "window":
            dims.append((1, 0, 0, cond[1]))
        else:
            dims.append((2, 0, 64, 0))
    return (*rep, dims)


def satisfies(rep, profile):
    """Whether a ClassReport meets a profile, by direct counting."""
    if not rep.binary:
        return False
    if profile.replication == "exact":
        if not rep.equireplicate:
            return False
    elif not (rep.equireplicate or rep.near_equireplicate):
        return False
    for cond, w in zip(profile.dims(), rep.omega):
        kind = cond[0]
        if kind == "exact" and w != 1:
            return False
        if kind == "two" and w > 2:
            return False
        if kind == "window" and w > cond[1]:
            return False
    return True
