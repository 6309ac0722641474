"""Design parameters in exact arithmetic and the counting-based nonexistence tests.

Every non-integer quantity is a ``fractions.Fraction``; nothing here touches
binary floating point.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


class DomainError(ValueError):
    """Parameters outside 3 <= r, 3 <= c, max(r, c) <= v <= rc."""


class Verdict(Enum):
    VIOLATED = "Violated"
    TIGHT = "Tight"
    SLACK = "Slack"


class GridDuality(Enum):
    NO_NTA = "NoNTA"
    NO_NBG = "NoNBG"
    EQUIVALENT = "Equivalent"


def floor_ceil(x):
    return math.floor(x), math.ceil(x)


def is_integer(x):
    return Fraction(x).denominator == 1


@dataclass(frozen=True)
class Params:
    r: int
    c: int
    v: int
    e: Fraction
    lambda_rc: Fraction
    lambda_rr: Fraction
    lambda_cc: Fraction
    mu_c: Fraction
    mu: Fraction
    e_lo: int
    e_hi: int
    lrc_lo: int
    lrc_hi: int
    lrr_lo: int
    lrr_hi: int
    lcc_lo: int
    lcc_hi: int
    mu_c_lo: int
    mu_c_hi: int
    mu_lo: int
    mu_hi: int
    v_minus: int
    v_plus: int

    @property
    def equireplicate(self):
        return self.e.denominator == 1


def derive(r, c, v):
    """All derived quantities for an (r x c, v) design."""
    if not all(isinstance(x, int) for x in (r, c, v)):
        raise DomainError("r, c, v must be integers")
    if r < 3 or c < 3:
        raise DomainError(f"need r >= 3 and c >= 3, got r={r}, c={c}")
    if not max(r, c) <= v <= r * c:
        raise DomainError(f"need max(r, c) <= v <= rc, got v={v} for {r}x{c}")
    e = Fraction(r * c, v)
    e_lo, e_hi = floor_ceil(e)
    if e_lo == e_hi:
        lam = e
        v_minus, v_plus = 0, v
    else:
        lam = e_lo + e_hi - e_lo * e_hi / e
        v_minus = int(v * (e_hi - e))
        v_plus = int(v * (e - e_lo))
    lrr = c * (lam - 1) / (r - 1)
    lcc = r * (lam - 1) / (c - 1)
    mu_c = e * (r - 1) / (v - 1)
    mu = e * (r + c - 2) / (v - 1)
    return Params(
        r, c, v, e, lam, lrr, lcc, mu_c, mu,
        e_lo, e_hi, *floor_ceil(lam), *floor_ceil(lrr), *floor_ceil(lcc),
        *floor_ceil(mu_c), *floor_ceil(mu), v_minus, v_plus,
    )


def s_value(n, m):
    """Least possible sum of C(a_i, 2) over n non-negative integers with mean m."""
    m = Fraction(m)
    lo, hi = floor_ceil(m)
    return n * m * (m - 1) / 2 + n * (m - lo) * (hi - m) / 2


def _compare(a, b):
    return (a > b) - (a < b)


def column_duality_sides(p):
    return (s_value(math.comb(p.c, 2), p.lambda_cc),
            s_value(math.comb(p.v, 2), p.mu_c))


def check_column_duality(p):
    left, right = column_duality_sides(p)
    return {-1: Verdict.VIOLATED, 0: Verdict.TIGHT, 1: Verdict.SLACK}[_compare(left, right)]


def grid_duality_sides(p):
    s_nta = (s_value(math.comb(p.c, 2), p.lambda_cc)
             + s_value(math.comb(p.r, 2), p.lambda_rr)
             + s_value(p.r * p.c, p.lambda_rc))
    s_nbg = s_value(math.comb(p.v, 2), p.mu)
    return s_nta, s_nbg


def check_grid_duality(p):
    """Returns (verdict, S_NTA, S_NBG)."""
    s_nta, s_nbg = grid_duality_sides(p)
    verdict = {-1: GridDuality.NO_NTA, 0: GridDuality.EQUIVALENT,
               1: GridDuality.NO_NBG}[_compare(s_nta, s_nbg)]
    return verdict, s_nta, s_nbg


def check_bg_forces_equireplicate(p):
    if not is_integer(p.mu) or p.equireplicate:
        return False
    s_nta, s_nbg = grid_duality_sides(p)
    return s_nta == s_nbg


def check_column_family(r, c, v):
    return r >= 4 and c == r * (r - 1) - 1 and v == r * (r - 1) + 1


def admissible_for_triple(p):
    return all(is_integer(x) for x in (p.e, p.lambda_rc, p.lambda_rr, p.lambda_cc))


def fmt(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def nonexistence_report(r, c, v):
    """List of (name, verdict, evidence) tuples; the last entry says whether anything fired."""
    p = derive(r, c, v)
    rows = []
    fired = False

    left, right = column_duality_sides(p)
    verdict = check_column_duality(p)
    fired |= verdict is Verdict.VIOLATED
    rows.append(("column-duality", verdict.value, (left, right)))

    gverdict, s_nta, s_nbg = check_grid_duality(p)
    fired |= gverdict is GridDuality.NO_NTA
    rows.append(("grid-duality", gverdict.value, (s_nta, s_nbg)))

    bg = check_bg_forces_equireplicate(p)
    fired |= bg
    rows.append(("bg-forces-equireplicate", "fires" if bg else "passes", (p.mu, p.e)))

    fam = check_column_family(r, c, v)
    fired |= fam
    rows.append(("column-family", "fires" if fam else "passes", (Fraction(r), Fraction(c), Fraction(v))))

    # violated duality must be listed first
    rows.sort(key=lambda row: row[1] not in ("Violated", "NoNTA", "fires"))
    if not fired:
        rows.append(("summary", "no nonexistence condition fires", ()))
    return rows


def nta_ruled_out(r, c, v):
    return any(v_ in ("Violated", "NoNTA", "fires") for _, v_, _ in nonexistence_report(r, c, v))
