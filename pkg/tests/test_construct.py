import random

import numpy as np
import pytest

from rcdesign import construct as K
from rcdesign import grid as G
from rcdesign.params import derive
from conftest import designs, figure_arrays, random_isotope


def nta(g):
    return G.classify(g).nta


def test_replace_repeats_three_by_six():
    g = K.tail_construction(3, 6, 16)
    h = K.replace_repeats(g, 1)
    assert (h.r, h.c, h.v) == (3, 6, 17) and nta(h)
    # exactly one cell changed, and it now holds the new symbol
    diff = np.argwhere(g.cells != h.cells)
    assert len(diff) == 1 and h.cells[tuple(diff[0])] == 16


def test_replace_repeats_all_the_way_to_distinct():
    g = figure_arrays()["fig7 3x6"]
    h = K.replace_repeats(g, 18 - 9)
    assert h.v == 18 and nta(h)


@pytest.mark.parametrize("bad", [0, 10])
def test_replace_repeats_range(bad):
    with pytest.raises(K.ConstructionError):
        K.replace_repeats(figure_arrays()["fig7 3x6"], bad)


def test_tail_distinct_grid():
    g = K.tail_construction(3, 5, 15)
    assert sorted(g.cells.ravel().tolist()) == list(range(15))


def test_tail_four_by_eight():
    g = K.tail_construction(4, 8, 29)
    assert nta(g)
    for s, (a, b) in zip(range(3), [(0, 1), (0, 2), (0, 3)]):
        assert np.argwhere(g.cells == s).tolist() == [[a, 2 * s], [b, 2 * s + 1]]


def test_tail_precondition():
    with pytest.raises(K.ConstructionError):
        K.tail_construction(3, 6, 14)


def test_concatenate_examples():
    a, b = figure_arrays()["fig7 3x6"], figure_arrays()["fig7 3x7"]
    g = K.concatenate(a, b)
    assert (g.c, g.v) == (13, 16) and nta(g)
    g = K.concatenate(a, a)
    assert (g.c, g.v) == (12, 18) and nta(g)


def test_concatenate_rejects_large_column_intersection():
    g = K.cyclic_latin(3)
    assert derive(3, 3, 3).lambda_cc > 1
    with pytest.raises(K.ConstructionError, match="column intersection"):
        K.concatenate(g, g)


def test_concatenate_rejects_mixed_row_counts():
    with pytest.raises(K.ConstructionError, match="row counts"):
        K.concatenate(figure_arrays()["fig7 3x6"], K.cyclic_latin(4))


@pytest.mark.parametrize("j", range(7))
def test_delete_any_column_of_youden(j):
    g = K.delete_column(figure_arrays()["fig7 3x7"], j)
    assert (g.c, g.v) == (6, 7) and nta(g)
    rows = [set(r) for r in g.rows()]
    assert all(len(rows[a] & rows[b]) == 5 for a in range(3) for b in range(a + 1, 3))


def test_delete_column_of_latin_square():
    g = K.delete_column(K.cyclic_latin(5), 2)
    assert (g.r, g.c, g.v) == (5, 4, 5) and nta(g)


def test_delete_column_rejects_non_youden():
    with pytest.raises(K.ConstructionError):
        K.delete_column(figure_arrays()["fig7 3x6"], 0)


@pytest.mark.parametrize("n", range(4, 12))
def test_drop_rows_from_cyclic_square(n):
    for k in (1, 2):
        g = K.drop_last_rows(K.cyclic_latin(n), k)
        assert (g.r, g.c, g.v) == (n - k, n, n) and nta(g)
    if n == 5:
        cc = G.intersections(K.drop_last_rows(K.cyclic_latin(5), 2))["cc"]
        assert set(cc) <= {1, 2}


def test_drop_rows_limits():
    with pytest.raises(K.ConstructionError):
        K.drop_last_rows(K.cyclic_latin(6), 3)
    with pytest.raises(K.ConstructionError):
        K.drop_last_rows(K.cyclic_latin(3), 2)


@pytest.mark.parametrize("n", range(6, 14))
def test_complement_of_three_row_youden(n):
    g = K.build_3xc(n, n)
    h = K.complement_in_latin(g)
    assert (h.r, h.c, h.v) == (n - 3, n, n) and nta(h)
    square = np.vstack([g.cells, h.cells])
    assert all(len(set(line)) == n for line in np.vstack([square, square.T]))


def test_complete_latin_rejects_repeats():
    with pytest.raises(K.ConstructionError):
        K.complete_latin(G.Grid(2, 3, 3, [[0, 1, 2], [0, 2, 1]]))


def test_add_fresh_column_keeps_class():
    g = figure_arrays()["fig7 3x6"]
    h = K.add_fresh_column(g)
    assert (h.c, h.v) == (7, 12) and nta(h)
    # (3x5, 7) has too few symbols for the fresh column to keep the class
    with pytest.raises(K.ConstructionError):
        K.add_fresh_column(figure_arrays()["fig9 first"])


def test_three_row_explicit_figure():
    figs = figure_arrays()
    assert K.three_row_explicit(4) == figs["fig8 even"]
    assert K.three_row_explicit(4, odd=True) == figs["fig8 odd"]


@pytest.mark.parametrize("k", range(3, 11))
def test_three_row_explicit_all_k(k):
    g, h = K.three_row_explicit(k), K.three_row_explicit(k, odd=True)
    assert (g.c, g.v) == (2 * k, 3 * k) and (h.c, h.v) == (2 * k + 1, 3 * k + 2)


@pytest.mark.parametrize("c", range(6, 21))
def test_build_3xc_every_case(c):
    for v in range(c, 3 * c + 1):
        g = K.build_3xc(c, v)
        assert (g.r, g.c, g.v) == (3, c, v) and nta(g)


@pytest.mark.parametrize("c,v", [(5, 7), (6, 5), (6, 19)])
def test_build_3xc_domain(c, v):
    with pytest.raises(K.ConstructionError):
        K.build_3xc(c, v)


def test_fixture_directory_override(tmp_path, monkeypatch):
    src = K.data_dir() / K.BASES_FILE
    (tmp_path / K.BASES_FILE).write_text(src.read_text())
    monkeypatch.setenv("RCDESIGN_DATA", str(tmp_path))
    assert K.data_dir() == tmp_path
    assert K.build_3xc(8, 10) == K._bases(str(src))[(8, 10)]
    monkeypatch.setenv("RCDESIGN_DATA", str(tmp_path / "missing"))
    with pytest.raises(FileNotFoundError):
        K.build_3xc(8, 10)


def test_fixture_file_covers_every_base_case():
    assert sorted(K.base_arrays()) == sorted(K.base_parameters())


# randomized eligible inputs


def random_tail_inputs(rng, n):
    out = []
    while len(out) < n:
        r, c = rng.randint(3, 8), rng.randint(3, 14)
        v = r * c - rng.randint(0, c // 2)
        if v >= max(r, c):
            out.append((r, c, v))
    return out


def concat_pool():
    pool = [K.build_3xc(c, v) for c in range(6, 11) for v in range(c, 3 * c + 1)]
    pool += [figure_arrays()["fig7 3x7"], K.tail_construction(3, 5, 15)]
    return [g for g in pool if derive(g.r, g.c, g.v).lambda_cc <= 1]


def eligible(a, b):
    p, q = derive(a.r, a.c, a.v), derive(b.r, b.c, b.v)
    return (max(p.e_hi, q.e_hi) - min(p.e_lo, q.e_lo) <= 1
            and (p.lambda_rr.denominator == 1 or q.lambda_rr.denominator == 1))


def complement_pool():
    pool = [K.drop_last_rows(K.cyclic_latin(n), k) for n in range(4, 10) for k in (1, 2)]
    pool += [K.build_3xc(n, n) for n in range(6, 12)] + [figure_arrays()["fig7 3x7"]]
    return pool


def test_randomized_constructions():
    rng = random.Random(2024)
    for r, c, v in random_tail_inputs(rng, 200):
        assert nta(K.tail_construction(r, c, v))
    pool = concat_pool()
    pairs = [(a, b) for a in pool for b in pool if eligible(a, b)]
    for _ in range(200):
        a, b = rng.choice(pairs)
        g = K.concatenate(random_isotope(a, rng), random_isotope(b, rng))
        assert (g.c, g.v) == (a.c + b.c, a.v + b.v) and nta(g)
    pool = complement_pool()
    for _ in range(200):
        g = random_isotope(rng.choice(pool), rng)
        h = K.complement_in_latin(g)
        assert (h.r, h.c) == (g.c - g.r, g.c) and nta(h)


def test_fresh_column_carries_counts():
    # every (3x5,14) array yields a (3x6,17) array; both counts are 1
    small, big = designs(3, 5, 14), designs(3, 6, 17)
    assert len(small) == len(big) == 1
    h = K.add_fresh_column(small[0])
    assert (h.c, h.v) == (6, 17) and nta(h)
