"""Command-line interface.

Exit statuses: 0 found/ok, 2 usage or domain error, 3 zero count, 4 checkpointed.
"""

import argparse
import sys
import time
from pathlib import Path

from . import construct as K
from . import grid as G
from .canon import autotopism_count
from .params import DomainError, admissible_for_triple, derive, fmt, nonexistence_report
from .search import (AdmissibilityError, CheckpointInterrupt, SplitSpec, enumerate_designs,
                     enumerate_proper)

EXIT_OK, EXIT_USAGE, EXIT_ZERO, EXIT_CHECKPOINT = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _dec(x):
    return f"{float(x):.6f}"


def _multiset(counter):
    return " ".join(f"{k}:{counter[k]}" for k in sorted(counter)) or "-"


# params


def cmd_params(a, out):
    p = derive(a.r, a.c, a.v)
    out.write(f"params {p.r} {p.c} {p.v}\n")
    for name in ("e", "lambda_rc", "lambda_rr", "lambda_cc", "mu_c", "mu"):
        x = getattr(p, name)
        out.write(f"{name} {fmt(x)} {_dec(x)}\n")
    for name, lo, hi in (("e", p.e_lo, p.e_hi), ("lambda_rc", p.lrc_lo, p.lrc_hi),
                         ("lambda_rr", p.lrr_lo, p.lrr_hi), ("lambda_cc", p.lcc_lo, p.lcc_hi),
                         ("mu_c", p.mu_c_lo, p.mu_c_hi), ("mu", p.mu_lo, p.mu_hi)):
        out.write(f"{name}_floor_ceil {lo} {hi}\n")
    out.write(f"v_minus {p.v_minus}\nv_plus {p.v_plus}\n")
    out.write(f"equireplicate {str(p.equireplicate).lower()}\n")
    out.write(f"admissible_triple {str(admissible_for_triple(p)).lower()}\n")
    for name, verdict, evidence in nonexistence_report(a.r, a.c, a.v):
        ev = " ".join(fmt(x) for x in evidence)
        out.write(f"check {name} {verdict}" + (f" {ev}" if ev else "") + "\n")
    return EXIT_OK


# enumerate


def _parse_job(text):
    try:
        i, n = (int(x) for x in text.split("/"))
    except ValueError:
        raise UsageError(f"--job expects i/N, got {text!r}") from None
    if not 0 <= i < n:
        raise UsageError(f"--job index must satisfy 0 <= i < N, got {text}")
    return i, n


def cmd_enumerate(a, out):
    try:
        profile = G.parse_profile(a.profile)
    except ValueError as e:
        raise UsageError(str(e)) from None
    shard, shards = _parse_job(a.job) if a.job else (0, 1)
    depth = a.split_depth
    if depth is None:
        # a checkpoint needs jobs to record; the first row alone is a single job
        depth = min(a.r * a.c, a.c + 3) if (a.checkpoint or a.time_limit is not None) else 0
    split = SplitSpec(depth, shard, shards)
    kw = dict(split=split, threads=a.threads, checkpoint=a.checkpoint, time_limit=a.time_limit)
    emit = a.emit is not None
    if a.proper:
        name = profile.name
        if name not in G.PROPER:
            raise UsageError(f"--proper applies to double, sesqui, monot or ao, not {name}")
        rep = enumerate_proper(a.r, a.c, a.v, name, emit=emit, **kw)
    else:
        rep = enumerate_designs(a.r, a.c, a.v, profile, emit=emit, **kw)
    out.write(rep.text())
    if emit:
        Path(a.emit).write_text(G.write_grids(rep.grids) if rep.grids else "")
    return EXIT_OK if rep.total > 0 else EXIT_ZERO


# verify


AUT_LIMIT = 10 ** 6


def verify_text(g, index):
    rep = G.classify(g)
    lines = [f"array {index}", f"dims {g.r} {g.c} {g.v}"]
    lines += [f"{name} {str(val).lower()}" for name, val in rep.flags().items()]
    lines.append("omega {} {} {}".format(*rep.omega))
    for k in ("rc", "rr", "cc"):
        lines.append(f"intersections_{k} {_multiset(rep.intersections[k])}")
    lines.append(f"covering_columns {_multiset(rep.covering_columns)}")
    lines.append(f"covering_all {_multiset(rep.covering_all)}")
    if rep.binary:
        n = autotopism_count(g, AUT_LIMIT)
        lines.append(f"aut {n}" if n is not None else f"aut >={AUT_LIMIT}")
    return "\n".join(lines) + "\n"


def cmd_verify(a, out):
    grids = G.read_grids(Path(a.file).read_text(), permissive=a.permissive)
    out.write("\n".join(verify_text(g, i + 1) for i, g in enumerate(grids)))
    return EXIT_OK


# construct


def _ints(args, names):
    if len(args) != len(names):
        raise UsageError(f"expected arguments: {' '.join(names)}")
    try:
        return [int(x) for x in args]
    except ValueError:
        raise UsageError(f"expected integers for {' '.join(names)}") from None


def _load(path):
    return G.read_grid(Path(path).read_text())


def _construct(kind, args):
    if kind == "tail":
        return [K.tail_construction(*_ints(args, ["r", "c", "v"]))]
    if kind == "3xc":
        return [K.build_3xc(*_ints(args, ["c", "v"]))]
    if kind == "three-row":
        (k,) = _ints(args, ["k"])
        return [K.three_row_explicit(k), K.three_row_explicit(k, odd=True)]
    if kind == "latin-drop":
        n, k = _ints(args, ["n", "k"])
        return [K.drop_last_rows(K.cyclic_latin(n), k)]
    if kind == "concat":
        if len(args) != 2:
            raise UsageError("expected arguments: FILE1 FILE2")
        return [K.concatenate(_load(args[0]), _load(args[1]))]
    if kind in ("complement", "add-column"):
        if len(args) != 1:
            raise UsageError("expected argument: FILE")
        fn = K.complement_in_latin if kind == "complement" else K.add_fresh_column
        return [fn(_load(args[0]))]
    if kind in ("replace-repeats", "delete-column"):
        if len(args) != 2:
            raise UsageError("expected arguments: FILE N")
        (n,) = _ints(args[1:], ["N"])
        fn = K.replace_repeats if kind == "replace-repeats" else K.delete_column
        return [fn(_load(args[0]), n)]
    raise UsageError(f"unknown construction {kind!r}")


CONSTRUCTIONS = ("tail", "concat", "3xc", "three-row", "latin-drop", "complement",
                 "add-column", "replace-repeats", "delete-column")


def cmd_construct(a, out):
    grids = _construct(a.kind, a.args)
    for g in grids:
        if not G.classify(g).nta:
            raise K.InternalConsistencyError(f"construction {a.kind} failed re-verification")
    text = G.write_grids(grids)
    if a.out:
        Path(a.out).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


# selftest


QUICK = [
    ((3, 3, 3), "nta", (1, None)),
    ((3, 3, 6), "nta", (0, None)),
    ((3, 3, 7), "nta", (1, None)),
    ((3, 4, 6), "nta", (0, None)),
    ((3, 5, 7), "nta", (2, {3: 1, 6: 1})),
    ((3, 6, 9), "nta", (1, None)),
    ((4, 4, 8), "nta", (1, None)),
    ((4, 5, 9), "nta", (15, None)),
    ((5, 5, 5), "nta", (2, None)),
    ((4, 9, 12), "ta", (1, {3: 1})),
    ((5, 6, 10), "ta", (7, {3: 2, 4: 1, 6: 1, 12: 2, 60: 1})),
]

FULL = [
    ((4, 6, 9), "nta", (255, None)),
    ((6, 6, 6), "nta", (22, None)),
    ((7, 7, 7), "nta", (564, None)),
    ((6, 6, 9), "nta", (696, None)),
    ((6, 6, 12), "nta", (48, None)),
    ((4, 6, 8), "proper-sesqui", (113, None)),
    ((3, 6, 9), "proper-sesqui", (5, None)),
    ((3, 6, 9), "proper-monot", (104, None)),
]

ORACLE_SWEEP = [(3, 3, v) for v in range(3, 9)] + [(3, 4, v) for v in range(4, 9)] + \
    [(3, 5, 7), (4, 4, 4), (4, 4, 6), (4, 4, 8)]


def _run_case(params, name):
    r, c, v = params
    if name.startswith("proper-"):
        return enumerate_proper(r, c, v, name[len("proper-"):])
    return enumerate_designs(r, c, v, G.parse_profile(name))


def _check_case(params, name, expect):
    rep = _run_case(params, name)
    total, hist = expect
    ok = rep.total == total and (hist is None or dict(rep.by_aut) == hist)
    got = f"{rep.total} {dict(sorted(rep.by_aut.items()))}" if hist else str(rep.total)
    return ok, f"{name} {params} expected {total}{' ' + str(hist) if hist else ''} got {got}"


def _selftest_cases(level):
    cases = [(f"{n} {p}", lambda p=p, n=n, e=e: _check_case(p, n, e)) for p, n, e in QUICK]
    g = K.three_row_explicit(4)
    fig8 = [[0, 3, 6, 9, 8, 11, 2, 5], [1, 4, 7, 10, 0, 3, 6, 9], [2, 5, 8, 11, 10, 1, 4, 7]]
    cases.append(("three-row 4", lambda: (g.rows() == fig8, "three_row_explicit(4) layout")))
    cases.append(("3xc fixtures", lambda: (all(
        G.classify(K.build_3xc(c, v)).nta for c, v in K.base_parameters()), "fixture arrays")))
    if level == "full":
        from .oracle import naive_enumerate
        cases += [(f"{n} {p}", lambda p=p, n=n, e=e: _check_case(p, n, e)) for p, n, e in FULL]

        def transpose(p):
            r, c, v = p
            a, b = enumerate_designs(r, c, v).total, enumerate_designs(c, r, v).total
            return a == b, f"transpose {p}: {a} vs {b}"

        def oracle(p):
            r, c, v = p
            for prof in (G.NTA, G.TA, G.DOUBLE, G.SESQUI, G.MONO_T, G.AO, G.gta(2, 2, 3)):
                try:
                    eng = enumerate_designs(r, c, v, prof, emit=True)
                except ValueError:
                    continue
                ref = naive_enumerate(r, c, v, prof)
                if eng.total != ref.total or set(eng.grids or []) != set(ref.grids):
                    return False, f"oracle {p} {prof.name}: engine {eng.total} oracle {ref.total}"
            return True, f"oracle {p}"

        for p in [(3, 5, 7), (4, 5, 9), (3, 6, 9), (4, 6, 9), (3, 7, 7), (5, 5, 5)]:
            cases.append((f"transpose {p}", lambda p=p: transpose(p)))
        for p in ORACLE_SWEEP:
            cases.append((f"oracle {p}", lambda p=p: oracle(p)))
    return cases


def cmd_selftest(a, out):
    failed = 0
    for name, fn in _selftest_cases(a.level):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as e:  # a crash is a failure, not an abort
            ok, detail = False, f"{type(e).__name__}: {e}"
        failed += not ok
        out.write(f"{'PASS' if ok else 'FAIL'} {name} ({time.perf_counter() - t0:.1f}s)"
                  + ("" if ok else f" {detail}") + "\n")
        out.flush()
    out.write(f"selftest {a.level}: {'pass' if not failed else f'{failed} failed'}\n")
    return EXIT_OK if not failed else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="rcdesign", description="Binary row-column design engine.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derived parameters and nonexistence checks")
    for n in ("r", "c", "v"):
        p.add_argument(n, type=int)
    p.set_defaults(fn=cmd_params)

    p = sub.add_parser("enumerate", help="count designs up to isotopism")
    for n in ("r", "c", "v"):
        p.add_argument(n, type=int)
    p.add_argument("--profile", default="nta",
                   help="nta, ta, gta:W1,W2,W3, near-youden, double, sesqui, monot, ao")
    p.add_argument("--proper", action="store_true", help="keep proper designs of the class only")
    p.add_argument("--emit", metavar="FILE", help="write the canonical arrays here")
    p.add_argument("--split-depth", type=int, metavar="D")
    p.add_argument("--job", metavar="i/N", help="run shard i (0-based) of N")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--checkpoint", metavar="FILE", help="record finished jobs, resume from them")
    p.add_argument("--time-limit", type=float, metavar="SECONDS",
                   help="stop after this long and checkpoint (exit 4)")
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("verify", help="classify every array in a file")
    p.add_argument("file")
    p.add_argument("--permissive", action="store_true",
                   help="accept arrays that do not use every symbol 0..v-1")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("construct", help="build arrays by explicit constructions")
    p.add_argument("kind", choices=CONSTRUCTIONS)
    p.add_argument("args", nargs="*")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("selftest", help="check reference counts")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args, out)
    except CheckpointInterrupt as e:
        sys.stderr.write(f"interrupted: {e}\n")
        return EXIT_CHECKPOINT
    except G.GridParseError as e:
        sys.stderr.write(f"{args.file if hasattr(args, 'file') else 'input'}: {e}\n")
        return EXIT_USAGE
    except K.InternalConsistencyError:
        raise
    except (UsageError, DomainError, AdmissibilityError, K.ConstructionError, ValueError,
            FileNotFoundError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
