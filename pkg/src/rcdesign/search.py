"""Orderly generation of designs, one canonical representative per class.

Cells are filled in row-major order.  Each node is propagated and checked for
canonicity; only canonical partial grids are extended, so every class is
reached exactly once and independent subtrees can be run as separate jobs.
"""

import json
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import grid as G
from .canon import canonical_check
from .params import derive
from .propagate import pack_profile, propagate_k


class CheckpointInterrupt(Exception):
    """Raised when a split run stops early; completed jobs are in the checkpoint."""

    def __init__(self, path, done, total):
        super().__init__(f"stopped after {done}/{total} jobs, checkpoint in {path}")
        self.path = path
        self.done = done
        self.total = total


class AdmissibilityError(ValueError):
    pass


@dataclass
class EnumerationReport:
    params: tuple
    profile: str
    total: int = 0
    by_aut: Counter = field(default_factory=Counter)
    nodes: int = 0
    elapsed: float = 0.0
    grids: list = None

    def merge(self, other):
        self.total += other.total
        self.by_aut.update(other.by_aut)
        self.nodes += other.nodes
        self.elapsed += other.elapsed
        if other.grids is not None:
            self.grids = (self.grids or []) + other.grids
        return self

    def text(self):
        r, c, v = self.params
        lines = [f"params {r} {c} {v}", f"profile {self.profile}", f"total {self.total}"]
        lines += [f"aut {k} {self.by_aut[k]}" for k in sorted(self.by_aut)]
        lines.append(f"nodes {self.nodes}")
        return "\n".join(lines) + "\n"

    def summary(self):
        return (self.total, dict(sorted(self.by_aut.items())))


@dataclass
class SplitSpec:
    """Run the jobs at a given depth; shard i of n takes the jobs with index = i mod n."""
    depth: int = 0
    shard: int = 0
    shards: int = 1


class _LimitReached(Exception):
    pass


class _Walker:
    def __init__(self, r, c, v, prof, profile, emit, limit_depth=None, limit=None):
        self.r, self.c, self.v = r, c, v
        self.n = r * c
        self.prof = prof
        self.profile = profile
        self.emit = emit
        self.limit_depth = limit_depth
        self.limit = limit
        self.cells = np.full(self.n, G.EMPTY, dtype=np.int64)
        self.nodes = 0
        self.by_aut = Counter()
        self.grids = [] if emit else None
        self.prefixes = []

    def visit(self, k):
        """Visits the node with k filled cells; returns candidate mask or None."""
        self.nodes += 1
        ok, cand = propagate_k(self.cells, k, self.prof)
        if not ok:
            return None
        canonical, matches = canonical_check(self.cells, self.r, self.c, k)
        if not canonical:
            return None
        if k == self.n:
            self.leaf(int(matches))
            return None
        return int(cand)

    def leaf(self, aut):
        g = G.Grid(self.r, self.c, self.v, self.cells.copy())
        if not G.satisfies(G.classify(g), self.profile):
            raise AssertionError(f"emitted grid fails its profile: {g}")
        self.by_aut[aut] += 1
        if self.emit:
            self.grids.append(g)
        if self.limit is not None and sum(self.by_aut.values()) >= self.limit:
            raise _LimitReached

    def run(self, k):
        if self.limit_depth is not None and k == self.limit_depth:
            # job roots are visited by the job itself
            self.prefixes.append(self.cells[:k].copy())
            return
        cand = self.visit(k)
        if cand is None:
            return
        while cand:
            low = cand & -cand
            cand ^= low
            self.cells[k] = low.bit_length() - 1
            self.run(k + 1)
        self.cells[k] = G.EMPTY


def _check_domain(r, c, v):
    return derive(r, c, v)


def _report(r, c, v, profile):
    return EnumerationReport((r, c, v), profile.name)


def _run_prefix(r, c, v, profile, prefix, emit, limit=None):
    p = derive(r, c, v)
    prof = pack_profile(p, profile)
    w = _Walker(r, c, v, prof, profile, emit, limit=limit)
    k = len(prefix)
    w.cells[:k] = prefix
    t0 = time.perf_counter()
    try:
        w.run(k)
    except _LimitReached:
        pass
    rep = _report(r, c, v, profile)
    rep.total = sum(w.by_aut.values())
    rep.by_aut = w.by_aut
    rep.nodes = w.nodes
    rep.elapsed = time.perf_counter() - t0
    rep.grids = w.grids
    return rep


def jobs_at_depth(r, c, v, profile, depth):
    """Canonical prefixes with depth cells that survive propagation, in search order.

    Returns (prefixes, nodes visited above the prefixes).
    """
    p = _check_domain(r, c, v)
    if not 0 <= depth <= r * c:
        raise ValueError(f"depth must be in 0..{r * c}")
    prof = pack_profile(p, profile)
    if prof is None:
        return [], 0
    w = _Walker(r, c, v, prof, profile, False, limit_depth=depth)
    w.run(0)
    # a prefix is a job only if it survives its own visit
    jobs = []
    dead = 0
    for pre in w.prefixes:
        cells = np.full(r * c, G.EMPTY, dtype=np.int64)
        cells[:depth] = pre
        ok, _ = propagate_k(cells, depth, prof)
        if ok and canonical_check(cells, r, c, depth)[0]:
            jobs.append(pre)
        else:
            dead += 1
    return jobs, w.nodes + dead


def _job_worker(args):
    r, c, v, profile, prefix, emit = args
    return _run_prefix(r, c, v, profile, np.asarray(prefix, dtype=np.int64), emit)


def first_designs(r, c, v, profile=G.NTA, limit=1):
    """Up to limit canonical designs, in search order (no full enumeration)."""
    p = _check_domain(r, c, v)
    if pack_profile(p, profile) is None:
        return []
    return _run_prefix(r, c, v, profile, np.zeros(0, dtype=np.int64), True, limit).grids


def enumerate_designs(r, c, v, profile=G.NTA, split=None, emit=False, threads=1,
                      checkpoint=None, time_limit=None):
    """Counts canonical designs; see EnumerationReport.

    With a split the run is broken into the jobs at split.depth and only the
    selected shard is run.  Summing the reports of all shards gives the
    unsplit report, node count included.  A checkpoint path records finished
    jobs so an interrupted run can resume.
    """
    p = _check_domain(r, c, v)
    t0 = time.perf_counter()
    prof = pack_profile(p, profile)
    if prof is None:
        return _report(r, c, v, profile)
    split = split or SplitSpec()
    if not 0 <= split.shard < split.shards:
        raise ValueError(f"shard {split.shard} out of range for {split.shards} shards")
    if split.depth == 0 and split.shards == 1 and checkpoint is None and threads == 1:
        return _run_prefix(r, c, v, profile, np.zeros(0, dtype=np.int64), emit)

    jobs, top_nodes = jobs_at_depth(r, c, v, profile, split.depth)
    mine = [i for i in range(len(jobs)) if i % split.shards == split.shard]
    rep = _report(r, c, v, profile)
    if emit:
        rep.grids = []
    if split.shard == 0:
        rep.nodes = top_nodes
    done = {}
    if checkpoint and os.path.exists(checkpoint):
        done = _load_checkpoint(checkpoint, (r, c, v), profile.name, split.depth)
    pending = [i for i in mine if i not in done]
    results = {i: done[i] for i in mine if i in done}
    try:
        if threads > 1 and pending:
            with ProcessPoolExecutor(max_workers=threads) as ex:
                args = [(r, c, v, profile, jobs[i].tolist(), emit) for i in pending]
                for i, res in zip(pending, ex.map(_job_worker, args)):
                    results[i] = res
                    _save_checkpoint(checkpoint, i, res, split.depth)
        else:
            for i in pending:
                if time_limit is not None and time.perf_counter() - t0 > time_limit:
                    raise KeyboardInterrupt
                res = _run_prefix(r, c, v, profile, jobs[i], emit)
                results[i] = res
                _save_checkpoint(checkpoint, i, res, split.depth)
    except KeyboardInterrupt:
        if checkpoint:
            raise CheckpointInterrupt(checkpoint, len(results), len(mine)) from None
        raise
    for i in mine:
        rep.merge(results[i])
    rep.elapsed = time.perf_counter() - t0
    return rep


def _save_checkpoint(path, i, res, depth):
    if not path:
        return
    entry = {"params": list(res.params), "profile": res.profile, "depth": depth, "job": i,
             "total": res.total, "by_aut": {str(k): n for k, n in res.by_aut.items()},
             "nodes": res.nodes}
    if res.grids is not None:
        entry["grids"] = [G.write_grid(g) for g in res.grids]
    with open(path, "a") as fh:
        fh.write(json.dumps(entry) + "\n")


def _load_checkpoint(path, params, profile_name, depth):
    done = {}
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            e = json.loads(line)
            if (tuple(e["params"]) != tuple(params) or e["profile"] != profile_name
                    or e["depth"] != depth):
                raise ValueError(f"checkpoint {path} belongs to a different run")
            rep = EnumerationReport(tuple(params), profile_name, e["total"],
                                    Counter({int(k): n for k, n in e["by_aut"].items()}),
                                    e["nodes"])
            if "grids" in e:
                rep.grids = [G.read_grid(t) for t in e["grids"]]
            done[e["job"]] = rep
    return done


def enumerate_proper(r, c, v, kind, emit=False, **kw):
    """Designs of a class that fail every condition the class leaves out."""
    kind = kind.lower()
    if kind not in G.PROPER:
        raise ValueError(f"no proper variant for {kind!r}")
    p = derive(r, c, v)
    profile = G.PROFILES[kind]
    need = {"e": p.e}
    for cond, name, lam in zip(profile.dims(), ("lambda_rc", "lambda_rr", "lambda_cc"),
                               (p.lambda_rc, p.lambda_rr, p.lambda_cc)):
        if cond == G.EXACT:
            need[name] = lam
    for name, val in need.items():
        if val.denominator != 1:
            raise AdmissibilityError(f"{name} = {val} is not an integer")
    rep = enumerate_designs(r, c, v, profile, emit=True, **kw)
    flag = G.PROPER[kind]
    out = _report(r, c, v, profile)
    out.profile = f"proper-{kind}"
    out.nodes = rep.nodes
    out.elapsed = rep.elapsed
    out.grids = [] if emit else None
    for g in rep.grids:
        if getattr(G.classify(g), flag):
            from .canon import autotopism_count
            out.by_aut[autotopism_count(g)] += 1
            if emit:
                out.grids.append(g)
    out.total = sum(out.by_aut.values())
    return out
