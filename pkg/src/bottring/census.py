"""Census of cohomology classes of Bott towers with bounded twist coefficients.

Towers are first joined along bounded move closures (each edge is a one-step
move trace), the resulting components are grouped by fingerprint, and
components sharing a fingerprint are compared with :func:`are_isomorphic`.
For ``n <= 4`` ring isomorphism classes are diffeomorphism classes.

Report layout (JSONL): one line per class ``{"id", "rep", "members", "certs",
"fingerprint"}`` sorted by representative, then a trailer line with the config,
counts, separations and unresolved pairs.  Nothing schedule- or time-dependent
is written, so reports are byte-identical across runs and worker counts.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from .candidate import IsoCandidate, iso_check
from .errors import BottError, CorruptReport
from .invariants import Fingerprint, fingerprint, is_well_ordered
from .isomorphism import ISO, NON_ISO, are_isomorphic
from .moves import MoveTrace, move_closure, replay, well_order
from .ring import BottMatrix, validate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CensusConfig:
    n: int
    c: int
    u_bound: int = 2
    coeff_bound: int = 3
    node_cap: int = 100_000
    workers: int = 1
    method: str = "auto"

    def __post_init__(self):
        if self.n < 1 or self.c < 0 or self.u_bound < 1 or self.coeff_bound < 1 or self.node_cap < 1:
            raise ValueError("census bounds must be positive")

    def to_json(self):
        # worker count does not affect the result and is left out of reports
        out = asdict(self)
        del out["workers"]
        return out


def _raw_matrices(cfg):
    k = cfg.n * (cfg.n - 1) // 2
    for flat in itertools.product(range(-cfg.c, cfg.c + 1), repeat=k):
        it = iter(flat)
        yield BottMatrix(cfg.n, tuple(tuple(next(it) for _ in range(j)) for j in range(cfg.n)))


def enumerate_matrices(cfg):
    """All matrices with entries in [-c, c], lexicographically, each well-ordered."""
    for M in _raw_matrices(cfg):
        yield well_order(M).end


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            lo, hi = sorted((ra, rb))
            self.parent[hi] = lo


def _trace_cert(move):
    return {"kind": "trace", "trace": MoveTrace(move.source, (move,), move.target).to_json()}


def _iso_cert(c):
    return {"kind": "iso", "iso": c.to_json()}


def _cert_key(cert):
    return json.dumps(cert, sort_keys=True, separators=(",", ":"))


def _representative(members):
    wo = [M for M in members if is_well_ordered(M)]
    return min(wo) if wo else min(members)


def _verdict_job(args):
    A, B, budget, method = args
    return are_isomorphic(A, B, budget, method)


def classify_matrices(matrices, cfg):
    """Partition ``matrices`` into ring-isomorphism classes; returns the report dict."""
    # sorted so that certificates do not depend on input order
    matrices = sorted(set(matrices))
    universe = set(matrices)
    uf = _UnionFind()
    for M in matrices:
        uf.add(M)
    edges = []
    seen = set()
    saturated = 0
    for M in matrices:
        if M in seen:
            continue
        closure = move_closure(M, cfg.c, cfg.u_bound, cfg.node_cap)
        saturated += closure.saturated
        for N, move in closure.parent.items():
            if move is None or move.source not in universe or N not in universe:
                continue
            if uf.find(move.source) != uf.find(N):
                edges.append(_trace_cert(move))
                uf.union(move.source, N)
        seen.update(closure.parent)

    components = {}
    for M in matrices:
        components.setdefault(uf.find(M), []).append(M)
    comp_reps = sorted(_representative(ms) for ms in components.values())
    log.info("%d matrices, %d move components", len(matrices), len(comp_reps))

    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        fps = list(pool.map(fingerprint, comp_reps, chunksize=16) if pool else map(fingerprint, comp_reps))
        groups = {}
        for rep, fp in zip(comp_reps, fps):
            groups.setdefault(fp.dumps(), []).append(rep)

        verdicts = {}
        if pool:
            jobs = [(A, B) for reps in groups.values() for A, B in itertools.combinations(reps, 2)]
            args = [(A, B, cfg.coeff_bound, cfg.method) for A, B in jobs]
            verdicts = dict(zip(jobs, pool.map(_verdict_job, args, chunksize=4)))
    finally:
        if pool:
            pool.shutdown()

    def verdict(A, B):
        if (A, B) not in verdicts:
            verdicts[(A, B)] = are_isomorphic(A, B, cfg.coeff_bound, cfg.method)
        return verdicts[(A, B)]

    separations, unresolved = [], []
    consulted = 0
    for key in sorted(groups):
        heads = []
        for rep in groups[key]:
            for head in heads:
                consulted += 1
                v = verdict(head, rep)
                if v.status == ISO:
                    edges.append(_iso_cert(v.candidate))
                    uf.union(head, rep)
                    break
                if v.status == NON_ISO:
                    separations.append((head, rep, v.reason))
                else:
                    unresolved.append((head, rep))
            else:
                heads.append(rep)

    classes = {}
    for M in matrices:
        classes.setdefault(uf.find(M), []).append(M)
    rep_of = {root: _representative(ms) for root, ms in classes.items()}
    certs_of = {root: [] for root in classes}
    for cert in edges:
        body = cert["trace"]["start"] if cert["kind"] == "trace" else cert["iso"]["source"]
        certs_of[uf.find(validate(body))].append(cert)

    lines = []
    for root in sorted(classes, key=lambda r: rep_of[r]):
        rep = rep_of[root]
        lines.append({
            "rep": rep.to_json(),
            "members": [M.to_json() for M in sorted(classes[root])],
            "certs": sorted(certs_of[root], key=_cert_key),
            "fingerprint": fingerprint(rep).to_json(),
        })
    for i, line in enumerate(lines):
        line["id"] = i
    class_id = {json.dumps(line["rep"], sort_keys=True): line["id"] for line in lines}

    def cid(M):
        return class_id[json.dumps(rep_of[uf.find(M)].to_json(), sort_keys=True)]

    trailer = {
        "trailer": True,
        "config": cfg.to_json(),
        "stats": {
            "matrices": len(matrices),
            "move_components": len(comp_reps),
            "classes": len(lines),
            "saturated_closures": saturated,
            "iso_comparisons": consulted,
        },
        # pairs of distinct classes sharing a fingerprint, separated by a complete search
        "separations": sorted({(min(cid(a), cid(b)), max(cid(a), cid(b)), r) for a, b, r in separations}),
        "unresolved": sorted({(min(cid(a), cid(b)), max(cid(a), cid(b))) for a, b in unresolved}),
    }
    trailer["separations"] = [{"a": a, "b": b, "reason": r} for a, b, r in trailer["separations"]]
    trailer["unresolved"] = [{"a": a, "b": b} for a, b in trailer["unresolved"]]
    return {"classes": lines, "trailer": trailer}


def classify(cfg):
    return classify_matrices(_raw_matrices(cfg), cfg)


def dumps_report(report):
    out = [json.dumps(line, sort_keys=True, separators=(",", ":")) for line in report["classes"]]
    out.append(json.dumps(report["trailer"], sort_keys=True, separators=(",", ":")))
    return "\n".join(out) + "\n"


def write_report(report, path):
    with open(path, "w") as fh:
        fh.write(dumps_report(report))


def write_csv(report, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["class_id", "size", "t", "fingerprint_hash"])
    for line in report["classes"]:
        fp = Fingerprint.from_json(line["fingerprint"])
        writer.writerow([line["id"], len(line["members"]), fp.t, fp.digest()])


def load_report(path):
    try:
        with open(path) as fh:
            rows = [json.loads(s) for s in fh if s.strip()]
    except FileNotFoundError:
        raise
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptReport(f"cannot read report: {exc}") from exc
    if not rows or not rows[-1].get("trailer"):
        raise CorruptReport("report has no trailer line")
    return {"classes": rows[:-1], "trailer": rows[-1]}


def _check_cert(cert):
    """Verify one certificate and return its endpoints."""
    if cert["kind"] == "trace":
        trace = replay(cert["trace"])
        return trace.start, trace.end
    if cert["kind"] == "iso":
        c = IsoCandidate.from_json(cert["iso"])
        if not iso_check(c):
            raise CorruptReport("isomorphism certificate fails the relation check")
        return c.source, c.target
    raise CorruptReport(f"unknown certificate kind {cert['kind']!r}")


def verify_report(path):
    """Re-check every certificate and witness in a report file."""
    report = load_report(path)
    try:
        return _verify(report)
    except (BottError, KeyError, TypeError, ValueError) as exc:
        log.warning("report verification failed: %s", exc)
        return False


def _verify(report):
    classes = report["classes"]
    seen = set()
    fps = []
    for line in classes:
        members = [validate(m) for m in line["members"]]
        rep = validate(line["rep"])
        if rep != _representative(members):
            return False
        if seen.intersection(members):
            return False
        seen.update(members)
        uf = _UnionFind()
        for M in members:
            uf.add(M)
        for cert in line["certs"]:
            a, b = _check_cert(cert)
            if a not in uf.parent or b not in uf.parent:
                return False
            uf.union(a, b)
        if len({uf.find(M) for M in members}) != 1:
            return False
        fp = fingerprint(rep)
        if fp.to_json() != line["fingerprint"]:
            return False
        fps.append((fp, rep))
    trailer = report["trailer"]
    if trailer["stats"]["matrices"] != len(seen):
        return False
    separated = {(s["a"], s["b"]) for s in trailer["separations"]}
    unresolved = {(u["a"], u["b"]) for u in trailer["unresolved"]}
    cfg = trailer["config"]
    for (i, (fa, ra)), (j, (fb, rb)) in itertools.combinations(enumerate(fps), 2):
        if fa.first_difference(fb) is not None:
            continue
        if (i, j) in unresolved:
            continue
        if (i, j) not in separated:
            return False
        if are_isomorphic(ra, rb, cfg["coeff_bound"], cfg["method"]).status != NON_ISO:
            return False
    return True
