"""Exhaustive search for the best linear repair of every node.

Left-multiplying a repair matrix by an invertible 2 x 2 matrix changes
neither which nodes it repairs nor its bandwidth or I/O, so the search runs
over 2-dimensional row spaces of GF(q)^4, one RREF representative each:
(q^2 + 1)(q^2 + q + 1) candidates instead of q^8.

The per-candidate statistics are computed for all candidates at once with
numpy.  :func:`brute_force_node_optima` redoes the search over every 2 x 4
matrix with the scalar matrix code and is kept as an independent check.
"""

from __future__ import annotations

import functools
import itertools
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .code import CodeSpec, mds_check
from .errors import FieldTooLarge, NotFound, NotMds
from .gf import FieldSpec
from .linalg import Mat, hstack, mat_mul, nonzero_columns, rank

MAX_ORACLE_ORDER = 16

PIVOT_SETS = tuple(itertools.combinations(range(4), 2))


def _guard(field: FieldSpec) -> None:
    if field.order > MAX_ORACLE_ORDER:
        raise FieldTooLarge(f"exhaustive search is limited to q <= {MAX_ORACLE_ORDER}, got {field.order}")


def row_space_count(q: int) -> int:
    return (q * q + 1) * (q * q + q + 1)


@functools.lru_cache(maxsize=None)
def row_space_array(field: FieldSpec) -> np.ndarray:
    """All RREF 2x4 matrices of rank 2 as an (N, 2, 4) array.

    Order: pivot-column pairs ascending, then free entries counting up in
    value order (row 0 before row 1, left to right).
    """
    _guard(field)
    q = field.order
    reps = []
    for p0, p1 in PIVOT_SETS:
        free = [(0, c) for c in range(p0 + 1, 4) if c != p1] + [(1, c) for c in range(p1 + 1, 4)]
        for values in itertools.product(range(q), repeat=len(free)):
            m = np.zeros((2, 4), dtype=np.int64)
            m[0, p0] = 1
            m[1, p1] = 1
            for (r, c), v in zip(free, values):
                m[r, c] = v
            reps.append(m)
    arr = np.stack(reps)
    arr.setflags(write=False)
    return arr


def enumerate_row_spaces(field: FieldSpec) -> list[Mat]:
    return [Mat.from_array(field, m) for m in row_space_array(field)]


def _workers() -> int:
    raw = os.environ.get("MDS22_THREADS", "0").strip() or "0"
    n = int(raw)
    return n if n > 0 else (os.cpu_count() or 1)


def _rank_nz(field: FieldSpec, reps: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    prods = field.vmatmul(reps[:, None, :, :], h[None, :, :, :])  # (N, n, 2, 2)
    a, b = prods[..., 0, 0], prods[..., 0, 1]
    c, d = prods[..., 1, 0], prods[..., 1, 1]
    det = field.vadd(field.vmul(a, d), field.vneg(field.vmul(b, c)))
    nonzero = (prods != 0).any(axis=(-1, -2))
    ranks = np.where(det != 0, 2, np.where(nonzero, 1, 0))
    nzs = (prods != 0).any(axis=-2).sum(axis=-1)
    return ranks, nzs


@dataclass(frozen=True)
class CandidateTable:
    """Per-candidate rank and nonzero-column counts of ``M H_j``."""

    reps: np.ndarray
    ranks: np.ndarray  # (N, n)
    nzs: np.ndarray  # (N, n)

    @property
    def bandwidth(self) -> np.ndarray:
        return self.ranks.sum(axis=1) - 2

    @property
    def io(self) -> np.ndarray:
        return self.nzs.sum(axis=1) - 2

    @property
    def degree(self) -> np.ndarray:
        return (self.ranks > 0).sum(axis=1) - 1


def candidate_table(code: CodeSpec, workers: Optional[int] = None) -> CandidateTable:
    reps = row_space_array(code.field)
    h = np.stack([blk.to_array() for blk in code.h_blocks])
    workers = workers or _workers()
    chunks = np.array_split(reps, max(1, min(workers, len(reps) // 2048 or 1)))
    if len(chunks) == 1:
        parts = [_rank_nz(code.field, reps, h)]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda ch: _rank_nz(code.field, ch, h), chunks))
    ranks = np.concatenate([p[0] for p in parts])
    nzs = np.concatenate([p[1] for p in parts])
    return CandidateTable(reps, ranks, nzs)


@dataclass(frozen=True)
class NodeOptimum:
    node: int
    beta: int
    gamma: int
    gamma_relaxed: int
    witness_bw: Mat
    witness_io: Mat
    witness_bw_repairable: frozenset

    def as_dict(self) -> dict:
        return {
            "node": self.node,
            "beta": self.beta,
            "gamma": self.gamma,
            "gamma_relaxed": self.gamma_relaxed,
            "witness_bw": self.witness_bw.tolist(),
            "witness_io": self.witness_io.tolist(),
            "witness_bw_repairable": sorted(self.witness_bw_repairable),
        }


def _first_min(values: np.ndarray, mask: np.ndarray) -> int:
    idx = np.flatnonzero(mask)
    return int(idx[np.argmin(values[idx])])


def node_optima(code: CodeSpec, table: Optional[CandidateTable] = None) -> list[NodeOptimum]:
    """Minimal bandwidth and I/O over all repair matrices, node by node."""
    _guard(code.field)
    ok, pair = mds_check(code)
    if not ok:
        raise NotMds(f"[H_{pair[0]} H_{pair[1]}] is singular")
    table = table or candidate_table(code)
    bw, io = table.bandwidth, table.io
    out = []
    for i in code.nodes():
        repairs = table.ranks[:, i - 1] == 2
        relaxed = table.nzs[:, i - 1] == 2
        wb = _first_min(bw, repairs)
        wi = _first_min(io, repairs)
        wr = _first_min(io, relaxed)
        out.append(NodeOptimum(
            node=i,
            beta=int(bw[wb]),
            gamma=int(io[wi]),
            gamma_relaxed=int(io[wr]),
            witness_bw=Mat.from_array(code.field, table.reps[wb]),
            witness_io=Mat.from_array(code.field, table.reps[wi]),
            witness_bw_repairable=frozenset(
                int(j) + 1 for j in np.flatnonzero(table.ranks[wb] == 2)),
        ))
    return out


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def bandwidth_bounds(k: int) -> tuple[Fraction, int]:
    """Lower bounds on the average and the maximum per-node minimal bandwidth."""
    avg = Fraction(5 * k, 4)
    return avg, _ceil(avg)


def io_bounds(k: int) -> tuple[Fraction, int]:
    avg = Fraction(4 * k + 1, 3)
    return avg, _ceil(avg)


@dataclass(frozen=True)
class BoundsReport:
    k: int
    q: int
    construction: str
    field: str
    per_node: tuple
    avg_beta: Fraction
    max_beta: int
    avg_gamma: Fraction
    max_gamma: int
    bound_avg_beta: Fraction
    bound_max_beta: int
    bound_avg_gamma: Fraction
    bound_max_gamma: int

    @property
    def satisfied(self) -> dict:
        return {
            "avg_beta": self.avg_beta >= self.bound_avg_beta,
            "max_beta": self.max_beta >= self.bound_max_beta,
            "avg_gamma": self.avg_gamma >= self.bound_avg_gamma,
            "max_gamma": self.max_gamma >= self.bound_max_gamma,
        }

    @property
    def all_satisfied(self) -> bool:
        return all(self.satisfied.values())

    def to_json(self) -> dict:
        frac = lambda x: {"num": x.numerator, "den": x.denominator}  # noqa: E731
        return {
            "k": self.k,
            "q": self.q,
            "field": self.field,
            "construction": self.construction,
            "per_node": [p.as_dict() for p in self.per_node],
            "avg_beta": frac(self.avg_beta),
            "max_beta": self.max_beta,
            "avg_gamma": frac(self.avg_gamma),
            "max_gamma": self.max_gamma,
            "bounds": {
                "avg_beta": frac(self.bound_avg_beta),
                "max_beta": self.bound_max_beta,
                "avg_gamma": frac(self.bound_avg_gamma),
                "max_gamma": self.bound_max_gamma,
            },
            "satisfied": self.satisfied,
        }


def bounds_report(code: CodeSpec) -> BoundsReport:
    optima = node_optima(code)
    n = code.n
    betas = [o.beta for o in optima]
    gammas = [o.gamma for o in optima]
    bb_avg, bb_max = bandwidth_bounds(code.k)
    gb_avg, gb_max = io_bounds(code.k)
    return BoundsReport(
        k=code.k,
        q=code.field.order,
        construction=code.construction_id,
        field=code.field.descriptor(),
        per_node=tuple(optima),
        avg_beta=Fraction(sum(betas), n),
        max_beta=max(betas),
        avg_gamma=Fraction(sum(gammas), n),
        max_gamma=max(gammas),
        bound_avg_beta=bb_avg,
        bound_max_beta=bb_max,
        bound_avg_gamma=gb_avg,
        bound_max_gamma=gb_max,
    )


def subset_less(s, t) -> bool:
    """Strict total order on index sets: by size, then lexicographically."""
    s, t = sorted(s), sorted(t)
    if len(s) != len(t):
        return len(s) < len(t)
    return s < t


def lemma2_witness(code: CodeSpec, i: int, table: Optional[CandidateTable] = None) -> Mat:
    """A repair matrix for node ``i`` contacting every other node with I/O <= 2k."""
    table = table or candidate_table(code)
    mask = (table.ranks[:, i - 1] == 2) & (table.degree == code.k + 1) & (table.io <= 2 * code.k)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise NotFound(f"no degree-{code.k + 1} repair matrix with I/O <= {2 * code.k} for node {i}")
    return Mat.from_array(code.field, table.reps[idx[0]])


def brute_force_node_optima(code: CodeSpec) -> list[tuple[int, int, int, int]]:
    """``(node, beta, gamma, gamma_relaxed)`` by scanning all q^8 matrices.

    Uses only the scalar matrix routines.  Practical for q <= 3.
    """
    _guard(code.field)
    f = code.field
    inf = float("inf")
    best = {i: [inf, inf, inf] for i in code.nodes()}
    for entries in itertools.product(range(f.order), repeat=8):
        m = Mat(2, 4, entries, f)
        if rank(m) < 2:
            continue
        prods = [mat_mul(m, code.h(j)) for j in code.nodes()]
        ranks = [rank(p) for p in prods]
        nzs = [nonzero_columns(p) for p in prods]
        bw, io = sum(ranks) - 2, sum(nzs) - 2
        for i in code.nodes():
            b = best[i]
            if ranks[i - 1] == 2:
                b[0] = min(b[0], bw)
                b[1] = min(b[1], io)
            if nzs[i - 1] == 2:
                b[2] = min(b[2], io)
    return [(i, *map(int, best[i])) for i in code.nodes()]


def random_mds_code(k: int, field: FieldSpec, rng: Optional[random.Random] = None,
                    max_tries: int = 1000) -> CodeSpec:
    """Random parity-check blocks, grown block by block, that pass the MDS check."""
    rng = rng or random.Random(0)
    n = k + 2
    q = field.order
    tries = 0
    while tries < max_tries:
        blocks: list[Mat] = []
        stuck = False
        while len(blocks) < n and not stuck:
            for _ in range(64):
                tries += 1
                cand = Mat(4, 2, tuple(rng.randrange(q) for _ in range(8)), field)
                if all(rank(hstack(b, cand)) == 4 for b in blocks) and rank(cand) == 2:
                    blocks.append(cand)
                    break
            else:
                stuck = True
        if not stuck:
            code = CodeSpec(k, field, tuple(blocks), construction_id="random")
            if mds_check(code)[0]:
                return code
    raise NotFound(f"no random MDS code for k={k} over {field.descriptor()} within {max_tries} tries")


def oracle_dominance(code: CodeSpec, optima: Sequence[NodeOptimum]) -> list[tuple[int, int, int, int, int]]:
    """Per node: (node, beta, designed bandwidth, gamma, designed I/O)."""
    from .repair import repair_stats
    rows = []
    for o in optima:
        s = repair_stats(code, code.designed(o.node))
        rows.append((o.node, o.beta, s.bandwidth, o.gamma, s.io))
    return rows
