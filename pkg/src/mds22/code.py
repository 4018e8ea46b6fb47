"""The (k+2, k, 2) array code given by its parity-check sub-matrices.

A stripe is n = k + 2 node columns C_1..C_n, each of length 2, tied
together by ``H_1 C_1 + ... + H_n C_n = 0`` where every ``H_i`` is 4 x 2.
Nodes are numbered from 1 throughout the public API.

Single-stripe functions work on :class:`~mds22.linalg.Mat`; the ``*_batch``
helpers apply the same linear maps to numpy arrays of many stripes at once
and back the file store.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    HasErasures,
    SingularParityPair,
    TooManyErasures,
)
from .gf import FieldSpec
from .linalg import Mat, hstack, inverse, mat_mul, rank, solve, vstack, zeros

ELL = 2
R = 2


@dataclass(frozen=True, eq=False)
class CodeSpec:
    k: int
    field: FieldSpec
    h_blocks: tuple
    designed_repair: Optional[tuple] = None
    construction_id: str = "custom"
    groups: Optional[tuple] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if len(self.h_blocks) != self.n:
            raise DimensionMismatch(f"need {self.n} parity-check blocks, got {len(self.h_blocks)}")
        for h in self.h_blocks:
            if h.shape != (R * ELL, ELL) or h.field != self.field:
                raise DimensionMismatch("each parity-check block must be 4x2 over the code field")
        if self.designed_repair is not None:
            if len(self.designed_repair) != self.n:
                raise DimensionMismatch("need one designed repair matrix per node")
            for i, m in enumerate(self.designed_repair, start=1):
                if m.shape != (ELL, R * ELL):
                    raise DimensionMismatch("repair matrices must be 2x4")
                if rank(mat_mul(m, self.h(i))) != ELL:
                    raise ValueError(f"designed repair matrix {i} cannot repair node {i}")

    @property
    def n(self) -> int:
        return self.k + R

    @property
    def ell(self) -> int:
        return ELL

    @property
    def r(self) -> int:
        return R

    def h(self, i: int) -> Mat:
        """Parity-check block of node ``i`` (1-based)."""
        return self.h_blocks[i - 1]

    def designed(self, i: int) -> Mat:
        if self.designed_repair is None:
            raise ValueError("code carries no designed repair matrices")
        return self.designed_repair[i - 1]

    def nodes(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def parity_check(self) -> Mat:
        """The full 4 x 2n parity-check matrix."""
        return hstack(*self.h_blocks)

    @cached_property
    def parity_generator(self) -> Mat:
        """4 x 2k matrix mapping stacked data columns to the two parity columns."""
        n, k = self.n, self.k
        pair = hstack(self.h(n - 1), self.h(n))
        try:
            pinv = inverse(pair)
        except Exception as exc:
            raise SingularParityPair("parity blocks are not jointly invertible") from exc
        data_part = hstack(*self.h_blocks[:k])
        return -mat_mul(pinv, data_part)


@dataclass
class Stripe:
    columns: list
    erased: set = dc_field(default_factory=set)

    def column(self, i: int) -> Mat:
        return self.columns[i - 1]

    def copy(self) -> "Stripe":
        return Stripe(list(self.columns), set(self.erased))

    def erase(self, *nodes: int) -> "Stripe":
        out = self.copy()
        for i in nodes:
            out.columns[i - 1] = None
            out.erased.add(i)
        return out

    def symbols(self) -> list[int]:
        return [v for c in self.columns for v in c.entries]


def mds_check(code: CodeSpec) -> tuple[bool, Optional[tuple[int, int]]]:
    """True iff every ``[H_i H_j]`` is invertible; else the first failing pair."""
    f = code.field
    rows = [[b.row(r) for r in range(4)] for b in code.h_blocks]
    for i, j in combinations(code.nodes(), 2):
        a = [list(x + y) for x, y in zip(rows[i - 1], rows[j - 1])]
        if not _invertible(f, a):
            return False, (i, j)
    return True, None


def _invertible(f, a: list) -> bool:
    """Gaussian elimination in place on a square list-of-lists."""
    n = len(a)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return False
        a[c], a[piv] = a[piv], a[c]
        inv = f.inv(a[c][c])
        for r in range(c + 1, n):
            if a[r][c]:
                factor = f.mul(a[r][c], inv)
                a[r] = [f.sub(x, f.mul(factor, y)) for x, y in zip(a[r], a[c])]
    return True


def encode(code: CodeSpec, data: Sequence[int]) -> Stripe:
    """Systematic encode: nodes 1..k carry ``data``, nodes k+1, k+2 the parity."""
    if len(data) != 2 * code.k:
        raise DimensionMismatch(f"need {2 * code.k} data symbols, got {len(data)}")
    f = code.field
    data_col = Mat.column(f, data)
    parity = mat_mul(code.parity_generator, data_col)
    columns = [Mat.column(f, data[2 * t:2 * t + 2]) for t in range(code.k)]
    columns.append(Mat.column(f, parity.entries[:2]))
    columns.append(Mat.column(f, parity.entries[2:]))
    return Stripe(columns)


def syndrome(code: CodeSpec, stripe: Stripe) -> Mat:
    acc = zeros(code.field, 4, 1)
    for i in code.nodes():
        acc = acc + mat_mul(code.h(i), stripe.column(i))
    return acc


def verify_stripe(code: CodeSpec, stripe: Stripe) -> bool:
    if stripe.erased:
        raise HasErasures(f"stripe has erased nodes {sorted(stripe.erased)}")
    return syndrome(code, stripe).is_zero()


def _erasure_solver(code: CodeSpec, erased: tuple[int, ...]) -> Mat:
    """Matrix mapping the stacked surviving columns to the stacked erased ones."""
    survivors = [j for j in code.nodes() if j not in erased]
    rhs = -hstack(*(code.h(j) for j in survivors))
    if len(erased) == 2:
        return solve(hstack(code.h(erased[0]), code.h(erased[1])), rhs)
    # one erasure: any invertible 2x2 row block of H_i pins the column down
    hi = code.h(erased[0])
    for rows in combinations(range(4), 2):
        sub = hi.submatrix(rows, range(2))
        if rank(sub) == 2:
            return solve(sub, rhs.submatrix(rows, range(rhs.cols)))
    raise SingularParityPair(f"parity-check block {erased[0]} has rank < 2")


def decode_erasures(code: CodeSpec, stripe: Stripe) -> Stripe:
    erased = tuple(sorted(stripe.erased))
    if len(erased) > R:
        raise TooManyErasures(f"{len(erased)} erasures, at most {R} recoverable")
    if not erased:
        return stripe.copy()
    solver = _erasure_solver(code, erased)
    survivors = [j for j in code.nodes() if j not in erased]
    known = vstack(*(stripe.column(j) for j in survivors))
    recovered = mat_mul(solver, known)
    out = Stripe(list(stripe.columns))
    for t, i in enumerate(erased):
        out.columns[i - 1] = Mat.column(code.field, recovered.entries[2 * t:2 * t + 2])
    return out


# batched data path -------------------------------------------------------

def apply_batch(field: FieldSpec, a: Mat, x: np.ndarray) -> np.ndarray:
    """Apply ``a`` to many vectors at once: ``x`` is (S, a.cols), result (S, a.rows)."""
    x = np.asarray(x, dtype=np.int64)
    if field.kind == "prime":
        return (x @ a.to_array().T) % field.p
    out = np.zeros((x.shape[0], a.rows), dtype=np.int64)
    for r in range(a.rows):
        acc = np.zeros(x.shape[0], dtype=np.int64)
        for c in range(a.cols):
            coef = a[r, c]
            if coef == 0:
                continue
            if coef == 1:
                acc ^= x[:, c]
            else:
                acc ^= field.scale_table(coef)[x[:, c]]
        out[:, r] = acc
    return out


def encode_batch(code: CodeSpec, data: np.ndarray) -> np.ndarray:
    """Encode S stripes: ``data`` is (S, 2k), result is (S, n, 2)."""
    data = np.asarray(data, dtype=np.int64)
    if data.ndim != 2 or data.shape[1] != 2 * code.k:
        raise DimensionMismatch(f"data must be (S, {2 * code.k})")
    parity = apply_batch(code.field, code.parity_generator, data)
    return np.concatenate([data, parity], axis=1).reshape(data.shape[0], code.n, 2)


def decode_batch(code: CodeSpec, columns: np.ndarray, erased: Sequence[int]) -> np.ndarray:
    """Fill in the erased nodes of S stripes; ``columns`` is (S, n, 2)."""
    erased = tuple(sorted(set(erased)))
    if len(erased) > R:
        raise TooManyErasures(f"{len(erased)} erasures, at most {R} recoverable")
    out = np.array(columns, dtype=np.int64, copy=True)
    if not erased:
        return out
    survivors = [j - 1 for j in code.nodes() if j not in erased]
    solver = _erasure_solver(code, erased)
    known = out[:, survivors, :].reshape(out.shape[0], -1)
    rec = apply_batch(code.field, solver, known).reshape(out.shape[0], len(erased), 2)
    for t, i in enumerate(erased):
        out[:, i - 1, :] = rec[:, t, :]
    return out


def syndrome_batch(code: CodeSpec, columns: np.ndarray) -> np.ndarray:
    columns = np.asarray(columns, dtype=np.int64)
    return apply_batch(code.field, code.parity_check, columns.reshape(columns.shape[0], -1))
