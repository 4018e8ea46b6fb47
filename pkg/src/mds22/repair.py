"""Single-node repair driven by a 2 x 4 repair matrix.

Multiplying the parity-check equations by a repair matrix ``M`` gives
``sum_j (M H_j) C_j = 0``.  When ``M H_i`` is invertible node ``i`` is
recovered from the helper vectors ``M H_j C_j``.  Each ``M H_j`` is factored
as ``L_j R_j`` so helper ``j`` only ships ``R_j C_j``: ``rank(M H_j)`` symbols
sent, ``nz(M H_j)`` symbols read.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .code import CodeSpec, apply_batch
from .errors import (
    BadHelperIndex,
    DimensionMismatch,
    MissingPayload,
    NotARepairMatrix,
    ZeroMatrix,
)
from .linalg import Mat, column_factorize, inverse, mat_mul, nonzero_columns, rank, zeros


@dataclass(frozen=True)
class RepairStats:
    bandwidth: int
    io: int
    degree: int
    repairable_set: frozenset
    nz_set: frozenset

    def as_dict(self) -> dict:
        return {
            "bandwidth": self.bandwidth,
            "io": self.io,
            "degree": self.degree,
            "repairable_set": sorted(self.repairable_set),
            "nz_set": sorted(self.nz_set),
        }


@dataclass(frozen=True)
class Helper:
    node: int
    left: Mat
    right: Mat

    @property
    def symbols_sent(self) -> int:
        return self.right.rows

    @property
    def read_columns(self) -> tuple[int, ...]:
        """Which of the helper's two symbols have to be read (0 = top)."""
        return tuple(c for c in range(self.right.cols) if any(self.right.col(c)))

    @property
    def symbols_read(self) -> int:
        return len(self.read_columns)


@dataclass(frozen=True)
class RepairPlan:
    code: CodeSpec
    failed: int
    m: Mat
    inv_mhi: Mat
    helpers: dict
    stats: RepairStats

    def helper(self, j: int) -> Helper:
        return self.helpers[j]


def _check_m(m: Mat, code: CodeSpec) -> None:
    if m.shape != (2, 4):
        raise DimensionMismatch(f"repair matrix must be 2x4, got {m.shape}")
    if m.field != code.field:
        raise DimensionMismatch("repair matrix lives in a different field")


def repair_products(code: CodeSpec, m: Mat) -> list[Mat]:
    """``[M H_1, ..., M H_n]``."""
    _check_m(m, code)
    return [mat_mul(m, code.h(j)) for j in code.nodes()]


def repair_stats(code: CodeSpec, m: Mat) -> RepairStats:
    """Bandwidth, I/O and degree of the repair process defined by ``m``.

    The counts follow the summation over all nodes minus the two symbols the
    failed node would contribute, so they are meaningful for any ``m`` that
    repairs at least one node.
    """
    products = repair_products(code, m)
    ranks = [rank(p) for p in products]
    nzs = [nonzero_columns(p) for p in products]
    return RepairStats(
        bandwidth=sum(ranks) - 2,
        io=sum(nzs) - 2,
        degree=sum(1 for p in products if not p.is_zero()) - 1,
        repairable_set=frozenset(j for j, r in zip(code.nodes(), ranks) if r == 2),
        nz_set=frozenset(j for j, z in zip(code.nodes(), nzs) if z == 2),
    )


def repair_degree(code: CodeSpec, m: Mat) -> int:
    if m.is_zero():
        raise ZeroMatrix("repair degree of the zero matrix is undefined")
    return sum(1 for p in repair_products(code, m) if not p.is_zero()) - 1


def plan_repair(code: CodeSpec, m: Mat, failed: int) -> RepairPlan:
    if failed not in code.nodes():
        raise BadHelperIndex(f"node {failed} outside 1..{code.n}")
    products = repair_products(code, m)
    mhi = products[failed - 1]
    if rank(mhi) != 2:
        raise NotARepairMatrix(f"M H_{failed} has rank {rank(mhi)}, need 2")
    helpers = {}
    for j, p in zip(code.nodes(), products):
        if j == failed or p.is_zero():
            continue
        left, right = column_factorize(p)
        helpers[j] = Helper(j, left, right)
    return RepairPlan(code, failed, m, inverse(mhi), helpers, repair_stats(code, m))


def designed_plan(code: CodeSpec, failed: int) -> RepairPlan:
    return plan_repair(code, code.designed(failed), failed)


def helper_payload(plan: RepairPlan, j: int, c_j: Mat) -> tuple[int, ...]:
    """Symbols helper ``j`` transmits: ``R_j C_j`` (empty when ``M H_j = 0``)."""
    if j == plan.failed or j not in plan.code.nodes():
        raise BadHelperIndex(f"{j} is not a helper for node {plan.failed}")
    if j not in plan.helpers:
        return ()
    return mat_mul(plan.helpers[j].right, c_j).entries


def execute_repair(plan: RepairPlan, payloads: Mapping[int, Sequence[int]]) -> Mat:
    """Rebuild the failed column as ``-(M H_i)^-1 sum_j L_j payload_j``."""
    f = plan.code.field
    acc = zeros(f, 2, 1)
    for j, helper in plan.helpers.items():
        if j not in payloads:
            raise MissingPayload(j)
        vec = Mat.column(f, payloads[j])
        if vec.rows != helper.left.cols:
            raise DimensionMismatch(f"payload from node {j} has {vec.rows} symbols, "
                                    f"expected {helper.left.cols}")
        acc = acc + mat_mul(helper.left, vec)
    return -mat_mul(plan.inv_mhi, acc)


# batched data path -------------------------------------------------------

def helper_payload_batch(plan: RepairPlan, j: int, columns: np.ndarray) -> np.ndarray:
    """``R_j C_j`` for S stripes; ``columns`` is the helper's (S, 2) data."""
    if j == plan.failed or j not in plan.code.nodes():
        raise BadHelperIndex(f"{j} is not a helper for node {plan.failed}")
    if j not in plan.helpers:
        return np.zeros((len(columns), 0), dtype=np.int64)
    return apply_batch(plan.code.field, plan.helpers[j].right, columns)


def execute_repair_batch(plan: RepairPlan, payloads: Mapping[int, np.ndarray]) -> np.ndarray:
    f = plan.code.field
    acc = None
    for j, helper in plan.helpers.items():
        if j not in payloads:
            raise MissingPayload(j)
        part = apply_batch(f, helper.left, payloads[j])
        acc = part if acc is None else f.vadd(acc, part)
    return apply_batch(f, -plan.inv_mhi, acc)
