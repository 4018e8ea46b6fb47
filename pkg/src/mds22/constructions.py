"""The two explicit (k+2, k, 2) constructions with designed repair matrices.

``build_c1`` minimises repair bandwidth with four node groups and
``lambda_i = alpha**i``; ``build_c2`` minimises repair I/O with three node
groups and ``lambda_i = i``.  Each builder returns a :class:`CodeSpec`
whose ``designed_repair`` holds the per-node repair matrices and which has
passed the pairwise invertibility check.
"""

from __future__ import annotations

from typing import Optional

from .code import CodeSpec, mds_check
from .errors import BadArity, FieldTooSmall, MdsCheckFailed
from .gf import FieldSpec, GF256, is_prime, prime_field
from .linalg import Mat, block, identity, zeros


def group_partition(n: int, g: int) -> tuple[tuple[int, ...], ...]:
    """Split nodes 1..n into g consecutive groups, larger groups first."""
    if not 1 <= g <= n:
        raise BadArity(f"cannot split {n} nodes into {g} groups")
    big, extra = divmod(n, g)
    groups = []
    start = 1
    for z in range(g):
        size = big + (1 if z < extra else 0)
        groups.append(tuple(range(start, start + size)))
        start += size
    return tuple(groups)


def group_of(groups, i: int) -> int:
    """0-based index of the group holding node ``i``."""
    for z, members in enumerate(groups):
        if i in members:
            return z
    raise IndexError(f"node {i} not in partition")


def lambda_vector(field: FieldSpec, lam: int) -> Mat:
    return Mat.from_rows(field, [[1], [lam]])


def _smallest_prime_at_least(n: int) -> int:
    while not is_prime(n):
        n += 1
    return n


def default_field(construction: str, k: int) -> FieldSpec:
    """GF(2^8) whenever it is large enough, otherwise the smallest fitting prime."""
    n = k + 2
    if construction == "c1":
        return GF256 if n <= 250 else prime_field(_smallest_prime_at_least(n + 4))
    return GF256 if n + 1 <= 256 else prime_field(_smallest_prime_at_least(n + 1))


def _finish(code: CodeSpec, check: bool) -> CodeSpec:
    if check:
        ok, pair = mds_check(code)
        if not ok:
            raise MdsCheckFailed(
                f"{code.construction_id} with k={code.k} over {code.field.descriptor()}: "
                f"[H_{pair[0]} H_{pair[1]}] is singular"
            )
    return code


def build_c1(k: int, field: Optional[FieldSpec] = None, check: bool = True) -> CodeSpec:
    """Bandwidth-oriented construction over four node groups."""
    if k < 2:
        raise BadArity("k must be at least 2")
    n = k + 2
    field = field or default_field("c1", k)
    if field.order < n + 3:
        raise FieldTooSmall(f"C1 with n={n} needs q >= {n + 3}, got {field.order}")
    f = field
    alpha = f.generator
    lam = [lambda_vector(f, f.alpha_pow(e)) for e in range(n + 3)]
    z = zeros(f, 2, 1)
    groups = group_partition(n, 4)
    i2 = identity(f, 2)
    o2 = zeros(f, 2, 2)
    m_by_group = (
        block([[i2, o2]]),
        block([[o2, i2]]),
        block([[i2, i2]]),
        Mat.from_rows(f, [[f.neg(1), 0, alpha, 0], [0, alpha, 0, f.neg(1)]]),
    )
    h_blocks, repair = [], []
    for i in range(1, n + 1):
        g = group_of(groups, i)
        if g == 0:
            h = block([[lam[i - 1], -lam[i]], [z, lam[i]]])
        elif g == 1:
            h = block([[lam[i], z], [-lam[i], lam[i + 1]]])
        elif g == 2:
            h = block([[lam[i], z], [z, lam[i + 2]]])
        else:
            h = block([[lam[i + 2], z], [z, lam[i + 2]]])
        h_blocks.append(h)
        repair.append(m_by_group[g])
    code = CodeSpec(k, f, tuple(h_blocks), tuple(repair), "c1", groups)
    return _finish(code, check)


def build_c2(k: int, field: Optional[FieldSpec] = None, check: bool = True) -> CodeSpec:
    """I/O-oriented construction over three node groups."""
    if k < 2:
        raise BadArity("k must be at least 2")
    n = k + 2
    field = field or default_field("c2", k)
    if field.order < n + 1:
        raise FieldTooSmall(f"C2 with n={n} needs q >= {n + 1}, got {field.order}")
    f = field
    # the last group reads lambda_{n+1}; it wraps to lambda_0 when q == n + 1
    lam = [lambda_vector(f, v % f.order) for v in range(n + 2)]
    z = zeros(f, 2, 1)
    groups = group_partition(n, 3)
    i2 = identity(f, 2)
    o2 = zeros(f, 2, 2)
    m_by_group = (block([[i2, o2]]), block([[o2, i2]]), block([[i2, i2]]))
    h_blocks, repair = [], []
    for i in range(1, n + 1):
        g = group_of(groups, i)
        if g == 0:
            h = block([[lam[i - 1], -lam[i]], [z, lam[i]]])
        elif g == 1:
            h = block([[lam[i], z], [-lam[i], lam[i - 1]]])
        else:
            h = block([[lam[i], z], [z, lam[i + 1]]])
        h_blocks.append(h)
        repair.append(m_by_group[g])
    code = CodeSpec(k, f, tuple(h_blocks), tuple(repair), "c2", groups)
    return _finish(code, check)


def build(construction: str, k: int, field: Optional[FieldSpec] = None, check: bool = True) -> CodeSpec:
    builders = {"c1": build_c1, "c2": build_c2}
    if construction not in builders:
        raise ValueError(f"unknown construction {construction!r}")
    return builders[construction](k, field, check)


def repair_pattern(code: CodeSpec, measure: str) -> list[list[int]]:
    """``[[measure(M_i H_j) for j] for i]`` with the designed repair matrices."""
    from .linalg import mat_mul, nonzero_columns, rank

    fn = {"rank": rank, "nz": nonzero_columns}[measure]
    return [[fn(mat_mul(code.designed(i), code.h(j))) for j in code.nodes()]
            for i in code.nodes()]


def expected_pattern(code: CodeSpec) -> list[list[int]]:
    """2 where i and j share a group, 1 elsewhere."""
    gid = {i: group_of(code.groups, i) for i in code.nodes()}
    return [[2 if gid[i] == gid[j] else 1 for j in code.nodes()] for i in code.nodes()]


PATTERN_MEASURE = {"c1": "rank", "c2": "nz"}
