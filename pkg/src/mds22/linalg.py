"""Small dense matrices over a :class:`~mds22.gf.FieldSpec`.

Everything the codes touch is at most 4 x 2k, so matrices are immutable
value objects backed by a flat tuple and all algorithms are plain Gaussian
elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, NotSquare, Singular
from .gf import FieldSpec


@dataclass(frozen=True)
class Mat:
    rows: int
    cols: int
    entries: tuple
    field: FieldSpec

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )
        q = self.field.order
        if any(not 0 <= e < q for e in self.entries):
            raise ValueError(f"entry outside GF({q})")

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[int]]) -> "Mat":
        """Build from nested rows; entries are reduced into the field."""
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls(len(rows), ncols, tuple(_reduce(field, e) for r in rows for e in r), field)

    @classmethod
    def column(cls, field: FieldSpec, values: Sequence[int]) -> "Mat":
        return cls.from_rows(field, [[v] for v in values])

    @classmethod
    def from_array(cls, field: FieldSpec, arr) -> "Mat":
        arr = np.asarray(arr)
        return cls(arr.shape[0], arr.shape[1], tuple(int(v) for v in arr.ravel()), field)

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r * self.cols + c]

    def row(self, r: int) -> tuple:
        return self.entries[r * self.cols:(r + 1) * self.cols]

    def col(self, c: int) -> tuple:
        return self.entries[c::self.cols]

    def tolist(self) -> list[list[int]]:
        return [list(self.row(r)) for r in range(self.rows)]

    def to_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=np.int64).reshape(self.rows, self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def transpose(self) -> "Mat":
        return Mat(self.cols, self.rows,
                   tuple(self[r, c] for c in range(self.cols) for r in range(self.rows)),
                   self.field)

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Mat":
        rows, cols = list(rows), list(cols)
        return Mat(len(rows), len(cols), tuple(self[r, c] for r in rows for c in cols), self.field)

    def __matmul__(self, other: "Mat") -> "Mat":
        return mat_mul(self, other)

    def __add__(self, other: "Mat") -> "Mat":
        _same_shape(self, other)
        f = self.field
        return Mat(self.rows, self.cols,
                   tuple(f.add(a, b) for a, b in zip(self.entries, other.entries)), f)

    def __sub__(self, other: "Mat") -> "Mat":
        _same_shape(self, other)
        f = self.field
        return Mat(self.rows, self.cols,
                   tuple(f.sub(a, b) for a, b in zip(self.entries, other.entries)), f)

    def __neg__(self) -> "Mat":
        f = self.field
        return Mat(self.rows, self.cols, tuple(f.neg(a) for a in self.entries), f)

    def scale(self, c: int) -> "Mat":
        f = self.field
        return Mat(self.rows, self.cols, tuple(f.mul(c, a) for a in self.entries), f)

    def __str__(self):
        return "\n".join(" ".join(f"{v:>3}" for v in self.row(r)) for r in range(self.rows))


def _reduce(field: FieldSpec, e: int) -> int:
    if field.kind == "prime":
        return e % field.p
    if e < 0:
        # -1 in characteristic 2 is 1
        e = -e
    if e >= field.order:
        raise ValueError(f"{e} is not an element of GF({field.order})")
    return e


def _same_shape(a: Mat, b: Mat) -> None:
    if a.field != b.field:
        raise FieldMismatch("operands live in different fields")
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")


def identity(field: FieldSpec, n: int) -> Mat:
    return Mat(n, n, tuple(int(r == c) for r in range(n) for c in range(n)), field)


def zeros(field: FieldSpec, rows: int, cols: int) -> Mat:
    return Mat(rows, cols, (0,) * (rows * cols), field)


def mat_mul(a: Mat, b: Mat) -> Mat:
    if a.field != b.field:
        raise FieldMismatch("operands live in different fields")
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    f = a.field
    out = []
    bcols = [b.col(c) for c in range(b.cols)]
    for r in range(a.rows):
        arow = a.row(r)
        for bc in bcols:
            acc = 0
            for x, y in zip(arow, bc):
                if x and y:
                    acc = f.add(acc, f.mul(x, y))
            out.append(acc)
    return Mat(a.rows, b.cols, tuple(out), f)


def rref(a: Mat) -> tuple[Mat, list[int]]:
    """Reduced row-echelon form with unit pivots and the pivot column list."""
    f = a.field
    m = a.tolist()
    pivots = []
    r = 0
    for c in range(a.cols):
        if r == a.rows:
            break
        pr = next((i for i in range(r, a.rows) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = f.inv(m[r][c])
        m[r] = [f.mul(inv, v) for v in m[r]]
        for i in range(a.rows):
            if i != r and m[i][c]:
                factor = m[i][c]
                m[i] = [f.sub(x, f.mul(factor, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return Mat(a.rows, a.cols, tuple(v for row in m for v in row), f), pivots


def rank(a: Mat) -> int:
    return len(rref(a)[1])


def nonzero_columns(a: Mat) -> int:
    return sum(1 for c in range(a.cols) if any(a.col(c)))


def hstack(*parts: Mat) -> Mat:
    parts = [p for p in parts]
    if not parts:
        raise DimensionMismatch("nothing to stack")
    rows = parts[0].rows
    field = parts[0].field
    for p in parts:
        if p.field != field:
            raise FieldMismatch("operands live in different fields")
        if p.rows != rows:
            raise DimensionMismatch("hstack needs equal row counts")
    entries = tuple(v for r in range(rows) for p in parts for v in p.row(r))
    return Mat(rows, sum(p.cols for p in parts), entries, field)


def vstack(*parts: Mat) -> Mat:
    parts = [p for p in parts]
    if not parts:
        raise DimensionMismatch("nothing to stack")
    cols = parts[0].cols
    field = parts[0].field
    for p in parts:
        if p.field != field:
            raise FieldMismatch("operands live in different fields")
        if p.cols != cols:
            raise DimensionMismatch("vstack needs equal column counts")
    return Mat(sum(p.rows for p in parts), cols, tuple(v for p in parts for v in p.entries), field)


def block(grid: Sequence[Sequence[Mat]]) -> Mat:
    """Assemble a block matrix from a grid of conforming blocks."""
    return vstack(*(hstack(*row) for row in grid))


def solve(a: Mat, b: Mat) -> Mat:
    """Return ``x`` with ``a @ x == b`` for square invertible ``a``."""
    if a.rows != a.cols:
        raise NotSquare(f"{a.shape} is not square")
    if b.rows != a.rows:
        raise DimensionMismatch(f"right-hand side has {b.rows} rows, need {a.rows}")
    reduced, pivots = rref(hstack(a, b))
    if pivots[:a.cols] != list(range(a.cols)):
        raise Singular("coefficient matrix is singular")
    return reduced.submatrix(range(a.rows), range(a.cols, a.cols + b.cols))


def inverse(a: Mat) -> Mat:
    if a.rows != a.cols:
        raise NotSquare(f"{a.shape} is not square")
    return solve(a, identity(a.field, a.rows))


def column_factorize(a: Mat) -> tuple[Mat, Mat]:
    """Split ``a`` as ``L @ R`` with ``L`` the leftmost independent columns.

    ``R`` holds the coordinates of each column of ``a`` in the basis given by
    the columns of ``L``, so zero columns of ``a`` stay zero in ``R``.
    """
    chosen: list[int] = []
    for c in range(a.cols):
        if rank(a.submatrix(range(a.rows), chosen + [c])) > len(chosen):
            chosen.append(c)
    r = len(chosen)
    if r == 0:
        return zeros(a.field, a.rows, 0), zeros(a.field, 0, a.cols)
    left = a.submatrix(range(a.rows), chosen)
    reduced, _ = rref(hstack(left, a))
    right = reduced.submatrix(range(r), range(r, r + a.cols))
    return left, right
