"""Exact dense linear algebra over the rationals.

Row reduction is fully deterministic: the pivot in each column is the first
row with a nonzero entry, scanning columns left to right.  Every downstream
object built from a solve (lift representatives, space bases) is therefore
reproducible byte for byte.

A sparse elimination path (rows as dicts) is provided for the large graded
systems in the deformation-complex module; it is an optimization only and is
cross-checked against the dense routines in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rationals import QQ, ZERO


class Inconsistent(Exception):
    """Right-hand side not in the column space."""


@dataclass(frozen=True)
class QMatrix:
    rows: int
    cols: int
    entries: tuple  # tuple of row tuples, exact rationals

    @staticmethod
    def from_rows(rows):
        rows = tuple(tuple(QQ(e) if isinstance(e, int) else e for e in r) for r in rows)
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        if any(len(r) != nc for r in rows):
            raise ValueError("ragged rows")
        return QMatrix(nr, nc, rows)

    @staticmethod
    def identity(n):
        return QMatrix.from_rows(
            [[QQ(1) if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zero(nr, nc):
        return QMatrix(nr, nc, tuple(tuple(ZERO for _ in range(nc)) for _ in range(nr)))

    def row(self, i):
        return self.entries[i]

    def col(self, j):
        return tuple(self.entries[i][j] for i in range(self.rows))

    def transpose(self):
        return QMatrix(
            self.cols,
            self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def mul(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            ri = self.entries[i]
            out.append(
                tuple(
                    sum((ri[k] * other.entries[k][j] for k in range(self.cols)), ZERO)
                    for j in range(other.cols)
                )
            )
        return QMatrix(self.rows, other.cols, tuple(out))


def rref(m: QMatrix):
    """Reduced row echelon form.

    Returns (rref matrix, rank, pivot column list).  Pivot choice is the
    first row with a nonzero entry in the current column.
    """
    rows = [list(r) for r in m.entries]
    nr, nc = m.rows, m.cols
    pivots = []
    pr = 0
    for pc in range(nc):
        found = None
        for i in range(pr, nr):
            if rows[i][pc]:
                found = i
                break
        if found is None:
            continue
        if found != pr:
            rows[pr], rows[found] = rows[found], rows[pr]
        inv = 1 / rows[pr][pc]
        if inv != 1:
            rows[pr] = [e * inv for e in rows[pr]]
        for i in range(nr):
            if i != pr and rows[i][pc]:
                f = rows[i][pc]
                ri, rp = rows[i], rows[pr]
                rows[i] = [a - f * b for a, b in zip(ri, rp)]
        pivots.append(pc)
        pr += 1
        if pr == nr:
            break
    out = QMatrix(nr, nc, tuple(tuple(r) for r in rows))
    return out, len(pivots), pivots


def rank(m: QMatrix) -> int:
    return rref(m)[1]


def nullspace(m: QMatrix):
    """Basis of ker(m), one vector per free column, in column order.

    Each basis vector has entry 1 at its free column and 0 at the other free
    columns, so coordinates of any kernel element can be read off at the free
    positions.
    """
    r, _, pivots = rref(m)
    nc = m.cols
    pivset = set(pivots)
    free = [j for j in range(nc) if j not in pivset]
    basis = []
    for fj in free:
        v = [ZERO] * nc
        v[fj] = QQ(1)
        for i, pc in enumerate(pivots):
            v[pc] = -r.entries[i][fj]
        basis.append(tuple(v))
    return basis


def solve(a: QMatrix, b):
    """Solve a x = b exactly.

    Returns (particular, nullspace_basis) with free variables set to zero in
    the particular solution.  Raises Inconsistent when b is not in col(a).
    """
    if len(b) != a.rows:
        raise ValueError("rhs length mismatch")
    aug = QMatrix.from_rows([list(a.entries[i]) + [b[i]] for i in range(a.rows)])
    r, _, pivots = rref(aug)
    nc = a.cols
    for i, pc in enumerate(pivots):
        if pc == nc:
            raise Inconsistent("rhs outside column space")
    part = [ZERO] * nc
    for i, pc in enumerate(pivots):
        part[pc] = r.entries[i][nc]
    return tuple(part), nullspace(a)


# -- sparse elimination (optimization path) ---------------------------------


def sparse_rref(rows, ncols):
    """Row reduction with rows stored as {col: coeff} dicts.

    Returns (reduced row list, pivot column list).  Same deterministic pivot
    rule as the dense rref: for each column in order, the first remaining row
    with a nonzero entry there.  Rows are gcd-normalized implicitly by exact
    rational arithmetic.
    """
    work = [dict(r) for r in rows if r]
    pivots = []
    reduced = []
    for pc in range(ncols):
        hit = None
        for idx, r in enumerate(work):
            if pc in r:
                hit = idx
                break
        if hit is None:
            continue
        prow = work.pop(hit)
        inv = 1 / prow[pc]
        if inv != 1:
            prow = {c: v * inv for c, v in prow.items()}
        for r in reduced:
            if pc in r:
                f = r.pop(pc)
                for c, v in prow.items():
                    if c == pc:
                        continue
                    nv = r.get(c, ZERO) - f * v
                    if nv:
                        r[c] = nv
                    elif c in r:
                        del r[c]
        nxt = []
        for r in work:
            if pc in r:
                f = r.pop(pc)
                for c, v in prow.items():
                    if c == pc:
                        continue
                    nv = r.get(c, ZERO) - f * v
                    if nv:
                        r[c] = nv
                    elif c in r:
                        del r[c]
            if r:
                nxt.append(r)
        work = nxt
        reduced.append(prow)
        pivots.append(pc)
        if not work:
            break
    return reduced, pivots


def sparse_rank(rows, ncols) -> int:
    return len(sparse_rref(rows, ncols)[1])


def sparse_nullspace(rows, ncols):
    """Kernel basis for a sparse row system, same structure as nullspace()."""
    reduced, pivots = sparse_rref(rows, ncols)
    pivset = set(pivots)
    free = [j for j in range(ncols) if j not in pivset]
    basis = []
    for fj in free:
        v = {fj: QQ(1)}
        for r, pc in zip(reduced, pivots):
            if fj in r:
                v[pc] = -r[fj]
        basis.append(v)
    return basis
