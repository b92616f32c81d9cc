"""Exact nullspace computation over rationals extended by named constants.

Matrix entries are constant expressions (elements of the polynomial ring in
the named constants over Q, with invertible constants).  Elimination is the
fraction-free Gauss-Jordan scheme: every sweep updates all rows, dividing by
the previous pivot, so entries stay in the ring and all divisions are exact.
After the last sweep every pivot entry equals the final pivot d, and each
free column f yields the nullspace vector with value d at f and ``-M[i][f]``
at the i-th pivot column.

A pivot that involves named constants is only generically nonzero; those
pivots are collected so callers can flag the assumed-nonvanishing locus.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import expr as ex
from .expr import DiffExpr


@dataclass(frozen=True)
class NullspaceResult:
    basis: tuple[tuple[DiffExpr, ...], ...]
    rank: int
    pivot_assumptions: tuple[DiffExpr, ...]  # symbolic pivots assumed nonzero


def nullspace(rows: list[list[DiffExpr]], ncols: int) -> NullspaceResult:
    m = [list(r) for r in rows]
    nrows = len(m)
    for r in m:
        if len(r) != ncols:
            raise ValueError("ragged matrix")

    prev = ex.ONE
    pivots: list[tuple[int, int]] = []
    assumptions: list[DiffExpr] = []
    piv_r = 0
    for piv_c in range(ncols):
        sel = None
        for i in range(piv_r, nrows):
            if m[i][piv_c]:
                if sel is None:
                    sel = i
                s = ex.as_scalar(m[i][piv_c])
                if s is not None and s.is_rational:
                    sel = i  # prefer a rational pivot: no genericity assumption
                    break
        if sel is None:
            continue
        if sel != piv_r:
            m[sel], m[piv_r] = m[piv_r], m[sel]
        p = m[piv_r][piv_c]
        if not ex.is_constant(p):
            raise ValueError("matrix entries must be constant expressions")
        if ex.as_scalar(p) is None or not ex.as_scalar(p).is_rational:
            assumptions.append(p)
        for i in range(nrows):
            if i == piv_r:
                continue
            fi = m[i][piv_c]
            row_i = m[i]
            row_p = m[piv_r]
            unit_prev = prev == ex.ONE
            for c in range(ncols):
                num = p * row_i[c] - fi * row_p[c]
                if num.is_zero:
                    row_i[c] = ex.ZERO
                    continue
                if unit_prev:
                    row_i[c] = num
                    continue
                q = ex.try_divide(num, prev)
                if q is None:
                    raise RuntimeError("fraction-free elimination: "
                                       "inexact division (bug)")
                row_i[c] = q
        pivots.append((piv_r, piv_c))
        prev = p
        piv_r += 1
        if piv_r == nrows:
            break

    # Trailing pivot columns (after the last sweep) still hold older pivot
    # values on their own rows; normalize them to the final pivot by the
    # same exact-division rule applied to the remaining columns.
    d = prev
    pivot_cols = {c: r for r, c in pivots}
    basis = []
    for f in range(ncols):
        if f in pivot_cols:
            continue
        vec = [ex.ZERO] * ncols
        vec[f] = d
        for c, r in pivot_cols.items():
            piv_val = m[r][c]
            entry = m[r][f]
            if piv_val == d:
                vec[c] = -entry
            else:
                scaled = ex.try_divide(entry * d, piv_val)
                if scaled is None:
                    raise RuntimeError("fraction-free elimination: "
                                       "inexact pivot normalization (bug)")
                vec[c] = -scaled
        basis.append(tuple(vec))

    for vec in basis:  # exact verification of A v = 0
        for row in rows:
            s = ex.ZERO
            for a, v in zip(row, vec):
                if a and v:
                    s = s + a * v
            if not s.is_zero:
                raise RuntimeError("nullspace verification failed (bug)")

    return NullspaceResult(basis=tuple(basis), rank=len(pivots),
                           pivot_assumptions=tuple(assumptions))


def rank(rows: list[list[DiffExpr]], ncols: int) -> int:
    if not rows:
        return 0
    return nullspace(rows, ncols).rank


def in_span(target: list[DiffExpr], vectors: list[list[DiffExpr]],
            ncols: int) -> bool:
    """Whether ``target`` lies in the span of ``vectors`` (generically, when
    constants are involved)."""
    base = [list(v) for v in vectors]
    if rank(base, ncols) == rank(base + [list(target)], ncols):
        return True
    return False
