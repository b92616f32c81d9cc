"""Differential-algebra operators over :class:`~evosym.expr.DiffExpr`.

The total x-derivative ``D = d/dx + sum u_{i+1} d/du_i``, the Fréchet
derivative ``h_* = sum (dh/du_i) D^i``, the evolutionary action
``nabla_h(r) = sum D^j(h) dr/du_j`` (never materialized as an infinite
object; only the finitely many terms ``r`` actually needs are expanded),
and finite-order operators in D with expression coefficients.
"""

from __future__ import annotations

from math import comb
from typing import Mapping

from . import expr as ex
from .expr import GEN_X, DiffExpr, partial, u_indices, u_order


def total_d(e: DiffExpr) -> DiffExpr:
    """Total derivative with respect to x; raises the top u-index by one."""
    acc = dict(partial(e, GEN_X)._t)
    for i in sorted(u_indices(e)):
        step = ex.kernel.mul_terms(partial(e, i)._t, ex.u(i + 1)._t)
        ex.kernel.add_into(acc, step, 1)
    return DiffExpr(acc)


def total_d_power(e: DiffExpr, j: int) -> DiffExpr:
    if j < 0:
        raise ex.ExpressionError("D power must be >= 0")
    for _ in range(j):
        e = total_d(e)
    return e


class DOperator:
    """Finite-degree polynomial in D with expression coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, DiffExpr]) -> None:
        clean = {}
        for d, c in coeffs.items():
            if d < 0:
                raise ex.ExpressionError("operator degrees must be >= 0")
            if c:
                clean[d] = c
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("DOperator is immutable")

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def degree(self) -> int | None:
        return max(self.coeffs) if self.coeffs else None

    def coeff(self, d: int) -> DiffExpr:
        return self.coeffs.get(d, ex.ZERO)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DOperator):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __add__(self, other: "DOperator") -> "DOperator":
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, ex.ZERO) + c
        return DOperator(out)

    def __sub__(self, other: "DOperator") -> "DOperator":
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, ex.ZERO) - c
        return DOperator(out)

    def __neg__(self) -> "DOperator":
        return DOperator({d: -c for d, c in self.coeffs.items()})

    def __repr__(self) -> str:
        if not self.coeffs:
            return "DOperator(0)"
        parts = [f"({c})*D^{d}" for d, c in sorted(self.coeffs.items(), reverse=True)]
        return "DOperator(" + " + ".join(parts) + ")"


D_OP = DOperator({1: ex.ONE})
ZERO_OP = DOperator({})


def frechet(h: DiffExpr) -> DOperator:
    """Fréchet derivative of an expression; empty for u-independent input."""
    top = u_order(h)
    if top is None:
        return ZERO_OP
    return DOperator({i: partial(h, i) for i in range(top + 1)})


def op_apply(op: DOperator, e: DiffExpr) -> DiffExpr:
    out = ex.ZERO
    de = e
    prev = 0
    for d, c in sorted(op.coeffs.items()):
        de = total_d_power(de, d - prev)
        prev = d
        out = out + c * de
    return out


def op_compose(a: DOperator, b: DOperator) -> DOperator:
    """Operator product a∘b via the iterated Leibniz rule
    ``D^i ∘ (c D^j) = sum_p C(i,p) D^p(c) D^{i+j-p}``."""
    if a.is_zero or b.is_zero:
        return ZERO_OP
    max_i = a.degree
    # D^p of every coefficient of b, p = 0..deg(a)
    derivs: dict[int, list[DiffExpr]] = {}
    for j, c in b.coeffs.items():
        row = [c]
        for _ in range(max_i):
            row.append(total_d(row[-1]))
        derivs[j] = row
    out: dict[int, DiffExpr] = {}
    for i, ai in a.coeffs.items():
        for j in b.coeffs:
            for p in range(i + 1):
                term = ai * derivs[j][p]
                if not term:
                    continue
                term = comb(i, p) * term
                d = i + j - p
                out[d] = out.get(d, ex.ZERO) + term
    return DOperator(out)


def op_commutator(a: DOperator, b: DOperator) -> DOperator:
    return op_compose(a, b) - op_compose(b, a)


def ev_apply(h: DiffExpr, r: DiffExpr) -> DiffExpr:
    """Evolutionary action ``nabla_h(r) = sum_j D^j(h) dr/du_j``.

    Finite because r depends on finitely many u_j; coincides with
    ``op_apply(frechet(r), h)``.
    """
    idx = u_indices(r)
    if not idx:
        return ex.ZERO
    out = ex.ZERO
    dh = h
    prev = 0
    for j in sorted(idx):
        dh = total_d_power(dh, j - prev)
        prev = j
        out = out + dh * partial(r, j)
    return out


def nabla_on_op(h: DiffExpr, op: DOperator) -> DOperator:
    """Apply the evolutionary field of h to each coefficient of an operator."""
    return DOperator({d: ev_apply(h, c) for d, c in op.coeffs.items()})
