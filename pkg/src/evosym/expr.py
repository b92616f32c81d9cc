"""Exact differential expressions in ``x``, ``t``, ``u = u_0, u_1, ...``.

Values are canonical sums of terms; each term is a rational coefficient times
a monomial in named constants and generators times at most one exponential
factor ``exp(linear combination of x, t, u)``.  The normal form is unique, so
semantic equality is structural equality and zero-testing is "is the term map
empty".  All arithmetic is exact; there is no floating point anywhere.

Generators are encoded as ints: ``u_i -> i``, ``x -> -1``, ``t -> -2``.  The
term-map layout is documented in ``_kernel_py``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from ._backend import kernel

GEN_X = -1
GEN_T = -2

_DIV_STEP_CAP = 10_000


class ExpressionError(ValueError):
    """Raised for operations that leave the expression class."""


def _gen_name(gen: int) -> str:
    if gen == GEN_X:
        return "x"
    if gen == GEN_T:
        return "t"
    if gen == 0:
        return "u"
    return f"u{gen}"


class Scalar:
    """Exact scalar: a rational times a monomial in named constants.

    Constants are opaque and invertible; two scalars are equal exactly when
    their reduced rational parts and sorted constant powers coincide.
    """

    __slots__ = ("q", "consts")

    def __init__(self, q: Union[int, Fraction] = 1,
                 consts: Iterable[tuple[str, int]] = ()) -> None:
        q = Fraction(q)
        consts = tuple(sorted((n, int(e)) for n, e in consts if e))
        if not q:
            consts = ()
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "consts", consts)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("Scalar is immutable")

    def __bool__(self) -> bool:
        return bool(self.q)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.q == other.q and self.consts == other.consts

    def __hash__(self):
        if not self.consts:
            return hash(self.q)
        return hash((self.q, self.consts))

    def __neg__(self) -> "Scalar":
        return Scalar(-self.q, self.consts)

    def __mul__(self, other) -> "Scalar":
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        merged: dict[str, int] = dict(self.consts)
        for n, e in other.consts:
            merged[n] = merged.get(n, 0) + e
        return Scalar(self.q * other.q, merged.items())

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        return self * other ** -1

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int):
            raise ExpressionError("scalar powers must be integers")
        if n < 0 and not self.q:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar(self.q ** n, ((nm, e * n) for nm, e in self.consts))

    @property
    def is_one(self) -> bool:
        return self.q == 1 and not self.consts

    @property
    def is_rational(self) -> bool:
        return not self.consts

    def to_expr(self) -> "DiffExpr":
        key = tuple(((1, nm), e) for nm, e in self.consts)
        return DiffExpr({key: _num(self.q)}) if self.q else ZERO

    def __str__(self) -> str:
        return to_source(self.to_expr())

    def __repr__(self) -> str:
        return f"Scalar({self})"


class DiffExpr:
    """Canonical-form differential expression (immutable)."""

    __slots__ = ("_t", "_items", "_hash")

    def __init__(self, terms: Mapping) -> None:
        object.__setattr__(self, "_t", dict(terms))
        object.__setattr__(self, "_items", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("DiffExpr is immutable")

    # -- canonical views ---------------------------------------------------

    def term_items(self) -> tuple:
        """Terms as a tuple of ``(key, coefficient)`` in the canonical order."""
        items = self._items
        if items is None:
            items = tuple(sorted(self._t.items(), key=lambda kv: (_grade(kv[0]), kv[0])))
            object.__setattr__(self, "_items", items)
        return items

    @property
    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __len__(self) -> int:
        return len(self._t)

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        h = self._hash
        if h is None:
            if not self._t:
                h = hash(Fraction(0))
            elif len(self._t) == 1 and () in self._t:
                h = hash(self._t[()])  # rational constants hash like numbers
            else:
                h = hash(self.term_items())
            object.__setattr__(self, "_hash", h)
        return h

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "DiffExpr":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        acc = dict(self._t)
        kernel.add_into(acc, other._t, 1)
        return DiffExpr(acc)

    __radd__ = __add__

    def __sub__(self, other) -> "DiffExpr":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        acc = dict(self._t)
        kernel.add_into(acc, other._t, -1)
        return DiffExpr(acc)

    def __rsub__(self, other) -> "DiffExpr":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self) -> "DiffExpr":
        return DiffExpr({k: -c for k, c in self._t.items()})

    def __mul__(self, other) -> "DiffExpr":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return DiffExpr(kernel.mul_terms(self._t, other._t))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DiffExpr":
        if isinstance(other, DiffExpr):
            other = as_scalar(other)
            if other is None:
                raise ExpressionError("division is only defined by scalars")
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if isinstance(other, Scalar):
            if not other:
                raise ZeroDivisionError("division by zero scalar")
            return self * (other ** -1).to_expr()
        return NotImplemented

    def __pow__(self, n: int) -> "DiffExpr":
        if not isinstance(n, int):
            raise ExpressionError("non-integer exponent")
        if n == 0:
            return ONE
        if n < 0:
            inv = _invert_term(self)
            if inv is None:
                raise ExpressionError(
                    "negative power of a non-invertible expression")
            return inv ** (-n)
        base = self
        out = None
        while n:
            if n & 1:
                out = base if out is None else out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __str__(self) -> str:
        return to_source(self)

    def __repr__(self) -> str:
        return f"DiffExpr({to_source(self)})"


def _num(v: Union[int, Fraction]):
    """Coefficients are ints whenever they are integral (much faster than
    Fraction); the two interoperate, compare and hash identically."""
    if isinstance(v, int):
        return v
    return v.numerator if v.denominator == 1 else v


def _coerce(v) -> DiffExpr | None:
    if isinstance(v, DiffExpr):
        return v
    if isinstance(v, (int, Fraction)):
        v = _num(v)
        return DiffExpr({(): v}) if v else ZERO
    if isinstance(v, Scalar):
        return v.to_expr()
    return None


def _invert_term(e: DiffExpr) -> DiffExpr | None:
    # invertible <=> a single term free of generator powers
    if len(e._t) != 1:
        return None
    (key, c), = e._t.items()
    if any(slot[0] == 0 for slot, _ in key):
        return None
    return DiffExpr({tuple((s, -v) for s, v in key): _num(Fraction(1) / c)})


def _grade(key) -> int:
    return sum(v for s, v in key if s[0] == 0)


# -- constructors ----------------------------------------------------------

ZERO = DiffExpr({})
ONE = DiffExpr({(): 1})


def gen_expr(gen: int) -> DiffExpr:
    return DiffExpr({(((0, gen), 1),): 1})


x = gen_expr(GEN_X)
t = gen_expr(GEN_T)


def u(i: int = 0) -> DiffExpr:
    if i < 0:
        raise ExpressionError("u index must be >= 0")
    return gen_expr(i)


def const(name: str) -> DiffExpr:
    """A named symbolic constant (opaque, invertible, never a number)."""
    return DiffExpr({(((1, name), 1),): 1})


def rational(p: Union[int, Fraction], q: int = 1) -> DiffExpr:
    v = _num(Fraction(p, q))
    return DiffExpr({(): v}) if v else ZERO


def exp_of(arg) -> DiffExpr:
    """``exp(arg)`` for ``arg`` a scalar-linear combination of x, t, u.

    ``exp(0)`` normalizes to 1; products of exponentials merge by adding
    arguments (that falls out of the slot encoding).
    """
    arg = normalize(arg)
    slots = []
    for key, c in arg._t.items():
        gen = None
        cmono = []
        for slot, v in key:
            if slot[0] == 0:
                if gen is not None or v != 1 or slot[1] not in (GEN_X, GEN_T, 0):
                    raise ExpressionError(
                        "exponential argument must be linear in x, t, u")
                gen = slot[1]
            elif slot[0] == 1:
                cmono.append((slot[1], v))
            else:
                raise ExpressionError("nested exponentials are not allowed")
        if gen is None:
            raise ExpressionError(
                "exponential argument must be a combination of x, t, u "
                "with no constant term")
        slots.append(((2, gen, tuple(sorted(cmono))), c))
    return DiffExpr({tuple(sorted(slots)): 1})


# -- the raw-tree normalizer ----------------------------------------------

def normalize(tree) -> DiffExpr:
    """Evaluate a raw expression tree to its unique canonical form.

    Accepts ``DiffExpr`` (returned as-is: normalization is idempotent),
    numbers, ``Scalar``, or nested tuples ``("add"|"sub"|"mul"|"div"|"neg"|
    "pow"|"exp"|"gen"|"const"|"num", ...)`` as produced by the parser.
    """
    e = _coerce(tree)
    if e is not None:
        return e
    if not isinstance(tree, tuple) or not tree:
        raise ExpressionError(f"cannot normalize {tree!r}")
    op = tree[0]
    if op == "num":
        return rational(tree[1])
    if op == "gen":
        return gen_expr(tree[1])
    if op == "const":
        return const(tree[1])
    if op == "add":
        out = normalize(tree[1])
        for sub in tree[2:]:
            out = out + normalize(sub)
        return out
    if op == "sub":
        return normalize(tree[1]) - normalize(tree[2])
    if op == "neg":
        return -normalize(tree[1])
    if op == "mul":
        out = normalize(tree[1])
        for sub in tree[2:]:
            out = out * normalize(sub)
        return out
    if op == "div":
        return normalize(tree[1]) / normalize(tree[2])
    if op == "pow":
        n = tree[2]
        if not isinstance(n, int):
            raise ExpressionError("non-integer exponent")
        return normalize(tree[1]) ** n
    if op == "exp":
        return exp_of(normalize(tree[1]))
    raise ExpressionError(f"unknown node {op!r}")


# -- calculus-free structural operations -----------------------------------

def _gencode(v) -> int:
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        if v == "x":
            return GEN_X
        if v == "t":
            return GEN_T
        if v == "u":
            return 0
        if v.startswith("u") and v[1:].lstrip("_").isdigit():
            return int(v[1:].lstrip("_"))
        raise ExpressionError(f"unknown generator {v!r}")
    if isinstance(v, DiffExpr) and len(v._t) == 1:
        (key, c), = v._t.items()
        if c == 1 and len(key) == 1 and key[0][0][0] == 0 and key[0][1] == 1:
            return key[0][0][1]
    raise ExpressionError(f"not a generator: {v!r}")


def partial(e: DiffExpr, v) -> DiffExpr:
    """Formal partial derivative; all generators are independent."""
    return DiffExpr(kernel.diff_terms(e._t, _gencode(v)))


def substitute(e: DiffExpr, bindings: Mapping) -> DiffExpr:
    """Simultaneous substitution ``generator -> expression``, then normalize.

    Substitutions must keep every exponential argument linear in x, t, u;
    otherwise the result leaves the expression class and this raises.
    """
    binds = {_gencode(g): normalize(v) for g, v in bindings.items()}

    def image(gen: int) -> DiffExpr:
        got = binds.get(gen)
        return gen_expr(gen) if got is None else got

    total = ZERO
    for key, c in e._t.items():
        factor = DiffExpr({(): c})
        arg = ZERO
        for slot, v in key:
            if slot[0] == 0:
                factor = factor * image(slot[1]) ** v
            elif slot[0] == 1:
                factor = factor * DiffExpr({((slot, v),): 1})
            else:
                cm = DiffExpr({tuple(((1, nm), p) for nm, p in slot[2]): v})
                arg = arg + cm * image(slot[1])
        if arg:
            factor = factor * exp_of(arg)
        total = total + factor
    return total


def u_indices(e: DiffExpr) -> set[int]:
    out: set[int] = set()
    for key in e._t:
        for slot, _ in key:
            if slot[0] == 0 and slot[1] >= 0:
                out.add(slot[1])
            elif slot[0] == 2 and slot[1] == 0:
                out.add(0)
    return out


def u_order(e: DiffExpr) -> int | None:
    """Largest ``k`` with a ``u_k`` dependence; 0 for expressions in x, t
    only; ``None`` for the zero expression."""
    if e.is_zero:
        return None
    idx = u_indices(e)
    return max(idx) if idx else 0


def occurs(e: DiffExpr, v) -> bool:
    gen = _gencode(v)
    for key in e._t:
        for slot, _ in key:
            if slot[0] == 0 and slot[1] == gen:
                return True
            if slot[0] == 2 and slot[1] == gen:
                return True
    return False


def has_exp_in(e: DiffExpr, v) -> bool:
    gen = _gencode(v)
    return any(slot[0] == 2 and slot[1] == gen
               for key in e._t for slot, _ in key)


def is_constant(e: DiffExpr) -> bool:
    """True when no generator occurs at all (rationals and named constants)."""
    return all(slot[0] == 1 for key in e._t for slot, _ in key)


def is_t_only(e: DiffExpr) -> bool:
    """True when the expression is free of x and every u_i."""
    for key in e._t:
        for slot, _ in key:
            if slot[0] == 1:
                continue
            if slot[1] != GEN_T:
                return False
    return True


def term_u_order(key) -> int | None:
    order = None
    for slot, _ in key:
        if slot[0] == 0 and slot[1] >= 0:
            order = slot[1] if order is None else max(order, slot[1])
        elif slot[0] == 2 and slot[1] == 0:
            order = 0 if order is None else order
    return order


def split_u_order(e: DiffExpr, cut: int) -> tuple[DiffExpr, DiffExpr]:
    """Split into (terms of u-order >= cut, the rest)."""
    hi: dict = {}
    lo: dict = {}
    for key, c in e._t.items():
        o = term_u_order(key)
        (hi if o is not None and o >= cut else lo)[key] = c
    return DiffExpr(hi), DiffExpr(lo)


def u_free_part(e: DiffExpr) -> tuple[DiffExpr, DiffExpr]:
    """Split into (terms with some u-dependence, terms free of u)."""
    dep: dict = {}
    free: dict = {}
    for key, c in e._t.items():
        (free if term_u_order(key) is None else dep)[key] = c
    return DiffExpr(dep), DiffExpr(free)


def poly_degree(e: DiffExpr, v) -> int:
    """Monomial degree in a generator (exponential factors not counted)."""
    gen = _gencode(v)
    deg = 0
    for key in e._t:
        for slot, p in key:
            if slot[0] == 0 and slot[1] == gen:
                deg = max(deg, p)
    return deg


def split_by_power(e: DiffExpr, v) -> dict[int, DiffExpr]:
    """Coefficients of the powers of a generator (that generator removed)."""
    gen = _gencode(v)
    out: dict[int, dict] = {}
    for key, c in e._t.items():
        p = 0
        rest = []
        for slot, val in key:
            if slot[0] == 0 and slot[1] == gen:
                p = val
            else:
                rest.append((slot, val))
        out.setdefault(p, {})[tuple(rest)] = c
    return {p: DiffExpr(d) for p, d in out.items()}


def as_scalar(e: DiffExpr) -> Scalar | None:
    """The expression as a Scalar, or None when it is not one."""
    if e.is_zero:
        return Scalar(0)
    if len(e._t) != 1:
        return None
    (key, c), = e._t.items()
    if any(slot[0] != 1 for slot, _ in key):
        return None
    return Scalar(c, ((slot[1], v) for slot, v in key))


# -- exact division and roots ----------------------------------------------

def _dense_le(k1, k2) -> bool:
    """k1 <= k2 in graded order with dense lexicographic tie-break."""
    g1, g2 = _grade(k1), _grade(k2)
    if g1 != g2:
        return g1 < g2
    i = j = 0
    while i < len(k1) or j < len(k2):
        s1 = k1[i][0] if i < len(k1) else None
        s2 = k2[j][0] if j < len(k2) else None
        if s1 is not None and (s2 is None or s1 < s2):
            v1, v2 = k1[i][1], 0
            i += 1
            slot_differs = v1 != v2
        elif s2 is not None and (s1 is None or s2 < s1):
            v1, v2 = 0, k2[j][1]
            j += 1
            slot_differs = v1 != v2
        else:
            v1, v2 = k1[i][1], k2[j][1]
            i += 1
            j += 1
            slot_differs = v1 != v2
        if slot_differs:
            return v1 < v2
    return True


def _lead(terms: Mapping):
    best = None
    for key, c in terms.items():
        if best is None or _dense_le(best[0], key):
            best = (key, c)
    return best


def try_divide(a: DiffExpr, b: DiffExpr) -> DiffExpr | None:
    """Exact quotient ``a / b`` in the expression class, or None.

    Sparse division steered by a graded monomial order; generator exponents
    in the quotient must stay non-negative (constants and exponential
    factors are invertible, generators are not).
    """
    if b.is_zero:
        raise ZeroDivisionError("division by zero expression")
    if a.is_zero:
        return ZERO
    lead_b, cb = _lead(b._t)
    neg_lead_b = tuple((s, -v) for s, v in lead_b)
    rem = dict(a._t)
    quo: dict = {}
    for _ in range(_DIV_STEP_CAP):
        if not rem:
            return DiffExpr(quo)
        lead_r, cr = _lead(rem)
        qk = kernel.mul_key(lead_r, neg_lead_b)
        if any(slot[0] == 0 and v < 0 for slot, v in qk):
            return None
        qc = _num(Fraction(cr) / cb)
        quo[qk] = qc
        kernel.add_into(rem, kernel.mul_single(b._t, qk, qc), -1)
    return None


def try_nth_root(e: DiffExpr, m: int) -> DiffExpr | None:
    """Exact m-th root of a single-term expression, when one exists."""
    if m <= 0:
        raise ExpressionError("root index must be positive")
    if m == 1:
        return e
    if len(e._t) != 1:
        return None
    (key, c), = e._t.items()
    if c < 0:
        return None
    num, den = _iroot(c.numerator, m), _iroot(c.denominator, m)
    if num is None or den is None:
        return None
    slots = []
    for slot, v in key:
        if slot[0] == 2:
            slots.append((slot, v / m))
        else:
            if v % m:
                return None
            slots.append((slot, v // m))
    return DiffExpr({tuple(slots): _num(Fraction(num, den))})


def _iroot(n: int, m: int) -> int | None:
    if n in (0, 1):
        return n
    lo, hi = 1, 1 << ((n.bit_length() + m - 1) // m)
    while lo <= hi:
        mid = (lo + hi) // 2
        p = mid ** m
        if p == n:
            return mid
        if p < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


# -- printing ---------------------------------------------------------------

def _print_sort_key(item):
    key, _ = item
    top = max((s[1] for s, _ in key if s[0] == 0), default=-3)
    return (top, _grade(key), key)


def _mono_src(name: str, power: int) -> str:
    if power == 1:
        return name
    return f"{name}^{power}"


def _arg_src(slots) -> str:
    parts = []
    for (_, gen, cmono), q in slots:
        factors = [_mono_src(nm, p) for nm, p in cmono] + [_gen_name(gen)]
        mag = abs(q)
        if mag != 1:
            factors.insert(0, str(mag))
        piece = "*".join(factors)
        if not parts:
            parts.append(piece if q > 0 else f"-{piece}")
        else:
            parts.append(f"+ {piece}" if q > 0 else f"- {piece}")
    return " ".join(parts)


def to_source(e: DiffExpr) -> str:
    """Render in the CLI grammar; ``parse(to_source(e)) == e``."""
    if e.is_zero:
        return "0"
    chunks = []
    for key, c in sorted(e.term_items(), key=_print_sort_key, reverse=True):
        consts = [(s[1], v) for s, v in key if s[0] == 1]
        gens = [(s[1], v) for s, v in key if s[0] == 0]
        atoms = [(s, v) for s, v in key if s[0] == 2]
        factors = [_mono_src(nm, p) for nm, p in consts]
        factors += [_mono_src(_gen_name(g), p)
                    for g, p in sorted(gens, reverse=True)]
        if atoms:
            factors.append(f"exp({_arg_src(atoms)})")
        mag = abs(c)
        if mag != 1 or not factors:
            factors.insert(0, str(mag))
        body = "*".join(factors)
        if not chunks:
            chunks.append(body if c > 0 else f"-{body}")
        else:
            chunks.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(chunks)
