"""Exact scalar arithmetic: rationals, multivariate polynomials, rational functions.

Every coefficient in the engine lives in the field of fractions of
Q[x1,...,xn] for a declared, ordered set of symbols.  Canonical forms are
pinned down once and used everywhere:

* monomials are compared by total degree, ties broken lexicographically in
  the symbol-table order (grlex);
* a ``Scalar`` stores a coprime numerator/denominator pair, the denominator
  normalized to leading coefficient 1 under that order.

The multivariate gcd uses recursive content/primitive-part decomposition
with Brown's subresultant pseudo-remainder sequence, so no factorization is
ever required.  ``FactoredRational`` is a companion representation for
pipelines whose denominators are products of known irreducible factors
(eigenvalue differences, cyclotomic polynomials in q); cancellation there is
exact trial division, which sidesteps general gcds on large intermediates.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction
from math import gcd as int_gcd
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import (
    DivisionByZero,
    ParseError,
    PoleAtPoint,
    ResourceLimit,
    UnboundSymbol,
)

_NAME_RE = re.compile(r"^[a-z][a-z0-9_]*$")

_ZERO = Fraction(0)
_ONE = Fraction(1)


class SymbolTable:
    """Ordered, immutable list of symbol names.

    The order fixes the canonical monomial order for every polynomial built
    over the table.  Names like ``q``, ``h``, ``mu1``, ``nu1`` carry the
    conventional roles (deformation parameter, central shift, even/odd
    eigenvalues) but any name matching ``[a-z][a-z0-9_]*`` is accepted.
    """

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str] = ()):
        names = tuple(names)
        for name in names:
            if not _NAME_RE.match(name):
                raise ParseError(f"invalid symbol name {name!r}")
        if len(set(names)) != len(names):
            raise ParseError("symbol names must be unique")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymbolTable) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"SymbolTable({list(self.names)!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnboundSymbol(f"symbol {name!r} not in table {self.names}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @staticmethod
    def for_profile(m: int, n: int, *, symbolic_q: bool = True, with_h: bool = False,
                    extra: Sequence[str] = ()) -> "SymbolTable":
        """Table with the conventional names for an (m|n) eigenvalue profile."""
        names = []
        if symbolic_q:
            names.append("q")
        if with_h:
            names.append("h")
        names += [f"mu{i}" for i in range(1, m + 1)]
        names += [f"nu{j}" for j in range(1, n + 1)]
        names += list(extra)
        return SymbolTable(names)


EMPTY_TABLE = SymbolTable(())


def _mono_key(exps: tuple) -> tuple:
    return (sum(exps), exps)


def _mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _mono_div(a: tuple, b: tuple) -> Optional[tuple]:
    out = []
    for x, y in zip(a, b):
        if x < y:
            return None
        out.append(x - y)
    return tuple(out)


class Poly:
    """Multivariate polynomial with exact rational coefficients.

    Immutable; ``terms`` maps exponent tuples (one entry per table symbol)
    to nonzero ``Fraction`` coefficients.
    """

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table: SymbolTable, terms: Mapping[tuple, Fraction]):
        self.table = table
        self.terms = {e: c for e, c in terms.items() if c}
        self._hash = None

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero(table: SymbolTable) -> "Poly":
        return Poly(table, {})

    @staticmethod
    def const(table: SymbolTable, value) -> "Poly":
        value = Fraction(value)
        if not value:
            return Poly(table, {})
        return Poly(table, {(0,) * len(table): value})

    @staticmethod
    def symbol(table: SymbolTable, name: str) -> "Poly":
        i = table.index(name)
        exps = tuple(1 if j == i else 0 for j in range(len(table)))
        return Poly(table, {exps: _ONE})

    def lift(self, table: SymbolTable) -> "Poly":
        """Re-express over a larger table containing all used symbols."""
        if table == self.table:
            return self
        mapping = [table.index(n) for n in self.table.names]
        width = len(table)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * width
            for pos, exp in zip(mapping, e):
                ne[pos] = exp
            terms[tuple(ne)] = c
        return Poly(table, terms)

    # -- predicates -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def const_value(self) -> Fraction:
        if not self.terms:
            return _ZERO
        ((exps, coeff),) = self.terms.items()
        if any(exps):
            raise ValueError("polynomial is not constant")
        return coeff

    def const_or_none(self) -> Optional[Fraction]:
        if not self.terms:
            return _ZERO
        if len(self.terms) == 1:
            exps, coeff = next(iter(self.terms.items()))
            if not any(exps):
                return coeff
        return None

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, var: int) -> int:
        if not self.terms:
            return 0
        return max(e[var] for e in self.terms)

    def variables(self) -> set:
        used = set()
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used.add(i)
        return used

    def leading(self) -> tuple:
        """(exponent tuple, coefficient) of the grlex-leading monomial."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_mono_key)
        return e, self.terms[e]

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if self.table is not other.table and self.table != other.table:
            raise ValueError("symbol tables differ")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, _ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.table, out)

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, _ZERO) - c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.table, out)

    def __neg__(self) -> "Poly":
        return Poly(self.table, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        if not self.terms or not other.terms:
            return Poly(self.table, {})
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 1:
            ((ea, ca),) = a.items()
            if not any(ea):
                return Poly(self.table, {e: c * ca for e, c in b.items()})
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, _ZERO) + ca * cb
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly(self.table, out)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly(self.table, {})
        return Poly(self.table, {e: k * c for e, k in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(self.table, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.table == other.table and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.table, frozenset(self.terms.items())))
        return self._hash

    # -- evaluation -------------------------------------------------------

    def evaluate(self, bindings: Mapping[str, Fraction]) -> Fraction:
        used = self.variables()
        point = {}
        for i in used:
            name = self.table.names[i]
            if name not in bindings:
                raise UnboundSymbol(f"symbol {name!r} unbound")
            point[i] = Fraction(bindings[name])
        total = _ZERO
        for e, c in self.terms.items():
            v = c
            for i, exp in enumerate(e):
                if exp:
                    v *= point[i] ** exp
            total += v
        return total

    def substitute(self, bindings: Mapping[str, Fraction]) -> "Poly":
        """Partially bind symbols to exact rationals; the table is unchanged."""
        idx = {self.table.index(n): Fraction(v) for n, v in bindings.items()}
        out: dict = {}
        for e, c in self.terms.items():
            v = c
            ne = list(e)
            for i, x in idx.items():
                if ne[i]:
                    v *= x ** ne[i]
                    ne[i] = 0
            if not v:
                continue
            key = tuple(ne)
            s = out.get(key, _ZERO) + v
            if s:
                out[key] = s
            else:
                del out[key]
        return Poly(self.table, out)

    # -- printing -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda t: _mono_key(t[0]), reverse=True)
        parts = []
        for e, c in items:
            factors = []
            for name, exp in zip(self.table.names, e):
                if exp == 1:
                    factors.append(name)
                elif exp > 1:
                    factors.append(f"{name}^{exp}")
            mono = "*".join(factors)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        sign0, body0 = parts[0]
        text = ("-" if sign0 == "-" else "") + body0
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Poly({self})"


# ---------------------------------------------------------------------------
# exact division and gcd
# ---------------------------------------------------------------------------


def poly_div_exact(f: Poly, g: Poly) -> Optional[Poly]:
    """Exact quotient f/g, or None when g does not divide f."""
    if g.is_zero():
        raise DivisionByZero("polynomial division by zero")
    if f.is_zero():
        return f
    gc = g.const_or_none()
    if gc is not None:
        return f.scale(1 / gc)
    rem = dict(f.terms)
    quot: dict = {}
    ge, gcoef = g.leading()
    gtail = [(e, c) for e, c in g.terms.items() if e != ge]
    while rem:
        e = max(rem, key=_mono_key)
        c = rem.pop(e)
        qe = _mono_div(e, ge)
        if qe is None:
            return None
        qc = c / gcoef
        quot[qe] = quot.get(qe, _ZERO) + qc
        for te, tc in gtail:
            key = _mono_mul(qe, te)
            s = rem.get(key, _ZERO) - qc * tc
            if s:
                rem[key] = s
            else:
                rem.pop(key, None)
    return Poly(f.table, quot)


def poly_divisible(f: Poly, g: Poly) -> bool:
    return poly_div_exact(f, g) is not None


def _int_content_normalized(p: Poly) -> tuple[Poly, Fraction]:
    """Split p = content * primitive with an integer-primitive, grlex-monic-sign part."""
    if p.is_zero():
        return p, _ZERO
    denom_lcm = 1
    for c in p.terms.values():
        denom_lcm = denom_lcm * c.denominator // int_gcd(denom_lcm, c.denominator)
    num_gcd = 0
    for c in p.terms.values():
        num_gcd = int_gcd(num_gcd, abs(c.numerator) * (denom_lcm // c.denominator))
    content = Fraction(num_gcd, denom_lcm)
    prim = p.scale(1 / content)
    if prim.leading()[1] < 0:
        prim = prim.scale(-1)
        content = -content
    return prim, content


def _to_univariate(p: Poly, var: int) -> dict:
    """View p as univariate in `var`: degree -> Poly coefficient (var removed)."""
    buckets: dict = {}
    for e, c in p.terms.items():
        d = e[var]
        ne = list(e)
        ne[var] = 0
        buckets.setdefault(d, {})[tuple(ne)] = c
    return {d: Poly(p.table, t) for d, t in buckets.items()}


def _from_univariate(table: SymbolTable, var: int, coeffs: Mapping[int, Poly]) -> Poly:
    terms: dict = {}
    for d, poly in coeffs.items():
        for e, c in poly.terms.items():
            ne = list(e)
            ne[var] += d
            key = tuple(ne)
            s = terms.get(key, _ZERO) + c
            if s:
                terms[key] = s
            else:
                del terms[key]
    return Poly(table, terms)


def _uni_degree(u: dict) -> int:
    return max(u) if u else -1


def _uni_lc(u: dict) -> Poly:
    return u[max(u)]


def _uni_prem(f: dict, g: dict, table: SymbolTable) -> dict:
    """Pseudo-remainder prem(f, g) for univariate polys with Poly coefficients."""
    dg = _uni_degree(g)
    lead_g = g[dg]
    r = dict(f)
    n = _uni_degree(r) - dg
    while True:
        dr = _uni_degree(r)
        if dr < dg:
            break
        lead_r = r[dr]
        new: dict = {}
        for d, c in r.items():
            if d != dr:
                new[d] = c * lead_g
        for d, c in g.items():
            if d == dg:
                continue
            key = d + dr - dg
            val = new.get(key, Poly.zero(table)) - lead_r * c
            if val.is_zero():
                new.pop(key, None)
            else:
                new[key] = val
        r = new
        n -= 1
    # prem multiplies f by lc(g)^(deg f - deg g + 1); the loop applied one
    # factor per reduction step, so pad to the standard normalization.
    while n >= 0:
        r = {d: c * lead_g for d, c in r.items()}
        n -= 1
    return r


def _uni_quo_ground(u: dict, p: Poly) -> dict:
    pc = p.const_or_none()
    if pc is not None:
        return {d: c.scale(1 / pc) for d, c in u.items()}
    out = {}
    for d, c in u.items():
        q = poly_div_exact(c, p)
        if q is None:
            raise ArithmeticError("inexact ground division in subresultant chain")
        out[d] = q
    return out


def _poly_list_gcd(polys: Sequence[Poly]) -> Poly:
    acc = None
    for p in polys:
        acc = p if acc is None else poly_gcd(acc, p)
        if acc.is_constant() and not acc.is_zero():
            return Poly.const(acc.table, 1)
    return acc if acc is not None else None


def _uni_content(u: dict) -> Poly:
    return _poly_list_gcd(list(u.values()))


def _subresultant_last(f: dict, g: dict, table: SymbolTable) -> dict:
    """Last nonzero element of the subresultant PRS of f, g (deg f >= deg g)."""
    n, m = _uni_degree(f), _uni_degree(g)
    d = n - m
    h = _uni_prem(f, g, table)
    if d % 2 == 0:
        h = {k: -c for k, c in h.items()}
    lc = _uni_lc(g)
    c = lc ** d
    c = -c
    last = g
    while h:
        k = _uni_degree(h)
        last = h
        f, g, m, d = g, h, k, m - k
        b = -(lc * (c ** d))
        h = _uni_prem(f, g, table)
        h = _uni_quo_ground(h, b)
        lc = _uni_lc(g)
        if d > 1:
            num = (-lc) ** d
            q = poly_div_exact(num, c ** (d - 1))
            if q is None:
                raise ArithmeticError("inexact division for subresultant coefficient")
            c = q
        else:
            c = -lc
    return last


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Primitive gcd over Q[x...]: integer coefficients, gcd 1, positive leading."""
    table = f.table
    if f.is_zero() and g.is_zero():
        return Poly.zero(table)
    if f.is_zero():
        return _int_content_normalized(g)[0]
    if g.is_zero():
        return _int_content_normalized(f)[0]
    if f.is_constant() or g.is_constant():
        return Poly.const(table, 1)
    # shared monomial content comes out directly (q-power denominators are
    # the common case in the deformation pipelines)
    width = len(table)
    min_f = [min(e[v] for e in f.terms) for v in range(width)]
    min_g = [min(e[v] for e in g.terms) for v in range(width)]
    shared = tuple(min(a, b) for a, b in zip(min_f, min_g))
    if any(shared):
        strip_f = Poly(table, {tuple(x - s for x, s in zip(e, shared)): c
                               for e, c in f.terms.items()})
        strip_g = Poly(table, {tuple(x - s for x, s in zip(e, shared)): c
                               for e, c in g.terms.items()})
        mono = Poly(table, {shared: _ONE})
        return _int_content_normalized(mono * poly_gcd(strip_f, strip_g))[0]
    if len(f.terms) == 1 or len(g.terms) == 1:
        # a monomial shares nothing beyond the stripped content
        return Poly.const(table, 1)
    common = f.variables() & g.variables()
    if not common:
        return Poly.const(table, 1)
    f = _int_content_normalized(f)[0]
    g = _int_content_normalized(g)[0]
    if f == g:
        return f
    var = min(common, key=lambda v: f.degree_in(v) + g.degree_in(v))
    fu = _to_univariate(f, var)
    gu = _to_univariate(g, var)
    f_cont = _uni_content(fu)
    g_cont = _uni_content(gu)
    cont = poly_gcd(f_cont, g_cont)
    fp = _uni_quo_ground(fu, f_cont)
    gp = _uni_quo_ground(gu, g_cont)
    if _uni_degree(fp) < _uni_degree(gp):
        fp, gp = gp, fp
    last = _subresultant_last(fp, gp, table)
    if _uni_degree(last) == 0:
        prim = Poly.const(table, 1)
    else:
        last = _uni_quo_ground(last, _uni_content(last))
        prim = _from_univariate(table, var, last)
    result = cont * prim
    return _int_content_normalized(result)[0]


def poly_lcm(f: Poly, g: Poly) -> Poly:
    if f.is_zero() or g.is_zero():
        return Poly.zero(f.table)
    q = poly_div_exact(f * g, poly_gcd(f, g))
    return _int_content_normalized(q)[0]


# ---------------------------------------------------------------------------
# Scalar: the fraction field
# ---------------------------------------------------------------------------


class Scalar:
    """Element of the fraction field of Q[symbols], kept in canonical form.

    Invariants: denominator nonzero, gcd(num, den) = 1, denominator monic
    under the grlex order.  Equality is therefore syntactic and agrees with
    cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly, *, _normalized: bool = False):
        if not _normalized:
            raise ValueError("use Scalar.make / Scalar.from_*")
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------------

    @staticmethod
    def make(num: Poly, den: Poly) -> "Scalar":
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            return Scalar(num, Poly.const(num.table, 1), _normalized=True)
        dc = den.const_or_none()
        if dc is not None:
            return Scalar(num.scale(1 / dc), Poly.const(num.table, 1), _normalized=True)
        g = poly_gcd(num, den)
        if not g.is_constant():
            num = poly_div_exact(num, g)
            den = poly_div_exact(den, g)
        return Scalar._from_coprime(num, den)

    @staticmethod
    def _from_coprime(num: Poly, den: Poly) -> "Scalar":
        """Normalize a pair already known to be coprime (monic denominator)."""
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            return Scalar(num, Poly.const(num.table, 1), _normalized=True)
        lead = den.leading()[1]
        if lead != 1:
            num = num.scale(1 / lead)
            den = den.scale(1 / lead)
        return Scalar(num, den, _normalized=True)

    @staticmethod
    def from_fraction(table: SymbolTable, value) -> "Scalar":
        return Scalar(Poly.const(table, value), Poly.const(table, 1), _normalized=True)

    @staticmethod
    def from_symbol(table: SymbolTable, name: str) -> "Scalar":
        return Scalar(Poly.symbol(table, name), Poly.const(table, 1), _normalized=True)

    @staticmethod
    def zero(table: SymbolTable) -> "Scalar":
        return Scalar.from_fraction(table, 0)

    @staticmethod
    def one(table: SymbolTable) -> "Scalar":
        return Scalar.from_fraction(table, 1)

    def lift(self, table: SymbolTable) -> "Scalar":
        if table == self.table:
            return self
        return Scalar(self.num.lift(table), self.den.lift(table), _normalized=True)

    # -- properties -----------------------------------------------------

    @property
    def table(self) -> SymbolTable:
        return self.num.table

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.is_constant() and self.num.const_or_none() == 1

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def as_fraction(self) -> Fraction:
        return self.num.const_value() / self.den.const_value()

    def const_or_none(self) -> Optional[Fraction]:
        n = self.num.const_or_none()
        if n is None:
            return None
        d = self.den.const_or_none()
        if d is None:
            return None
        return n / d

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self, other
        ac, bc = a.const_or_none(), b.const_or_none()
        if ac is not None and bc is not None:
            return Scalar.from_fraction(a.table, ac + bc)
        if ac is not None and not ac:
            return b
        if bc is not None and not bc:
            return a
        if a.den == b.den:
            return Scalar.make(a.num + b.num, a.den)
        g = poly_gcd(a.den, b.den)
        if g.is_constant():
            # coprime denominators: result already reduced
            return Scalar._from_coprime(a.num * b.den + b.num * a.den, a.den * b.den)
        db = poly_div_exact(b.den, g)
        da = poly_div_exact(a.den, g)
        num = a.num * db + b.num * da
        den = a.den * db
        return Scalar.make(num, den)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.num, self.den, _normalized=True)

    def __sub__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self, other
        ac, bc = a.const_or_none(), b.const_or_none()
        if ac is not None:
            if bc is not None:
                return Scalar.from_fraction(a.table, ac * bc)
            if not ac:
                return Scalar.zero(a.table)
            return Scalar._from_coprime(b.num.scale(ac), b.den)
        if bc is not None:
            if not bc:
                return Scalar.zero(a.table)
            return Scalar._from_coprime(a.num.scale(bc), a.den)
        g1 = poly_gcd(a.num, b.den)
        g2 = poly_gcd(b.num, a.den)
        an = a.num if g1.is_constant() else poly_div_exact(a.num, g1)
        bd = b.den if g1.is_constant() else poly_div_exact(b.den, g1)
        bn = b.num if g2.is_constant() else poly_div_exact(b.num, g2)
        ad = a.den if g2.is_constant() else poly_div_exact(a.den, g2)
        return Scalar._from_coprime(an * bn, ad * bd)

    def __rmul__(self, other):
        return self.__mul__(other)

    def inv(self) -> "Scalar":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return Scalar._from_coprime(self.den, self.num)

    def __truediv__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZero("division by zero Scalar")
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> "Scalar":
        if n == 0:
            return Scalar.one(self.table)
        if n < 0:
            return self.inv() ** (-n)
        return Scalar._from_coprime(self.num ** n, self.den ** n)

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.table != self.table:
                raise ValueError("symbol tables differ")
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar.from_fraction(self.table, other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            c = self.const_or_none()
            return c is not None and c == other
        return (isinstance(other, Scalar) and self.table == other.table
                and self.num == other.num and self.den == other.den)

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, bindings: Mapping[str, Fraction]) -> Fraction:
        dv = self.den.evaluate(bindings)
        if not dv:
            raise PoleAtPoint(f"denominator vanishes at {dict(bindings)!r}")
        return self.num.evaluate(bindings) / dv

    def substitute(self, bindings: Mapping[str, Fraction]) -> "Scalar":
        den = self.den.substitute(bindings)
        if den.is_zero():
            raise PoleAtPoint(f"denominator vanishes under {dict(bindings)!r}")
        return Scalar.make(self.num.substitute(bindings), den)

    # -- printing -----------------------------------------------------------

    def __str__(self) -> str:
        if self.den.is_constant():
            return str(self.num)
        ns = str(self.num)
        if len(self.num.terms) > 1:
            ns = f"({ns})"
        return f"{ns}/({self.den})"

    def __repr__(self) -> str:
        return f"Scalar({self})"


# ---------------------------------------------------------------------------
# arith / qnumber entry points
# ---------------------------------------------------------------------------


def arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Four-function arithmetic, matching the documented operation table."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def qnumber(k: int, q: Scalar) -> Scalar:
    """The symmetric q-integer (q^k - q^-k)/(q - q^-1), cleared of q-inverses.

    Equals (1 + q^2 + ... + q^(2k-2)) / q^(k-1); at q = 1 this is k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    table = q.table
    num = Scalar.zero(table)
    for i in range(k):
        num = num + q ** (2 * i)
    return num / q ** (k - 1)


_CYCLO_CACHE: dict = {}


def cyclotomic(d: int, table: SymbolTable, name: str = "q") -> Poly:
    """The d-th cyclotomic polynomial in the named symbol (irreducible over Q)."""
    key = (d, table, name)
    if key in _CYCLO_CACHE:
        return _CYCLO_CACHE[key]
    q = Poly.symbol(table, name)
    power = Poly.const(table, 1)
    for _ in range(d):
        power = power * q
    poly = power - Poly.const(table, 1)
    for e in range(1, d):
        if d % e == 0:
            poly = poly_div_exact(poly, cyclotomic(e, table, name))
    _CYCLO_CACHE[key] = poly
    return poly


def qnumber_factors(k: int, table: SymbolTable, name: str = "q") -> tuple[list[Poly], int]:
    """k_q as (list of irreducible numerator factors, power of q in denominator).

    k_q = prod(cyclotomic(d) for d | 2k, d not in {1, 2}) / q^(k-1).
    """
    factors = [cyclotomic(d, table, name) for d in range(3, 2 * k + 1)
               if (2 * k) % d == 0]
    return factors, k - 1


# ---------------------------------------------------------------------------
# FactoredRational: trial-division arithmetic for structured denominators
# ---------------------------------------------------------------------------


class FactoredRational:
    """Fraction num / prod(f_i^e_i) whose denominator factors are irreducible.

    The numerator is kept reduced against every factor (eager exact trial
    division), so converting to a ``Scalar`` never needs a general gcd.  The
    caller is responsible for supplying genuinely irreducible, non-constant
    factors; under that contract the invariant gcd(num, den) = 1 holds.
    """

    __slots__ = ("num", "factors")

    def __init__(self, num: Poly, factors: Optional[Mapping[Poly, int]] = None):
        self.num = num
        self.factors = dict(factors) if factors else {}
        self._reduce()

    def _reduce(self) -> None:
        if self.num.is_zero():
            self.factors = {}
            return
        for f in list(self.factors):
            mult = self.factors[f]
            while mult > 0:
                q = poly_div_exact(self.num, f)
                if q is None:
                    break
                self.num = q
                mult -= 1
            if mult:
                self.factors[f] = mult
            else:
                del self.factors[f]

    @staticmethod
    def from_poly(p: Poly) -> "FactoredRational":
        return FactoredRational(p)

    @staticmethod
    def const(table: SymbolTable, value) -> "FactoredRational":
        return FactoredRational(Poly.const(table, value))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        factors = dict(self.factors)
        for f, e in other.factors.items():
            factors[f] = factors.get(f, 0) + e
        return FactoredRational(self.num * other.num, factors)

    def mul_poly(self, p: Poly) -> "FactoredRational":
        return FactoredRational(self.num * p, self.factors)

    def div_factor(self, f: Poly, mult: int = 1) -> "FactoredRational":
        factors = dict(self.factors)
        factors[f] = factors.get(f, 0) + mult
        return FactoredRational(self.num, factors)

    def scale(self, c) -> "FactoredRational":
        out = FactoredRational.__new__(FactoredRational)
        out.num = self.num.scale(c)
        out.factors = dict(self.factors) if not out.num.is_zero() else {}
        return out

    def __neg__(self) -> "FactoredRational":
        return self.scale(-1)

    def __add__(self, other: "FactoredRational") -> "FactoredRational":
        target: dict = dict(self.factors)
        for f, e in other.factors.items():
            if target.get(f, 0) < e:
                target[f] = e
        a_num = self.num
        for f, e in target.items():
            need = e - self.factors.get(f, 0)
            for _ in range(need):
                a_num = a_num * f
        b_num = other.num
        for f, e in target.items():
            need = e - other.factors.get(f, 0)
            for _ in range(need):
                b_num = b_num * f
        return FactoredRational(a_num + b_num, target)

    def __sub__(self, other: "FactoredRational") -> "FactoredRational":
        return self + (-other)

    def to_scalar(self) -> Scalar:
        den = Poly.const(self.num.table, 1)
        for f, e in self.factors.items():
            den = den * f ** e
        return Scalar._from_coprime(self.num, den)

    def __repr__(self) -> str:
        return f"FactoredRational({self.to_scalar()})"


# ---------------------------------------------------------------------------
# text grammar
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-z][a-z0-9_]*)|(\*\*)|([-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ParseError(f"unexpected input at {rest[:10]!r}")
        if m.group(1):
            tokens.append(("int", int(m.group(1))))
        elif m.group(2):
            tokens.append(("sym", m.group(2)))
        elif m.group(3):
            tokens.append(("op", "^"))
        else:
            tokens.append(("op", m.group(4)))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens, table: SymbolTable):
        self.tokens = tokens
        self.pos = 0
        self.table = table

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Scalar:
        value = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input near token {self.peek()!r}")
        return value

    def expr(self) -> Scalar:
        kind, val = self.peek()
        negate = False
        if (kind, val) == ("op", "-"):
            self.next()
            negate = True
        elif (kind, val) == ("op", "+"):
            self.next()
        value = self.term()
        if negate:
            value = -value
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.next()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Scalar:
        value = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.next()
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero in scalar expression")
                value = value / rhs
        return value

    def factor(self) -> Scalar:
        kind, val = self.peek()
        if (kind, val) == ("op", "-"):
            self.next()
            return -self.factor()
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.next()
            kind, val = self.next()
            if kind != "int":
                raise ParseError("exponent must be a non-negative integer")
            return base ** val
        return base

    def atom(self) -> Scalar:
        kind, val = self.next()
        if kind == "int":
            return Scalar.from_fraction(self.table, val)
        if kind == "sym":
            if val not in self.table:
                raise ParseError(f"unknown symbol {val!r}; table has {self.table.names}")
            return Scalar.from_symbol(self.table, val)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.next() != ("op", ")"):
                raise ParseError("missing closing parenthesis")
            return inner
        raise ParseError(f"unexpected token {val!r}")


def parse_scalar(text: str, table: SymbolTable) -> Scalar:
    """Parse the scalar text grammar: ints, rationals p/q, symbols, + - * / ^ ( )."""
    return _Parser(_tokenize(text), table).parse()


# ---------------------------------------------------------------------------
# randomized exact identity testing
# ---------------------------------------------------------------------------


class IdentityReport(NamedTuple):
    equal: bool
    certified: bool          # False depends on no randomness assumptions
    trials: int
    failure_bound: Optional[Fraction]  # Schwartz-Zippel bound when equal=True

    def __bool__(self) -> bool:
        return self.equal


_POINT_RANGE = 2 ** 31


def probably_equal(x: Scalar, y: Scalar, trials: int = 7, seed: int = 0) -> IdentityReport:
    """Randomized exact equality test at deterministic pseudo-random points.

    Points have numerators and denominators drawn uniformly from [1, 2^31]
    by ``random.Random(seed)``.  All arithmetic is exact, so ``equal=False``
    is a certified inequality; ``equal=True`` carries a Schwartz-Zippel style
    failure bound of (D/2^31)^trials where D bounds the degree of the
    cross-multiplied difference.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if x.table != y.table:
        raise ValueError("symbol tables differ")
    if x == y:
        return IdentityReport(True, True, 0, Fraction(0))
    if not x.table.names:
        return IdentityReport(x.as_fraction() == y.as_fraction(), True, 0, Fraction(0))
    rng = random.Random(seed)
    names = x.table.names
    deg = max(x.num.total_degree() + y.den.total_degree(),
              y.num.total_degree() + x.den.total_degree())
    for _ in range(trials):
        for attempt in range(11):
            point = {n: Fraction(rng.randint(1, _POINT_RANGE),
                                 rng.randint(1, _POINT_RANGE)) for n in names}
            try:
                xv = x.evaluate(point)
                yv = y.evaluate(point)
            except PoleAtPoint:
                if attempt == 10:
                    raise ResourceLimit("too many pole redraws in probably_equal")
                continue
            break
        if xv != yv:
            return IdentityReport(False, True, trials, None)
    bound = Fraction(min(deg, _POINT_RANGE), _POINT_RANGE) ** trials
    return IdentityReport(True, False, trials, bound)
