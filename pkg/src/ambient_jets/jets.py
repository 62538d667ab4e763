"""Truncated multivariate polynomial algebra: jets at a point.

A JetSpec fixes variable names, per-variable truncation weights and a total
weighted truncation order N.  A JetScalar stores a sparse map from packed
exponent vectors to exact coefficients, plus an integer homogeneity degree.

The homogeneity degree tracks a factored-out power of a distinguished scale
variable t (weight 0): objects of the form t^w * F(other vars) store only F
and the integer w.  Differentiation in t is then algebraic (multiply by w),
which keeps every jet finite-dimensional.

Exponents are packed into a single integer, 7 bits per variable, with the
total weighted degree in the top field.  Weighted degrees add under monomial
multiplication, so the truncation test during products is one shift and one
compare.

The truncation order of a jet is its validity claim.  Differentiating drops
the order by the variable's weight; mixed-order operands combine at the
minimum order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _iproduct

from .rationals import QQ, ZERO, coeff_inv

_BITS = 7
_MASK = (1 << _BITS) - 1


class SpecMismatch(Exception):
    """Jets over incompatible variable systems."""


class NotAUnit(Exception):
    """Inversion of a jet with zero constant term."""


@dataclass(frozen=True)
class JetSpec:
    names: tuple
    weights: tuple
    order: int

    def __post_init__(self):
        if len(self.names) != len(self.weights):
            raise ValueError("names/weights length mismatch")
        if any(w < 0 for w in self.weights) or self.order < 0:
            raise ValueError("weights and order must be nonnegative")

    @property
    def nvars(self):
        return len(self.names)

    def with_order(self, order: int) -> "JetSpec":
        if order == self.order:
            return self
        return JetSpec(self.names, self.weights, order)

    def index(self, name: str) -> int:
        return self.names.index(name)

    # -- packed exponent keys --

    def pack(self, exps) -> int:
        key = 0
        wd = 0
        for i, (e, w) in enumerate(zip(exps, self.weights)):
            key |= e << (_BITS * i)
            wd += e * w
        return key | (wd << (_BITS * self.nvars))

    def unpack(self, key: int):
        return tuple((key >> (_BITS * i)) & _MASK for i in range(self.nvars))

    def wdeg(self, key: int) -> int:
        return key >> (_BITS * self.nvars)

    def monomials(self, max_order=None, exact_degree=None):
        """Exponent tuples with weighted degree <= max_order (or == exact_degree),
        in lexicographic order."""
        cap = self.order if max_order is None else max_order
        if exact_degree is not None:
            cap = exact_degree
        ranges = [range(cap // w + 1) if w > 0 else range(1) for w in self.weights]
        out = []
        for exps in _iproduct(*ranges):
            wd = sum(e * w for e, w in zip(exps, self.weights))
            if exact_degree is not None:
                if wd == exact_degree:
                    out.append(exps)
            elif wd <= cap:
                out.append(exps)
        return out


@lru_cache(maxsize=None)
def base_spec(n: int, order: int) -> JetSpec:
    """Jets on R^n at the origin, all variables weight 1."""
    return JetSpec(tuple(f"x{i + 1}" for i in range(n)), (1,) * n, order)


@lru_cache(maxsize=None)
def chart_spec(n: int, order: int) -> JetSpec:
    """Adapted-chart jets in (x1..xn, rho) with rho of weight 2.

    The scale variable t does not appear as an exponent; its power is the
    jet's homogeneity degree.
    """
    return JetSpec(tuple(f"x{i + 1}" for i in range(n)) + ("rho",), (1,) * n + (2,), order)


def _merge_hom(a: "JetScalar", b: "JetScalar") -> int:
    if not a.terms:
        return b.hom
    if not b.terms:
        return a.hom
    if a.hom != b.hom:
        raise SpecMismatch(f"homogeneity mismatch: {a.hom} vs {b.hom}")
    return a.hom


def _joint(a: "JetScalar", b: "JetScalar") -> JetSpec:
    sa, sb = a.spec, b.spec
    if sa.names != sb.names or sa.weights != sb.weights:
        raise SpecMismatch("jets over different variable systems")
    return sa if sa.order <= sb.order else sb


class JetScalar:
    """Sparse truncated polynomial with exact coefficients."""

    __slots__ = ("spec", "terms", "hom")

    def __init__(self, spec: JetSpec, terms: dict, hom: int = 0):
        self.spec = spec
        self.terms = terms
        self.hom = hom

    # -- constructors --

    @staticmethod
    def zero(spec, hom=0):
        return JetScalar(spec, {}, hom)

    @staticmethod
    def constant(spec, c, hom=0):
        c = QQ(c) if isinstance(c, int) else c
        return JetScalar(spec, {0: c} if c else {}, hom)

    @staticmethod
    def monomial(spec, exps, c, hom=0):
        c = QQ(c) if isinstance(c, int) else c
        if not c:
            return JetScalar.zero(spec, hom)
        key = spec.pack(exps)
        if spec.wdeg(key) > spec.order:
            return JetScalar.zero(spec, hom)
        return JetScalar(spec, {key: c}, hom)

    @staticmethod
    def variable(spec, name, hom=0):
        exps = [0] * spec.nvars
        exps[spec.index(name)] = 1
        return JetScalar.monomial(spec, exps, QQ(1), hom)

    @staticmethod
    def from_terms(spec, items, hom=0):
        """items: iterable of (exponent tuple, coefficient)."""
        terms = {}
        for exps, c in items:
            if not c:
                continue
            key = spec.pack(exps)
            if spec.wdeg(key) > spec.order:
                continue
            nv = terms.get(key, ZERO) + c
            if nv:
                terms[key] = nv
            elif key in terms:
                del terms[key]
        return JetScalar(spec, terms, hom)

    # -- basic queries --

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get(0, ZERO)

    def coefficient(self, exps):
        return self.terms.get(self.spec.pack(exps), ZERO)

    def items(self):
        for key, c in self.terms.items():
            yield self.spec.unpack(key), c

    def __eq__(self, other):
        if not isinstance(other, JetScalar):
            return NotImplemented
        if self.spec.names != other.spec.names:
            return False
        if self.terms != other.terms:
            return False
        return self.is_zero() or self.hom == other.hom

    def __hash__(self):
        return hash((self.spec.names, self.hom, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def __repr__(self):
        if not self.terms:
            return f"Jet(0; t^{self.hom})"
        parts = []
        for key in sorted(self.terms):
            exps = self.spec.unpack(key)
            mono = "*".join(
                f"{n}^{e}" if e > 1 else n for n, e in zip(self.spec.names, exps) if e
            )
            parts.append(f"{self.terms[key]}{'*' + mono if mono else ''}")
        tag = f"; t^{self.hom}" if self.hom else ""
        return "Jet(" + " + ".join(parts) + tag + ")"

    # -- arithmetic --

    def __add__(self, other):
        if isinstance(other, int):
            other = JetScalar.constant(self.spec, other, self.hom)
        spec = _joint(self, other)
        hom = _merge_hom(self, other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            nv = terms.get(k, ZERO) + c
            if nv:
                terms[k] = nv
            elif k in terms:
                del terms[k]
        if self.spec.order != other.spec.order:
            terms = {k: c for k, c in terms.items() if spec.wdeg(k) <= spec.order}
        return JetScalar(spec, terms, hom)

    def __neg__(self):
        return JetScalar(self.spec, {k: -c for k, c in self.terms.items()}, self.hom)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, JetScalar):
            return self.scale(other)
        spec = _joint(self, other)
        if not self.terms or not other.terms:
            return JetScalar.zero(spec, self.hom + other.hom)
        shift = _BITS * spec.nvars
        cap = spec.order
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                if (k >> shift) > cap:
                    continue
                c = c1 * c2
                if not c:
                    continue
                nv = out.get(k, ZERO) + c
                if nv:
                    out[k] = nv
                elif k in out:
                    del out[k]
        return JetScalar(spec, out, self.hom + other.hom)

    def scale(self, c):
        if isinstance(c, int):
            c = QQ(c)
        if not c:
            return JetScalar.zero(self.spec, self.hom)
        return JetScalar(self.spec, {k: v * c for k, v in self.terms.items()}, self.hom)

    def truncate(self, order: int) -> "JetScalar":
        spec = self.spec.with_order(min(order, self.spec.order))
        return JetScalar(
            spec, {k: c for k, c in self.terms.items() if spec.wdeg(k) <= spec.order}, self.hom
        )

    def with_hom(self, hom: int) -> "JetScalar":
        return JetScalar(self.spec, self.terms, hom)

    def derive(self, name: str) -> "JetScalar":
        """Formal partial derivative; truncation order drops by the weight."""
        spec = self.spec
        i = spec.index(name)
        w = spec.weights[i]
        nspec = spec.with_order(max(spec.order - w, 0))
        shift = _BITS * i
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & _MASK
            if not e:
                continue
            nk = k - (1 << shift) - (w << (_BITS * spec.nvars))
            out[nk] = c * e
        return JetScalar(nspec, out, self.hom)

    def derive_t(self) -> "JetScalar":
        """Derivative in the factored scale variable: multiply by the degree."""
        if self.hom == 0:
            return JetScalar.zero(self.spec, -1)
        return JetScalar(
            self.spec, {k: c * self.hom for k, c in self.terms.items()}, self.hom - 1
        )

    def invert(self) -> "JetScalar":
        """Multiplicative inverse; requires a unit constant term."""
        c0 = self.constant_term()
        if not c0:
            raise NotAUnit("jet with zero constant term")
        inv0 = coeff_inv(c0)
        u = JetScalar(
            self.spec,
            {k: c * inv0 for k, c in self.terms.items() if k != 0},
            0,
        )
        # Neumann series: (c0(1+u))^-1 = c0^-1 sum_k (-u)^k; u has positive
        # weighted degree so the series terminates at the truncation order.
        one = JetScalar.constant(self.spec, QQ(1))
        acc = one
        powu = one
        sign = -1
        for _ in range(self.spec.order):
            powu = powu * u
            if powu.is_zero():
                break
            acc = acc + powu.scale(QQ(sign))
            sign = -sign
        return acc.scale(inv0).with_hom(-self.hom)

    # -- coefficient surgery --

    def var_coefficient(self, name: str, k: int) -> "JetScalar":
        """Jet coefficient of name^k (exponent removed), order reduced by k*weight."""
        spec = self.spec
        i = spec.index(name)
        w = spec.weights[i]
        nspec = spec.with_order(max(spec.order - k * w, 0))
        shift = _BITS * i
        out = {}
        for key, c in self.terms.items():
            if ((key >> shift) & _MASK) == k:
                nk = key - (k << shift) - (k * w << (_BITS * spec.nvars))
                out[nk] = c
        return JetScalar(nspec, out, self.hom)

    def restrict_zero(self, name: str) -> "JetScalar":
        """Set one variable to zero (keep the spec)."""
        spec = self.spec
        shift = _BITS * spec.index(name)
        return JetScalar(
            spec,
            {k: c for k, c in self.terms.items() if not ((k >> shift) & _MASK)},
            self.hom,
        )

    def shift_var(self, name: str, k: int) -> "JetScalar":
        """Multiply by name^k."""
        spec = self.spec
        i = spec.index(name)
        w = spec.weights[i]
        shift = _BITS * i
        top = _BITS * spec.nvars
        out = {}
        for key, c in self.terms.items():
            nk = key + (k << shift) + (k * w << top)
            if spec.wdeg(nk) <= spec.order:
                out[nk] = c
        return JetScalar(spec, out, self.hom)

    def max_var_degree(self, name: str) -> int:
        shift = _BITS * self.spec.index(name)
        return max(((k >> shift) & _MASK for k in self.terms), default=0)

    def embed(self, spec: JetSpec) -> "JetScalar":
        """Re-express over a spec with a superset of variables (matched by name)."""
        pos = [spec.index(n) for n in self.spec.names]
        for n in self.spec.names:
            if spec.weights[spec.index(n)] != self.spec.weights[self.spec.index(n)]:
                raise SpecMismatch("variable weight changed in embedding")
        out = {}
        for exps, c in self.items():
            nex = [0] * spec.nvars
            for p, e in zip(pos, exps):
                nex[p] = e
            key = spec.pack(nex)
            if spec.wdeg(key) <= spec.order:
                out[key] = c
        return JetScalar(spec, out, self.hom)

    def map_coefficients(self, fn) -> "JetScalar":
        out = {}
        for k, c in self.terms.items():
            nc = fn(c)
            if nc:
                out[k] = nc
        return JetScalar(self.spec, out, self.hom)


def jsum(spec, jets, hom=0):
    acc = JetScalar.zero(spec, hom)
    for j in jets:
        acc = acc + j
    return acc
