"""Curvature machinery on metric jets.

Sign conventions, fixed once and used consistently everywhere (including the
quadratic terms of the commutation identity, which are generated from the
same convention rather than transcribed):

  * Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
  * the round sphere of curvature K > 0 satisfies
    R_ijkl(0) = K (h_ik h_jl - h_il h_jk), and Ric_jl = g^{ik} R_ijkl
  * in this convention the commutator on 1-forms reads
    [nabla_i, nabla_j] omega_k = +R_ijk^l omega_l,
    and the commutation-identity quadratic terms are generated from exactly
    this rule, never transcribed
  * derivative slots are appended last, outermost derivative in the last slot:
    the entry with derivative indices (m1 .. mr) is nabla_mr ... nabla_m1 R.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _iproduct

from .jets import JetScalar, JetSpec, base_spec
from .rationals import QQ, ZERO
from .tensors import (
    ConstTensor,
    ReferenceForm,
    TensorJet,
    form_inverse,
    trace_free_part,
)


class NotAMetricJet(Exception):
    """Input fails the metric-jet invariants."""


@dataclass
class MetricJet:
    """Symmetric 2-tensor jet on R^n with g(0) equal to the reference form."""

    n: int
    spec: JetSpec
    comps: dict  # (i, j) sorted tuples -> JetScalar
    form: ReferenceForm

    @staticmethod
    def from_components(n, spec, mapping, form=None):
        form = form or ReferenceForm.euclidean(n)
        comps = {}
        for (i, j), jet in mapping.items():
            key = (i, j) if i <= j else (j, i)
            if key in comps and comps[key] != jet:
                raise NotAMetricJet("asymmetric components")
            if not jet.is_zero():
                comps[key] = jet
        g = MetricJet(n, spec, comps, form)
        d = form.diag()
        for i in range(n):
            for j in range(i, n):
                c0 = g.entry(i, j).constant_term()
                want = d[i] if i == j else ZERO
                if c0 != want:
                    raise NotAMetricJet("g(0) differs from the reference form")
        return g

    @staticmethod
    def flat(n, order, form=None):
        form = form or ReferenceForm.euclidean(n)
        spec = base_spec(n, order)
        d = form.diag()
        return MetricJet.from_components(
            n, spec, {(i, i): JetScalar.constant(spec, d[i]) for i in range(n)}, form
        )

    def entry(self, i, j) -> JetScalar:
        key = (i, j) if i <= j else (j, i)
        jet = self.comps.get(key)
        return jet if jet is not None else JetScalar.zero(self.spec)

    def as_tensor(self) -> TensorJet:
        out = {}
        for (i, j), jet in self.comps.items():
            out[(i, j)] = jet
            if i != j:
                out[(j, i)] = jet
        return TensorJet.from_components(self.n, 2, self.spec, out)

    def inverse(self):
        """g^{ij} as a dict over sorted pairs, exact to the truncation order."""
        n = self.n
        d = self.form.diag()
        # Neumann series around the constant leading part
        delta = {}
        for i in range(n):
            for j in range(i, n):
                e = self.entry(i, j)
                lead = d[i] if i == j else ZERO
                dd = e - JetScalar.constant(self.spec, lead)
                if not dd.is_zero():
                    delta[(i, j)] = dd

        def dget(i, j):
            key = (i, j) if i <= j else (j, i)
            return delta.get(key)

        # E^i_j = h^{ik} delta_kj ; inv = sum (-E)^m h^{-1}
        inv = {}
        for i in range(n):
            inv[(i, i)] = JetScalar.constant(self.spec, d[i])
        # iterate: term_{m} = -E . term_{m-1}, starting from h^{-1} (as matrix)
        term = {(i, j): JetScalar.constant(self.spec, d[i]) if i == j else None for i in range(n) for j in range(n)}
        term = {k: v for k, v in term.items() if v is not None}
        out = dict(term)
        for _ in range(self.spec.order):
            nxt = {}
            for i in range(n):
                for j in range(n):
                    acc = None
                    for k in range(n):
                        dk = dget(i, k)
                        tv = term.get((k, j))
                        if dk is None or tv is None:
                            continue
                        piece = dk * tv
                        acc = piece if acc is None else acc + piece
                    if acc is not None and not acc.is_zero():
                        nxt[(i, j)] = acc.scale(QQ(-d[i]))
            if not nxt:
                break
            term = nxt
            for k, v in nxt.items():
                cur = out.get(k)
                out[k] = v if cur is None else cur + v
        result = {}
        for i in range(n):
            for j in range(i, n):
                v = out.get((i, j))
                if v is not None and not v.is_zero():
                    result[(i, j)] = v
        return result


def _sym_get(table, i, j):
    key = (i, j) if i <= j else (j, i)
    return table.get(key)


def christoffel(g: MetricJet):
    """Gamma^k_ij; returns (gamma dict {(k,i,j<=j)}: JetScalar, inverse metric)."""
    n = g.n
    ginv = g.inverse()
    dg = {}
    for (i, j), jet in g.comps.items():
        for a in range(n):
            dj = jet.derive(g.spec.names[a])
            if not dj.is_zero():
                dg[(a, i, j)] = dj

    def dget(a, i, j):
        if i > j:
            i, j = j, i
        return dg.get((a, i, j))

    gamma = {}
    half = QQ(1, 2)
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                acc = None
                for l in range(n):
                    gi = _sym_get(ginv, k, l)
                    if gi is None:
                        continue
                    pieces = []
                    t1 = dget(i, j, l)
                    t2 = dget(j, i, l)
                    t3 = dget(l, i, j)
                    if t1 is not None:
                        pieces.append(t1)
                    if t2 is not None:
                        pieces.append(t2)
                    if t3 is not None:
                        pieces.append(-t3)
                    if not pieces:
                        continue
                    s = pieces[0]
                    for p in pieces[1:]:
                        s = s + p
                    piece = gi * s
                    acc = piece if acc is None else acc + piece
                if acc is not None:
                    acc = acc.scale(half)
                    if not acc.is_zero():
                        gamma[(k, i, j)] = acc
    return gamma, ginv


def _gamma_get(gamma, k, i, j):
    if i > j:
        i, j = j, i
    return gamma.get((k, i, j))


def covariant_derivative(T: TensorJet, g: MetricJet, gamma=None) -> TensorJet:
    """nabla T with the new derivative index appended as the last slot."""
    if gamma is None:
        gamma = christoffel(g)[0]
    n = g.n
    names = g.spec.names
    out = {}

    def add(idx, jet):
        if jet.is_zero():
            return
        cur = out.get(idx)
        s = jet if cur is None else cur + jet
        if s.is_zero():
            out.pop(idx, None)
        else:
            out[idx] = s

    for idx, jet in T.comps.items():
        for m in range(n):
            add(idx + (m,), jet.derive(names[m]))
    for idx, jet in T.comps.items():
        for slot in range(T.rank):
            a = idx[slot]
            for m in range(n):
                for e in range(n):
                    ga = _gamma_get(gamma, a, m, e)
                    if ga is None:
                        continue
                    nidx = idx[:slot] + (e,) + idx[slot + 1 :] + (m,)
                    add(nidx, (jet * ga).scale(QQ(-1)).truncate(jet.spec.order - 1))
    # align truncation orders: partial derivative terms dropped one order
    out = {k: v.truncate(min(v.spec.order, T.spec.order - 1)) for k, v in out.items()}
    out = {k: v for k, v in out.items() if not v.is_zero()}
    return TensorJet(T.dim, T.rank + 1, T.spec.with_order(T.spec.order - 1), out, T.weight)


def curvature(g: MetricJet) -> TensorJet:
    """R_ijkl as a TensorJet, exact to order N-2."""
    n = g.n
    gamma, _ = christoffel(g)
    names = g.spec.names
    order = g.spec.order - 2 if g.spec.order >= 2 else 0
    # F^b_kij = d_i Gamma^b_jk - d_j Gamma^b_ik + G^b_ia G^a_jk - G^b_ja G^a_ik
    F = {}
    for b in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(i + 1, n):
                    terms = []
                    g1 = _gamma_get(gamma, b, j, k)
                    if g1 is not None:
                        terms.append(g1.derive(names[i]))
                    g2 = _gamma_get(gamma, b, i, k)
                    if g2 is not None:
                        terms.append(-g2.derive(names[j]))
                    for a in range(n):
                        p1a = _gamma_get(gamma, b, i, a)
                        p1b = _gamma_get(gamma, a, j, k)
                        if p1a is not None and p1b is not None:
                            terms.append(p1a * p1b)
                        p2a = _gamma_get(gamma, b, j, a)
                        p2b = _gamma_get(gamma, a, i, k)
                        if p2a is not None and p2b is not None:
                            terms.append(-(p2a * p2b))
                    if not terms:
                        continue
                    s = terms[0]
                    for t in terms[1:]:
                        s = s + t
                    s = s.truncate(order)
                    if not s.is_zero():
                        F[(b, k, i, j)] = s
    # lower with a sign: R_ijkl = -F^b_kij g_bl, antisymmetric in (i, j);
    # the sign makes the sphere example positive
    out = {}
    for (b, k, i, j), jet in F.items():
        for l in range(n):
            gb = g.entry(b, l)
            if gb.is_zero():
                continue
            v = (jet * gb).truncate(order)
            if v.is_zero():
                continue
            for (ii, jj, sgn) in ((i, j, -1), (j, i, 1)):
                idx = (ii, jj, k, l)
                contrib = v if sgn == 1 else -v
                cur = out.get(idx)
                s = contrib if cur is None else cur + contrib
                if s.is_zero():
                    out.pop(idx, None)
                else:
                    out[idx] = s
    return TensorJet(n, 4, g.spec.with_order(order), out)


def ricci(g: MetricJet, R: TensorJet | None = None) -> TensorJet:
    """Ric_jl = g^{ik} R_ijkl, positive (n-1)K for the sphere."""
    if R is None:
        R = curvature(g)
    ginv = g.inverse()
    n = g.n
    out = {}
    for (i, j, k, l), jet in R.comps.items():
        gi = _sym_get(ginv, i, k)
        if gi is None:
            continue
        v = jet * gi
        idx = (j, l)
        cur = out.get(idx)
        s = v if cur is None else cur + v
        if s.is_zero():
            out.pop(idx, None)
        else:
            out[idx] = s
    return TensorJet(n, 2, R.spec, out)


def scalar_curvature(g: MetricJet, ric: TensorJet | None = None) -> JetScalar:
    if ric is None:
        ric = ricci(g)
    ginv = g.inverse()
    acc = JetScalar.zero(ric.spec)
    for (j, k), jet in ric.comps.items():
        gi = _sym_get(ginv, j, k)
        if gi is not None:
            acc = acc + jet * gi
    return acc


def schouten(g: MetricJet) -> TensorJet:
    """P_ij = (Ric_ij - R/(2(n-1)) g_ij) / (n-2)."""
    n = g.n
    ric = ricci(g)
    sc = scalar_curvature(g, ric)
    out = {}
    for i in range(n):
        for j in range(n):
            v = ric.get((i, j)) - (sc * g.entry(i, j)).scale(QQ(1, 2 * (n - 1)))
            v = v.scale(QQ(1, n - 2))
            if not v.is_zero():
                out[(i, j)] = v
    return TensorJet(n, 2, ric.spec, out)


def weyl(g: MetricJet) -> TensorJet:
    """W = R - P (kulkarni-nomizu) g in the fixed convention."""
    n = g.n
    R = curvature(g)
    P = schouten(g)
    order = min(R.spec.order, P.spec.order)
    out = {}
    for idx in _iproduct(range(n), repeat=4):
        i, j, k, l = idx
        v = R.get(idx).truncate(order)
        kn = (
            P.get((i, k)) * g.entry(j, l)
            - P.get((i, l)) * g.entry(j, k)
            + g.entry(i, k) * P.get((j, l))
            - g.entry(i, l) * P.get((j, k))
        )
        v = v - kn.truncate(order)
        if not v.is_zero():
            out[idx] = v
    return TensorJet(n, 4, R.spec.with_order(order), out)


def cotton(g: MetricJet) -> TensorJet:
    """C_ijk = nabla_k P_ij - nabla_j P_ik (slots i, j, k)."""
    P = schouten(g)
    DP = covariant_derivative(P, g)
    out = {}
    n = g.n
    for idx in _iproduct(range(n), repeat=3):
        i, j, k = idx
        v = DP.get((i, j, k)) - DP.get((i, k, j))
        if not v.is_zero():
            out[idx] = v
    return TensorJet(n, 3, DP.spec, out)


def bach(g: MetricJet) -> TensorJet:
    """B_ij = nabla^k C_ijk + P^{kl} W_kilj, symmetric trace-free in dim 4."""
    n = g.n
    C = cotton(g)
    DC = covariant_derivative(C, g)
    ginv = g.inverse()
    W = weyl(g)
    P = schouten(g)
    order = DC.spec.order
    out = {}
    for i in range(n):
        for j in range(n):
            acc = JetScalar.zero(g.spec.with_order(order))
            for k in range(n):
                for l in range(n):
                    gkl = _sym_get(ginv, k, l)
                    if gkl is None:
                        continue
                    acc = acc + (DC.get((i, j, k, l)) * gkl)
                    pw = P.get((k, l))
                    for a in range(n):
                        for b in range(n):
                            gka = _sym_get(ginv, k, a)
                            glb = _sym_get(ginv, l, b)
                            if gka is None or glb is None:
                                continue
                            wt = W.get((a, i, b, j))
                            if wt.is_zero():
                                continue
                            acc = acc + (pw * wt * gka * glb).truncate(order)
            acc = acc.truncate(order)
            if not acc.is_zero():
                out[(i, j)] = acc
    return TensorJet(n, 2, g.spec.with_order(order), out)


# -- curvature lists and their relations --------------------------------------


@dataclass
class CurvatureList:
    """Values at the origin of R and its covariant derivatives.

    entries[r] has rank 4 + r; the derivative slots come last, outermost
    derivative in the last slot.  Ambient lists carry weight tag -2-r.
    """

    dim: int
    entries: list
    ambient: bool = False

    def entry(self, r) -> ConstTensor:
        return self.entries[r]

    @property
    def max_order(self):
        return len(self.entries) - 1


def value_at_origin(T: TensorJet) -> ConstTensor:
    out = ConstTensor(T.dim, T.rank)
    for idx, jet in T.comps.items():
        c = jet.constant_term()
        if c:
            out.set_(idx, c)
    return out


def curvature_list(g: MetricJet, N: int) -> CurvatureList:
    R = curvature(g)
    gamma, _ = christoffel(g)
    entries = [value_at_origin(R)]
    T = R
    for _ in range(N):
        T = covariant_derivative(T, g, gamma)
        entries.append(value_at_origin(T))
    return CurvatureList(g.n, entries)


def quadratic_commutator_term(lst: CurvatureList, hinv, r: int, s: int) -> ConstTensor:
    """The quadratic right-hand side of the commutation identity.

    Generated mechanically: antisymmetrizing derivative slots (s-1, s) of the
    order-r entry equals the outer derivatives, expanded by the Leibniz rule,
    of the curvature action of the commutator on the order-(s-2) entry, with
    the contraction taken in the given form.  No precomputed coefficients.
    """
    dim = lst.dim
    rank = 4 + r
    p_rank = 4 + s - 2
    out = ConstTensor(dim, rank)
    outer = list(range(4 + s, 4 + r))  # output positions of m_{s+1} .. m_r
    # [nabla_a, nabla_b] X_c = +R_abc^e X_e in the fixed convention
    half = QQ(1, 2)
    for bits in _iproduct((0, 1), repeat=len(outer)):
        s1 = [pos for pos, b in zip(outer, bits) if b == 0]
        s2 = [pos for pos, b in zip(outer, bits) if b == 1]
        A = lst.entry(len(s1))
        B = lst.entry(s - 2 + len(s2))
        for p in range(p_rank):
            # B slots map to output positions 0..3, 4..4+s-3 and s2; slot p is contracted
            bpos = list(range(0, p_rank)) + s2
            for aidx, aval in A.vals.items():
                # A slots: (m_s, m_{s-1}, c_p, f, s1...)
                f = aidx[3]
                for bidx, bval in B.vals.items():
                    e = bidx[p]
                    gfe = hinv[f][e]
                    if not gfe:
                        continue
                    oidx = [0] * rank
                    oidx[4 + s - 1] = aidx[0]
                    oidx[4 + s - 2] = aidx[1]
                    for t, pos in enumerate(s1):
                        oidx[pos] = aidx[4 + t]
                    for q in range(p_rank):
                        if q == p:
                            continue
                        oidx[bpos[q]] = bidx[q]
                    for t, pos in enumerate(s2):
                        oidx[pos] = bidx[p_rank + t]
                    oidx[bpos[p]] = aidx[2]
                    out.add_(tuple(oidx), half * aval * bval * gfe)
    return out


def check_curvature_relations(lst: CurvatureList, form: ReferenceForm) -> list:
    """First Bianchi, second Bianchi and the commutation identity for a list.

    Returns one row per (relation, order): ("first-bianchi" | "second-bianchi"
    | "commutation", r [, s], passed).
    """
    hinv = form_inverse(form.h_matrix())
    report = []
    for r in range(lst.max_order + 1):
        E = lst.entry(r)
        v1 = E.antisymmetrize((1, 2, 3))
        report.append(("first-bianchi", r, None, v1.is_zero()))
        if r >= 1:
            v2 = E.antisymmetrize((2, 3, 4))
            report.append(("second-bianchi", r, None, v2.is_zero()))
        for s in range(2, r + 1):
            lhs = E.antisymmetrize((4 + s - 2, 4 + s - 1))
            rhs = quadratic_commutator_term(lst, hinv, r, s)
            report.append(("commutation", r, s, (lhs - rhs).is_zero()))
    return report


def conformal_metric(n, order, phi: JetScalar, form=None) -> MetricJet:
    """g = e^{2 phi} h as an exact jet (phi with zero constant term)."""
    form = form or ReferenceForm.euclidean(n)
    spec = phi.spec
    if phi.constant_term():
        raise NotAMetricJet("conformal factor must vanish at the origin")
    one = JetScalar.constant(spec, 1)
    e2 = one
    powp = one
    fact = QQ(1)
    for k in range(1, spec.order + 1):
        powp = powp * phi.scale(QQ(2))
        if powp.is_zero():
            break
        fact = fact / k
        e2 = e2 + powp.scale(fact)
    d = form.diag()
    return MetricJet.from_components(
        n, spec, {(i, i): e2.scale(d[i]) for i in range(n)}, form
    )


def constant_curvature_metric(n, order, K, form=None) -> MetricJet:
    """Space form g = (1 + K|x|^2/4)^{-2} h with sectional curvature K."""
    form = form or ReferenceForm.euclidean(n)
    spec = base_spec(n, order)
    d = form.diag()
    x2 = JetScalar.zero(spec)
    for i in range(n):
        xi = JetScalar.variable(spec, spec.names[i])
        x2 = x2 + (xi * xi).scale(d[i])
    u = JetScalar.constant(spec, 1) + x2.scale(QQ(K) / 4 if isinstance(K, int) else K / 4)
    w = u.invert()
    w2 = w * w
    return MetricJet.from_components(
        n, spec, {(i, i): w2.scale(d[i]) for i in range(n)}, form
    )


def einstein_sphere_metric(n, order, K=1):
    """Einstein metric jet with Ric = (n-1) K g."""
    return constant_curvature_metric(n, order, K)
