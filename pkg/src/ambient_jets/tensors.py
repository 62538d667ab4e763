"""Tensor jets with two-column Young symmetries and trace adjustments.

A TensorJet is a dense-in-principle, sparse-in-storage array of JetScalar
components indexed by tuples over a fiber dimension.  Tensors over the
(n+2)-dimensional ambient space carry a weight; each component's homogeneity
degree is weight minus the number of scale-direction slots it uses, which the
component jets track themselves.

The two-column symmetry class (r, s) is the subspace of Lambda^r (x) Lambda^s
cut out by the exchange identity: antisymmetrizing the first r indices with
the leading index of the second block kills the tensor.  The projector is
built as A.S.A (block antisymmetrization, row symmetrization, block
antisymmetrization), rescaled once to be exactly idempotent.  The rescaling
constant is computed, not assumed, and validated on every component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations, product as _iproduct

from .jets import JetScalar, JetSpec
from .linalg import Inconsistent, QMatrix, nullspace, rref, solve
from .rationals import QQ, ZERO


class SymmetryError(Exception):
    """Rank or symmetry type does not match the operation."""


@dataclass(frozen=True)
class ReferenceForm:
    """Diagonal reference form h of signature (p, q) and its ambient extension.

    The ambient form on R^(n+2) has ones in the off-diagonal corners and h in
    the middle block, matching the quadratic form 2 x^0 x^inf + |x|^2.
    """

    p: int
    q: int

    @staticmethod
    def euclidean(n: int) -> "ReferenceForm":
        return ReferenceForm(n, 0)

    @property
    def n(self) -> int:
        return self.p + self.q

    def diag(self):
        return tuple([QQ(1)] * self.p + [QQ(-1)] * self.q)

    def h_matrix(self):
        d = self.diag()
        n = self.n
        return tuple(tuple(d[i] if i == j else ZERO for j in range(n)) for i in range(n))

    def ambient_matrix(self):
        """Corner-block form on n+2 dimensions, slots (0, 1..n, inf)."""
        n = self.n
        d = self.diag()
        m = [[ZERO] * (n + 2) for _ in range(n + 2)]
        m[0][n + 1] = QQ(1)
        m[n + 1][0] = QQ(1)
        for i in range(n):
            m[i + 1][i + 1] = d[i]
        return tuple(tuple(row) for row in m)


def form_inverse(mat):
    """Inverse of a constant symmetric form given as tuple-of-tuples."""
    n = len(mat)
    aug = QMatrix.from_rows([list(mat[i]) + [QQ(1) if j == i else ZERO for j in range(n)] for i in range(n)])
    r, rk, _ = rref(aug)
    if rk < n:
        raise ValueError("degenerate form")
    return tuple(tuple(r.entries[i][n + j] for j in range(n)) for i in range(n))


class TensorJet:
    """Covariant tensor with JetScalar components, sparse over index tuples."""

    __slots__ = ("dim", "rank", "spec", "comps", "weight")

    def __init__(self, dim, rank, spec, comps, weight=None):
        self.dim = dim
        self.rank = rank
        self.spec = spec
        self.comps = comps
        self.weight = weight

    @staticmethod
    def zero(dim, rank, spec, weight=None):
        return TensorJet(dim, rank, spec, {}, weight)

    @staticmethod
    def from_components(dim, rank, spec, mapping, weight=None):
        comps = {idx: j for idx, j in mapping.items() if not j.is_zero()}
        return TensorJet(dim, rank, spec, comps, weight)

    def get(self, idx) -> JetScalar:
        j = self.comps.get(idx)
        if j is None:
            hom = 0 if self.weight is None else self.weight
            return JetScalar.zero(self.spec, hom)
        return j

    def is_zero(self) -> bool:
        return not self.comps

    def _new(self, comps, rank=None, weight="keep"):
        return TensorJet(
            self.dim,
            self.rank if rank is None else rank,
            self.spec,
            comps,
            self.weight if weight == "keep" else weight,
        )

    def __add__(self, other):
        if self.dim != other.dim or self.rank != other.rank:
            raise SymmetryError("shape mismatch in tensor sum")
        comps = dict(self.comps)
        for idx, j in other.comps.items():
            cur = comps.get(idx)
            s = j if cur is None else cur + j
            if s.is_zero():
                comps.pop(idx, None)
            else:
                comps[idx] = s
        return self._new(comps)

    def __sub__(self, other):
        return self + other.scale(QQ(-1))

    def scale(self, c):
        if isinstance(c, int):
            c = QQ(c)
        if not c:
            return self._new({})
        return self._new({idx: j.scale(c) for idx, j in self.comps.items()})

    def map_components(self, fn, rank=None, weight="keep"):
        out = {}
        for idx, j in self.comps.items():
            nj = fn(idx, j)
            if nj is not None and not nj.is_zero():
                out[idx] = nj
        return self._new(out, rank=rank, weight=weight)

    def permute_slots(self, perm):
        """Pull back indices: result[idx] = self[idx o perm]... concretely the
        component at tuple I is placed at tuple (I[perm[0]], ..)."""
        out = {}
        for idx, j in self.comps.items():
            nidx = tuple(idx[p] for p in perm)
            cur = out.get(nidx)
            out[nidx] = j if cur is None else cur + j
        return self._new({i: j for i, j in out.items() if not j.is_zero()})

    def __eq__(self, other):
        if not isinstance(other, TensorJet):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.rank == other.rank
            and self.comps == other.comps
        )

    def __repr__(self):
        return f"TensorJet(dim={self.dim}, rank={self.rank}, nnz={len(self.comps)}, weight={self.weight})"


# -- symmetrization machinery -----------------------------------------------


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def _apply_group(comps, rank, ops):
    """ops: list of (slot permutation, rational weight); acts on component dicts."""
    out = {}
    for idx, j in comps.items():
        for perm, wgt in ops:
            nidx = tuple(idx[p] for p in perm)
            contrib = j.scale(wgt)
            cur = out.get(nidx)
            s = contrib if cur is None else cur + contrib
            if s.is_zero():
                out.pop(nidx, None)
            else:
                out[nidx] = s
    return out


@lru_cache(maxsize=None)
def _antisym_ops(rank, slots):
    """Averaged antisymmetrization over the given slots."""
    slots = list(slots)
    k = len(slots)
    norm = QQ(1)
    for i in range(2, k + 1):
        norm = norm / i
    ops = []
    for perm in permutations(range(k)):
        full = list(range(rank))
        for pos, p in zip(slots, perm):
            full[pos] = slots[p]
        ops.append((tuple(full), norm * _perm_sign(perm)))
    return tuple(ops)


@lru_cache(maxsize=None)
def _sym_ops(rank, slots):
    """Averaged symmetrization over the given slots."""
    slots = list(slots)
    k = len(slots)
    norm = QQ(1)
    for i in range(2, k + 1):
        norm = norm / i
    ops = []
    for perm in permutations(range(k)):
        full = list(range(rank))
        for pos, p in zip(slots, perm):
            full[pos] = slots[p]
        ops.append((tuple(full), norm))
    return tuple(ops)


def antisymmetrize(T: TensorJet, slots) -> TensorJet:
    return T._new(_apply_group(T.comps, T.rank, _antisym_ops(T.rank, tuple(slots))))


def symmetrize(T: TensorJet, slots) -> TensorJet:
    return T._new(_apply_group(T.comps, T.rank, _sym_ops(T.rank, tuple(slots))))


@lru_cache(maxsize=None)
def _young_ops(r, s):
    """Slot operations for A o S o A on rank r+s, plus the idempotence scale.

    Rows of the two-column diagram pair slot k with slot r+k for k < s; the
    row symmetrizer averages over the 2^s pair swaps.  The scale kappa with
    (ASA)^2 = kappa ASA is fiber-dimension independent; it is computed once
    numerically-exactly in dimension r+s+1 and cached.
    """
    rank = r + s
    a1 = _antisym_ops(rank, tuple(range(r)))
    a2 = _antisym_ops(rank, tuple(range(r, rank))) if s > 1 else ((tuple(range(rank)), QQ(1)),)
    sym_factors = []
    for k in range(s):
        sym_factors.append(((tuple(range(rank)), QQ(1, 2)), (_swap(rank, k, r + k), QQ(1, 2))))

    def compose(ops1, ops2):
        out = {}
        for p1, w1 in ops1:
            for p2, w2 in ops2:
                p = tuple(p1[p2[i]] for i in range(rank))
                out[p] = out.get(p, ZERO) + w1 * w2
        return tuple((p, w) for p, w in out.items() if w)

    A = compose(a1, a2)
    S = ((tuple(range(rank)), QQ(1)),)
    for f in sym_factors:
        S = compose(S, f)
    E = compose(compose(A, S), A)
    return E


def _swap(rank, i, j):
    p = list(range(rank))
    p[i], p[j] = p[j], p[i]
    return tuple(p)


@lru_cache(maxsize=None)
def _young_scale(r, s, dim):
    """kappa with E^2 = kappa E on rank-(r+s) tensors in the given dimension."""
    E = _young_ops(r, s)
    rank = r + s
    # probe with the first elementary tensor E does not annihilate
    for probe in _iproduct(range(dim), repeat=rank):
        e1 = _apply_perm_dict({probe: QQ(1)}, E)
        if e1:
            e2 = _apply_perm_dict(e1, E)
            idx, val = next(iter(e1.items()))
            kappa = e2.get(idx, ZERO) / val
            if not kappa:
                continue
            # validate proportionality on every component
            for k in set(e1) | set(e2):
                if e2.get(k, ZERO) != kappa * e1.get(k, ZERO):
                    raise SymmetryError("ASA not proportional to a projector")
            return kappa
    raise SymmetryError(f"Young symmetrizer ({r},{s}) vanishes in dimension {dim}")


def _apply_perm_dict(vals, ops):
    out = {}
    for idx, c in vals.items():
        for perm, w in ops:
            nidx = tuple(idx[p] for p in perm)
            nv = out.get(nidx, ZERO) + c * w
            if nv:
                out[nidx] = nv
            elif nidx in out:
                del out[nidx]
    return out


def young_project(T: TensorJet, r: int, s: int) -> TensorJet:
    """Idempotent projector onto the two-column symmetry class (r, s)."""
    if not (0 <= s <= r):
        raise SymmetryError("need 0 <= s <= r")
    if T.rank != r + s:
        raise SymmetryError(f"rank {T.rank} tensor cannot carry ({r},{s}) symmetry")
    if s == 0:
        return antisymmetrize(T, range(r))
    E = _young_ops(r, s)
    kappa = _young_scale(r, s, T.dim)
    out = _apply_group(T.comps, T.rank, E)
    inv = 1 / kappa
    return T._new({k: v.scale(inv) for k, v in out.items()})


def young_project_values(vals: dict, dim: int, r: int, s: int) -> dict:
    """Projector acting on constant tensors given as {index tuple: rational}."""
    if s == 0:
        return _apply_perm_dict(vals, _antisym_ops(r, tuple(range(r))))
    E = _young_ops(r, s)
    kappa = _young_scale(r, s, dim)
    out = _apply_perm_dict(vals, E)
    inv = 1 / kappa
    return {k: v * inv for k, v in out.items() if v}


def exchange_violation(T: TensorJet, r: int, s: int) -> TensorJet:
    """Antisymmetrization of the first r slots with the first s-block slot.

    Zero exactly on the (r, s) symmetry class.
    """
    if s == 0:
        return antisymmetrize(T, range(r)) - T
    return antisymmetrize(T, list(range(r)) + [r])


# -- contractions and index movement -----------------------------------------


def contract(T: TensorJet, slot_a: int, slot_b: int, form_matrix) -> TensorJet:
    """Contract two slots with the inverse-form matrix (raising both)."""
    if not (0 <= slot_a < T.rank and 0 <= slot_b < T.rank) or slot_a == slot_b:
        raise SymmetryError("bad contraction slots")
    lo, hi = sorted((slot_a, slot_b))
    out = {}
    for idx, j in T.comps.items():
        g = form_matrix[idx[lo]][idx[hi]]
        if not g:
            continue
        nidx = idx[:lo] + idx[lo + 1 : hi] + idx[hi + 1 :]
        contrib = j.scale(g)
        cur = out.get(nidx)
        s = contrib if cur is None else cur + contrib
        if s.is_zero():
            out.pop(nidx, None)
        else:
            out[nidx] = s
    w = None if T.weight is None else T.weight - 2
    return TensorJet(T.dim, T.rank - 2, T.spec, out, w)


def move_index(T: TensorJet, slot: int, matrix) -> TensorJet:
    """Contract one slot with a constant matrix (raise or lower)."""
    out = {}
    for idx, j in T.comps.items():
        a = idx[slot]
        for b in range(T.dim):
            g = matrix[a][b]
            if not g:
                continue
            nidx = idx[:slot] + (b,) + idx[slot + 1 :]
            contrib = j.scale(g)
            cur = out.get(nidx)
            s = contrib if cur is None else cur + contrib
            if s.is_zero():
                out.pop(nidx, None)
            else:
                out[nidx] = s
    return T._new(out)


def trace_free_part(T: TensorJet, r: int, s: int, form: ReferenceForm, ambient=False) -> TensorJet:
    """Trace-free part within the (r, s) class with respect to the form.

    Solves exactly for the form-insertion correction: T - tf(T) is the Young
    projection of (form tensor) x (lower tensor).  For s = 0 every trace
    vanishes by antisymmetry and T is returned unchanged.
    """
    if T.rank < 2:
        raise SymmetryError("trace adjustment needs rank >= 2")
    if s == 0:
        return T
    dim = T.dim
    mat = form.ambient_matrix() if ambient else form.h_matrix()
    inv = form_inverse(mat)
    ins = _insertion_basis(r, s, dim, mat, cache_key=(r, s, dim, form.p, form.q, ambient))
    if not ins:
        return T
    # single independent trace: first block slot 0 against second block slot r
    tr_vecs = [_trace_values(v, r, dim, inv) for v in ins]
    tvals = _trace_values_tensor(T, r, inv)
    cols = len(ins)
    keys = sorted(set().union(*[set(v) for v in tr_vecs]) | set(tvals.comps))
    rows = []
    rhs = []
    for key in keys:
        rows.append([v.get(key, ZERO) for v in tr_vecs])
    mat_q = QMatrix.from_rows(rows) if rows else QMatrix.zero(0, cols)

    # solve per jet coefficient: collect all monomial keys present
    spec = T.spec
    allmono = set()
    for key in keys:
        j = tvals.get(key)
        allmono.update(j.terms.keys())
    corr_coeffs = {}
    for mono in sorted(allmono):
        b = [tvals.get(key).terms.get(mono, ZERO) for key in keys]
        try:
            x, _ = solve(mat_q, b)
        except Inconsistent as exc:  # pragma: no cover - dimension pathology
            raise SymmetryError("trace system inconsistent") from exc
        corr_coeffs[mono] = x
    out = T
    for ci in range(cols):
        terms = {mono: x[ci] for mono, x in corr_coeffs.items() if x[ci]}
        if not terms:
            continue
        coeff_jet = JetScalar(spec, dict(terms), tvals.get(keys[0]).hom if keys else 0)
        corr = {}
        for idx, c in ins[ci].items():
            contrib = coeff_jet.scale(c)
            cur = corr.get(idx)
            sj = contrib if cur is None else cur + contrib
            if sj.is_zero():
                corr.pop(idx, None)
            else:
                corr[idx] = sj
        out = out - T._new(corr)
    return out


_INSERTION_CACHE = {}


def _insertion_basis(r, s, dim, mat, cache_key=None):
    """Independent Young projections of (form) x (lower index pattern).

    These span the form-multiple subspace of the (r, s) class; the trace-free
    correction is solved against this basis.
    """
    if cache_key is not None and cache_key in _INSERTION_CACHE:
        return _INSERTION_CACHE[cache_key]
    basis = []
    reduced = []  # eliminated copies, {idx: coeff} with leading-1 structure
    for rest in _canonical_lower_tuples(r, s, dim):
        vals = {}
        for a in range(dim):
            for b in range(dim):
                g = mat[a][b]
                if not g:
                    continue
                idx = (a,) + rest[: r - 1] + (b,) + rest[r - 1 :]
                vals[idx] = vals.get(idx, ZERO) + g
        proj = young_project_values(vals, dim, r, s)
        if not proj:
            continue
        w = dict(proj)
        for lead, row in reduced:
            if lead in w:
                f = w.pop(lead)
                for k, v in row.items():
                    if k == lead:
                        continue
                    nv = w.get(k, ZERO) - f * v
                    if nv:
                        w[k] = nv
                    elif k in w:
                        del w[k]
        if not w:
            continue
        lead = min(w)
        inv = 1 / w[lead]
        reduced.append((lead, {k: v * inv for k, v in w.items()}))
        basis.append(proj)
    if cache_key is not None:
        _INSERTION_CACHE[cache_key] = basis
    return basis


def _canonical_lower_tuples(r, s, dim):
    """Index tuples for the lower tensor slot pattern (r-1 block, s-1 block)."""
    first = combinations(range(dim), r - 1)
    out = []
    for f in first:
        for g in combinations(range(dim), s - 1):
            out.append(tuple(f) + tuple(g))
    return out


def _trace_values(vals, r, dim, inv):
    """Trace of a constant tensor over slots (0, r) with the inverse form."""
    out = {}
    for idx, c in vals.items():
        g = inv[idx[0]][idx[r]]
        if not g:
            continue
        nidx = idx[1:r] + idx[r + 1 :]
        nv = out.get(nidx, ZERO) + c * g
        if nv:
            out[nidx] = nv
        elif nidx in out:
            del out[nidx]
    return out


def _trace_values_tensor(T: TensorJet, r: int, inv) -> TensorJet:
    out = {}
    for idx, j in T.comps.items():
        g = inv[idx[0]][idx[r]]
        if not g:
            continue
        nidx = idx[1:r] + idx[r + 1 :]
        contrib = j.scale(g)
        cur = out.get(nidx)
        s = contrib if cur is None else cur + contrib
        if s.is_zero():
            out.pop(nidx, None)
        else:
            out[nidx] = s
    w = None if T.weight is None else T.weight - 2
    return TensorJet(T.dim, T.rank - 2, T.spec, out, w)


def full_trace_rows(T: TensorJet, form: ReferenceForm, ambient=False):
    """All pairwise traces of T; the tensor is trace-free iff all are zero."""
    mat = form.ambient_matrix() if ambient else form.h_matrix()
    inv = form_inverse(mat)
    rows = []
    for a in range(T.rank):
        for b in range(a + 1, T.rank):
            rows.append(contract(T, a, b, inv))
    return rows


# -- constant tensors ---------------------------------------------------------


class ConstTensor:
    """Constant covariant tensor: {index tuple: exact coefficient}."""

    __slots__ = ("dim", "rank", "vals")

    def __init__(self, dim, rank, vals=None):
        self.dim = dim
        self.rank = rank
        self.vals = vals or {}

    def get(self, idx):
        return self.vals.get(idx, ZERO)

    def set_(self, idx, v):
        if v:
            self.vals[idx] = v
        elif idx in self.vals:
            del self.vals[idx]

    def add_(self, idx, v):
        nv = self.vals.get(idx, ZERO) + v
        self.set_(idx, nv)

    def is_zero(self):
        return not self.vals

    def scale(self, c):
        return ConstTensor(self.dim, self.rank, {k: v * c for k, v in self.vals.items() if v * c})

    def __add__(self, other):
        out = dict(self.vals)
        for k, v in other.vals.items():
            nv = out.get(k, ZERO) + v
            if nv:
                out[k] = nv
            elif k in out:
                del out[k]
        return ConstTensor(self.dim, self.rank, out)

    def __sub__(self, other):
        return self + other.scale(QQ(-1))

    def __eq__(self, other):
        return (
            isinstance(other, ConstTensor)
            and self.dim == other.dim
            and self.rank == other.rank
            and self.vals == other.vals
        )

    def permute(self, perm):
        out = {}
        for idx, v in self.vals.items():
            nidx = tuple(idx[p] for p in perm)
            nv = out.get(nidx, ZERO) + v
            if nv:
                out[nidx] = nv
            elif nidx in out:
                del out[nidx]
        return ConstTensor(self.dim, self.rank, out)

    def antisymmetrize(self, slots):
        out = ConstTensor(self.dim, self.rank)
        for perm, w in _antisym_ops(self.rank, tuple(slots)):
            for idx, v in self.vals.items():
                out.add_((tuple(idx[p] for p in perm)), v * w)
        return out

    def symmetrize(self, slots):
        out = ConstTensor(self.dim, self.rank)
        for perm, w in _sym_ops(self.rank, tuple(slots)):
            for idx, v in self.vals.items():
                out.add_((tuple(idx[p] for p in perm)), v * w)
        return out

    def contract(self, a, b, matrix):
        lo, hi = sorted((a, b))
        out = ConstTensor(self.dim, self.rank - 2)
        for idx, v in self.vals.items():
            g = matrix[idx[lo]][idx[hi]]
            if g:
                out.add_(idx[:lo] + idx[lo + 1 : hi] + idx[hi + 1 :], v * g)
        return out

    def move_index(self, slot, matrix):
        out = ConstTensor(self.dim, self.rank)
        for idx, v in self.vals.items():
            for b in range(self.dim):
                g = matrix[idx[slot]][b]
                if g:
                    out.add_(idx[:slot] + (b,) + idx[slot + 1 :], v * g)
        return out

    def __repr__(self):
        return f"ConstTensor(dim={self.dim}, rank={self.rank}, nnz={len(self.vals)})"
