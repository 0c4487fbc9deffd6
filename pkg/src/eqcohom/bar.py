"""Operator-equivariant bar complexes over orbit representatives.

The degree ``n`` part of the bar resolution is free over ``G`` on the tuples
``[g1|...|gn]`` and ``Gamma`` permutes the tuples diagonally.  After applying
``Hom_{G x| Gamma}(-, A)`` or ``- (x)_{G x| Gamma} A`` each orbit of tuples
contributes one block: the fixed points ``A^Stab`` (cochains) or the
coinvariants ``A_Stab`` (chains) of the stabilizer of its representative.

A cochain is stored by its values on representatives; the value at any
other tuple is recovered through the transporter, ``f(^s t) = s.f(t)``.
Chains use the relation ``(w x) (x) a = x (x) w^-1 a``, so the first face
sends ``[g1|...|gn] (x) a`` to ``[g2|...|gn] (x) g1^-1 a``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import NotAComplexError, ValidationError
from .gmod import GammaGModule, coinvariant_quotient, fixed_points
from .grp import DEFAULT_TUPLE_CAP, GammaAction, OrbitDecomposition, orbits_on_tuples
from .zmod import FgAbelianGroup, IntMatrix, ReducedComplex, SparseMatrix, Subquotient, reduce_vector

COCHAIN = "cochain"
CHAIN = "chain"


@dataclass(eq=False)
class BarBasis:
    """Generators of one degree: a block per orbit representative."""

    kind: str
    degree: int
    orbits: OrbitDecomposition
    blocks: list[Subquotient]
    offsets: list[int]
    orders: list[int]

    @property
    def size(self) -> int:
        return len(self.orders)

    def block_slice(self, r: int) -> slice:
        return slice(self.offsets[r], self.offsets[r] + self.blocks[r].ngens)


def _matvec(M: IntMatrix, v: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in M.rows]


def _block_cache(kind: str, A: GammaGModule):
    cache: dict[tuple[int, ...], Subquotient] = {}

    def block(stab: tuple[int, ...]) -> Subquotient:
        sq = cache.get(stab)
        if sq is None:
            mats = [A.gamma_act[s] for s in stab if s]
            if kind == COCHAIN:
                sq = fixed_points(A.orders, mats)
            else:
                sq = coinvariant_quotient(A.orders, mats)
            cache[stab] = sq
        return sq

    return block


def make_basis(kind: str, action: GammaAction, A: GammaGModule, n: int, *, normalized: bool = False,
               cap: int = DEFAULT_TUPLE_CAP, block=None) -> BarBasis:
    dec = orbits_on_tuples(action, n, normalized=normalized, cap=cap)
    block = block or _block_cache(kind, A)
    blocks, offsets, orders = [], [], []
    for st in dec.stab:
        sq = block(st)
        offsets.append(len(orders))
        blocks.append(sq)
        orders.extend(sq.orders)
    return BarBasis(kind, n, dec, blocks, offsets, orders)


class _Ops:
    """Cached products of action matrices."""

    def __init__(self, A: GammaGModule):
        self.A = A
        self._cache: dict[tuple[int, int], IntMatrix] = {}

    def g_then_gamma(self, g: int, s: int) -> IntMatrix:
        """``a -> g.(s.a)``."""
        key = (g, s)
        M = self._cache.get(key)
        if M is None:
            M = (self.A.g_act[g] @ self.A.gamma_act[s]).reduce(self.A.orders)
            self._cache[key] = M
        return M

    def gamma_then_g(self, s: int, g: int) -> IntMatrix:
        """``a -> s.(g.a)``."""
        key = (-1 - s, g)
        M = self._cache.get(key)
        if M is None:
            M = (self.A.gamma_act[s] @ self.A.g_act[g]).reduce(self.A.orders)
            self._cache[key] = M
        return M


def _cochain_faces(G, s: tuple[int, ...]):
    """``(sign, g, face)`` so that ``(df)(s) = sum sign * g.f(face)``."""
    n = len(s) - 1
    yield 1, s[0], s[1:]
    for i in range(1, n + 1):
        yield (-1) ** i, 0, s[: i - 1] + (G.table[s[i - 1]][s[i]],) + s[i + 1 :]
    yield (-1) ** (n + 1), 0, s[:-1]


def _chain_faces(G, t: tuple[int, ...]):
    """``(sign, g, face)`` so that ``d([t] (x) a) = sum sign * [face] (x) g.a``."""
    n = len(t)
    yield 1, G.inverses[t[0]], t[1:]
    for i in range(1, n):
        yield (-1) ** i, 0, t[: i - 1] + (G.table[t[i - 1]][t[i]],) + t[i + 1 :]
    yield (-1) ** n, 0, t[:-1]


def cochain_differential(src: BarBasis, tgt: BarBasis, A: GammaGModule, ops: _Ops | None = None) -> SparseMatrix:
    """``delta: C^n -> C^(n+1)``, assembled row block by row block."""
    G = A.G
    ops = ops or _Ops(A)
    dec_s = src.orbits
    cols: list[dict[int, int]] = [{} for _ in range(src.size)]
    for si, s in enumerate(tgt.orbits.rep_tuples):
        tblock = tgt.blocks[si]
        if tblock.ngens == 0:
            continue
        acc: dict[int, list[list[int]]] = {}
        for sign, g, face in _cochain_faces(G, s):
            if src.orbits.normalized and 0 in face:
                continue
            r, sig = dec_s.locate(face)
            rb = src.blocks[r]
            if rb.ngens == 0:
                continue
            M = ops.g_then_gamma(g, sig)
            cur = acc.get(r)
            if cur is None:
                cur = acc[r] = [[0] * A.rank for _ in range(rb.ngens)]
            for j in range(rb.ngens):
                v = _matvec(M, rb.rep(j))
                cj = cur[j]
                for k, x in enumerate(v):
                    cj[k] += sign * x
        base = tgt.offsets[si]
        for r, colsum in acc.items():
            off = src.offsets[r]
            for j, v in enumerate(colsum):
                c = tblock.coords(reduce_vector(v, A.orders))
                col = cols[off + j]
                for k, x in enumerate(c):
                    if x:
                        col[base + k] = x
    return SparseMatrix(tgt.size, src.size, cols)


def chain_differential(src: BarBasis, tgt: BarBasis, A: GammaGModule, ops: _Ops | None = None) -> SparseMatrix:
    """``d: C_n -> C_(n-1)``, assembled column block by column block."""
    G = A.G
    Gm = A.Gamma
    ops = ops or _Ops(A)
    dec_t = tgt.orbits
    cols: list[dict[int, int]] = []
    for ti, t in enumerate(src.orbits.rep_tuples):
        sblock = src.blocks[ti]
        faces = []
        for sign, g, face in _chain_faces(G, t):
            if tgt.orbits.normalized and 0 in face:
                continue
            r, sig = dec_t.locate(face)
            faces.append((sign, ops.gamma_then_g(Gm.inverses[sig], g), r))
        for j in range(sblock.ngens):
            a = sblock.rep(j)
            acc: dict[int, list[int]] = {}
            for sign, M, r in faces:
                v = _matvec(M, a)
                cur = acc.setdefault(r, [0] * A.rank)
                for k, x in enumerate(v):
                    cur[k] += sign * x
            col: dict[int, int] = {}
            for r, v in acc.items():
                rb = tgt.blocks[r]
                if rb.ngens == 0:
                    continue
                c = rb.coords(reduce_vector(v, A.orders))
                base = tgt.offsets[r]
                for k, x in enumerate(c):
                    if x:
                        col[base + k] = x
            cols.append(col)
    return SparseMatrix(tgt.size, src.size, cols)


@dataclass(eq=False)
class BarComplex:
    """Bar chain or cochain complex in degrees ``0 .. top``.

    ``maps[n]`` is ``delta^n: C^n -> C^(n+1)`` for cochains and
    ``d_n: C_n -> C_(n-1)`` for chains.  Homology is reliable in degrees
    ``0 .. top - 1``.
    """

    kind: str
    action: GammaAction
    module: GammaGModule
    normalized: bool
    bases: list[BarBasis]
    maps: dict[int, SparseMatrix]
    build_seconds: float = 0.0
    _reduced: ReducedComplex | None = field(default=None, repr=False)

    @property
    def top(self) -> int:
        return len(self.bases) - 1

    def rank(self, n: int) -> int:
        return self.bases[n].size

    def sizes(self) -> list[int]:
        return [b.size for b in self.bases]

    def differential(self, n: int) -> SparseMatrix:
        return self.maps[n]

    def dense(self, n: int) -> IntMatrix:
        return self.maps[n].to_dense()

    def check(self) -> None:
        """Raise ``NotAComplexError`` unless consecutive differentials compose to zero."""
        for n, f in self.maps.items():
            nxt = n + 1 if self.kind == COCHAIN else n - 1
            if nxt in self.maps:
                tgt = self.bases[nxt + 1 if self.kind == COCHAIN else nxt - 1]
                if not self.maps[nxt].compose_is_zero(f, tgt.orders):
                    raise NotAComplexError(f"not a complex at degree {nxt}")

    # -- homology -----------------------------------------------------------

    def _level(self, n: int) -> int:
        return n if self.kind == COCHAIN else self.top - n

    def reduced(self) -> ReducedComplex:
        if self._reduced is None:
            if self.kind == COCHAIN:
                orders = [b.orders for b in self.bases]
                maps = [self.maps[n] for n in range(self.top)]
            else:
                orders = [self.bases[n].orders for n in range(self.top, -1, -1)]
                maps = [self.maps[n] for n in range(self.top, 0, -1)]
            self._reduced = ReducedComplex(orders, maps)
        return self._reduced

    def homology(self, n: int) -> FgAbelianGroup:
        if not 0 <= n < self.top:
            raise ValueError(f"degree {n} outside the reliable range 0..{self.top - 1}")
        return self.reduced().homology(self._level(n))

    def class_of(self, n: int, vec: Sequence[int]) -> list[int]:
        return self.reduced().class_of(self._level(n), vec)

    def class_orders(self, n: int) -> tuple[int, ...]:
        return self.reduced().core_homology(self._level(n)).orders

    def representative(self, n: int, i: int) -> list[int]:
        return self.reduced().representative(self._level(n), i)

    def element(self, n: int, coords: Sequence[int]) -> list[int]:
        return self.reduced().element(self._level(n), coords)

    def apply(self, n: int, vec: Sequence[int]) -> list[int]:
        """Apply the differential leaving degree ``n``."""
        f = self.maps[n]
        nxt = n + 1 if self.kind == COCHAIN else n - 1
        return f.apply(vec, self.bases[nxt].orders)

    def is_cycle(self, n: int, vec: Sequence[int]) -> bool:
        if n not in self.maps:
            return True
        return not any(self.apply(n, vec))

    # -- cochains as functions ----------------------------------------------

    def cochain_eval(self, n: int, f: Sequence[int], t: Sequence[int]) -> list[int]:
        """Value of the degree ``n`` cochain ``f`` at the tuple ``t``."""
        if self.kind != COCHAIN:
            raise ValueError("cochain_eval needs a cochain complex")
        if len(t) != n:
            raise ValueError(f"tuple of length {len(t)} for a degree {n} cochain")
        basis = self.bases[n]
        if len(f) != basis.size:
            raise ValueError("cochain has the wrong length")
        if basis.orbits.normalized and 0 in t:
            return self.module.zero()
        r, s = basis.orbits.locate(t)
        value = basis.blocks[r].element(f[basis.block_slice(r)])
        return self.module.act_gamma(s, value)

    def cochain_from_function(self, n: int, func: Callable[[tuple[int, ...]], Sequence[int]]) -> list[int]:
        """Coordinates of the equivariant cochain with values ``func(t)`` (read on representatives)."""
        basis = self.bases[n]
        out: list[int] = []
        for r, t in enumerate(basis.orbits.rep_tuples):
            out.extend(basis.blocks[r].coords(self.module.reduce(func(t))))
        return out

    def chain_element(self, n: int, t: Sequence[int], a: Sequence[int]) -> list[int]:
        """Coordinates of ``[t] (x) a`` in ``C_n``."""
        if self.kind != CHAIN:
            raise ValueError("chain_element needs a chain complex")
        basis = self.bases[n]
        out = [0] * basis.size
        if basis.orbits.normalized and 0 in t:
            return out
        r, s = basis.orbits.locate(tuple(t))
        b = self.module.act_gamma(self.action.gamma.inverses[s], a)
        out[basis.block_slice(r)] = basis.blocks[r].coords(b)
        return out


def _build(kind: str, action: GammaAction, A: GammaGModule, top: int, normalized: bool, cap: int,
           check: bool) -> BarComplex:
    if A.G != action.g or A.Gamma != action.gamma or A.action.phi != action.phi:
        raise ValidationError("module is not over the given action")
    if top < 0:
        raise ValueError("degree must be nonnegative")
    start = time.perf_counter()
    block = _block_cache(kind, A)
    bases = [make_basis(kind, action, A, n, normalized=normalized, cap=cap, block=block) for n in range(top + 1)]
    ops = _Ops(A)
    maps = {}
    for n in range(top):
        if kind == COCHAIN:
            maps[n] = cochain_differential(bases[n], bases[n + 1], A, ops)
        else:
            maps[n + 1] = chain_differential(bases[n + 1], bases[n], A, ops)
    cx = BarComplex(kind, action, A, normalized, bases, maps)
    if check:
        cx.check()
    cx.build_seconds = time.perf_counter() - start
    return cx


def cochain_complex(action: GammaAction, A: GammaGModule, N: int, *, normalized: bool = False,
                    cap: int = DEFAULT_TUPLE_CAP, check: bool = True) -> BarComplex:
    """Cochains in degrees ``0 .. N``; the last differential is ``delta^(N-1)``."""
    return _build(COCHAIN, action, A, N, normalized, cap, check)


def chain_complex(action: GammaAction, A: GammaGModule, N: int, *, normalized: bool = False,
                  cap: int = DEFAULT_TUPLE_CAP, check: bool = True) -> BarComplex:
    """Chains in degrees ``0 .. N``; the last differential is ``d_N``."""
    return _build(CHAIN, action, A, N, normalized, cap, check)


def induced_coefficient_map(src: BarComplex, tgt: BarComplex, F: IntMatrix, n: int) -> SparseMatrix:
    """Degree ``n`` component of the (co)chain map induced by a module map ``F: A -> A'``."""
    if src.kind != tgt.kind:
        raise ValueError("complexes of different kinds")
    bs, bt = src.bases[n], tgt.bases[n]
    if bs.orbits.rep_tuples != bt.orbits.rep_tuples:
        raise ValueError("complexes have different orbit bases")
    orders = tgt.module.orders
    cols: list[dict[int, int]] = []
    for r in range(len(bs.blocks)):
        sb, tb = bs.blocks[r], bt.blocks[r]
        base = bt.offsets[r]
        for j in range(sb.ngens):
            c = tb.coords(reduce_vector(F.apply(sb.rep(j)), orders)) if tb.ngens else []
            cols.append({base + k: x for k, x in enumerate(c) if x})
    return SparseMatrix(bt.size, bs.size, cols)
