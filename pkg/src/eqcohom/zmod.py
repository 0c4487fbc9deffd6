"""Exact integer linear algebra.

Everything here works over Python integers, so there is no overflow.  The
central objects are

* :class:`IntMatrix` -- a small dense integer matrix,
* :func:`smith_normal_form` -- ``U @ M @ V == S`` with unimodular ``U``, ``V``,
* :class:`FgAbelianGroup` -- canonical form ``Z^r + Z/d1 + ... + Z/dk``,
* :class:`Subquotient` -- ``ker(d_out) / im(d_in)`` inside a group given by a
  diagonal presentation, with the basis changes kept so that cycles can be
  turned into class coordinates and classes back into cycles,
* :class:`ReducedComplex` -- a sparse complex from which pairs of generators
  joined by an invertible matrix entry have been cancelled.  Homology of the
  remaining core is computed densely.

A "diagonal presentation" is a list of orders ``e``: generator ``i`` has order
``e[i]`` (``0`` means infinite cyclic).  Vectors are integer lists whose
``i``-th entry is read modulo ``e[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .errors import NotAComplexError

Vector = list[int]


def _mod(value: int, order: int) -> int:
    return value % order if order else value


def reduce_vector(vec: Sequence[int], orders: Sequence[int]) -> Vector:
    return [v % e if e else v for v, e in zip(vec, orders)]


def is_zero_vector(vec: Sequence[int], orders: Sequence[int] | None = None) -> bool:
    if orders is None:
        return not any(vec)
    return all((v % e == 0) if e else v == 0 for v, e in zip(vec, orders))


class IntMatrix:
    """Dense matrix of Python integers.  ``rows`` may be empty with ``ncols > 0``."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[int]], ncols: int | None = None):
        self.rows = [list(map(int, r)) for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> IntMatrix:
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> IntMatrix:
        return cls([[c[i] for c in columns] for i in range(nrows)], len(columns))

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> IntMatrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __setitem__(self, ij: tuple[int, int], value: int) -> None:
        i, j = ij
        self.rows[i][j] = value

    def copy(self) -> IntMatrix:
        return IntMatrix(self.rows, self.ncols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def column(self, j: int) -> Vector:
        return [r[j] for r in self.rows]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix([[r[j] for r in self.rows] for j in range(self.ncols)], self.nrows)

    def apply(self, vec: Sequence[int]) -> Vector:
        if len(vec) != self.ncols:
            raise ValueError(f"vector of length {len(vec)} for {self.shape} matrix")
        nz = [(j, v) for j, v in enumerate(vec) if v]
        return [sum(r[j] * v for j, v in nz) for r in self.rows]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append([sum(a * c[k] for k, a in nz) for c in cols])
        return IntMatrix(out, other.ncols)

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> IntMatrix:
        return IntMatrix([[-a for a in r] for r in self.rows], self.ncols)

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix([[k * a for a in r] for r in self.rows], self.ncols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, tuple(map(tuple, self.rows))))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows!r}, ncols={self.ncols})"

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return IntMatrix([r + s for r, s in zip(self.rows, other.rows)], self.ncols + other.ncols)

    def vstack(self, other: IntMatrix) -> IntMatrix:
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return IntMatrix(self.rows + other.rows, self.ncols)

    def select_columns(self, idx: Sequence[int]) -> IntMatrix:
        return IntMatrix([[r[j] for j in idx] for r in self.rows], len(idx))

    def select_rows(self, idx: Sequence[int]) -> IntMatrix:
        return IntMatrix([self.rows[i] for i in idx], self.ncols)

    def reduce(self, orders: Sequence[int]) -> IntMatrix:
        """Reduce row ``i`` modulo ``orders[i]`` (the target presentation)."""
        return IntMatrix([reduce_vector(r, [e] * self.ncols) for r, e in zip(self.rows, orders)], self.ncols)

    def is_zero(self, orders: Sequence[int] | None = None) -> bool:
        if orders is None:
            return not any(any(r) for r in self.rows)
        return all((not any(a % e for a in r)) if e else not any(r) for r, e in zip(self.rows, orders))

    def is_diagonal(self) -> bool:
        return all(a == 0 for i, r in enumerate(self.rows) for j, a in enumerate(r) if i != j)

    def det(self) -> int:
        """Bareiss fraction-free determinant."""
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        n = self.nrows
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


def as_matrix(m: IntMatrix | Sequence[Sequence[int]]) -> IntMatrix:
    return m if isinstance(m, IntMatrix) else IntMatrix(m)


# --------------------------------------------------------------------------
# Smith normal form


@dataclass
class SmithForm:
    S: IntMatrix
    U: IntMatrix | None
    V: IntMatrix | None
    U_inv: IntMatrix | None = None
    V_inv: IntMatrix | None = None

    @property
    def diagonal(self) -> list[int]:
        return [self.S.rows[i][i] for i in range(min(self.S.shape))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    def __iter__(self):
        # allows ``S, U, V = smith_normal_form(M)``
        return iter((self.S, self.U, self.V))


def smith_normal_form(
    M: IntMatrix | Sequence[Sequence[int]],
    *,
    transforms: bool = True,
    inverses: bool = False,
    right: bool = True,
    left: bool = True,
) -> SmithForm:
    """Return ``S, U, V`` with ``U @ M @ V == S``.

    ``S`` is diagonal with nonnegative entries ``d1 | d2 | ...``; ``U`` and
    ``V`` are unimodular.  Pivots are chosen by minimal absolute value.  With
    ``inverses=True`` the inverses of ``U`` and ``V`` are tracked as well;
    ``right=False`` skips ``V`` and its inverse (they are returned as ``None``),
    ``left=False`` does the same for ``U``.
    """
    M = as_matrix(M)
    m, n = M.shape
    A = M.tolist()
    track = transforms or inverses
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track and left else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track and right else None
    Ui = [[int(i == j) for j in range(m)] for i in range(m)] if inverses and left else None
    Vi = [[int(i == j) for j in range(n)] for i in range(n)] if inverses and right else None

    def row_add(dst: int, src: int, q: int) -> None:  # row_dst += q * row_src
        ra, rs = A[dst], A[src]
        for j in range(n):
            if rs[j]:
                ra[j] += q * rs[j]
        if U is not None:
            ua, us = U[dst], U[src]
            for j in range(m):
                if us[j]:
                    ua[j] += q * us[j]
        if Ui is not None:
            for r in Ui:
                if r[dst]:
                    r[src] -= q * r[dst]

    def col_add(dst: int, src: int, q: int) -> None:  # col_dst += q * col_src
        for r in A:
            if r[src]:
                r[dst] += q * r[src]
        if V is not None:
            for r in V:
                if r[src]:
                    r[dst] += q * r[src]
        if Vi is not None:
            vd, vs = Vi[dst], Vi[src]
            for j in range(n):
                if vd[j]:
                    vs[j] -= q * vd[j]

    def row_swap(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]
        if Ui is not None:
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def col_swap(i: int, j: int) -> None:
        for r in A:
            r[i], r[j] = r[j], r[i]
        if V is not None:
            for r in V:
                r[i], r[j] = r[j], r[i]
        if Vi is not None:
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_neg(i: int) -> None:
        A[i] = [-a for a in A[i]]
        if U is not None:
            U[i] = [-a for a in U[i]]
        if Ui is not None:
            for r in Ui:
                r[i] = -r[i]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                row = A[i]
                for j in range(t, n):
                    a = row[j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                row_swap(t, pi)
            if pj != t:
                col_swap(t, pj)
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                a = A[i][t]
                if a:
                    q = -(a // p) if a % p == 0 else -round(a / p)
                    row_add(i, t, q)
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                a = A[t][j]
                if a:
                    q = -(a // p) if a % p == 0 else -round(a / p)
                    col_add(j, t, q)
                    if A[t][j]:
                        clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            row_add(t, bad, 1)
        if t < m and t < n and A[t][t] < 0:
            row_neg(t)
    return SmithForm(
        S=IntMatrix(A, n),
        U=IntMatrix(U, m) if transforms and left else None,
        V=IntMatrix(V, n) if transforms and right else None,
        U_inv=IntMatrix(Ui, m) if inverses and left else None,
        V_inv=IntMatrix(Vi, n) if inverses and right else None,
    )


def invariant_factors(M: IntMatrix | Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal of the Smith form (units included)."""
    return [d for d in smith_normal_form(M, transforms=False).diagonal if d]


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Columns form a basis of ``{x in Z^n : M x = 0}``."""
    n = M.ncols
    if M.nrows == 0 or M.is_zero():
        return IntMatrix.identity(n)
    snf = smith_normal_form(M, left=False)
    r = snf.rank
    return snf.V.select_columns(range(r, n))


def relation_columns(orders: Sequence[int]) -> IntMatrix:
    """Columns ``e_i * unit_i`` for the finite orders of a diagonal presentation."""
    idx = [i for i, e in enumerate(orders) if e]
    return IntMatrix([[orders[i] if i == k else 0 for i in idx] for k in range(len(orders))], len(idx))


def kernel_lattice(M: IntMatrix, target_orders: Sequence[int]) -> IntMatrix:
    """Basis (as columns) of ``{x in Z^n : M x == 0 modulo target_orders}``."""
    n = M.ncols
    if M.nrows == 0 or M.is_zero(target_orders):
        return IntMatrix.identity(n)
    exact = [i for i, e in enumerate(target_orders) if e == 0]
    finite = [i for i, e in enumerate(target_orders) if e > 1]
    K = kernel_basis(M.select_rows(exact)) if exact else IntMatrix.identity(n)
    if not finite or K.ncols == 0:
        return K
    # row i asks M_i x == 0 mod e_i, i.e. (L / e_i) M_i x == 0 mod L
    L = 1
    for i in finite:
        L = L * target_orders[i] // gcd(L, target_orders[i])
    MK = M.select_rows(finite) @ K
    rows = {
        tuple(((L // target_orders[i]) * a) % L for a in row)
        for i, row in zip(finite, MK.rows)
    }
    rows.discard((0,) * K.ncols)
    if not rows:
        return K
    snf = smith_normal_form(IntMatrix(sorted(rows), K.ncols), left=False)
    d = snf.diagonal
    scale = [L // gcd(d[j], L) if j < len(d) else 1 for j in range(K.ncols)]
    V = snf.V @ IntMatrix.diagonal(scale)
    return K @ V


class LatticeSolver:
    """Solve ``B x = v`` exactly for a fixed integer matrix ``B``."""

    def __init__(self, B: IntMatrix):
        self.B = B
        self.snf = smith_normal_form(B)
        self.diag = self.snf.diagonal
        self.rank = self.snf.rank

    def solve(self, v: Sequence[int]) -> Vector | None:
        y = self.snf.U.apply(v)
        z = [0] * self.B.ncols
        for i, yi in enumerate(y):
            d = self.diag[i] if i < len(self.diag) else 0
            if d:
                if yi % d:
                    return None
                z[i] = yi // d
            elif yi:
                return None
        return self.snf.V.apply(z)

    def contains(self, v: Sequence[int]) -> bool:
        return self.solve(v) is not None


def solve_modular(M: IntMatrix, target_orders: Sequence[int], v: Sequence[int]) -> Vector | None:
    """Find ``x`` with ``M x == v`` modulo ``target_orders`` or return ``None``."""
    E = relation_columns(target_orders)
    sol = LatticeSolver(M.hstack(E)).solve(v)
    return None if sol is None else sol[: M.ncols]


def same_subgroup(W1: IntMatrix, W2: IntMatrix, orders: Sequence[int]) -> bool:
    """Do the columns of ``W1`` and ``W2`` generate the same subgroup of ``(+) Z/orders``?"""
    E = relation_columns(orders)
    L1 = LatticeSolver(W1.hstack(E))
    L2 = LatticeSolver(W2.hstack(E))
    return all(L1.contains(c) for c in W2.columns()) and all(L2.contains(c) for c in W1.columns())


def subgroup_contains(W: IntMatrix, orders: Sequence[int], vectors: Iterable[Sequence[int]]) -> bool:
    L = LatticeSolver(W.hstack(relation_columns(orders)))
    return all(L.contains(v) for v in vectors)


# --------------------------------------------------------------------------
# Finitely generated abelian groups


def _normalize_torsion(values: Iterable[int]) -> tuple[int, ...]:
    a = sorted(v for v in values if v > 1)
    changed = True
    while changed:
        changed = False
        for i in range(len(a)):
            for j in range(i + 1, len(a)):
                if a[j] % a[i]:
                    g = gcd(a[i], a[j])
                    a[i], a[j] = g, a[i] * a[j] // g
                    changed = True
        a = sorted(v for v in a if v > 1)
    return tuple(a)


@dataclass(frozen=True, order=True)
class FgAbelianGroup:
    """``Z^free_rank + Z/d1 + ... + Z/dk`` with ``d1 | d2 | ...`` and every ``di >= 2``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        t = tuple(self.torsion)
        if any(d < 2 for d in t) or any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"not an invariant factor chain: {t}")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> FgAbelianGroup:
        orders = list(orders)
        if any(e < 0 for e in orders):
            raise ValueError("negative cyclic order")
        return cls(sum(1 for e in orders if e == 0), _normalize_torsion(orders))

    @classmethod
    def parse(cls, text: str) -> FgAbelianGroup:
        """Inverse of ``str``: ``"Z^1 + Z/2"``, ``"Z/2 + Z/2"``, ``"0"``."""
        text = text.strip()
        if text == "0":
            return cls()
        free, tors = 0, []
        for part in text.split("+"):
            part = part.strip()
            if part.startswith("Z^"):
                free += int(part[2:])
            elif part == "Z":
                free += 1
            elif part.startswith("Z/"):
                tors.append(int(part[2:]))
            else:
                raise ValueError(f"cannot parse abelian group {text!r}")
        return cls.from_orders([0] * free + tors)

    @property
    def cyclic_orders(self) -> tuple[int, ...]:
        return (0,) * self.free_rank + self.torsion

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        """Cardinality, or ``None`` when infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __add__(self, other: FgAbelianGroup) -> FgAbelianGroup:
        return FgAbelianGroup.from_orders(self.cyclic_orders + other.cyclic_orders)

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def direct_sum(groups: Iterable[FgAbelianGroup]) -> FgAbelianGroup:
    orders: list[int] = []
    for g in groups:
        orders.extend(g.cyclic_orders)
    return FgAbelianGroup.from_orders(orders)


def _pairwise(A: FgAbelianGroup, B: FgAbelianGroup, rule) -> FgAbelianGroup:
    orders = []
    for a in A.cyclic_orders:
        for b in B.cyclic_orders:
            c = rule(a, b)
            if c != 1:
                orders.append(c)
    return FgAbelianGroup.from_orders(orders)


def hom_group(A: FgAbelianGroup, B: FgAbelianGroup) -> FgAbelianGroup:
    """``Hom(A, B)`` computed factor by factor."""
    return _pairwise(A, B, lambda a, b: b if a == 0 else (1 if b == 0 else gcd(a, b)))


def ext1(A: FgAbelianGroup, B: FgAbelianGroup) -> FgAbelianGroup:
    """``Ext^1(A, B)``; ``Ext(Z/a, B) = B / aB``."""
    return _pairwise(A, B, lambda a, b: 1 if a == 0 else gcd(a, b))


def tensor(A: FgAbelianGroup, B: FgAbelianGroup) -> FgAbelianGroup:
    return _pairwise(A, B, gcd)


def tor1(A: FgAbelianGroup, B: FgAbelianGroup) -> FgAbelianGroup:
    return _pairwise(A, B, lambda a, b: 1 if (a == 0 or b == 0) else gcd(a, b))


@dataclass
class PresentedGroup:
    """``Z^generators / (row span of relations)``."""

    generators: int
    relations: IntMatrix

    def canonicalize(self) -> FgAbelianGroup:
        if self.relations.nrows == 0:
            return FgAbelianGroup(self.generators)
        diag = smith_normal_form(self.relations.T, transforms=False).diagonal
        orders = [d for d in diag if d != 1] + [0] * (self.generators - sum(1 for d in diag if d))
        return FgAbelianGroup.from_orders([d for d in orders if d != 1])


# --------------------------------------------------------------------------
# Subquotients ker(d_out) / im(d_in)


class Subquotient:
    """``{x : d_out x == 0 mod out_orders} / (im d_in + relations)`` in ``(+) Z/orders``.

    The result is a direct sum of cyclic groups with generators ``reps``
    (columns, ambient coordinates) of orders ``orders``.  ``coords`` maps a
    cycle to the coordinates of its class.
    """

    def __init__(
        self,
        orders: Sequence[int],
        d_out: IntMatrix | None = None,
        out_orders: Sequence[int] | None = None,
        d_in: IntMatrix | None = None,
        *,
        check: bool = True,
    ):
        self.ambient_orders = tuple(orders)
        m = len(orders)
        self.d_out = d_out
        self.out_orders = tuple(out_orders) if out_orders is not None else ()
        if d_out is not None and d_out.ncols != m:
            raise ValueError("d_out has the wrong number of columns")
        if d_in is not None and d_in.nrows != m:
            raise ValueError("d_in has the wrong number of rows")
        if d_out is not None and d_in is not None and check:
            if not (d_out @ d_in).is_zero(self.out_orders):
                raise NotAComplexError("not a complex at this degree: d_out @ d_in != 0")

        no_out = d_out is None or d_out.nrows == 0 or d_out.is_zero(self.out_orders)
        no_in = d_in is None or d_in.ncols == 0 or d_in.is_zero(self.ambient_orders)
        if no_out and no_in and 1 not in self.ambient_orders:
            # nothing to restrict or divide out: keep the ambient coordinates
            I = IntMatrix.identity(m)
            self.cycles, self._ksolve = I, None
            self.keep = list(range(m))
            self.orders = self.ambient_orders
            self._U2 = I
            self.reps = I
            self.group = FgAbelianGroup.from_orders(self.orders)
            self.is_identity = True
            return
        if no_out:
            K = IntMatrix.identity(m)
        else:
            K = kernel_lattice(d_out, self.out_orders)
        self.cycles = K
        self._ksolve = LatticeSolver(K)
        gens = relation_columns(orders)
        if d_in is not None and d_in.ncols:
            gens = d_in.hstack(gens)
        k = K.ncols
        X = []
        for col in gens.columns():
            x = self._ksolve.solve(col)
            if x is None:
                raise NotAComplexError("not a complex at this degree: boundary is not a cycle")
            X.append(x)
        Xm = IntMatrix.from_columns(X, k)
        snf = smith_normal_form(Xm, inverses=True, right=False) if Xm.ncols else None
        if snf is None:
            diag, U2, U2i = [], IntMatrix.identity(k), IntMatrix.identity(k)
        else:
            diag, U2, U2i = snf.diagonal, snf.U, snf.U_inv
        full = [diag[i] if i < len(diag) else 0 for i in range(k)]
        self.keep = [i for i in range(k) if full[i] != 1]
        self.orders = tuple(full[i] for i in self.keep)
        self._U2 = U2.select_rows(self.keep)
        self.reps = K @ U2i.select_columns(self.keep) if self.keep else IntMatrix.zeros(m, 0)
        self.reps = self.reps.reduce(self.ambient_orders)
        self.group = FgAbelianGroup.from_orders(self.orders)
        # no cycle condition and no relations beyond the presentation: coordinates are unchanged
        self.is_identity = self.orders == self.ambient_orders and self.reps == IntMatrix.identity(m) and (
            self._U2 == IntMatrix.identity(m) and K == IntMatrix.identity(m)
        )

    @property
    def ngens(self) -> int:
        return len(self.orders)

    def is_cycle(self, vec: Sequence[int]) -> bool:
        if self.d_out is None or self.d_out.nrows == 0:
            return True
        return is_zero_vector(self.d_out.apply(vec), self.out_orders)

    def coords(self, vec: Sequence[int]) -> Vector:
        if self.is_identity:
            return reduce_vector(vec, self.orders)
        w = self._ksolve.solve(list(vec))
        if w is None:
            raise ValueError("vector is not a cycle")
        return reduce_vector(self._U2.apply(w), self.orders)

    def rep(self, i: int) -> Vector:
        return self.reps.column(i)

    def element(self, coords: Sequence[int]) -> Vector:
        """A cycle representing the class with the given coordinates."""
        out = [0] * len(self.ambient_orders)
        for i, c in enumerate(coords):
            if c:
                for r, v in enumerate(self.reps.column(i)):
                    out[r] += c * v
        return reduce_vector(out, self.ambient_orders)

    def is_zero_class(self, vec: Sequence[int]) -> bool:
        return is_zero_vector(self.coords(vec), self.orders)


def homology_at(
    d_in: IntMatrix,
    d_out: IntMatrix,
    orders: Sequence[int] | None = None,
    out_orders: Sequence[int] | None = None,
) -> Subquotient:
    """``ker(d_out) / im(d_in)``; orders default to free abelian groups."""
    m = d_out.ncols
    if d_in.nrows != m:
        raise ValueError("d_in and d_out are not composable")
    orders = [0] * m if orders is None else list(orders)
    out_orders = [0] * d_out.nrows if out_orders is None else list(out_orders)
    return Subquotient(orders, d_out, out_orders, d_in)


def induced_map(source: Subquotient, target: Subquotient, M: IntMatrix) -> IntMatrix:
    """Matrix (in class coordinates) of the map of subquotients induced by ``M``."""
    cols = [target.coords(M.apply(source.rep(i))) for i in range(source.ngens)]
    return IntMatrix.from_columns(cols, target.ngens)


# --------------------------------------------------------------------------
# Sparse complexes and cancellation of invertible pairs


class SparseMatrix:
    """Column-major sparse integer matrix: ``cols[j]`` maps row index to value."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols: list[dict[int, int]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols if cols is not None else [{} for _ in range(ncols)]

    @classmethod
    def from_dense(cls, M: IntMatrix) -> SparseMatrix:
        cols = [{i: a for i, a in enumerate(c) if a} for c in M.columns()]
        return cls(M.nrows, M.ncols, cols)

    def to_dense(self) -> IntMatrix:
        rows = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, a in col.items():
                rows[i][j] = a
        return IntMatrix(rows, self.ncols)

    def apply(self, vec: Sequence[int], orders: Sequence[int] | None = None) -> Vector:
        out = [0] * self.nrows
        for j, v in enumerate(vec):
            if v:
                for i, a in self.cols[j].items():
                    out[i] += a * v
        return out if orders is None else reduce_vector(out, orders)

    def compose_is_zero(self, first: SparseMatrix, orders: Sequence[int]) -> bool:
        """Is ``self @ first`` zero modulo ``orders`` (the target of ``self``)?"""
        for col in first.cols:
            acc: dict[int, int] = {}
            for k, b in col.items():
                for i, a in self.cols[k].items():
                    acc[i] = acc.get(i, 0) + a * b
            for i, v in acc.items():
                if _mod(v, orders[i]):
                    return False
        return True

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)


def _unit_inverse(u: int, order: int) -> int | None:
    if order == 0:
        return u if u in (1, -1) else None
    if gcd(u, order) != 1:
        return None
    return pow(u % order, -1, order)


@dataclass
class _Cancellation:
    level: int  # x lives at ``level``, y at ``level + 1``
    x: int
    y: int
    uinv: int
    order: int
    col_x: dict[int, int]  # f(x) without the y entry
    row_y: dict[int, int]  # entries of row y in other columns


class ReducedComplex:
    """A cochain-direction complex ``L_0 -> L_1 -> ... -> L_K`` cancelled down to a core.

    ``maps[k]`` is ``L_k -> L_{k+1}``.  Whenever ``f(x)`` has an entry ``u`` at
    ``y`` that is a unit and ``x``, ``y`` have the same order, the pair is
    split off (it spans a contractible summand).  The bookkeeping of each
    cancellation is kept so that cycles of the original complex can be sent to
    the core and core cycles lifted back.
    """

    def __init__(self, orders: Sequence[Sequence[int]], maps: Sequence[SparseMatrix], *, witness: bool = True):
        K = len(orders) - 1
        if len(maps) != K:
            raise ValueError("need one map between each pair of consecutive levels")
        self.orders = [tuple(o) for o in orders]
        self.nlevels = K + 1
        self.witness = witness
        self.cols: list[dict[int, dict[int, int]]] = []
        self.rows: list[dict[int, set[int]]] = []
        for k, f in enumerate(maps):
            if f.ncols != len(orders[k]) or f.nrows != len(orders[k + 1]):
                raise ValueError(f"map {k} has shape {f.nrows}x{f.ncols}")
            cols: dict[int, dict[int, int]] = {}
            rows: dict[int, set[int]] = {}
            tgt = self.orders[k + 1]
            for j, col in enumerate(f.cols):
                c = {}
                for i, a in col.items():
                    a = _mod(a, tgt[i])
                    if a:
                        c[i] = a
                        rows.setdefault(i, set()).add(j)
                cols[j] = c
            self.cols.append(cols)
            self.rows.append(rows)
        self.alive = [set(range(len(o))) for o in self.orders]
        self.events: list[_Cancellation] = []
        self._reduce()
        self.core_index = [sorted(a) for a in self.alive]
        self._core_cache: dict[int, Subquotient] = {}

    # -- cancellation -------------------------------------------------------

    def _cancel(self, k: int, x: int, y: int, uinv: int) -> None:
        cols, rows = self.cols[k], self.rows[k]
        e = self.orders[k + 1][y]
        tgt = self.orders[k + 1]
        col_x = cols[x]
        row_y = {z: cols[z][y] for z in rows[y] if z != x}
        for z, c in row_y.items():
            factor = _mod(c * uinv, e)
            cz = cols[z]
            for v, b in col_x.items():
                if v == y:
                    continue
                new = _mod(cz.get(v, 0) - factor * b, tgt[v])
                if new:
                    if v not in cz:
                        rows[v].add(z)
                    cz[v] = new
                elif v in cz:
                    del cz[v]
                    rows[v].discard(z)
        for z in rows.pop(y):
            del cols[z][y]
        for v in col_x:
            if v != y:
                rows[v].discard(x)
        del cols[x]
        if k + 1 < len(self.cols):
            nxt_cols, nxt_rows = self.cols[k + 1], self.rows[k + 1]
            for w in nxt_cols.pop(y):
                nxt_rows[w].discard(y)
        if k > 0:
            prv_cols, prv_rows = self.cols[k - 1], self.rows[k - 1]
            for w in prv_rows.pop(x, ()):
                del prv_cols[w][x]
        self.alive[k].discard(x)
        self.alive[k + 1].discard(y)
        if self.witness:
            self.events.append(
                _Cancellation(k, x, y, uinv, e, {v: b for v, b in col_x.items() if v != y}, row_y)
            )

    def _reduce(self) -> None:
        progress = True
        while progress:
            progress = False
            for k in range(len(self.cols)):
                cols, rows = self.cols[k], self.rows[k]
                src, tgt = self.orders[k], self.orders[k + 1]
                for x in sorted(cols, key=lambda j: len(cols[j])):
                    col = cols.get(x)
                    if not col:
                        continue
                    best = None
                    for y, u in col.items():
                        if tgt[y] != src[x]:
                            continue
                        uinv = _unit_inverse(u, tgt[y])
                        if uinv is None:
                            continue
                        cost = len(rows[y])
                        if best is None or cost < best[0]:
                            best = (cost, y, uinv)
                            if cost == 1:
                                break
                    if best is not None:
                        self._cancel(k, x, best[1], best[2])
                        progress = True

    # -- core ---------------------------------------------------------------

    def core_size(self, k: int) -> int:
        return len(self.core_index[k])

    def core_map(self, k: int) -> IntMatrix:
        """Dense matrix of the cancelled map ``L_k -> L_{k+1}`` on core generators."""
        src, tgt = self.core_index[k], self.core_index[k + 1]
        pos = {v: i for i, v in enumerate(tgt)}
        rows = [[0] * len(src) for _ in tgt]
        for j, x in enumerate(src):
            for y, a in self.cols[k][x].items():
                rows[pos[y]][j] = a
        return IntMatrix(rows, len(src))

    def core_orders(self, k: int) -> list[int]:
        return [self.orders[k][i] for i in self.core_index[k]]

    def core_homology(self, k: int) -> Subquotient:
        if k not in self._core_cache:
            d_out = self.core_map(k) if k < self.nlevels - 1 else None
            d_in = self.core_map(k - 1) if k > 0 else None
            out_orders = self.core_orders(k + 1) if k < self.nlevels - 1 else None
            self._core_cache[k] = Subquotient(self.core_orders(k), d_out, out_orders, d_in, check=False)
        return self._core_cache[k]

    def homology(self, k: int) -> FgAbelianGroup:
        return self.core_homology(k).group

    # -- transfer between the original complex and the core ------------------

    def to_core(self, k: int, vec: Sequence[int]) -> Vector:
        """Image of an original level-``k`` vector under the projection onto the core."""
        if not self.witness:
            raise RuntimeError("complex was reduced without witness data")
        orders = self.orders[k]
        v = {i: a for i, a in enumerate(vec) if _mod(a, orders[i])}
        for ev in self.events:
            if ev.level == k:
                v.pop(ev.x, None)
            elif ev.level + 1 == k:
                b = v.pop(ev.y, 0)
                if b:
                    factor = _mod(b * ev.uinv, ev.order)
                    for w, beta in ev.col_x.items():
                        v[w] = _mod(v.get(w, 0) - factor * beta, orders[w])
        return [_mod(v.get(i, 0), orders[i]) for i in self.core_index[k]]

    def from_core(self, k: int, core_vec: Sequence[int]) -> Vector:
        """Lift a core level-``k`` vector back to the original complex (a chain map)."""
        if not self.witness:
            raise RuntimeError("complex was reduced without witness data")
        orders = self.orders[k]
        v = {i: a for i, a in zip(self.core_index[k], core_vec) if a}
        for ev in reversed(self.events):
            if ev.level == k:
                s = sum(ev.row_y.get(z, 0) * a for z, a in v.items())
                val = _mod(-s * ev.uinv, ev.order)
                if val:
                    v[ev.x] = val
        out = [0] * len(orders)
        for i, a in v.items():
            out[i] = _mod(a, orders[i])
        return out

    def class_of(self, k: int, vec: Sequence[int]) -> Vector:
        return self.core_homology(k).coords(self.to_core(k, vec))

    def representative(self, k: int, i: int) -> Vector:
        return self.from_core(k, self.core_homology(k).rep(i))

    def element(self, k: int, coords: Sequence[int]) -> Vector:
        return self.from_core(k, self.core_homology(k).element(coords))


def image_group(M: IntMatrix, source_orders: Sequence[int], target_orders: Sequence[int]) -> FgAbelianGroup:
    """The image of ``M: (+) Z/source_orders -> (+) Z/target_orders``."""
    ker = Subquotient(source_orders, M, target_orders)
    return Subquotient(source_orders, None, None, ker.reps).group


@dataclass
class PresentedSubquotient:
    """``(span(sub) + rel) / rel`` inside ``(+) Z/orders``, for exactness checks.

    ``sub`` and ``rel`` hold generators as columns; ``sub=None`` means the
    whole ambient group.
    """

    orders: tuple[int, ...]
    sub: IntMatrix | None = None
    rel: IntMatrix | None = None

    @property
    def dim(self) -> int:
        return len(self.orders)

    def sub_matrix(self) -> IntMatrix:
        return IntMatrix.identity(self.dim) if self.sub is None else self.sub

    def rel_matrix(self) -> IntMatrix:
        return IntMatrix.zeros(self.dim, 0) if self.rel is None else self.rel

    def relations(self) -> IntMatrix:
        return self.rel_matrix().hstack(relation_columns(self.orders))

    @property
    def group(self) -> FgAbelianGroup:
        S = self.sub_matrix()
        L = kernel_lattice(S, self.orders) if S.ncols else IntMatrix.zeros(0, 0)
        # express the relations inside span(S): solve S u = r for the relation columns
        R = self.rel_matrix()
        cols = []
        solver = LatticeSolver(S.hstack(relation_columns(self.orders)))
        for r in R.columns():
            u = solver.solve(r)
            if u is None:
                raise ValueError("relations are not inside the subgroup")
            cols.append(u[: S.ncols])
        gens = L.columns() + cols
        D = IntMatrix.from_columns(gens, S.ncols) if gens else IntMatrix.zeros(S.ncols, 0)
        return Subquotient([0] * S.ncols, None, None, D).group


def image_in(f: IntMatrix, W: PresentedSubquotient, X: PresentedSubquotient) -> IntMatrix:
    """Generators of ``f(W) + rel(X)`` in ambient coordinates of ``X``."""
    return (f @ W.sub_matrix()).hstack(X.rel_matrix())


def kernel_in(g: IntMatrix, X: PresentedSubquotient, Y: PresentedSubquotient) -> IntMatrix:
    """Generators of ``{x in X : g x == 0 in Y} + rel(X)`` in ambient coordinates of ``X``."""
    S = X.sub_matrix()
    GS = g @ S
    LY = Y.relations()
    K = kernel_basis(GS.hstack(LY)) if GS.nrows else IntMatrix.identity(GS.ncols + LY.ncols)
    U = K.select_rows(range(S.ncols))
    return (S @ U).hstack(X.rel_matrix())


def exact_at(f: IntMatrix | None, W: PresentedSubquotient | None, X: PresentedSubquotient,
             g: IntMatrix | None, Y: PresentedSubquotient | None) -> bool:
    """Is ``W --f--> X --g--> Y`` exact at ``X``?  ``None`` stands for the zero group."""
    if f is None:
        im = X.rel_matrix()
    else:
        im = image_in(f, W, X)
    if g is None:
        ker = X.sub_matrix().hstack(X.rel_matrix())
    else:
        ker = kernel_in(g, X, Y)
    return same_subgroup(im, ker, X.orders)
