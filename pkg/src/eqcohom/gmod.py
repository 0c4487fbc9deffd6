"""Modules over a group with operators.

A :class:`GammaGModule` is a finitely generated abelian group with
``Z^r + Z/d1 + ...`` coordinates and integer matrices for the action of
every element of ``G`` and of ``Gamma``.  The two actions are tied together
by the compatibility law ``s.(x.a) = (^s x).(s.a)``, so the module is the
same thing as a module over the semidirect product ``G x| Gamma``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Mapping, Sequence

from .errors import ImproperSequenceError, PreconditionError, ValidationError
from .grp import GammaAction
from .zmod import (
    FgAbelianGroup,
    IntMatrix,
    Subquotient,
    kernel_lattice,
    reduce_vector,
    same_subgroup,
    solve_modular,
)

EXHAUSTIVE_COMPAT_LIMIT = 10_000


def _eq_mod(A: IntMatrix, B: IntMatrix, orders: Sequence[int]) -> bool:
    return (A - B).is_zero(orders)


def _check_well_defined(M: IntMatrix, src: Sequence[int], tgt: Sequence[int], label: str) -> None:
    if M.shape != (len(tgt), len(src)):
        raise ValidationError(f"{label}: matrix has shape {M.shape}, expected {(len(tgt), len(src))}")
    for j, e in enumerate(src):
        if e and not all(_mod(e * M.rows[i][j], tgt[i]) == 0 for i in range(len(tgt))):
            raise ValidationError(f"{label}: column {j} does not respect the order {e} of its generator")


def _mod(v: int, e: int) -> int:
    return v % e if e else v


def _close(group, gens: Mapping[int, IntMatrix], orders: Sequence[int], label: str) -> tuple[IntMatrix, ...]:
    """Extend matrices on generators to a homomorphism on the whole group."""
    n = len(orders)
    ident = IntMatrix.identity(n)
    mats: dict[int, IntMatrix] = {0: ident}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s, M in gens.items():
            y = group.table[x][s]
            P = (mats[x] @ M).reduce(orders)
            if y in mats:
                if not _eq_mod(mats[y], P, orders):
                    raise ValidationError(
                        f"{label} action is not a homomorphism (relation through {group.names[y]})"
                    )
            else:
                mats[y] = P
                queue.append(y)
    if len(mats) != group.order:
        raise ValidationError(f"{label} action: given elements do not generate the group")
    return tuple(mats[x] for x in range(group.order))


@dataclass(frozen=True, eq=False)
class GammaGModule:
    action: GammaAction
    orders: tuple[int, ...]
    g_act: tuple[IntMatrix, ...]
    gamma_act: tuple[IntMatrix, ...]
    name: str = ""

    @property
    def G(self):
        return self.action.g

    @property
    def Gamma(self):
        return self.action.gamma

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def carrier(self) -> FgAbelianGroup:
        return FgAbelianGroup.from_orders(self.orders)

    @property
    def is_finite(self) -> bool:
        return all(self.orders)

    def reduce(self, vec: Sequence[int]) -> list[int]:
        return reduce_vector(vec, self.orders)

    def act_g(self, x: int, vec: Sequence[int]) -> list[int]:
        return self.reduce(self.g_act[x].apply(vec))

    def act_gamma(self, s: int, vec: Sequence[int]) -> list[int]:
        return self.reduce(self.gamma_act[s].apply(vec))

    def zero(self) -> list[int]:
        return [0] * self.rank

    def elements(self) -> Iterator[tuple[int, ...]]:
        """All elements as reduced coordinate tuples (finite carriers only)."""
        if not self.is_finite:
            raise PreconditionError("cannot enumerate an infinite module")
        return itertools.product(*(range(e) for e in self.orders))

    def g_trivial(self) -> bool:
        I = IntMatrix.identity(self.rank)
        return all(_eq_mod(M, I, self.orders) for M in self.g_act)

    def gamma_trivial(self) -> bool:
        I = IntMatrix.identity(self.rank)
        return all(_eq_mod(M, I, self.orders) for M in self.gamma_act)

    def is_trivial(self) -> bool:
        return self.g_trivial() and self.gamma_trivial()

    def __repr__(self) -> str:
        label = self.name or str(self.carrier)
        return f"GammaGModule({label}, |G|={self.G.order}, |Gamma|={self.Gamma.order})"


def make_module(
    action: GammaAction,
    orders: Sequence[int],
    g_images: Mapping[int, Sequence[Sequence[int]]] | None = None,
    gamma_images: Mapping[int, Sequence[Sequence[int]]] | None = None,
    *,
    name: str = "",
    check: bool = True,
) -> GammaGModule:
    """Validated module from action matrices on (generating) elements of ``G`` and ``Gamma``.

    Missing generators act trivially.  The compatibility law is checked over
    all pairs when ``|G| |Gamma| <= 10^4`` and over generator pairs otherwise.
    """
    orders = tuple(int(e) for e in orders)
    if any(e < 0 or e == 1 for e in orders):
        raise ValidationError("carrier orders must be 0 (for Z) or at least 2")
    n = len(orders)
    G, Gm = action.g, action.gamma

    def prepare(images, group, label):
        out = {}
        for x, M in (images or {}).items():
            if not 0 <= x < group.order:
                raise ValidationError(f"{label} element index {x} out of range")
            M = IntMatrix(M, n) if not isinstance(M, IntMatrix) else M
            _check_well_defined(M, orders, orders, f"{label} {group.names[x]}")
            out[x] = M.reduce(orders)
        for x in group.generators:
            out.setdefault(x, IntMatrix.identity(n))
        return out

    g_gens = prepare(g_images, G, "G")
    gm_gens = prepare(gamma_images, Gm, "Gamma")
    g_act = _close(G, g_gens, orders, "G")
    gamma_act = _close(Gm, gm_gens, orders, "Gamma")
    module = GammaGModule(action, orders, g_act, gamma_act, name)
    if check:
        validate_module(module)
    return module


def validate_module(M: GammaGModule) -> None:
    orders = M.orders
    I = IntMatrix.identity(M.rank)
    for label, group, mats in (("G", M.G, M.g_act), ("Gamma", M.Gamma, M.gamma_act)):
        for x in group.elements():
            if not _eq_mod((mats[x] @ mats[group.inv(x)]).reduce(orders), I, orders):
                raise ValidationError(f"{label} element {group.names[x]} does not act by an automorphism")
    G, Gm = M.G, M.Gamma
    if G.order * Gm.order <= EXHAUSTIVE_COMPAT_LIMIT:
        pairs = itertools.product(Gm.elements(), G.elements())
    else:
        pairs = itertools.product(Gm.generators, G.generators)
    for s, x in pairs:
        lhs = M.gamma_act[s] @ M.g_act[x]
        rhs = M.g_act[M.action.act(s, x)] @ M.gamma_act[s]
        if not _eq_mod(lhs, rhs, orders):
            raise ValidationError(
                f"compatibility condition fails for (sigma, x) = ({Gm.names[s]}, {G.names[x]})"
            )


def trivial_module(action: GammaAction, orders: Sequence[int] = (0,), name: str = "") -> GammaGModule:
    n = len(orders)
    I = IntMatrix.identity(n)
    return GammaGModule(
        action, tuple(orders), tuple(I for _ in action.g.elements()), tuple(I for _ in action.gamma.elements()),
        name or str(FgAbelianGroup.from_orders(orders)),
    )


def integers(action: GammaAction) -> GammaGModule:
    """``Z`` with trivial actions."""
    return trivial_module(action, (0,), "Z")


# --------------------------------------------------------------------------
# maps


@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: GammaGModule
    target: GammaGModule
    matrix: IntMatrix

    def __post_init__(self):
        _check_well_defined(self.matrix, self.source.orders, self.target.orders, "module map")
        object.__setattr__(self, "matrix", self.matrix.reduce(self.target.orders))

    def __call__(self, vec: Sequence[int]) -> list[int]:
        return self.target.reduce(self.matrix.apply(vec))

    def check_equivariant(self) -> None:
        S, T, F = self.source, self.target, self.matrix
        if S.action is not T.action and (S.action.phi != T.action.phi or S.G != T.G or S.Gamma != T.Gamma):
            raise ValidationError("module map between modules over different groups")
        for x in S.G.generators:
            if not _eq_mod(F @ S.g_act[x], T.g_act[x] @ F, T.orders):
                raise ValidationError(f"map does not commute with G element {S.G.names[x]}")
        for s in S.Gamma.generators:
            if not _eq_mod(F @ S.gamma_act[s], T.gamma_act[s] @ F, T.orders):
                raise ValidationError(f"map does not commute with Gamma element {S.Gamma.names[s]}")

    def kernel(self) -> Subquotient:
        return Subquotient(self.source.orders, self.matrix, self.target.orders)

    def cokernel(self) -> Subquotient:
        return Subquotient(self.target.orders, None, None, self.matrix)


def module_map(source: GammaGModule, target: GammaGModule, matrix) -> ModuleMap:
    """Validated equivariant map."""
    M = ModuleMap(source, target, matrix if isinstance(matrix, IntMatrix) else IntMatrix(matrix, source.rank))
    M.check_equivariant()
    return M


# --------------------------------------------------------------------------
# invariants and coinvariants


def _actor_matrices(M: GammaGModule, who: str) -> list[IntMatrix]:
    if who == "g":
        return [M.g_act[x] for x in M.G.generators]
    if who == "gamma":
        return [M.gamma_act[s] for s in M.Gamma.generators]
    if who == "ggamma":
        return _actor_matrices(M, "g") + _actor_matrices(M, "gamma")
    raise ValueError(f"unknown actor set {who!r}; use 'g', 'gamma' or 'ggamma'")


def fixed_points(orders: Sequence[int], mats: Sequence[IntMatrix]) -> Subquotient:
    """Elements fixed by every matrix in ``mats``; ``reps`` is the inclusion."""
    n = len(orders)
    I = IntMatrix.identity(n)
    mats = [m for m in mats if not _eq_mod(m, I, orders)]
    if not mats:
        return Subquotient(orders)
    D = mats[0] - I
    for m in mats[1:]:
        D = D.vstack(m - I)
    return Subquotient(orders, D, list(orders) * len(mats))


def coinvariant_quotient(orders: Sequence[int], mats: Sequence[IntMatrix]) -> Subquotient:
    """Quotient by the span of ``m a - a``; ``coords`` is the projection."""
    n = len(orders)
    I = IntMatrix.identity(n)
    mats = [m for m in mats if not _eq_mod(m, I, orders)]
    if not mats:
        return Subquotient(orders)
    D = mats[0] - I
    for m in mats[1:]:
        D = D.hstack(m - I)
    return Subquotient(orders, None, None, D)


def invariants(M: GammaGModule, who: str = "ggamma") -> Subquotient:
    """``A^G``, ``A^Gamma`` or ``A^{G x| Gamma}``; ``.group`` is the abelian group."""
    return fixed_points(M.orders, _actor_matrices(M, who))


def coinvariants(M: GammaGModule, who: str = "ggamma") -> Subquotient:
    """``A_G``, ``A_Gamma`` or ``A_{G x| Gamma}``; ``.group`` is the abelian group."""
    return coinvariant_quotient(M.orders, _actor_matrices(M, who))


def residual_gamma_invariants(M: GammaGModule) -> Subquotient:
    """``(A^G)^Gamma`` computed inside the subgroup ``A^G`` (coordinates of ``A^G``)."""
    AG = invariants(M, "g")
    mats = []
    for s in M.Gamma.generators:
        cols = [AG.coords(M.act_gamma(s, AG.rep(i))) for i in range(AG.ngens)]
        mats.append(IntMatrix.from_columns(cols, AG.ngens))
    return fixed_points(AG.orders, mats)


# --------------------------------------------------------------------------
# norm map


@dataclass
class NormMap:
    N: IntMatrix  # the endomorphism a -> sum over G of x.a
    precondition: bool  # Gamma acts trivially on N(A)
    source: Subquotient  # A_{G x| Gamma}
    target: Subquotient  # A^{G x| Gamma}
    induced: IntMatrix | None  # N* in class coordinates, when the precondition holds

    def kernel(self) -> Subquotient:
        self._need()
        return Subquotient(self.source.orders, self.induced, self.target.orders)

    def cokernel(self) -> Subquotient:
        self._need()
        return Subquotient(self.target.orders, None, None, self.induced)

    def _need(self) -> None:
        if self.induced is None:
            raise PreconditionError("Gamma does not act trivially on N_G(A); the induced norm map is not defined")


def norm_map(M: GammaGModule) -> NormMap:
    N = IntMatrix.zeros(M.rank, M.rank)
    for x in M.G.elements():
        N = N + M.g_act[x]
    N = N.reduce(M.orders)
    I = IntMatrix.identity(M.rank)
    pre = all(((M.gamma_act[s] - I) @ N).is_zero(M.orders) for s in M.Gamma.generators)
    src, tgt = coinvariants(M), invariants(M)
    induced = None
    if pre:
        cols = [tgt.coords(M.reduce(N.apply(src.rep(i)))) for i in range(src.ngens)]
        induced = IntMatrix.from_columns(cols, tgt.ngens)
    return NormMap(N, pre, src, tgt, induced)


# --------------------------------------------------------------------------
# standard modules


def group_ring(action: GammaAction) -> GammaGModule:
    """``Z(G)``: basis ``G``, ``G`` by left translation, ``Gamma`` through the action."""
    G = action.g
    n = G.order

    def perm_matrix(p):
        return IntMatrix([[int(p[j] == i) for j in range(n)] for i in range(n)], n)

    g_act = tuple(perm_matrix(G.table[x]) for x in G.elements())
    gamma_act = tuple(perm_matrix(action.phi[s]) for s in action.gamma.elements())
    return GammaGModule(action, (0,) * n, g_act, gamma_act, "Z(G)")


def augmentation_ideal(action: GammaAction) -> GammaGModule:
    """``I(G)`` with basis ``g - e`` for ``g != e`` (basis index ``g - 1``)."""
    G = action.g
    n = G.order - 1

    def mat(image_of):  # image_of(g) -> dict basis index -> coeff
        rows = [[0] * n for _ in range(n)]
        for g in range(1, G.order):
            for i, c in image_of(g).items():
                rows[i][g - 1] += c
        return IntMatrix(rows, n)

    def translate(x):
        def img(g):
            out: dict[int, int] = {}
            xg = G.table[x][g]
            if xg:
                out[xg - 1] = out.get(xg - 1, 0) + 1
            if x:
                out[x - 1] = out.get(x - 1, 0) - 1
            return out

        return mat(img)

    def op(s):
        return mat(lambda g: {action.phi[s][g] - 1: 1})

    return GammaGModule(
        action, (0,) * n, tuple(translate(x) for x in G.elements()),
        tuple(op(s) for s in action.gamma.elements()), "I(G)",
    )


@dataclass(frozen=True)
class TensorLayout:
    """Coordinates of ``A (x) B``: kept pairs ``(i, j)`` with order ``gcd(a_i, b_j)``."""

    pairs: tuple[tuple[int, int], ...]
    orders: tuple[int, ...]

    def tensor(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        return [
            (a[i] * b[j]) % e if e else a[i] * b[j]
            for (i, j), e in zip(self.pairs, self.orders)
        ]


def tensor_layout(orders_a: Sequence[int], orders_b: Sequence[int]) -> TensorLayout:
    pairs, orders = [], []
    for i, a in enumerate(orders_a):
        for j, b in enumerate(orders_b):
            e = gcd(a, b)
            if e != 1:
                pairs.append((i, j))
                orders.append(e)
    return TensorLayout(tuple(pairs), tuple(orders))


def tensor_module(A: GammaGModule, B: GammaGModule) -> GammaGModule:
    """``A (x)_Z B`` with the diagonal actions of ``G`` and ``Gamma``."""
    if A.G != B.G or A.Gamma != B.Gamma or A.action.phi != B.action.phi:
        raise ValidationError("tensor product of modules over different groups")
    lay = tensor_layout(A.orders, B.orders)

    def kron(P: IntMatrix, Q: IntMatrix) -> IntMatrix:
        rows = []
        for (i, j), e in zip(lay.pairs, lay.orders):
            row = []
            for (k, l) in lay.pairs:
                v = P.rows[i][k] * Q.rows[j][l]
                row.append(v % e if e else v)
            rows.append(row)
        return IntMatrix(rows, len(lay.pairs))

    g_act = tuple(kron(A.g_act[x], B.g_act[x]) for x in A.G.elements())
    gamma_act = tuple(kron(A.gamma_act[s], B.gamma_act[s]) for s in A.Gamma.elements())
    M = GammaGModule(A.action, lay.orders, g_act, gamma_act, f"({A.name or A.carrier}) (x) ({B.name or B.carrier})")
    object.__setattr__(M, "layout", lay)
    return M


def tensor_over_GGamma(M: GammaGModule, A: GammaGModule) -> FgAbelianGroup:
    """``M (x)_{G x| Gamma} A`` as the coinvariants of the diagonal module."""
    return coinvariants(tensor_module(M, A)).group


def direct_sum_module(A: GammaGModule, B: GammaGModule) -> GammaGModule:
    def block(P: IntMatrix, Q: IntMatrix) -> IntMatrix:
        n, m = P.nrows, Q.nrows
        rows = [P.rows[i] + [0] * m for i in range(n)] + [[0] * n + Q.rows[i] for i in range(m)]
        return IntMatrix(rows, n + m)

    return GammaGModule(
        A.action, A.orders + B.orders,
        tuple(block(A.g_act[x], B.g_act[x]) for x in A.G.elements()),
        tuple(block(A.gamma_act[s], B.gamma_act[s]) for s in A.Gamma.elements()),
        f"{A.name or A.carrier} + {B.name or B.carrier}",
    )


# --------------------------------------------------------------------------
# sections and proper short exact sequences


class Section:
    """A set-level map ``C2 -> C`` given on every element (or linearly for trivial operators)."""

    def __init__(self, source: GammaGModule, target: GammaGModule,
                 table: Mapping[tuple[int, ...], tuple[int, ...]] | None = None,
                 linear: IntMatrix | None = None):
        self.source, self.target = source, target
        self.table = dict(table) if table is not None else None
        self.linear = linear

    def __call__(self, vec: Sequence[int]) -> list[int]:
        c = tuple(self.source.reduce(vec))
        if self.table is not None:
            return list(self.table[c])
        return self.target.reduce(self.linear.apply(c))


def find_gamma_section(beta: ModuleMap) -> Section | None:
    """A ``Gamma``-equivariant set map ``s`` with ``beta s = id``, or ``None`` if none exists.

    On finite carriers the search is complete: orbit by orbit, the fiber over
    a representative must contain a point fixed by its stabilizer.
    """
    C, C2 = beta.source, beta.target
    if not beta.cokernel().group.is_trivial:
        raise ValidationError("map is not surjective")
    Gm = C.Gamma
    if not (C.is_finite and C2.is_finite):
        if Gm.order == 1 or (C.gamma_trivial() and C2.gamma_trivial()):
            cols = []
            for j in range(C2.rank):
                unit = [int(i == j) for i in range(C2.rank)]
                x = solve_modular(beta.matrix, C2.orders, unit)
                cols.append(x)
            return Section(C2, C, linear=IntMatrix.from_columns(cols, C.rank))
        raise PreconditionError("section search on an infinite carrier with nontrivial operators is undecidable at desk scale")
    fibers: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for b in C.elements():
        fibers.setdefault(tuple(beta(b)), []).append(b)
    table: dict[tuple[int, ...], tuple[int, ...]] = {}
    for c in C2.elements():
        if c in table:
            continue
        stab = [s for s in Gm.elements() if tuple(C2.act_gamma(s, c)) == c]
        choice = next(
            (b for b in fibers[c] if all(tuple(C.act_gamma(s, b)) == b for s in stab)),
            None,
        )
        if choice is None:
            return None
        for s in Gm.elements():
            table.setdefault(tuple(C2.act_gamma(s, c)), tuple(C.act_gamma(s, choice)))
    return Section(C2, C, table=table)


@dataclass(eq=False)
class ProperSES:
    """``0 -> C1 --alpha--> C --beta--> C2 -> 0`` with a ``Gamma``-equivariant set-level section."""

    alpha: ModuleMap
    beta: ModuleMap
    section: Section
    name: str = ""

    @property
    def modules(self) -> tuple[GammaGModule, GammaGModule, GammaGModule]:
        return self.alpha.source, self.alpha.target, self.beta.target


def proper_ses(alpha: ModuleMap, beta: ModuleMap, name: str = "") -> ProperSES:
    """Validate exactness and find a section; raises ``ImproperSequenceError`` without one."""
    if alpha.target is not beta.source:
        if alpha.target.orders != beta.source.orders:
            raise ValidationError("alpha and beta are not composable")
    alpha.check_equivariant()
    beta.check_equivariant()
    if not (beta.matrix @ alpha.matrix).is_zero(beta.target.orders):
        raise ValidationError("beta o alpha is not zero")
    if not alpha.kernel().group.is_trivial:
        raise ValidationError("alpha is not injective")
    if not beta.cokernel().group.is_trivial:
        raise ValidationError("beta is not surjective")
    K = kernel_lattice(beta.matrix, beta.target.orders)
    if not same_subgroup(alpha.matrix, K, beta.source.orders):
        raise ValidationError("image of alpha differs from the kernel of beta")
    section = find_gamma_section(beta)
    if section is None:
        raise ImproperSequenceError("sequence not proper: beta has no Gamma-equivariant section")
    return ProperSES(alpha, beta, section, name)




def _residual_g_module(M: GammaGModule, sq: Subquotient, label: str) -> GammaGModule:
    from .grp import trivial_action, trivial_group

    if not M.action.is_trivial():
        raise PreconditionError("operators must act trivially on G")
    plain = trivial_action(trivial_group(), M.G)
    mats = {}
    for x in M.G.generators:
        cols = [sq.coords(M.act_g(x, sq.rep(i))) for i in range(sq.ngens)]
        mats[x] = IntMatrix.from_columns(cols, sq.ngens)
    return make_module(plain, sq.orders, mats, name=label)


def gamma_invariant_module(M: GammaGModule) -> GammaGModule:
    """``A^Gamma`` as a module over ``G`` alone (operators must fix ``G`` pointwise)."""
    return _residual_g_module(M, invariants(M, "gamma"), f"({M.name})^Gamma")


def gamma_coinvariant_module(M: GammaGModule) -> GammaGModule:
    """``A_Gamma`` as a module over ``G`` alone (operators must fix ``G`` pointwise)."""
    return _residual_g_module(M, coinvariants(M, "gamma"), f"({M.name})_Gamma")


__all__ = [
    "GammaGModule",
    "ModuleMap",
    "NormMap",
    "ProperSES",
    "Section",
    "augmentation_ideal",
    "coinvariants",
    "direct_sum_module",
    "find_gamma_section",
    "gamma_coinvariant_module",
    "gamma_invariant_module",
    "group_ring",
    "integers",
    "invariants",
    "make_module",
    "module_map",
    "norm_map",
    "proper_ses",
    "tensor_module",
    "tensor_over_GGamma",
    "trivial_module",
]
