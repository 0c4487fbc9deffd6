"""Operator-equivariant group theory: commutators, abelianization, central series.

For a group ``G`` with operators ``Gamma`` the operator commutator subgroup
``[G, H]_Gamma`` is generated by ``x (^s y) x^-1 y^-1`` with ``x`` in ``G``,
``y`` in ``H`` and ``s`` in ``Gamma``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import PreconditionError, ValidationError
from .grp import FiniteGroup, GammaAction, build_action, generated_subgroup, trivial_action, trivial_group
from .zmod import FgAbelianGroup, IntMatrix, PresentedSubquotient, Subquotient, exact_at, image_group


@dataclass(frozen=True, eq=False)
class Subgroup:
    action: GammaAction
    elements: tuple[int, ...]
    normal: bool
    gamma_stable: bool

    @property
    def parent(self) -> FiniteGroup:
        return self.action.g

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self._set

    @property
    def _set(self) -> frozenset[int]:
        s = self.__dict__.get("_cached_set")
        if s is None:
            s = frozenset(self.elements)
            object.__setattr__(self, "_cached_set", s)
        return s

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def names(self) -> list[str]:
        return [self.parent.names[x] for x in self.elements]


def subgroup(action: GammaAction, generators: Iterable[int]) -> Subgroup:
    """Closure of ``generators`` with its normality and operator-stability flags."""
    G = action.g
    els = generated_subgroup(G, generators)
    s = set(els)
    normal = all(G.conj(g, h) in s for g in G.generators for h in els)
    stable = all(action.act(t, h) in s for t in action.gamma.generators for h in els)
    return Subgroup(action, els, normal, stable)


def _require_normal_stable(H: Subgroup) -> None:
    if not H.normal:
        raise ValidationError("subgroup is not normal")
    if not H.gamma_stable:
        raise ValidationError("subgroup is not stable under the operators")


def whole(action: GammaAction) -> Subgroup:
    return Subgroup(action, tuple(action.g.elements()), True, True)


def gamma_commutator(action: GammaAction, H: Subgroup | None = None) -> Subgroup:
    """``[G, H]_Gamma`` (``H = G`` by default)."""
    G = action.g
    if H is None:
        H = whole(action)
    else:
        _require_normal_stable(H)
    gens = {
        G.prod((x, action.act(s, y), G.inv(x), G.inv(y)))
        for x in G.elements()
        for y in H.elements
        for s in action.gamma.elements()
    }
    return subgroup(action, gens)


def commutator_subgroup(action: GammaAction) -> Subgroup:
    G = action.g
    return subgroup(action, {G.commutator(x, y) for x in G.elements() for y in G.elements()})


def gamma_dot(action: GammaAction) -> Subgroup:
    """Subgroup generated by ``(^s g) g^-1``."""
    G = action.g
    return subgroup(action, {G.mul(action.act(s, g), G.inv(g)) for g in G.elements() for s in action.gamma.elements()})


def gamma_commutator_by_generators(action: GammaAction) -> Subgroup:
    """The second description: closure of ``[G, G]`` together with ``Gamma . G``."""
    return subgroup(action, commutator_subgroup(action).elements + gamma_dot(action).elements)


def join(a: Subgroup, b: Subgroup) -> Subgroup:
    return subgroup(a.action, a.elements + b.elements)


def intersection(a: Subgroup, b: Subgroup) -> Subgroup:
    return subgroup(a.action, [x for x in a.elements if x in b])


# --------------------------------------------------------------------------
# quotients


@dataclass(eq=False)
class Quotient:
    group: FiniteGroup
    projection: tuple[int, ...]  # element of G -> coset index
    kernel: Subgroup
    action: GammaAction | None = None  # induced operator action, when the kernel is stable

    def lift(self, q: int) -> int:
        return self.projection.index(q)


def quotient(action: GammaAction, N: Subgroup) -> Quotient:
    """``G / N`` as a new group; cosets ordered by their least element."""
    if not N.normal:
        raise ValidationError("cannot form a quotient by a non-normal subgroup")
    G = action.g
    proj = [-1] * G.order
    reps: list[int] = []
    for x in G.elements():
        if proj[x] == -1:
            idx = len(reps)
            reps.append(x)
            for n in N.elements:
                proj[G.mul(x, n)] = idx
    table = [[proj[G.mul(a, b)] for b in reps] for a in reps]
    names = [G.names[r] for r in reps]
    Q = FiniteGroup(table, names, check=False)
    induced = None
    if N.gamma_stable:
        images = {s: tuple(proj[action.act(s, r)] for r in reps) for s in action.gamma.generators}
        induced = build_action(action.gamma, Q, images) if images else trivial_action(action.gamma, Q)
    return Quotient(Q, tuple(proj), N, induced)


def as_group(H: Subgroup) -> tuple[FiniteGroup, tuple[int, ...]]:
    """The subgroup as a group in its own right plus the embedding (new index -> old)."""
    G = H.parent
    els = H.elements
    pos = {x: i for i, x in enumerate(els)}
    table = [[pos[G.mul(a, b)] for b in els] for a in els]
    return FiniteGroup(table, [G.names[x] for x in els], check=False), els


def restricted_action(H: Subgroup) -> GammaAction:
    """Operator action on a stable subgroup."""
    if not H.gamma_stable:
        raise ValidationError("subgroup is not stable under the operators")
    K, emb = as_group(H)
    pos = {x: i for i, x in enumerate(emb)}
    images = {s: tuple(pos[H.action.act(s, x)] for x in emb) for s in H.action.gamma.generators}
    return build_action(H.action.gamma, K, images) if images else trivial_action(H.action.gamma, K)


# --------------------------------------------------------------------------
# abelian groups from finite abelian groups


@dataclass(eq=False)
class AbelianPresentation:
    """A finite abelian group ``Q`` presented on its generators, with coordinates."""

    group: FgAbelianGroup
    source: FiniteGroup
    _exponents: dict[int, list[int]]
    _sq: Subquotient

    def coords(self, q: int) -> list[int]:
        """Canonical coordinates of element ``q`` (orders ``self.orders``)."""
        return self._sq.coords(self._exponents[q])

    @property
    def orders(self) -> tuple[int, ...]:
        return self._sq.orders


def abelian_presentation(Q: FiniteGroup) -> AbelianPresentation:
    if not Q.is_abelian():
        raise PreconditionError("group is not abelian")
    gens = list(Q.generators)
    k = len(gens)
    exps: dict[int, list[int]] = {0: [0] * k}
    queue = deque([0])
    rels = []
    while queue:
        x = queue.popleft()
        for i, s in enumerate(gens):
            y = Q.mul(x, s)
            v = list(exps[x])
            v[i] += 1
            if y in exps:
                rel = [a - b for a, b in zip(v, exps[y])]
                if any(rel):
                    rels.append(rel)
            else:
                exps[y] = v
                queue.append(y)
    R = IntMatrix.from_columns(rels, k) if rels else IntMatrix.zeros(k, 0)
    sq = Subquotient([0] * k, None, None, R)
    return AbelianPresentation(sq.group, Q, exps, sq)


@dataclass(eq=False)
class Abelianization:
    group: FgAbelianGroup
    quotient: Quotient
    presentation: AbelianPresentation

    def project(self, x: int) -> list[int]:
        """Canonical coordinates of the image of ``x in G``."""
        return self.presentation.coords(self.quotient.projection[x])


def gamma_abelianization(action: GammaAction) -> Abelianization:
    """``G / [G, G]_Gamma`` with its projection."""
    K = gamma_commutator(action)
    Qt = quotient(action, K)
    pres = abelian_presentation(Qt.group)
    for s in action.gamma.elements():
        for x in action.g.elements():
            if Qt.projection[action.act(s, x)] != Qt.projection[x]:
                raise AssertionError("operators act nontrivially on the abelianization")
    return Abelianization(pres.group, Qt, pres)


def is_gamma_perfect(action: GammaAction) -> bool:
    return gamma_commutator(action).order == action.g.order


@dataclass
class LowerSeries:
    terms: list[Subgroup]
    stabilized_at: int | None  # first i with terms[i] == terms[i + 1], if seen

    def orders(self) -> list[int]:
        return [t.order for t in self.terms]


def lower_gamma_series(action: GammaAction, depth: int = 4) -> LowerSeries:
    """``G = Gamma_0 >= Gamma_1 >= ...`` with ``Gamma_{i+1} = [G, Gamma_i]_Gamma``."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    terms = [whole(action)]
    stable = None
    for i in range(depth):
        nxt = gamma_commutator(action, terms[-1])
        if stable is None and nxt == terms[-1]:
            stable = i
        terms.append(nxt)
    return LowerSeries(terms, stable)


def t_gamma(action: GammaAction) -> FgAbelianGroup:
    """``[G, G]_Gamma / [G, G]``."""
    K, C = gamma_commutator(action), commutator_subgroup(action)
    Kg, emb = as_group(K)
    pos = {x: i for i, x in enumerate(emb)}
    sub_action = trivial_action(trivial_group(), Kg)
    inner = subgroup(sub_action, [pos[c] for c in C.elements])
    Q = quotient(sub_action, inner)
    if not Q.group.is_abelian():
        raise AssertionError("[G,G]_Gamma / [G,G] is not abelian")
    return abelian_presentation(Q.group).group


# --------------------------------------------------------------------------
# degree-one exact sequences


def _h1_chains(action: GammaAction):
    from .bar import chain_complex
    from .gmod import integers

    return chain_complex(action, integers(action), 2)


def _bracket_class(cx, x: int) -> list[int]:
    """Class of ``[x] (x) 1`` in degree one."""
    return cx.class_of(1, cx.chain_element(1, (x,), [1]))


def _push_h1(src, tgt, hom: Sequence[int]) -> IntMatrix:
    """Map on degree-one classes induced by an equivariant homomorphism (``Z`` coefficients)."""
    basis = src.bases[1]
    cols = []
    for i in range(len(src.class_orders(1))):
        v = src.representative(1, i)
        out = [0] * tgt.rank(1)
        for r, t in enumerate(basis.orbits.rep_tuples):
            blk = basis.blocks[r]
            if not blk.ngens:
                continue
            a = blk.element(v[basis.block_slice(r)])
            w = tgt.chain_element(1, (hom[t[0]],), a)
            out = [p + q for p, q in zip(out, w)]
        cols.append(tgt.class_of(1, out))
    return IntMatrix.from_columns(cols, len(tgt.class_orders(1)))


def _span(vectors: list[list[int]], k: int) -> IntMatrix:
    return IntMatrix.from_columns(vectors, k) if vectors else IntMatrix.zeros(k, 0)


def _quotient_group(H: Subgroup, K: Subgroup) -> FgAbelianGroup:
    """``H / K`` for ``K <= H`` with abelian quotient."""
    Hg, emb = as_group(H)
    pos = {x: i for i, x in enumerate(emb)}
    plain = trivial_action(trivial_group(), Hg)
    inner = subgroup(plain, [pos[x] for x in K.elements])
    Q = quotient(plain, inner)
    return abelian_presentation(Q.group).group


@dataclass
class ExactnessReport:
    """Terms of a short piece of an exact sequence and the checks made on it."""

    terms: dict[str, FgAbelianGroup]
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "terms": {k: str(v) for k, v in self.terms.items()},
            "checks": dict(self.checks),
            "ok": self.ok,
        }


def h1_comparison(action: GammaAction) -> ExactnessReport:
    """``0 -> Gamma.G / ([G,G] n Gamma.G) -> H_1(G) -> H_1^Gamma(G) -> 0``, all terms computed."""
    G = action.g
    plain = trivial_action(trivial_group(), G)
    cp, ce = _h1_chains(plain), _h1_chains(action)
    dot, comm = gamma_dot(action), commutator_subgroup(action)
    kernel_term = _quotient_group(dot, intersection(dot, comm))
    H1, H1g = cp.homology(1), ce.homology(1)
    Xp = PresentedSubquotient(tuple(cp.class_orders(1)))
    Xe = PresentedSubquotient(tuple(ce.class_orders(1)))
    g_star = _push_h1(cp, ce, tuple(G.elements()))
    image = _span([_bracket_class(cp, x) for x in dot.elements], len(Xp.orders))
    W = PresentedSubquotient(Xp.orders, image)
    image_grp = image_group(image, (0,) * image.ncols, Xp.orders) if image.ncols else FgAbelianGroup()
    checks = {
        "injective": image_grp == kernel_term,
        "exact_middle": exact_at(IntMatrix.identity(len(Xp.orders)), W, Xp, g_star, Xe),
        "surjective": exact_at(g_star, Xp, Xe, None, None),
        "orders_multiply": (not H1.is_finite) or H1.order == kernel_term.order * H1g.order,
    }
    return ExactnessReport({"kernel": kernel_term, "H1": H1, "H1_gamma": H1g}, checks)


def five_term_tail(action: GammaAction, N: Subgroup) -> ExactnessReport:
    """``N / [E, N]_Gamma -> H_1^Gamma(E) -> H_1^Gamma(E/N) -> 0`` for a normal stable ``N``."""
    if N.action is not action:
        N = subgroup(action, N.elements)
    _require_normal_stable(N)
    EN = gamma_commutator(action, N)
    left = _quotient_group(N, EN)
    Q = quotient(action, N)
    ce, cq = _h1_chains(action), _h1_chains(Q.action)
    Xe = PresentedSubquotient(tuple(ce.class_orders(1)))
    Xq = PresentedSubquotient(tuple(cq.class_orders(1)))
    pi_star = _push_h1(ce, cq, Q.projection)
    image = _span([_bracket_class(ce, x) for x in N.elements], len(Xe.orders))
    W = PresentedSubquotient(Xe.orders, image)
    checks = {
        "exact_at_H1_E": exact_at(IntMatrix.identity(len(Xe.orders)), W, Xe, pi_star, Xq),
        "surjective": exact_at(pi_star, Xe, Xq, None, None),
        "left_maps_onto_image": W.group.order <= left.order if left.is_finite else True,
    }
    return ExactnessReport(
        {"N/[E,N]_Gamma": left, "H1_gamma(E)": ce.homology(1), "H1_gamma(E/N)": cq.homology(1)}, checks
    )
