"""Extensions of groups with operators by modules, through factor sets.

An extension ``0 -> A -> B -> G -> 1`` here always comes with an
operator-equivariant set section ``G -> B``; the factor set read off that
section is an equivariant 2-cocycle.  :func:`classify` enumerates all
normalized equivariant cocycles, groups the resulting extensions into
equivalence classes by changing sections inside the groups themselves, and
compares the number of classes with the order of the second cohomology group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .bar import BarComplex, cochain_complex
from .eqgrp import abelian_presentation, as_group, gamma_commutator, is_gamma_perfect, subgroup
from .errors import CapExceeded, PreconditionError, ValidationError
from .gmod import GammaGModule, make_module
from .grp import (
    FiniteGroup,
    GammaAction,
    build_action,
    homomorphism_from_images,
    orbits_on_tuples,
    trivial_action,
    trivial_group,
)
from .zmod import FgAbelianGroup, Subquotient, reduce_vector

FactorSet = Callable[[int, int], Sequence[int]]

DEFAULT_CAPS = {"group": 4, "module": 4, "gamma": 2}
EQUIVALENCE_SEARCH_CAP = 1_000_000


@dataclass(eq=False)
class GammaExtension:
    """``0 -> A --alpha--> B --beta--> G -> 1`` with an equivariant section."""

    base: GammaAction  # operators on G
    module: GammaGModule
    total: FiniteGroup
    total_action: GammaAction  # operators on B
    alpha: tuple[int, ...]  # code of an element of A -> element of B
    beta: tuple[int, ...]  # element of B -> element of G
    section: tuple[int, ...]  # element of G -> element of B
    codes: tuple[tuple[int, ...], ...]  # code -> coordinates of A

    def code(self, a: Sequence[int]) -> int:
        return self._code_index[tuple(self.module.reduce(a))]

    @property
    def _code_index(self) -> dict[tuple[int, ...], int]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {c: i for i, c in enumerate(self.codes)}
            self.__dict__["_idx"] = idx
        return idx

    @property
    def _alpha_inv(self) -> dict[int, int]:
        inv = self.__dict__.get("_ainv")
        if inv is None:
            inv = {b: i for i, b in enumerate(self.alpha)}
            self.__dict__["_ainv"] = inv
        return inv

    def decompose(self, b: int) -> tuple[tuple[int, ...], int]:
        """``b = alpha(a) section(x)``: returns ``(a, x)``."""
        B = self.total
        x = self.beta[b]
        k = B.mul(b, B.inv(self.section[x]))
        return self.codes[self._alpha_inv[k]], x

    def factor_set(self, section: Sequence[int] | None = None) -> FactorSet:
        """``f(x, y) = alpha^-1(s(x) s(y) s(xy)^-1)`` for the given (or stored) section."""
        s = self.section if section is None else section
        B, G = self.total, self.base.g

        def f(x: int, y: int) -> tuple[int, ...]:
            k = B.prod((s[x], s[y], B.inv(s[G.mul(x, y)])))
            return self.codes[self._alpha_inv[k]]

        return f

    @property
    def is_central(self) -> bool:
        B = self.total
        return self.module.gamma_trivial() and all(B.mul(a, b) == B.mul(b, a) for a in self.alpha for b in B.elements())

    def check(self) -> None:
        """Exactness, equivariance, the induced module structure and the section."""
        B, G, A = self.total, self.base.g, self.module
        Gm = self.base.gamma
        if len(set(self.alpha)) != len(self.alpha):
            raise ValidationError("alpha is not injective")
        image = set(self.alpha)
        for i, a in enumerate(self.codes):
            for j, c in enumerate(self.codes):
                if B.mul(self.alpha[i], self.alpha[j]) != self.alpha[self.code([x + y for x, y in zip(a, c)])]:
                    raise ValidationError("alpha is not a homomorphism")
        for b1 in B.elements():
            for b2 in B.elements():
                if self.beta[B.mul(b1, b2)] != G.mul(self.beta[b1], self.beta[b2]):
                    raise ValidationError("beta is not a homomorphism")
        if set(self.beta) != set(G.elements()):
            raise ValidationError("beta is not surjective")
        if image != {b for b in B.elements() if self.beta[b] == 0}:
            raise ValidationError("image of alpha differs from the kernel of beta")
        for x in G.elements():
            if self.beta[self.section[x]] != x:
                raise ValidationError("section does not split beta")
            for i, a in enumerate(self.codes):
                # conjugation by any lift of x is the module action of x
                conj = B.conj(self.section[x], self.alpha[i])
                if conj != self.alpha[self.code(A.act_g(x, a))]:
                    raise ValidationError("conjugation does not induce the module action")
        for s in Gm.generators:
            for i, a in enumerate(self.codes):
                if self.total_action.act(s, self.alpha[i]) != self.alpha[self.code(A.act_gamma(s, a))]:
                    raise ValidationError("alpha is not equivariant")
            for b in B.elements():
                if self.beta[self.total_action.act(s, b)] != self.base.act(s, self.beta[b]):
                    raise ValidationError("beta is not equivariant")
            for x in G.elements():
                if self.section[self.base.act(s, x)] != self.total_action.act(s, self.section[x]):
                    raise ValidationError("section is not equivariant")


# --------------------------------------------------------------------------
# cocycles


def _require_finite(A: GammaGModule) -> None:
    if not A.is_finite:
        raise PreconditionError("extensions are enumerated for finite modules only")


@dataclass(eq=False)
class TwoCocycles:
    group: FgAbelianGroup
    complex: BarComplex
    cycles: Subquotient  # kernel of the degree-two coboundary, ambient = cochain coordinates

    def vector(self, coords: Sequence[int]) -> list[int]:
        return self.cycles.element(coords)

    def function(self, vec: Sequence[int]) -> FactorSet:
        cx = self.complex
        return lambda x, y: tuple(cx.cochain_eval(2, vec, (x, y)))

    def elements(self):
        """Every cocycle as a cochain vector."""
        for coords in itertools.product(*(range(e) for e in self.cycles.orders)):
            yield self.vector(coords)


def two_cocycles(action: GammaAction, A: GammaGModule, *, normalized: bool = True,
                 cap: int | None = None) -> TwoCocycles:
    """Equivariant 2-cocycles as the kernel of the second coboundary."""
    _require_finite(A)
    kwargs = {} if cap is None else {"cap": cap}
    cx = cochain_complex(action, A, 3, normalized=normalized, **kwargs)
    Z = Subquotient(cx.bases[2].orders, cx.dense(2), cx.bases[3].orders)
    return TwoCocycles(Z.group, cx, Z)


def _is_cocycle(action: GammaAction, A: GammaGModule, f: FactorSet) -> bool:
    G = action.g
    for x, y, z in itertools.product(G.elements(), repeat=3):
        lhs = [p - q + r - s for p, q, r, s in zip(A.act_g(x, f(y, z)), f(G.mul(x, y), z), f(x, G.mul(y, z)), f(x, y))]
        if any(A.reduce(lhs)):
            return False
    for s in action.gamma.generators:
        for x, y in itertools.product(G.elements(), repeat=2):
            if A.reduce(f(action.act(s, x), action.act(s, y))) != A.act_gamma(s, f(x, y)):
                return False
    return True


def extension_from_cocycle(action: GammaAction, A: GammaGModule, f: FactorSet | Mapping, *,
                           check: bool = True) -> GammaExtension:
    """``B = A x G`` with ``(a, x)(a', x') = (a + x.a' + f(x, x'), x x')``."""
    _require_finite(A)
    if isinstance(f, Mapping):
        table = dict(f)
        f = lambda x, y: table.get((x, y), A.zero())  # noqa: E731
    G, Gm = action.g, action.gamma
    n = G.order
    if any(A.reduce(f(0, x)) != A.zero() or A.reduce(f(x, 0)) != A.zero() for x in G.elements()):
        raise ValidationError("factor set is not normalized")
    if check and not _is_cocycle(action, A, f):
        raise ValidationError("factor set is not an equivariant 2-cocycle")
    codes = tuple(tuple(c) for c in A.elements())
    index = {c: i for i, c in enumerate(codes)}
    fv = {(x, y): A.reduce(f(x, y)) for x in G.elements() for y in G.elements()}

    def enc(a, x):
        return index[tuple(A.reduce(a))] * n + x

    table = []
    for i, a in enumerate(codes):
        for x in G.elements():
            row = []
            for c in codes:
                xc = A.act_g(x, c)
                for y in G.elements():
                    row.append(enc([p + q + r for p, q, r in zip(a, xc, fv[(x, y)])], G.mul(x, y)))
            table.append(row)
    names = [f"({''.join(map(str, a))},{G.names[x]})" for a in codes for x in G.elements()]
    B = FiniteGroup(table, names, check=check)
    images = {
        s: tuple(enc(A.act_gamma(s, codes[b // n]), action.act(s, b % n)) for b in B.elements())
        for s in Gm.generators
    }
    total_action = build_action(Gm, B, images) if images else trivial_action(Gm, B)
    E = GammaExtension(
        action, A, B, total_action,
        alpha=tuple(i * n for i in range(len(codes))),
        beta=tuple(b % n for b in B.elements()),
        section=tuple(G.elements()),
        codes=codes,
    )
    if check:
        E.check()
    return E


def cocycle_of(E: GammaExtension, section: Sequence[int] | None = None) -> dict[tuple[int, int], tuple[int, ...]]:
    """Factor set of ``E`` as a table ``(x, y) -> a``."""
    f = E.factor_set(section)
    G = E.base.g
    return {(x, y): tuple(f(x, y)) for x in G.elements() for y in G.elements()}


def baer_sum(E1: GammaExtension, E2: GammaExtension) -> GammaExtension:
    """Extension of the sum of the two factor sets."""
    if E1.module is not E2.module and E1.module.orders != E2.module.orders:
        raise ValidationError("extensions of different modules")
    f1, f2 = E1.factor_set(), E2.factor_set()
    A = E1.module
    return extension_from_cocycle(E1.base, A, lambda x, y: A.reduce([p + q for p, q in zip(f1(x, y), f2(x, y))]))


# --------------------------------------------------------------------------
# equivalence


def equivariant_sections(action: GammaAction, A: GammaGModule) -> list[tuple[tuple[int, ...], ...]]:
    """All maps ``h: G -> A`` with ``h(e) = 0`` and ``h(^s x) = s.h(x)``."""
    _require_finite(A)
    dec = orbits_on_tuples(action, 1)
    Gm = action.gamma
    choices = []
    for r, t in enumerate(dec.rep_tuples):
        stab = dec.stab[r]
        if t[0] == 0:
            choices.append([tuple(A.zero())])
            continue
        choices.append([a for a in A.elements() if all(tuple(A.act_gamma(s, a)) == a for s in stab)])
    out = []
    for pick in itertools.product(*choices):
        h = [None] * action.g.order
        for r, t in enumerate(dec.rep_tuples):
            for s in Gm.elements():
                h[action.act(s, t[0])] = tuple(A.act_gamma(s, pick[r]))
        out.append(tuple(h))
    return out


def are_equivalent(E1: GammaExtension, E2: GammaExtension, *, cap: int = EQUIVALENCE_SEARCH_CAP) -> bool:
    """Is there an equivariant homomorphism ``B1 -> B2`` over the identities of ``A`` and ``G``?

    Candidates send ``section1(x)`` to ``alpha2(h(x)) section2(x)`` on the
    generators of ``G``; each candidate is extended and checked in full.
    """
    G, A = E1.base.g, E1.module
    if E2.base.g != G or E2.module.orders != A.orders:
        raise ValidationError("extensions of different groups or modules")
    B1, B2 = E1.total, E2.total
    gens = list(G.generators)
    ncodes = len(E1.codes)
    if ncodes ** len(gens) > cap:
        raise CapExceeded(f"equivalence search needs {ncodes ** len(gens)} candidates (cap {cap})")
    a_gens = [E1.alpha[E1.code(c)] for c in _unit_vectors(A)]
    base_images = {b: E2.alpha[E2.code(E1.codes[E1._alpha_inv[b]])] for b in a_gens}
    for pick in itertools.product(range(ncodes), repeat=len(gens)):
        images = dict(base_images)
        for x, k in zip(gens, pick):
            images[E1.section[x]] = B2.mul(E2.alpha[k], E2.section[x])
        try:
            phi = homomorphism_from_images(B1, B2, images)
        except ValidationError:
            continue
        if any(phi[E1.alpha[i]] != E2.alpha[E2.code(c)] for i, c in enumerate(E1.codes)):
            continue
        if any(E2.beta[phi[b]] != E1.beta[b] for b in B1.elements()):
            continue
        if all(
            phi[E1.total_action.act(s, b)] == E2.total_action.act(s, phi[b])
            for s in E1.base.gamma.generators
            for b in B1.elements()
        ):
            return True
    return False


def _unit_vectors(A: GammaGModule) -> list[list[int]]:
    return [[int(i == j) for j in range(A.rank)] for i in range(A.rank)]


# --------------------------------------------------------------------------
# classification


@dataclass
class Classification:
    cocycles: int  # number of normalized equivariant 2-cocycles
    classes: int  # equivalence classes found by changing sections
    h2: FgAbelianGroup
    representatives: list[GammaExtension]
    pairwise_inequivalent: bool

    @property
    def ok(self) -> bool:
        return self.classes == self.h2.order and self.pairwise_inequivalent

    def to_json(self) -> dict:
        return {
            "cocycles": self.cocycles,
            "classes": self.classes,
            "h2": str(self.h2),
            "h2_order": self.h2.order,
            "pairwise_inequivalent": self.pairwise_inequivalent,
            "ok": self.ok,
        }


def _check_caps(action: GammaAction, A: GammaGModule, caps: Mapping[str, int]) -> None:
    size = 1
    for e in A.orders:
        size *= e
    for label, value in (("group", action.g.order), ("module", size), ("gamma", action.gamma.order)):
        if value > caps[label]:
            raise CapExceeded(f"{label} order {value} exceeds the classification cap {caps[label]}")


def classify(action: GammaAction, A: GammaGModule, *, caps: Mapping[str, int] | None = None,
             verify_pairs: bool = True) -> Classification:
    """Equivalence classes of equivariant extensions of ``G`` by ``A``."""
    from .cohom import cohomology

    _require_finite(A)
    caps = {**DEFAULT_CAPS, **(caps or {})}
    _check_caps(action, A, caps)
    Z = two_cocycles(action, A, normalized=True)
    cx = Z.complex
    orders = cx.bases[2].orders
    sections = equivariant_sections(action, A)
    seen: set[tuple[int, ...]] = set()
    reps: list[GammaExtension] = []
    count = 0
    for vec in Z.elements():
        count += 1
        key = tuple(reduce_vector(vec, orders))
        if key in seen:
            continue
        E = extension_from_cocycle(action, A, Z.function(vec))
        reps.append(E)
        for h in sections:
            s = tuple(E.total.mul(E.alpha[E.code(h[x])], E.section[x]) for x in action.g.elements())
            f = E.factor_set(s)
            seen.add(tuple(reduce_vector(cx.cochain_from_function(2, lambda t: f(*t)), orders)))
    h2 = cohomology(action, A, 2)[2]
    pairwise = True
    if verify_pairs:
        pairwise = not any(are_equivalent(E1, E2) for E1, E2 in itertools.combinations(reps, 2))
    return Classification(count, len(reps), h2, reps, pairwise)


# --------------------------------------------------------------------------
# central extensions


def commutator_subextension(E: GammaExtension) -> GammaExtension:
    """Restrict a central extension of an operator-perfect group to ``[B, B]_Gamma``."""
    if not E.is_central:
        raise PreconditionError("extension is not central")
    if not is_gamma_perfect(E.base):
        raise PreconditionError("base group is not perfect with respect to the operators")
    G = E.base.g
    Xp = gamma_commutator(E.total_action)
    X, emb = as_group(Xp)
    pos = {b: i for i, b in enumerate(emb)}
    X_action = build_action(
        E.base.gamma, X, {s: tuple(pos[E.total_action.act(s, b)] for b in emb) for s in E.base.gamma.generators}
    ) if E.base.gamma.generators else trivial_action(E.base.gamma, X)
    if gamma_commutator(X_action).order != X.order:
        raise AssertionError("commutator subextension is not perfect with respect to the operators")
    beta = tuple(E.beta[b] for b in emb)
    if set(beta) != set(G.elements()):
        raise AssertionError("commutator subextension does not map onto the base")
    # kernel as a module with trivial actions
    kernel_sub = subgroup(trivial_action(trivial_group(), X), [i for i, b in enumerate(emb) if beta[i] == 0])
    K, kemb = as_group(kernel_sub)
    pres = abelian_presentation(K)
    A2 = make_module(E.base, pres.orders, name="ker")
    codes = tuple(tuple(c) for c in A2.elements())
    by_coords = {tuple(pres.coords(k)): kemb[k] for k in K.elements()}
    alpha = tuple(by_coords[c] for c in codes)
    section = _find_section(E.base, X, X_action, beta)
    if section is None:
        raise AssertionError("no equivariant section of the commutator subextension")
    out = GammaExtension(E.base, A2, X, X_action, alpha, beta, section, codes)
    out.check()
    return out


def _find_section(base: GammaAction, X: FiniteGroup, X_action: GammaAction, beta: Sequence[int]) -> tuple[int, ...] | None:
    dec = orbits_on_tuples(base, 1)
    G, Gm = base.g, base.gamma
    sec: list[int | None] = [None] * G.order
    for r, t in enumerate(dec.rep_tuples):
        x = t[0]
        stab = dec.stab[r]
        pick = next(
            (b for b in X.elements() if beta[b] == x and all(X_action.act(s, b) == b for s in stab)),
            None,
        )
        if pick is None:
            return None
        for s in Gm.elements():
            sec[base.act(s, x)] = X_action.act(s, pick)
    return tuple(sec)


def has_universal_central_extension(action: GammaAction) -> bool:
    return is_gamma_perfect(action)
