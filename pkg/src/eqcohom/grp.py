"""Finite groups, groups of operators acting on them, and orbits on tuples.

Group elements are the integers ``0 .. order-1`` with the identity at ``0``.
Permutations are tuples of images; the product of permutations is
composition, ``(p * q)(i) = p(q(i))``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import CapExceeded, ValidationError

DEFAULT_GROUP_CAP = 5000
DEFAULT_TUPLE_CAP = 200_000


class FiniteGroup:
    """A finite group given by its multiplication table.

    ``table[a][b]`` is the index of ``a * b``.  The table is validated on
    construction (closure, identity at index 0, inverses, associativity).
    """

    def __init__(self, table: Sequence[Sequence[int]], names: Sequence[str] | None = None,
                 generators: Sequence[int] | None = None, *, check: bool = True):
        n = len(table)
        if n == 0:
            raise ValidationError("a group needs at least one element")
        self.order = n
        self.table = tuple(tuple(int(c) for c in row) for row in table)
        if names is None:
            names = ["e"] + [f"g{i}" for i in range(1, n)]
        self.names = tuple(str(s) for s in names)
        if check:
            self._validate()
        self.identity = 0
        self.inverses = tuple(next(b for b in range(n) if self.table[a][b] == 0) for a in range(n))
        self._generators = tuple(generators) if generators is not None else None
        self._index = {name: i for i, name in enumerate(self.names)}

    def _validate(self) -> None:
        n, t = self.order, self.table
        if any(len(row) != n for row in t):
            raise ValidationError("multiplication table is not square")
        if any(not 0 <= c < n for row in t for c in row):
            raise ValidationError("multiplication table entry out of range")
        if len(self.names) != n or len(set(self.names)) != n:
            raise ValidationError("element names must be unique, one per element")
        if any(t[0][a] != a or t[a][0] != a for a in range(n)):
            raise ValidationError("element 0 is not a two-sided identity")
        for a in range(n):
            if 0 not in t[a] or sorted(t[a]) != list(range(n)):
                raise ValidationError(f"element {self.names[a]} has no inverse (row is not a permutation)")
        for a in range(n):
            ta = t[a]
            for b in range(n):
                tab, tb = t[ta[b]], t[b]
                for c in range(n):
                    if tab[c] != ta[tb[c]]:
                        raise ValidationError(
                            f"table is not associative at ({self.names[a]}, {self.names[b]}, {self.names[c]})"
                        )

    # -- basic operations ---------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def prod(self, elements: Iterable[int]) -> int:
        out = 0
        for x in elements:
            out = self.table[out][x]
        return out

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverses[a], -k
        out = 0
        for _ in range(k):
            out = self.table[out][a]
        return out

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.table[self.table[g][x]][self.inverses[g]]

    def commutator(self, x: int, y: int) -> int:
        """``x y x^-1 y^-1``."""
        return self.prod((x, y, self.inverses[x], self.inverses[y]))

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"unknown element name {name!r}") from None

    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    @property
    def generators(self) -> tuple[int, ...]:
        """A generating set; greedy over element indices unless given at construction."""
        if self._generators is None:
            gens: list[int] = []
            span = {0}
            for a in range(self.order):
                if a not in span:
                    gens.append(a)
                    span = set(generated_subgroup(self, gens))
            self._generators = tuple(gens)
        return self._generators

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.table == other.table

    def __hash__(self) -> int:
        return hash(self.table)


def generated_subgroup(G: FiniteGroup, gens: Iterable[int]) -> tuple[int, ...]:
    """Sorted elements of the subgroup generated by ``gens`` (BFS closure)."""
    gens = [g for g in set(gens) if g != 0]
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = G.table[x][g]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return tuple(sorted(seen))


# --------------------------------------------------------------------------
# constructors


def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], ["e"], ())


def cyclic(n: int, symbol: str = "g") -> FiniteGroup:
    if n < 1:
        raise ValidationError("cyclic group order must be positive")
    names = ["e"] + [symbol if k == 1 else f"{symbol}^{k}" for k in range(1, n)]
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], names, (1,) if n > 1 else ())


def build_group(table: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> FiniteGroup:
    """Validate a table, moving the identity to index 0 if necessary."""
    n = len(table)
    if n == 0 or any(len(r) != n for r in table):
        raise ValidationError("multiplication table must be a non-empty square array")
    ident = next((i for i in range(n) if all(table[i][a] == a for a in range(n))), None)
    if ident is None:
        raise ValidationError("multiplication table has no identity")
    if ident != 0:
        perm = list(range(n))
        perm[0], perm[ident] = ident, 0  # new index -> old index
        pos = {old: new for new, old in enumerate(perm)}
        table = [[pos[table[perm[a]][perm[b]]] for b in range(n)] for a in range(n)]
        if names is not None:
            names = [names[perm[a]] for a in range(n)]
    if names is None:
        names = ["e"] + [f"g{i}" for i in range(1, n)]
    return FiniteGroup(table, names)


def compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """``p * q``: first apply ``q``, then ``p``."""
    return tuple(p[i] for i in q)


def parse_permutation(spec, degree: int | None = None) -> tuple[int, ...]:
    """A permutation from a list of images (0-based) or from 1-based cycle notation.

    Cycle strings look like ``"(1 2)(3 4)"`` or ``"(1,2,3)"``; ``"(123)"`` is
    read digit by digit.  ``"()"`` is the identity.
    """
    if isinstance(spec, str):
        cycles = []
        for chunk in spec.replace(")", ")\n").split("\n"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if not (chunk.startswith("(") and chunk.endswith(")")):
                raise ValidationError(f"bad cycle notation {spec!r}")
            body = chunk[1:-1].strip()
            if not body:
                continue
            if "," in body or " " in body:
                pts = [int(s) for s in body.replace(",", " ").split()]
            else:
                pts = [int(c) for c in body]
            cycles.append([p - 1 for p in pts])
        pts = [p for c in cycles for p in c]
        if any(p < 0 for p in pts) or len(set(pts)) != len(pts):
            raise ValidationError(f"bad cycle notation {spec!r}")
        d = max([degree or 0] + [p + 1 for p in pts])
        img = list(range(d))
        for c in cycles:
            for a, b in zip(c, c[1:] + c[:1]):
                img[a] = b
        return tuple(img)
    img = tuple(int(v) for v in spec)
    if sorted(img) != list(range(len(img))):
        raise ValidationError(f"{list(img)} is not a permutation of 0..{len(img) - 1}")
    if degree is not None and len(img) < degree:
        img = img + tuple(range(len(img), degree))
    return img


def from_permutations(gens: Sequence, *, cap: int = DEFAULT_GROUP_CAP,
                      names: Mapping[tuple[int, ...], str] | None = None) -> FiniteGroup:
    """The permutation group generated by ``gens``, elements in BFS order.

    Returns the group; ``group.perms`` holds the permutation of each element.
    """
    raw = [parse_permutation(g) for g in gens]
    degree = max([len(p) for p in raw] + [1])
    perms = [p + tuple(range(len(p), degree)) for p in raw]
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in perms:
            y = compose(x, g)
            if y not in index:
                if len(elements) >= cap:
                    raise CapExceeded(f"permutation group closure exceeds the cap of {cap} elements")
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)
    table = [[index[compose(a, b)] for b in elements] for a in elements]
    label = []
    for i, p in enumerate(elements):
        if i == 0:
            label.append("e")
        elif names and p in names:
            label.append(names[p])
        else:
            label.append(cycle_string(p))
    G = FiniteGroup(table, label, tuple(sorted({index[p] for p in perms} - {0})), check=False)
    G.perms = tuple(elements)
    return G


def cycle_string(p: Sequence[int]) -> str:
    seen, parts = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """``G x H`` with ``(g, h)`` at index ``g + |G| h``."""
    n, m = G.order, H.order
    table = [[G.table[a % n][b % n] + n * H.table[a // n][b // n] for b in range(n * m)] for a in range(n * m)]
    names = []
    for i in range(n * m):
        g, h = G.names[i % n], H.names[i // n]
        names.append("e" if i == 0 else (g if h == "e" else h if g == "e" else f"{g}{h}"))
    if len(set(names)) != len(names):
        names = ["e"] + [f"({G.names[i % n]},{H.names[i // n]})" for i in range(1, n * m)]
    gens = [g for g in G.generators] + [n * h for h in H.generators]
    return FiniteGroup(table, names, gens, check=False)


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the ``n``-gon, order ``2n``: rotation ``r``, reflection ``s``."""
    r = tuple((i + 1) % n for i in range(n))
    s = tuple((-i) % n for i in range(n))
    G = from_permutations([r, s])
    _rename_words(G, {"r": r, "s": s})
    return G


def quaternion() -> FiniteGroup:
    """``Q8`` as a regular permutation group on 8 points, generators ``i``, ``j``."""
    i = parse_permutation("(1 2 4 7)(3 6 8 5)")
    j = parse_permutation("(1 3 4 8)(2 5 7 6)")
    G = from_permutations([i, j])
    _rename_words(G, {"i": i, "j": j})
    return G


def symmetric(n: int) -> FiniteGroup:
    gens = [tuple([1, 0] + list(range(2, n)))] if n > 1 else []
    if n > 2:
        gens.append(tuple(list(range(1, n)) + [0]))
    return from_permutations(gens or [tuple(range(max(n, 1)))])


def _rename_words(G: FiniteGroup, gens: Mapping[str, tuple[int, ...]]) -> None:
    """Rename elements by shortest words in the named generators (BFS, deterministic)."""
    index = {p: i for i, p in enumerate(G.perms)}
    words = {0: "e"}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for sym, p in gens.items():
            y = G.table[x][index[p]]
            if y not in words:
                words[y] = sym if words[x] == "e" else words[x] + sym
                queue.append(y)
    names = [_compress(words[i]) for i in range(G.order)]
    G.names = tuple(names)
    G._index = {name: i for i, name in enumerate(names)}


def _compress(word: str) -> str:
    if word == "e":
        return word
    out = []
    for sym, run in itertools.groupby(word):
        k = len(list(run))
        out.append(sym if k == 1 else f"{sym}^{k}")
    return "".join(out)


def standard_group(name: str) -> FiniteGroup:
    """Groups of the bundled battery by name: ``C<n>``, ``C2xC2``, ``S3``, ``D4``, ``Q8``."""
    if name == "1":
        return trivial_group()
    if name.startswith("C") and name[1:].isdigit():
        return cyclic(int(name[1:]))
    if name == "C2xC2":
        return direct_product(cyclic(2, "a"), cyclic(2, "b"))
    if name == "S3":
        return dihedral(3)
    if name == "D4":
        return dihedral(4)
    if name == "Q8":
        return quaternion()
    raise ValidationError(f"unknown standard group {name!r}")


# --------------------------------------------------------------------------
# actions of an operator group


@dataclass(frozen=True, eq=False)
class GammaAction:
    """An action of ``gamma`` on ``g`` by automorphisms; ``phi[s][x]`` is ``^s x``."""

    gamma: FiniteGroup
    g: FiniteGroup
    phi: tuple[tuple[int, ...], ...]

    def act(self, s: int, x: int) -> int:
        return self.phi[s][x]

    def act_tuple(self, s: int, t: Sequence[int]) -> tuple[int, ...]:
        p = self.phi[s]
        return tuple(p[x] for x in t)

    def is_trivial(self) -> bool:
        return all(p == tuple(range(self.g.order)) for p in self.phi)


def trivial_action(gamma: FiniteGroup, g: FiniteGroup) -> GammaAction:
    ident = tuple(range(g.order))
    return GammaAction(gamma, g, tuple(ident for _ in range(gamma.order)))


def automorphism_from_images(G: FiniteGroup, images: Mapping[int, int]) -> tuple[int, ...]:
    """Extend ``images`` (on a generating set of ``G``) to an endomorphism of ``G``."""
    return homomorphism_from_images(G, G, images)


def _check_automorphism(G: FiniteGroup, p: Sequence[int], label: str) -> None:
    n = G.order
    if len(p) != n or sorted(p) != list(range(n)):
        raise ValidationError(f"image of {label} is not a permutation of the group elements")
    for a in range(n):
        pa, row = p[a], G.table[a]
        for b in range(n):
            if p[row[b]] != G.table[pa][p[b]]:
                raise ValidationError(
                    f"image of {label} is not an automorphism: fails on ({G.names[a]}, {G.names[b]})"
                )


def build_action(gamma: FiniteGroup, g: FiniteGroup, images: Mapping[int, Sequence[int]]) -> GammaAction:
    """Validated action from the permutations ``images[s]`` of ``g`` for some ``s`` in ``gamma``.

    The given elements must generate ``gamma``; the action is closed up by
    ``phi(s t) = phi(s) phi(t)`` and every law is re-checked on all of ``gamma``.
    """
    n = g.order
    given = {}
    for s, p in images.items():
        if not 0 <= s < gamma.order:
            raise ValidationError(f"operator index {s} out of range")
        p = tuple(int(v) for v in p)
        _check_automorphism(g, p, f"operator {gamma.names[s]}")
        given[s] = p
    if 0 in given and given[0] != tuple(range(n)):
        raise ValidationError("the identity operator must act as the identity")
    phi: dict[int, tuple[int, ...]] = {0: tuple(range(n))}
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for s, p in given.items():
            st = gamma.table[s][t]
            v = compose(p, phi[t])
            if st in phi:
                if phi[st] != v:
                    raise ValidationError(
                        f"images are not a homomorphism: conflict at operator {gamma.names[st]}"
                    )
            else:
                phi[st] = v
                queue.append(st)
    if len(phi) != gamma.order:
        raise ValidationError("given operators do not generate the operator group")
    table = tuple(phi[s] for s in range(gamma.order))
    for s in range(gamma.order):
        for t in range(gamma.order):
            if table[gamma.table[s][t]] != compose(table[s], table[t]):
                raise ValidationError(
                    f"images are not a homomorphism at ({gamma.names[s]}, {gamma.names[t]})"
                )
    return GammaAction(gamma, g, table)


def semidirect_product(action: GammaAction) -> FiniteGroup:
    """``G x| Gamma`` on pairs ``(x, s)`` at index ``x + |G| s``; ``(x,s)(y,t) = (x ^s y, st)``."""
    G, Gm, phi = action.g, action.gamma, action.phi
    n, m = G.order, Gm.order
    table = []
    for a in range(n * m):
        x, s = a % n, a // n
        row = []
        for b in range(n * m):
            y, t = b % n, b // n
            row.append(G.table[x][phi[s][y]] + n * Gm.table[s][t])
        table.append(row)
    names = []
    for a in range(n * m):
        x, s = G.names[a % n], Gm.names[a // n]
        names.append("e" if a == 0 else (x if s == "e" else s if x == "e" else f"{x}.{s}"))
    if len(set(names)) != len(names):
        names = ["e"] + [f"({G.names[a % n]},{Gm.names[a // n]})" for a in range(1, n * m)]
    gens = list(G.generators) + [n * s for s in Gm.generators]
    return FiniteGroup(table, names, gens, check=False)


# --------------------------------------------------------------------------
# orbits of the diagonal action on G^n


@dataclass(eq=False)
class OrbitDecomposition:
    """Orbits of ``Gamma`` on ``G^n`` (or on tuples with no identity entry when ``normalized``).

    Tuples are encoded as integers in base ``|G|`` so that integer order is
    lexicographic order; the representative of each orbit is its least tuple.
    ``rep_of[code]`` and ``sigma_of[code]`` give the transporter:
    ``^sigma(rep) == point``.  Excluded codes carry ``-1``.
    """

    action: GammaAction
    n: int
    normalized: bool
    reps: list[int]
    stab: list[tuple[int, ...]]
    rep_of: list[int]
    sigma_of: list[int]
    rep_tuples: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def base(self) -> int:
        return self.action.g.order

    def encode(self, t: Sequence[int]) -> int:
        code = 0
        b = self.base
        for x in t:
            code = code * b + x
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        b = self.base
        out = [0] * self.n
        for i in range(self.n - 1, -1, -1):
            code, out[i] = divmod(code, b)
        return tuple(out)

    def locate(self, t: Sequence[int]) -> tuple[int, int]:
        """``(rep index, sigma)`` with ``^sigma(reps[index]) == t``."""
        code = self.encode(t)
        r = self.rep_of[code]
        if r < 0:
            raise KeyError(f"tuple {tuple(t)} is not in the decomposition")
        return r, self.sigma_of[code]

    def orbit_size(self, i: int) -> int:
        return self.action.gamma.order // len(self.stab[i])

    @property
    def npoints(self) -> int:
        return sum(self.orbit_size(i) for i in range(len(self.reps)))

    def __len__(self) -> int:
        return len(self.reps)


def orbits_on_tuples(action: GammaAction, n: int, *, normalized: bool = False,
                     cap: int = DEFAULT_TUPLE_CAP) -> OrbitDecomposition:
    if n < 0:
        raise ValueError("degree must be nonnegative")
    b = action.g.order
    total = b ** n
    if total > cap:
        raise CapExceeded(f"|G|^n = {b}^{n} = {total} exceeds the tuple cap of {cap}")
    m = action.gamma.order
    rep_of = [-1] * total
    sigma_of = [0] * total
    reps: list[int] = []
    stab: list[tuple[int, ...]] = []
    weights = [b ** (n - 1 - i) for i in range(n)]
    trivial = action.is_trivial()
    all_ops = tuple(range(m))
    for code in range(total):
        if rep_of[code] != -1:
            continue
        digits = []
        c = code
        for w in weights:
            d, c = divmod(c, w)
            digits.append(d)
        if normalized and 0 in digits:
            continue
        idx = len(reps)
        reps.append(code)
        rep_of[code] = idx
        if trivial:
            stab.append(all_ops)
            continue
        fixed = []
        for s in range(m):
            p = action.phi[s]
            img = 0
            for d in digits:
                img = img * b + p[d]
            if img == code:
                fixed.append(s)
            elif rep_of[img] == -1:
                rep_of[img] = idx
                sigma_of[img] = s
        stab.append(tuple(fixed))
    dec = OrbitDecomposition(action, n, normalized, reps, stab, rep_of, sigma_of)
    dec.rep_tuples = [dec.decode(c) for c in reps]
    return dec


# --------------------------------------------------------------------------
# homomorphisms and brute-force isomorphism (small groups only)


def are_isomorphic(G: FiniteGroup, H: FiniteGroup, *, max_order: int = 16) -> bool:
    """Brute-force search over images of a generating set; for small groups only."""
    if G.order != H.order:
        return False
    if G.order > max_order:
        raise CapExceeded(f"isomorphism search limited to order <= {max_order}")
    prof_g = sorted(G.element_order(a) for a in G.elements())
    prof_h = sorted(H.element_order(a) for a in H.elements())
    if prof_g != prof_h:
        return False
    gens = list(G.generators)
    cands = [[h for h in H.elements() if H.element_order(h) == G.element_order(g)] for g in gens]
    for imgs in itertools.product(*cands):
        try:
            phi = homomorphism_from_images(G, H, dict(zip(gens, imgs)))
        except ValidationError:
            continue
        if len(set(phi)) == G.order:
            return True
    return False


def homomorphism_from_images(G: FiniteGroup, H: FiniteGroup, images: Mapping[int, int]) -> tuple[int, ...]:
    """Extend generator images to a homomorphism ``G -> H`` or raise ``ValidationError``."""
    phi = {0: 0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s, v in images.items():
            y, w = G.table[x][s], H.table[phi[x]][v]
            if y in phi:
                if phi[y] != w:
                    raise ValidationError("not a homomorphism")
            else:
                phi[y] = w
                queue.append(y)
    if len(phi) != G.order:
        raise ValidationError("images are not on a generating set")
    out = tuple(phi[x] for x in range(G.order))
    for a in range(G.order):
        for b in range(G.order):
            if out[G.table[a][b]] != H.table[out[a]][out[b]]:
                raise ValidationError("not a homomorphism")
    return out
