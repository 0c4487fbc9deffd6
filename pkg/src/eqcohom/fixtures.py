"""The bundled test battery: groups, operator actions and coefficient modules.

Cases are built programmatically here; ``battery/*.json`` holds the same
cases as CLI input documents (see :func:`write_battery`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .gmod import (
    GammaGModule,
    ProperSES,
    augmentation_ideal,
    direct_sum_module,
    group_ring,
    make_module,
    module_map,
    norm_map,
    proper_ses,
)
from .grp import (
    FiniteGroup,
    GammaAction,
    automorphism_from_images,
    build_action,
    cyclic,
    standard_group,
    trivial_action,
    trivial_group,
)

GROUPS = ("C2", "C3", "C4", "C2xC2", "C5", "C6", "S3", "C8", "D4", "Q8")
COEFFICIENTS = (0, 2, 3, 4, 6)
GAMMAS = ("1", "C2triv", "C2aut")
VARIANTS = ("triv", "neg", "sign")


def involution(G: FiniteGroup, name: str) -> tuple[int, ...] | None:
    """The documented involutive automorphism of a battery group (``None`` for C2)."""
    if name == "C2":
        return None
    if name == "C2xC2":
        a, b = G.index("a"), G.index("b")
        return automorphism_from_images(G, {a: b, b: a})
    if name in ("S3", "D4"):
        s = G.index("s")
        return tuple(G.conj(s, x) for x in G.elements())
    if name == "Q8":
        i, j = G.index("i"), G.index("j")
        return automorphism_from_images(G, {i: j, j: i})
    return tuple(G.inv(x) for x in G.elements())


def sign_character(G: FiniteGroup, name: str) -> dict[int, int] | None:
    """Generator signs of a nontrivial character ``G -> {+1, -1}``, or ``None``."""
    if name in ("C3", "C5"):
        return None
    if name == "S3":
        return {G.index("r"): 1, G.index("s"): -1}
    if name == "D4":
        return {G.index("r"): -1, G.index("s"): 1}
    return {g: -1 for g in G.generators}


def make_action(group: str, gamma: str) -> GammaAction | None:
    G = standard_group(group)
    if gamma == "1":
        return trivial_action(trivial_group(), G)
    if gamma == "C2triv":
        return trivial_action(cyclic(2, "t"), G)
    inv = involution(G, group)
    if inv is None:
        return None
    return build_action(cyclic(2, "t"), G, {1: inv})


def coefficient_name(order: int) -> str:
    return "Z" if order == 0 else f"Z/{order}"


def make_coefficients(action: GammaAction, group: str, order: int, variant: str) -> GammaGModule | None:
    """``Z`` or ``Z/n`` with the given variant; ``None`` when the variant is vacuous."""
    G, Gm = action.g, action.gamma
    label = f"{coefficient_name(order)}[{variant}]"
    if variant == "triv":
        return make_module(action, (order,), name=label)
    if order == 2:
        return None  # -1 = 1 on Z/2
    if variant == "neg":
        if Gm.order == 1:
            return None
        return make_module(action, (order,), gamma_images={1: [[-1]]}, name=label)
    if variant == "sign":
        chi = sign_character(G, group)
        if chi is None:
            return None
        return make_module(action, (order,), g_images={g: [[c]] for g, c in chi.items()}, name=label)
    raise ValueError(variant)


@dataclass(frozen=True)
class BatteryCase:
    group: str
    gamma: str
    coefficient: int
    variant: str
    action: GammaAction
    module: GammaGModule

    @property
    def id(self) -> str:
        return f"{self.group}-{self.gamma}-{coefficient_name(self.coefficient).replace('/', '')}-{self.variant}"


def actions() -> Iterator[tuple[str, str, GammaAction]]:
    for group in GROUPS:
        for gamma in GAMMAS:
            a = make_action(group, gamma)
            if a is not None:
                yield group, gamma, a


def battery(*, gammas=GAMMAS, variants=VARIANTS, coefficients=COEFFICIENTS, groups=GROUPS) -> list[BatteryCase]:
    out = []
    for group, gamma, action in actions():
        if gamma not in gammas or group not in groups:
            continue
        for order in coefficients:
            for variant in variants:
                M = make_coefficients(action, group, order, variant)
                if M is not None:
                    out.append(BatteryCase(group, gamma, order, variant, action, M))
    return out


# --------------------------------------------------------------------------
# proper short exact sequences of coefficients


@dataclass(frozen=True)
class SESCase:
    id: str
    action: GammaAction
    ses: ProperSES
    tate: bool  # norm precondition holds for all three terms


def _mod2(M: GammaGModule, action: GammaAction, name: str) -> GammaGModule:
    orders = (2,) * M.rank
    return make_module(
        action, orders, {x: M.g_act[x].tolist() for x in action.g.generators},
        {s: M.gamma_act[s].tolist() for s in action.gamma.generators}, name=name,
    )


def ses_fixtures() -> list[SESCase]:
    """Proper short exact coefficient sequences used for the exactness checks."""
    out = []

    def add(id_, action, C1, C, C2, a, b):
        ses = proper_ses(module_map(C1, C, a), module_map(C, C2, b), id_)
        out.append(SESCase(id_, action, ses, all(norm_map(M).precondition for M in ses.modules)))

    act = trivial_action(trivial_group(), cyclic(2))
    add("bockstein-C2", act, make_module(act, (2,)), make_module(act, (4,)), make_module(act, (2,)), [[2]], [[1]])

    act = make_action("S3", "C2triv")
    add("bockstein-S3", act, make_module(act, (2,)), make_module(act, (4,)), make_module(act, (2,)), [[2]], [[1]])

    act = make_action("C3", "C2aut")
    neg = make_module(act, (3,), gamma_images={1: [[-1]]})
    two = make_module(act, (2,))
    add("split-C3", act, neg, direct_sum_module(neg, two), two, [[1], [0]], [[0, 1]])

    act = make_action("C2", "C2triv")
    Z = make_module(act, (0,))
    add("integers-C2", act, Z, Z, make_module(act, (2,)), [[2]], [[1]])

    act = make_action("C3", "C2aut")
    ring = _mod2(group_ring(act), act, "Z/2(G)")
    ideal = _mod2(augmentation_ideal(act), act, "I(G)/2")
    n = act.g.order
    incl = [[(1 if i == g else 0) - (1 if i == 0 else 0) for g in range(1, n)] for i in range(n)]
    add("augmentation-C3", act, ideal, ring, make_module(act, (2,)), incl, [[1] * n])

    act = make_action("C4", "C2aut")
    sign = make_module(act, (4,), g_images={g: [[-1]] for g in act.g.generators})
    add("twisted-C4", act, make_module(act, (2,)), sign, make_module(act, (2,)), [[2]], [[1]])

    act = make_action("C3", "C2aut")
    add("negation-C3", act, neg, make_module(act, (9,), gamma_images={1: [[-1]]}), neg, [[3]], [[1]])
    return out


# --------------------------------------------------------------------------
# problem documents


def _module_document(M: GammaGModule) -> dict:
    G, Gm = M.G, M.Gamma
    I = [[int(i == j) for j in range(M.rank)] for i in range(M.rank)]
    doc: dict = {"orders": list(M.orders)}
    if M.name:
        doc["name"] = M.name
    g = {G.names[x]: M.g_act[x].tolist() for x in G.generators if M.g_act[x].tolist() != I}
    s = {Gm.names[t]: M.gamma_act[t].tolist() for t in Gm.generators if M.gamma_act[t].tolist() != I}
    if g:
        doc["g"] = g
    if s:
        doc["gamma"] = s
    return doc


def case_document(case: BatteryCase) -> dict:
    """The CLI input document describing a battery case."""
    a = case.action
    doc: dict = {"version": 1, "name": case.id, "group": {"name": case.group}}
    if case.gamma != "1":
        doc["gamma"] = {"table": [[0, 1], [1, 0]], "names": ["e", "t"]}
        if case.gamma == "C2aut":
            t = a.gamma.generators[0]
            doc["action"] = {a.gamma.names[t]: [a.g.names[a.act(t, x)] for x in a.g.elements()]}
    doc["module"] = _module_document(case.module)
    return doc


def write_battery(directory) -> list[str]:
    """Write one document per battery case; returns the file names."""
    import json
    from pathlib import Path

    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    names = []
    for case in battery():
        name = f"{case.id}.json"
        (path / name).write_text(json.dumps(case_document(case), indent=2, sort_keys=True) + "\n")
        names.append(name)
    return names


def battery_files() -> list:
    """Bundled battery documents in fixture order."""
    from importlib import resources

    root = resources.files("eqcohom").joinpath("battery")
    order = {f"{c.id}.json": i for i, c in enumerate(battery())}
    files = [f for f in root.iterdir() if f.name.endswith(".json")]
    return sorted(files, key=lambda f: (order.get(f.name, len(order)), f.name))
