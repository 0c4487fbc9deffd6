"""Command line interface: ``eqcohom <command> [flags] <spec-file>``.

A problem is one JSON document (schema ``schemas/input-1.json``) naming the
group, the operator group, the action and the coefficient module.  Reports
are printed as text or as sorted JSON (schema ``schemas/output-1.json``).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Mapping, Sequence

import jsonschema

from .errors import CapExceeded, EqcohomError, PreconditionError, ValidationError
from .gmod import GammaGModule, make_module, module_map, proper_ses
from .grp import (
    DEFAULT_TUPLE_CAP,
    FiniteGroup,
    GammaAction,
    automorphism_from_images,
    build_action,
    build_group,
    from_permutations,
    standard_group,
    trivial_action,
    trivial_group,
)

SCHEMA_VERSION = "1"
COMMANDS = ("cohomology", "homology", "tate", "derivations", "cup", "abelianize", "gamma-series",
            "extensions", "les", "verify")
DEFAULTS = {"max_degree": 3, "convention": "paper", "normalized": False, "cap": DEFAULT_TUPLE_CAP,
            "from": -2, "to": 2, "depth": 4, "p": 1, "q": 1}


def load_schema(name: str = "input") -> dict:
    text = resources.files("eqcohom").joinpath("schemas", f"{name}-{SCHEMA_VERSION}.json").read_text()
    return json.loads(text)


# --------------------------------------------------------------------------
# parsing


@dataclass(eq=False)
class ProblemSpec:
    action: GammaAction
    module: GammaGModule
    module_b: GammaGModule | None = None
    ses: Any = None  # ProperSES, or the exception met while building it
    normal_subgroup: tuple[int, ...] | None = None
    options: dict = field(default_factory=dict)
    name: str = ""

    @property
    def G(self) -> FiniteGroup:
        return self.action.g

    @property
    def Gamma(self) -> FiniteGroup:
        return self.action.gamma


def _resolve(G: FiniteGroup, ref, path: str) -> int:
    if isinstance(ref, bool):
        raise ValidationError("element reference must be a name or an index", path)
    if isinstance(ref, int):
        if not 0 <= ref < G.order:
            raise ValidationError(f"element index {ref} out of range", path)
        return ref
    try:
        return G.index(ref)
    except (KeyError, ValueError, EqcohomError):
        raise ValidationError(f"unknown element {ref!r}", path) from None


def _parse_group(doc: Mapping, path: str) -> FiniteGroup:
    try:
        if "name" in doc:
            return standard_group(doc["name"])
        if "table" in doc:
            return build_group(doc["table"], doc.get("names"))
        names = doc.get("names")
        G = from_permutations(doc["permutations"])
        if names is not None:
            if len(names) != G.order:
                raise ValidationError(f"{len(names)} names for a group of order {G.order}", path)
            G = FiniteGroup(G.table, names, check=False)
        return G
    except ValidationError as exc:
        if exc.path:
            raise
        raise ValidationError(str(exc), path) from None


def _parse_action(gamma: FiniteGroup, G: FiniteGroup, doc: Mapping | None) -> GammaAction:
    if not doc:
        return trivial_action(gamma, G)
    images = {}
    for key, val in sorted(doc.items()):
        path = f"action.{key}"
        s = _resolve(gamma, key if not key.isdigit() else int(key), path)
        if isinstance(val, list):
            if len(val) != G.order:
                raise ValidationError(f"expected {G.order} images, got {len(val)}", path)
            images[s] = tuple(_resolve(G, v, path) for v in val)
        else:
            gen = {_resolve(G, k, f"{path}.{k}"): _resolve(G, v, f"{path}.{k}") for k, v in val.items()}
            try:
                images[s] = automorphism_from_images(G, gen)
            except ValidationError as exc:
                raise ValidationError(f"operator {gamma.names[s]}: {exc}", path) from None
    try:
        return build_action(gamma, G, images)
    except ValidationError as exc:
        raise ValidationError(str(exc), "action") from None


def _parse_module(action: GammaAction, doc: Mapping | None, path: str) -> GammaGModule:
    if doc is None:
        return make_module(action, (0,), name="Z")
    G, Gm = action.g, action.gamma
    g_images = {_resolve(G, k, f"{path}.g.{k}"): m for k, m in (doc.get("g") or {}).items()}
    gm_images = {_resolve(Gm, k, f"{path}.gamma.{k}"): m for k, m in (doc.get("gamma") or {}).items()}
    n = len(doc["orders"])
    for label, imgs in (("g", g_images), ("gamma", gm_images)):
        for k, m in imgs.items():
            if len(m) != n or any(len(r) != n for r in m):
                raise ValidationError(f"matrix must be {n}x{n}", f"{path}.{label}")
    try:
        return make_module(action, doc["orders"], g_images, gm_images, name=doc.get("name", ""))
    except ValidationError as exc:
        raise ValidationError(str(exc), path) from None


def parse_spec(document: Mapping | str) -> ProblemSpec:
    """Validate a problem document (a mapping or JSON text) and build its objects."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"not valid JSON: {exc.msg} (line {exc.lineno})", "$") from None
    try:
        jsonschema.validate(document, load_schema("input"))
    except jsonschema.ValidationError as exc:
        where = ".".join(str(p) for p in exc.absolute_path) or "$"
        raise ValidationError(exc.message, where) from None
    G = _parse_group(document["group"], "group")
    gamma = _parse_group(document["gamma"], "gamma") if "gamma" in document else trivial_group()
    action = _parse_action(gamma, G, document.get("action"))
    module = _parse_module(action, document.get("module"), "module")
    module_b = _parse_module(action, document["module_b"], "module_b") if "module_b" in document else None
    ses = None
    if "ses" in document:
        d = document["ses"]
        sub = _parse_module(action, d["sub"], "ses.sub")
        quo = _parse_module(action, d["quotient"], "ses.quotient")
        try:
            alpha = module_map(sub, module, d["alpha"])
            beta = module_map(module, quo, d["beta"])
            ses = proper_ses(alpha, beta, "ses")
        except ValidationError as exc:
            raise ValidationError(str(exc), "ses") from None
        except PreconditionError as exc:
            ses = exc
    normal = None
    if "normal_subgroup" in document:
        normal = tuple(_resolve(G, r, "normal_subgroup") for r in document["normal_subgroup"])
    return ProblemSpec(action, module, module_b, ses, normal, dict(document.get("options", {})),
                       document.get("name", ""))


# --------------------------------------------------------------------------
# commands


@dataclass
class Report:
    command: str
    options: dict
    result: dict
    checks: dict[str, bool] = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "options": self.options,
            "result": self.result,
            "checks": self.checks,
            "ok": self.ok,
        }
        if timings:
            out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out


def render(report: Report, fmt: str = "text", *, timings: bool = False) -> str:
    if fmt == "structured":
        return json.dumps(report.to_json(timings), indent=2, sort_keys=True) + "\n"
    out = [f"# {report.command}"]
    for k in sorted(report.options):
        out.append(f"# {k}: {json.dumps(report.options[k])}")
    out.extend(report.lines)
    for name in sorted(report.checks):
        out.append(f"check {name}: {'pass' if report.checks[name] else 'FAIL'}")
    if timings:
        for k in sorted(report.timings):
            out.append(f"time {k}: {report.timings[k]:.3f}s")
    out.append("status: " + ("ok" if report.ok else "FAILED"))
    return "\n".join(out) + "\n"


def _opts(spec: ProblemSpec, keys: Sequence[str]) -> dict:
    return {k: spec.options.get(k, DEFAULTS[k]) for k in keys}


def cmd_cohomology(spec: ProblemSpec, kind: str = "cohomology") -> Report:
    from .cohom import cohomology, homology

    o = _opts(spec, ("max_degree", "normalized", "cap"))
    run = cohomology if kind == "cohomology" else homology
    res = run(spec.action, spec.module, o["max_degree"], normalized=o["normalized"], cap=o["cap"])
    sym = "H^" if kind == "cohomology" else "H_"
    groups = {str(n): str(g) for n, g in enumerate(res.groups)}
    lines = [f"{sym}{n} = {g}" for n, g in enumerate(res.groups)]
    r = Report(kind, o, {"groups": groups, "sizes": res.sizes}, lines=lines)
    r.timings = {"build": res.build_seconds, "total": res.total_seconds}
    return r


def cmd_tate(spec: ProblemSpec) -> Report:
    from .cohom import tate

    o = _opts(spec, ("from", "to", "convention", "normalized", "cap"))
    res = tate(spec.action, spec.module, o["from"], o["to"], o["convention"], normalized=o["normalized"], cap=o["cap"])
    lines = [f"convention: {res.convention}"] + [f"T^{n} = {g}" for n, g in sorted(res.groups.items())]
    return Report("tate", o, res.to_json(), lines=lines)


def cmd_derivations(spec: ProblemSpec) -> Report:
    from .cohom import cohomology, derivations

    res = derivations(spec.action, spec.module)
    h1 = cohomology(spec.action, spec.module, 1)[1]
    lines = [f"Der = {res.derivations}", f"principal = {res.principal}", f"Der / principal = {res.h1}"]
    return Report("derivations", {}, res.to_json(), {"matches_bar_h1": res.h1 == h1}, lines)


def _random_cochain(cx, n, rng):
    return [rng.randrange(e) if e else rng.randint(-5, 5) for e in cx.bases[n].orders]


def cmd_cup(spec: ProblemSpec, *, pairs: int = 20, seed: int = 0) -> Report:
    from .cohom import CupProduct

    o = _opts(spec, ("p", "q", "cap"))
    p, q = o["p"], o["q"]
    B = spec.module_b or spec.module
    cp = CupProduct(spec.action, spec.module, B, p + q, cap=o["cap"])
    table = cp.cup_classes(p, q)
    rng = random.Random(seed)
    leibniz = all(
        cp.leibniz_holds(_random_cochain(cp.cxA, p, rng), p, _random_cochain(cp.cxB, q, rng), q)
        for _ in range(pairs)
    )
    result = {
        "p": p,
        "q": q,
        "left": [int(e) for e in table["left"]],
        "right": [int(e) for e in table["right"]],
        "target": [int(e) for e in table["target"]],
        "table": table["table"],
    }
    lines = [
        f"H^{p}(A) generators: {list(table['left'])}",
        f"H^{q}(B) generators: {list(table['right'])}",
        f"H^{p + q}(A (x) B) generators: {list(table['target'])}",
    ]
    for i, row in enumerate(table["table"]):
        for j, v in enumerate(row):
            lines.append(f"x{i} u y{j} = {v}")
    return Report("cup", o, result, {"leibniz": leibniz}, lines)


def cmd_abelianize(spec: ProblemSpec) -> Report:
    from .cohom import homology
    from .eqgrp import (
        commutator_subgroup,
        five_term_tail,
        gamma_abelianization,
        gamma_commutator,
        gamma_commutator_by_generators,
        gamma_dot,
        h1_comparison,
        is_gamma_perfect,
        subgroup,
        t_gamma,
    )
    from .gmod import integers

    a = spec.action
    K = gamma_commutator(a)
    ab = gamma_abelianization(a)
    h1 = homology(a, integers(a), 1)[1]
    cmp_ = h1_comparison(a)
    result = {
        "gamma_commutator": K.names(),
        "commutator": commutator_subgroup(a).names(),
        "gamma_dot": gamma_dot(a).names(),
        "abelianization": str(ab.group),
        "t_gamma": str(t_gamma(a)),
        "perfect": is_gamma_perfect(a),
        "h1_gamma": str(h1),
        "h1_comparison": cmp_.to_json(),
    }
    checks = {
        "abelianization_is_h1": ab.group == h1,
        "generating_sets_agree": K == gamma_commutator_by_generators(a),
        "commutator_normal_stable": K.normal and K.gamma_stable,
        "h1_comparison": cmp_.ok,
    }
    lines = [
        f"[G,G]_Gamma = {{{', '.join(K.names())}}}",
        f"G^ab_Gamma = {ab.group}",
        f"T_Gamma(G) = {result['t_gamma']}",
        f"Gamma.G = {{{', '.join(result['gamma_dot'])}}}",
        f"perfect = {str(result['perfect']).lower()}",
        f"H_1^Gamma(G) = {h1}",
        "0 -> {kernel} -> {H1} -> {H1_gamma} -> 0".format(**{k: str(v) for k, v in cmp_.terms.items()}),
    ]
    if spec.normal_subgroup is not None:
        N = subgroup(a, spec.normal_subgroup)
        tail = five_term_tail(a, N)
        result["five_term_tail"] = tail.to_json()
        checks["five_term_tail"] = tail.ok
        t = [str(v) for v in tail.terms.values()]
        lines.append(f"{t[0]} -> {t[1]} -> {t[2]} -> 0")
    return Report("abelianize", {}, result, checks, lines)


def cmd_gamma_series(spec: ProblemSpec) -> Report:
    from .eqgrp import lower_gamma_series

    o = _opts(spec, ("depth",))
    s = lower_gamma_series(spec.action, o["depth"])
    result = {"orders": s.orders(), "terms": [t.names() for t in s.terms], "stabilized_at": s.stabilized_at}
    lines = [f"Gamma_{i} = {{{', '.join(t.names())}}}" for i, t in enumerate(s.terms)]
    lines.append(f"stabilized_at = {s.stabilized_at if s.stabilized_at is not None else 'none'}")
    descending = all(set(b.elements) <= set(a.elements) for a, b in zip(s.terms, s.terms[1:]))
    checks = {"descending": descending, "normal_stable": all(t.normal and t.gamma_stable for t in s.terms)}
    return Report("gamma-series", o, result, checks, lines)


def cmd_extensions(spec: ProblemSpec) -> Report:
    from .ext import classify

    res = classify(spec.action, spec.module)
    lines = [
        f"normalized 2-cocycles = {res.cocycles}",
        f"extension classes = {res.classes}",
        f"H^2 = {res.h2} (order {res.h2.order})",
    ]
    checks = {"classes_match_h2": res.classes == res.h2.order, "pairwise_inequivalent": res.pairwise_inequivalent}
    return Report("extensions", {}, res.to_json(), checks, lines)


def cmd_les(spec: ProblemSpec) -> Report:
    from .cohom import les, tate_splice

    if spec.ses is None:
        raise ValidationError("the les command needs an 'ses' block", "ses")
    if isinstance(spec.ses, Exception):
        raise spec.ses
    o = _opts(spec, ("max_degree", "cap"))
    result, checks, lines = {}, {}, []
    for kind in ("cohomology", "homology"):
        rep = les(spec.action, spec.ses, o["max_degree"], kind, cap=o["cap"])
        result[kind] = rep.to_json()
        checks[f"{kind}_exact"] = all(rep.exact)
        checks[f"{kind}_additive"] = rep.additive
        lines.append(f"{kind}:")
        lines.extend(f"  {n.label} = {n.group}{'' if e else '  (not exact)'}" for n, e in zip(rep.nodes, rep.exact))
    try:
        rep = tate_splice(spec.action, spec.ses, cap=o["cap"])
    except PreconditionError as exc:
        result["tate"] = {"skipped": str(exc)}
        lines.append(f"tate: skipped ({exc})")
    else:
        result["tate"] = rep.to_json()
        checks["tate_exact"] = all(rep.exact)
        checks["tate_additive"] = rep.additive
        lines.append("tate (" + rep.notes[0] + "):")
        lines.extend(f"  {n.label} = {n.group}{'' if e else '  (not exact)'}" for n, e in zip(rep.nodes, rep.exact))
    return Report("les", o, result, checks, lines)


def verify_checks(spec: ProblemSpec, *, seed: int = 0) -> dict[str, bool | None]:
    """Property checks of every layer on one problem; ``None`` marks a check that does not apply."""
    from .bar import chain_complex, cochain_complex
    from .cohom import CupProduct, cohomology, derivations, homology, reduction_check, tate, uct_check
    from .eqgrp import (
        gamma_abelianization,
        gamma_commutator,
        gamma_commutator_by_generators,
        h1_comparison,
    )
    from .ext import DEFAULT_CAPS, classify
    from .gmod import augmentation_ideal, integers, invariants, norm_map, residual_gamma_invariants, tensor_over_GGamma
    from .zmod import tensor

    a, A = spec.action, spec.module
    o = _opts(spec, ("max_degree", "cap"))
    N, cap = o["max_degree"], o["cap"]
    out: dict[str, bool | None] = {}
    full = {}
    for kind, build in (("cochain", cochain_complex), ("chain", chain_complex)):
        cx = build(a, A, N + 1, cap=cap, check=False)
        try:
            cx.check()
            out[f"{kind}_complex"] = True
        except EqcohomError:
            out[f"{kind}_complex"] = False
        full[kind] = [cx.homology(n) for n in range(N + 1)]
        norm = build(a, A, N + 1, normalized=True, cap=cap)
        out[f"{kind}_normalized_agrees"] = full[kind] == [norm.homology(n) for n in range(N + 1)]
    out["derivations_h1"] = derivations(a, A).h1 == (full["cochain"][1] if N >= 1 else cohomology(a, A, 1)[1])
    Z = integers(a)
    h1z = homology(a, Z, 1)[1]
    ab = gamma_abelianization(a)
    out["abelianization_is_h1"] = ab.group == h1z
    out["augmentation_tensor_is_h1"] = tensor_over_GGamma(augmentation_ideal(a), Z) == h1z
    K = gamma_commutator(a)
    out["commutator_descriptions_agree"] = K == gamma_commutator_by_generators(a)
    out["commutator_normal_stable"] = K.normal and K.gamma_stable
    out["invariants_in_two_steps"] = invariants(A).group == residual_gamma_invariants(A).group
    out["h1_comparison"] = h1_comparison(a).ok
    trivial_module = A.is_trivial()
    out["augmentation_tensor_with_A"] = (
        tensor_over_GGamma(augmentation_ideal(a), A) == tensor(ab.group, A.carrier) if trivial_module else None
    )
    out["universal_coefficients"] = uct_check(a, A, N, cap=cap).ok if trivial_module else None
    out["reduction_law"] = reduction_check(a, A, N, cap=cap).ok if a.is_trivial() else None
    if norm_map(A).precondition:
        t = tate(a, A, -N - 1, N, cap=cap)
        out["tate_matches"] = all(t[n] == full["cochain"][n] for n in range(1, N + 1)) and all(
            t[-n - 1] == full["chain"][n] for n in range(1, N + 1)
        )
    else:
        out["tate_matches"] = None
    rng = random.Random(seed)
    cp = CupProduct(a, A, A, 2, cap=cap)
    out["cup_leibniz"] = all(
        cp.leibniz_holds(_random_cochain(cp.cxA, 1, rng), 1, _random_cochain(cp.cxA, 1, rng), 1) for _ in range(10)
    )
    size = 1
    for e in A.orders:
        size *= e
    in_caps = A.is_finite and a.g.order <= DEFAULT_CAPS["group"] and size <= DEFAULT_CAPS["module"] \
        and a.gamma.order <= DEFAULT_CAPS["gamma"]
    out["extension_classes"] = classify(a, A).ok if in_caps else None
    return out


def cmd_verify(spec: ProblemSpec) -> Report:
    o = _opts(spec, ("max_degree", "cap"))
    raw = verify_checks(spec)
    checks = {k: v for k, v in raw.items() if v is not None}
    skipped = sorted(k for k, v in raw.items() if v is None)
    lines = [f"skip {k}: not applicable" for k in skipped]
    return Report("verify", o, {"skipped": skipped}, checks, lines)


HANDLERS: dict[str, Callable[[ProblemSpec], Report]] = {
    "cohomology": lambda s: cmd_cohomology(s, "cohomology"),
    "homology": lambda s: cmd_cohomology(s, "homology"),
    "tate": cmd_tate,
    "derivations": cmd_derivations,
    "cup": cmd_cup,
    "abelianize": cmd_abelianize,
    "gamma-series": cmd_gamma_series,
    "extensions": cmd_extensions,
    "les": cmd_les,
    "verify": cmd_verify,
}


def run(command: str, spec: ProblemSpec) -> Report:
    if command not in HANDLERS:
        raise ValidationError(f"unknown command {command!r}")
    start = time.perf_counter()
    report = HANDLERS[command](spec)
    report.timings.setdefault("total", time.perf_counter() - start)
    return report


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eqcohom", description="(Co)homology of finite groups with operators.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("spec", help="problem document (JSON); '-' reads standard input")
    p.add_argument("--max-degree", type=int, dest="max_degree")
    p.add_argument("--from", type=int, dest="from_")
    p.add_argument("--to", type=int)
    p.add_argument("--convention", choices=("paper", "classical"))
    p.add_argument("--normalized", action="store_true", default=None)
    p.add_argument("--cap", type=int)
    p.add_argument("--depth", type=int, help="gamma-series depth")
    p.add_argument("--p", type=int, help="left cup degree")
    p.add_argument("--q", type=int, help="right cup degree")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--timings", action="store_true", help="include timings (output is then not reproducible)")
    return p


def _apply_flags(spec: ProblemSpec, args: argparse.Namespace) -> None:
    flags = {
        "max_degree": args.max_degree, "from": args.from_, "to": args.to, "convention": args.convention,
        "normalized": args.normalized, "cap": args.cap, "depth": args.depth, "p": args.p, "q": args.q,
    }
    for k, v in flags.items():
        if v is not None:
            spec.options[k] = v
    if spec.options.get("max_degree", 0) < 0:
        raise ValidationError("max degree must be nonnegative", "options.max_degree")
    if spec.options.get("cap", 1) < 1:
        raise ValidationError("cap must be positive", "options.cap")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.spec == "-":
            text = sys.stdin.read()
        else:
            try:
                with open(args.spec, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ValidationError(f"cannot read {args.spec}: {exc.strerror}") from None
        spec = parse_spec(text)
        _apply_flags(spec, args)
        report = run(args.command, spec)
    except CapExceeded as exc:
        print(f"error: cap exceeded: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return exc.exit_code
    except EqcohomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.write(render(report, args.format, timings=args.timings))
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
