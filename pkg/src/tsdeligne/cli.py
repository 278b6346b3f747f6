"""Command-line front end.

Usage::

    tsdeligne COMMAND [SCENARIO] [--json PATH] [--seed S] [--random N] [--max-degree D] [--unicode]

Exit codes: 0 on success, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Callable, TextIO

from tsdeligne.axioms import check_tax1prime, check_tax2, tax2_preconditions
from tsdeligne.compat import (
    CoarseningMap,
    check_E_compatible,
    demo_join_vs_susp,
    demo_necessity_sing_in_reg,
    demo_necessity_sing_in_sing,
    self_compat_constrained,
)
from tsdeligne.errors import TsError
from tsdeligne.fgmod import FgModule, GradedModule, PrimeSet
from tsdeligne.perversity import (
    CodimPerversity,
    CoefficientData,
    PervValue,
    StratumPerversity,
    classify,
    dual,
    p_inverse,
)
from tsdeligne.sampling import random_graded, random_prime_set
from tsdeligne.scenario import Scenario, load_scenario
from tsdeligne.sheafcalc import costalk, hyper, stalk
from tsdeligne.space import Leaf, errors as space_errors, leaf_of, strata

COMMANDS = (
    "compute",
    "stalk",
    "costalk",
    "axioms",
    "compat",
    "dual",
    "classify",
    "pinv",
    "demo-invariance",
    "demo-necessity",
)


class CheckFailed(Exception):
    pass


class Context:
    def __init__(self, args: argparse.Namespace, out: TextIO):
        self.args = args
        self.out = out
        self.unicode = args.unicode

    def say(self, line: str = "") -> None:
        self.out.write(line + "\n")

    def table(self, G: GradedModule) -> str:
        return G.to_text(self.unicode)


def _space_ok(sc: Scenario, key: str = "space") -> None:
    sc.require(key)
    errs = space_errors(getattr(sc, key))
    if errs:
        raise TsError("; ".join(str(e) for e in errs))


def _perv(sc: Scenario):
    sc.require("perversity")
    return sc.perversity


def _codim_perv(sc: Scenario) -> CodimPerversity:
    perv = _perv(sc)
    if not isinstance(perv, CodimPerversity):
        raise TsError("this command needs a codimension-indexed perversity")
    return perv


def cmd_compute(ctx: Context, sc: Scenario) -> dict:
    _space_ok(sc)
    H = hyper(sc.space, _perv(sc))
    ctx.say(ctx.table(H))
    return {"hyper": H.to_text()}


def _per_stratum(ctx: Context, sc: Scenario, fn: Callable) -> dict:
    _space_ok(sc)
    perv = _perv(sc)
    if sc.stratum is not None:
        G = fn(sc.space, perv, sc.stratum)
        ctx.say(ctx.table(G))
        return {sc.stratum: G.to_text()}
    out = {}
    for s in strata(sc.space):
        G = fn(sc.space, perv, s)
        ctx.say(f"{s.id}: {ctx.table(G)}")
        out[s.id] = G.to_text()
    return out


def cmd_stalk(ctx: Context, sc: Scenario) -> dict:
    return {"stalks": _per_stratum(ctx, sc, stalk)}


def cmd_costalk(ctx: Context, sc: Scenario) -> dict:
    return {"costalks": _per_stratum(ctx, sc, costalk)}


def cmd_axioms(ctx: Context, sc: Scenario) -> dict:
    _space_ok(sc)
    perv = _perv(sc)
    coeffs = sc.coeffs
    a = check_tax1prime(sc.space, perv, coeffs)
    ctx.say(a.summary())
    report: dict = {"tax1prime": a.to_json()}
    ok = a.passed
    weak = bool(sc.weak)
    reasons = tax2_preconditions(sc.space, perv, coeffs or leaf_of(sc.space).coeffs, weak)
    if reasons:
        ctx.say("TAx2: skipped (" + "; ".join(reasons) + ")")
        report["tax2"] = {"skipped": reasons}
    else:
        b = check_tax2(sc.space, perv, coeffs, weak=weak)
        ctx.say(b.summary())
        report["tax2"] = b.to_json()
        ok = ok and b.passed
    if not ok:
        raise CheckFailed(report)
    return report


def _map(sc: Scenario) -> CoarseningMap:
    sc.require("space", "coarse_space", "map")
    _space_ok(sc)
    _space_ok(sc, "coarse_space")
    return CoarseningMap.from_spaces(sc.space, sc.coarse_space, dict(sc.map))


def cmd_compat(ctx: Context, sc: Scenario) -> dict:
    cmap = _map(sc)
    coeffs = sc.coeffs or CoefficientData()
    perv = _perv(sc)
    if sc.coarse_perversity is None:
        if not isinstance(perv, CodimPerversity):
            raise TsError("without coarse_perversity the perversity must be codimension-indexed")
        rep = self_compat_constrained(perv, cmap, coeffs)
        ctx.say(f"route: {rep.route or 'none'}")
        compat = rep.compat
        report = rep.to_json()
    else:
        compat = check_E_compatible(perv, sc.coarse_perversity, cmap, coeffs)
        report = compat.to_json()
    for o in compat.outcomes:
        mark = "pass" if o.passed else "FAIL"
        extra = f"  ({o.detail})" if o.detail else ""
        ctx.say(f"{o.source} -> {o.target}: {o.condition} {mark}{extra}")
    ctx.say("compatible" if compat.compatible else "not compatible")
    if not compat.compatible:
        raise CheckFailed(report)
    return report


def cmd_dual(ctx: Context, sc: Scenario) -> dict:
    perv = _perv(sc)
    codims = None
    if isinstance(perv, StratumPerversity):
        _space_ok(sc)
        codims = {s.id: s.codim for s in strata(sc.space)}
    d = dual(perv, codims)
    ctx.say(d.to_text())
    return {"dual": d.to_text()}


def cmd_classify(ctx: Context, sc: Scenario) -> dict:
    c = classify(_codim_perv(sc))
    ctx.say(c.label)
    for name, ok in c.conditions.items():
        where = f" at codim {c.failures[name]}" if name in c.failures else ""
        ctx.say(f"condition {name}: {'pass' if ok else 'FAIL'}{where}")
    ctx.say("efficient: " + ("yes" if c.is_efficient else "no, codims " + str([k for k, v in c.efficient.items() if not v])))
    return c.to_json()


def cmd_pinv(ctx: Context, sc: Scenario) -> dict:
    sc.require("m", "q")
    v = p_inverse(_codim_perv(sc), sc.m, sc.q, weak=bool(sc.weak), literal=bool(sc.literal))
    ctx.say(str(v))
    return {"m": sc.m, "q": str(sc.q), "value": str(v)}


def _inv_instance(rng: random.Random, max_degree: int):
    d = rng.randint(0, max_degree)
    X = Leaf(d, random_graded(rng, d, (2, 3, 5)))
    k = rng.randint(1, 3)
    p1 = rng.randint(-1, X.dim + 1)
    p2 = random_prime_set(rng, (2, 3, 5), allow_f=False)
    return k, X, p1, p2


def cmd_demo_invariance(ctx: Context, sc: Scenario | None) -> dict:
    args = ctx.args
    if args.random:
        rng = random.Random(args.seed)
        failures = []
        for i in range(args.random):
            k, X, p1, p2 = _inv_instance(rng, args.max_degree)
            rep = demo_join_vs_susp(k, X, p1, p2)
            if not rep.passed:
                failures.append(i)
                ctx.say(f"instance {i}: FAIL k={k} X={ctx.table(X.cohom)} p=({p1}, {p2})")
        ctx.say(f"{args.random - len(failures)}/{args.random} instances agree")
        report = {"instances": args.random, "seed": args.seed, "failures": failures}
        if failures:
            raise CheckFailed(report)
        return report
    if sc is None:
        raise TsError("demo-invariance needs a scenario file or --random N")
    sc.require("k", "link", "value")
    rep = demo_join_vs_susp(sc.k, sc.link, sc.value.p1, sc.value.p2, sc.inner, sc.coeffs)
    ctx.say(f"join: {ctx.table(rep.join)}")
    ctx.say(f"susp: {ctx.table(rep.susp)}")
    ctx.say(f"equal: {'yes' if rep.equal else 'no'}; compatible: {'yes' if rep.compat.compatible else 'no'}")
    if not rep.passed:
        raise CheckFailed(rep.to_json())
    return rep.to_json()


NECESSITY_P2 = (PrimeSet.empty(), PrimeSet.of(2), PrimeSet.of(3), PrimeSet.of(2, 3), PrimeSet.all_primes())
NECESSITY_E = (
    CoefficientData(FgModule(1), FgModule()),
    CoefficientData(FgModule(1), FgModule.cyclic(2)),
    CoefficientData(FgModule(), FgModule.cyclic(2)),
    CoefficientData(FgModule.parse("Z + Z/3"), FgModule.cyclic(2)),
)


def generic_link(d: int) -> Leaf:
    """Leaf with Z + Z/2 + Z/3 in every degree 0..d."""
    G = FgModule.parse("Z + Z/2 + Z/3")
    return Leaf(d, GradedModule(tuple((i, G) for i in range(d + 1))))


def cmd_demo_necessity(ctx: Context, sc: Scenario | None) -> dict:
    args = ctx.args
    if args.random:
        rng = random.Random(args.seed)
        bad = []
        for i in range(args.random):
            if rng.random() < 0.5:
                k = rng.choice((1, 3, 4))
                E = rng.choice(NECESSITY_E)
                v = PervValue(rng.randint(-2, k + 1), rng.choice(NECESSITY_P2))
                rep = demo_necessity_sing_in_reg(k, E, v)
                expect = rep.condition2 if k >= 3 else False
                if rep.match != expect:
                    bad.append(i)
                    ctx.say(f"instance {i}: sing-in-reg k={k} E={E.to_text()} p={v.to_text()} unexpected")
            else:
                d = rng.randint(1, max(1, args.max_degree))
                k = rng.randint(0, 3)
                sub = (PrimeSet.empty(), PrimeSet.of(2), PrimeSet.of(3), PrimeSet.of(2, 3))
                vbar = PervValue(rng.randint(-1, d - 1), rng.choice(sub))
                v = PervValue(rng.randint(-1, d + k + 1), rng.choice(sub))
                rep2 = demo_necessity_sing_in_sing(k, generic_link(d), v, vbar)
                if rep2.match != rep2.condition1:
                    bad.append(i)
                    ctx.say(f"instance {i}: sing-in-sing k={k} d={d} p={v.to_text()} pbar={vbar.to_text()} unexpected")
        ctx.say(f"{args.random - len(bad)}/{args.random} instances behave as predicted")
        report = {"instances": args.random, "seed": args.seed, "failures": bad}
        if bad:
            raise CheckFailed(report)
        return report
    if sc is None:
        raise TsError("demo-necessity needs a scenario file or --random N")
    sc.require("demo", "k", "value")
    if sc.demo == "sing-in-reg":
        rep = demo_necessity_sing_in_reg(sc.k, sc.coeffs or CoefficientData(), sc.value)
        ctx.say(f"link: {ctx.table(rep.link)}")
        ctx.say(f"stalk: {ctx.table(rep.stalk)}")
        ctx.say(f"coefficients: {ctx.table(rep.expected)}")
        ctx.say(f"match: {'yes' if rep.match else 'no'}")
        ctx.say("condition 2: " + ", ".join(f"{c} {'pass' if ok else 'FAIL'}" for c, ok in rep.conditions.items()))
        if rep.k >= 3:
            ctx.say(f"scenarios: {rep.scenarios}")
        return rep.to_json()
    if sc.demo == "sing-in-sing":
        sc.require("link", "value_bar")
        rep2 = demo_necessity_sing_in_sing(sc.k, sc.link, sc.value, sc.value_bar, sc.inner)
        ctx.say(f"coarse: {ctx.table(rep2.coarse)}")
        ctx.say(f"refined: {ctx.table(rep2.refined)}")
        ctx.say(f"match: {'yes' if rep2.match else 'no'}")
        ctx.say("condition 1: " + ", ".join(f"{c} {'pass' if ok else 'FAIL'}" for c, ok in rep2.conditions.items()))
        return rep2.to_json()
    raise TsError(f"demo-necessity does not run demo {sc.demo!r}")


HANDLERS = {
    "compute": cmd_compute,
    "stalk": cmd_stalk,
    "costalk": cmd_costalk,
    "axioms": cmd_axioms,
    "compat": cmd_compat,
    "dual": cmd_dual,
    "classify": cmd_classify,
    "pinv": cmd_pinv,
    "demo-invariance": cmd_demo_invariance,
    "demo-necessity": cmd_demo_necessity,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tsdeligne", description="Torsion-sensitive intersection cohomology calculator.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("scenario", nargs="?", help="scenario file")
    ap.add_argument("--json", metavar="PATH", help="also write a JSON report to PATH")
    ap.add_argument("--seed", type=int, default=0, help="seed for --random sweeps")
    ap.add_argument("--random", type=int, default=0, metavar="N", help="run N seeded random instances")
    ap.add_argument("--max-degree", type=int, default=4, metavar="D", help="largest leaf degree in random sweeps")
    ap.add_argument("--unicode", action="store_true", help="render groups with unicode symbols")
    return ap


def _write_json(path: str, report: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(argv: list[str], out: TextIO | None = None, err: TextIO | None = None) -> tuple[int, dict]:
    """Run one command; returns the exit code and the report written with ``--json``."""
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 2), {}
    ctx = Context(args, out)
    code = 0
    try:
        sc = load_scenario(args.scenario) if args.scenario else None
        if sc is None and not (args.command.startswith("demo-") and args.random):
            raise TsError(f"{args.command} needs a scenario file")
        result = HANDLERS[args.command](ctx, sc)
        status = "ok"
    except CheckFailed as exc:
        result, status, code = exc.args[0], "check_failed", 1
    except (TsError, ValueError, OSError) as exc:
        err.write(f"error: {exc}\n")
        result, status, code = {"error": str(exc)}, "input_error", 2
    report = {"command": args.command, "status": status, "result": result}
    if args.json:
        _write_json(args.json, report)
    return code, report


def main(argv: list[str] | None = None) -> int:
    code, _ = run(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
