"""Command-line front end.

Exit codes: 0 for success / "true" verdicts, 1 for semantic "false"
verdicts (including rejected proofs and fuzz violations), 2 for file or
parse errors, 3 for exceeded budgets.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from . import calculus, charform, decision, fuzz, io, synthesis
from .core import CausalTeam, Signature
from .errors import BudgetExceededError, CtlabError
from .intervention import InterventionSpec, intervene
from .semantics import SatContext, satisfies, team_kind
from .syntax import Formula, format_formula, parse, read_formula_lines

EXIT_FALSE = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3


class _Output:
    def __init__(self, machine: bool):
        self.machine = machine

    def emit(self, key: str, value, human: str | None = None):
        if self.machine:
            print(f"{key}={value}")
        else:
            print(human if human is not None else f"{key}: {value}")


def _load_sig(args) -> Signature:
    if args.sig:
        return io.load_signature(args.sig)
    raise CtlabError("a signature file is required (--sig), unless the "
                     "team file embeds one")


def _load_team(args, sig=None):
    with open(args.team, encoding="utf-8") as fh:
        obj = json.load(fh)
    if sig is None and args.sig:
        sig = io.load_signature(args.sig)
    return io.team_from_obj(obj, sig)


def _formulas(args, sig, attr="formula", file_attr="formula_file"
              ) -> list[Formula]:
    out: list[Formula] = []
    for text in getattr(args, attr, None) or []:
        out.append(parse(text, sig))
    path = getattr(args, file_attr, None)
    if path:
        with open(path, encoding="utf-8") as fh:
            out.extend(read_formula_lines(fh.read(), sig))
    return out


def _parse_do(text: str, sig: Signature) -> InterventionSpec:
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise CtlabError(f"malformed intervention conjunct {part!r}")
        var, val = part.split("=", 1)
        pairs.append((var.strip(), val.strip()))
    return InterventionSpec(sig, tuple(pairs))


# --- subcommands ------------------------------------------------------------

def cmd_check(args, out: _Output) -> int:
    team = _load_team(args)
    sig = team.signature
    formulas = _formulas(args, sig)
    if not formulas:
        raise CtlabError("no formula given")
    ctx = SatContext(semantics=team_kind(team), team_cap=args.team_cap)
    verdict = True
    for phi in formulas:
        holds = satisfies(team, phi, ctx)
        out.emit(f"sat {format_formula(phi)}", str(holds).lower(),
                 f"{format_formula(phi)}: {holds}")
        verdict = verdict and holds
    out.emit("verdict", str(verdict).lower(), f"verdict: {verdict}")
    return 0 if verdict else EXIT_FALSE


def cmd_intervene(args, out: _Output) -> int:
    team = _load_team(args)
    spec = _parse_do(args.do, team.signature)
    result = intervene(team, spec)
    text = io.dumps(io.team_to_obj(result))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        out.emit("written", args.out, f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_entail(args, out: _Output) -> int:
    sig = _load_sig(args)
    gamma = _formulas(args, sig, "gamma", "gamma_file")
    phi = parse(args.phi, sig)
    ctx = SatContext(semantics="g", team_cap=args.team_cap)
    result = decision.decide_entails(gamma, phi, sig, args.semantics, ctx,
                                     want_countermodel=True,
                                     jobs=args.jobs)
    out.emit("entails", str(result.holds).lower(),
             f"entails: {result.holds}")
    if not result.holds and result.countermodel is not None:
        text = io.dumps(io.team_to_obj(result.countermodel))
        if args.counterexample:
            with open(args.counterexample, "w", encoding="utf-8") as fh:
                fh.write(text)
            out.emit("counterexample", args.counterexample,
                     f"counterexample written to {args.counterexample}")
        else:
            sys.stdout.write(text)
    return 0 if result.holds else EXIT_FALSE


def cmd_emit(args, out: _Output) -> int:
    which = args.which
    if which in ("phi", "theta", "xi"):
        team = _load_team(args)
        sig = team.signature
    else:
        sig = _load_sig(args)
    if which == "phi":
        if isinstance(team, CausalTeam):
            if team.is_empty():
                raise CtlabError("the empty team carries no law")
            systems = [team.law]
        else:
            systems = team.registry()
        if len(systems) != 1:
            raise CtlabError("emit phi needs a single-law team")
        cf = charform.build_phi(systems[0], sig)
    elif which == "theta":
        cf = charform.build_theta(team.team_component(), sig)
    elif which == "xi":
        cf = charform.build_xi(team)
    elif which == "chi":
        cf = charform.build_chi(sig)
    elif which == "chik":
        cf = charform.build_chi_k(sig, args.k)
    elif which == "mu":
        cf = charform.build_mu(sig)
    elif which == "unf":
        cf = charform.build_unf(sig)
    elif which == "leadsto":
        cf = charform.build_leadsto(args.x, args.y, sig)
    elif which == "dc":
        cf = charform.build_direct_cause(args.x, args.y, sig)
    elif which == "beta_en":
        cf = charform.build_beta_en(args.var, sig)
    else:
        raise CtlabError(f"unknown formula family {which!r}")
    print(format_formula(cf.formula))
    return 0


def cmd_synthesize(args, out: _Output) -> int:
    with open(args.cls, encoding="utf-8") as fh:
        kind, sig, teams = io.class_from_obj(json.load(fh))
    kls = synthesis.TeamClass.of(kind, sig, teams)
    if args.target == "co":
        phi = synthesis.synthesize_co(kls)
    else:
        phi = synthesis.synthesize_cod(kls, sem_cap=args.sem_cap)
    print(format_formula(phi))
    return 0


def cmd_verify(args, out: _Output) -> int:
    with open(args.cls, encoding="utf-8") as fh:
        kind, sig, teams = io.class_from_obj(json.load(fh))
    kls = synthesis.TeamClass.of(kind, sig, teams)
    phi = parse(args.formula[0], sig)
    ok = synthesis.verify_defines(phi, kls, sig)
    out.emit("defines", str(ok).lower(), f"defines: {ok}")
    return 0 if ok else EXIT_FALSE


def cmd_proof(args, out: _Output) -> int:
    sig = _load_sig(args)
    paths = [p for p in args.derivation if p != "check"]
    if len(paths) != 1:
        raise CtlabError("proof takes one derivation file")
    with open(paths[0], encoding="utf-8") as fh:
        d = calculus.loads_derivation(fh.read(), sig)
    res = calculus.check_derivation(d, args.system, sig)
    out.emit("ok", str(res.ok).lower(), f"ok: {res.ok}")
    if res.ok:
        opens = sorted(f"{lab}: {format_formula(f)}"
                       for lab, f in res.assumptions)
        out.emit("conclusion", format_formula(res.conclusion),
                 f"conclusion: {format_formula(res.conclusion)}")
        for line in opens:
            out.emit("assumption", line, f"assumption {line}")
    else:
        out.emit("error", f"{res.path}: {res.error}",
                 f"rejected at node {res.path}: {res.error}")
    return 0 if res.ok else EXIT_FALSE


def cmd_fuzz_rule(args, out: _Output) -> int:
    sig = _load_sig(args)
    rules = ([args.rule] if args.rule != "all"
             else list(calculus.ALL_RULES))
    failures = 0
    for rule in rules:
        if args.jobs > 1:
            chunk = max(1, args.trials // args.jobs)
            seeds = [(args.seed + i, min(chunk, args.trials - i * chunk))
                     for i in range((args.trials + chunk - 1) // chunk)]
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                parts = list(pool.map(
                    lambda sx: fuzz.rule_soundness_fuzz(
                        rule, sig, trials=sx[1], team_cap=args.team_cap,
                        seed=sx[0]), seeds))
            report = parts[0]
            for p in parts[1:]:
                report.non_vacuous += p.non_vacuous
                report.violations.extend(p.violations)
                report.trials += p.trials
        else:
            report = fuzz.rule_soundness_fuzz(
                rule, sig, trials=args.trials, team_cap=args.team_cap,
                seed=args.seed)
        out.emit(f"rule {rule}",
                 f"violations={len(report.violations)} "
                 f"non_vacuous={report.non_vacuous} trials={report.trials}",
                 f"{rule}: {len(report.violations)} violation(s), "
                 f"{report.non_vacuous}/{report.trials} non-vacuous "
                 f"[{report.semantics}]")
        for v in report.violations[:5]:
            out.emit("violation", v.detail, f"  violation: {v.detail}")
        failures += len(report.violations)
    return 0 if failures == 0 else EXIT_FALSE


def _add_common(p):
    p.add_argument("--sig", help="signature JSON file")
    p.add_argument("--format", choices=("human", "machine"),
                   default="human")
    p.add_argument("--team-cap", type=int, default=12,
                   help="tensor-split team size cap")
    p.add_argument("--seed", type=int, default=2026)
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ctlab",
        description="Causal team semantics workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="model-check formulas on a team")
    p.add_argument("--team", required=True)
    p.add_argument("--formula", action="append")
    p.add_argument("--formula-file")
    _add_common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("intervene", help="apply do(X=x) to a team")
    p.add_argument("--team", required=True)
    p.add_argument("--do", required=True,
                   help="comma-separated equalities, e.g. 'X=1,Y=0'")
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(fn=cmd_intervene)

    p = sub.add_parser("entail", help="decide entailment exactly")
    p.add_argument("--semantics", choices=("c", "g"), required=True)
    p.add_argument("--gamma", action="append")
    p.add_argument("--gamma-file")
    p.add_argument("--phi", required=True)
    p.add_argument("--counterexample", help="write a countermodel here")
    _add_common(p)
    p.set_defaults(fn=cmd_entail)

    p = sub.add_parser("emit", help="emit a characteristic formula")
    p.add_argument("which", choices=("phi", "theta", "chi", "chik", "mu",
                                     "xi", "unf", "leadsto", "dc",
                                     "beta_en"))
    p.add_argument("--team", help="team file (phi, theta, xi)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--var")
    _add_common(p)
    p.set_defaults(fn=cmd_emit)

    p = sub.add_parser("synthesize", help="emit a defining formula for a "
                                          "team class")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--target", choices=("co", "cod"), required=True)
    p.add_argument("--sem-cap", type=int,
                   default=synthesis.DEFAULT_SEM_CAP)
    _add_common(p)
    p.set_defaults(fn=cmd_synthesize)

    p = sub.add_parser("verify", help="check that a formula defines a "
                                      "team class")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--formula", action="append", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("proof", help="check a derivation file")
    p.add_argument("derivation", nargs="+",
                   help="derivation file (an optional leading 'check' "
                        "verb is accepted)")
    p.add_argument("--system", choices=calculus.SYSTEMS, required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_proof)

    p = sub.add_parser("fuzz-rule", help="fuzz a rule for soundness")
    p.add_argument("--rule", required=True,
                   help="a rule name, or 'all'")
    p.add_argument("--trials", type=int, default=200)
    _add_common(p)
    p.set_defaults(fn=cmd_fuzz_rule)

    return ap


def main(argv=None) -> int:
    sys.setrecursionlimit(100_000)
    args = build_parser().parse_args(argv)
    out = _Output(args.format == "machine")
    try:
        return args.fn(args, out)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CtlabError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
