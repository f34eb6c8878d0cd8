"""Command line front end: ``dliekit run FILE`` and single-check subcommands.

Exit codes: 0 when every check passes, 1 when a check fails (or a task
errors, e.g. the rewriting step budget is exceeded), 2 on input errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from . import connection as conn
from . import library as lib
from .cochain_chern import chern_cochain, chern_relation_check
from .dlie import check_dlie_axioms
from .jet_atiyah import (
    atiyah_sequence_check,
    connection_from_splitting,
    splitting_from_connection,
    splitting_report,
    splitting_round_trip,
)
from .lie_rinehart import LieRinehartPresentation, ScalarCochain, is_cocycle
from .nonabelian import check_end_dlie_axioms, image_order_check, rho_shriek_hom_check
from .poly_core import Derivation, ParseError, parse_poly
from .problem import Env, ProblemError, ResolutionError, TaskSpec, load, option
from .report import Report, stringify
from .tensor_env import (
    DEFAULT_BUDGET,
    QuotientKind,
    StepBudgetExceeded,
    almost_comm_witness,
    curvature_generators,
    evaluate,
    ideal_annihilation_check,
    normal_form,
    normal_form_ex,
    parse_tensor,
    random_tensor,
)


@dataclass
class Ctx:
    env: Env
    seed: int
    max_steps: int
    truncate: int | None


def _arg(task: TaskSpec, k: int, what: str) -> str:
    if len(task.args) <= k:
        raise ProblemError(f"task {task.name!r} needs a {what} argument")
    return task.args[k]


def _report_from_verdict(title: str, name: str, v, seed=None) -> Report:
    rep = Report(title, seed)
    rep.record(name, bool(v), getattr(v, "witness", None))
    return rep


def _lift_f(rho, f: ScalarCochain) -> ScalarCochain:
    """Accept a form on u_1..u_n or on Der_k(A) (pulled back along pi)."""
    T = rho.source
    if f.rank == T.n:
        return f
    if f.rank == T.nvars:
        return conn.lift_cochain(T, f)
    raise ProblemError(f"cocycle rank {f.rank} fits neither L~ ({T.n}) nor Der_k(A) ({T.nvars})")


def _nf_opts(ctx: Ctx) -> dict:
    return {"budget": ctx.max_steps, "max_degree": ctx.truncate}


# tasks ---------------------------------------------------------------------


def t_check_lr(ctx: Ctx, task: TaskSpec):
    L = ctx.env.lie(_arg(task, 0, "lie_rinehart"))
    return L.check(samples=option(task.opts, "samples", 50, int), seed=ctx.seed)


def t_check_cocycle(ctx: Ctx, task: TaskSpec):
    m = ctx.env.nvars
    if "f" in task.opts:
        val = parse_poly(task.opts["f"], m)
        f = ScalarCochain(m, m, 2, {(0, 1): val} if m >= 2 else {})
        label = f"f={task.opts['f']}"
    else:
        label = _arg(task, 0, "cocycle")
        f = ctx.env.cocycle(label)
    on = task.opts.get("on")
    L = ctx.env.lie(on) if on else LieRinehartPresentation.der(m)
    if f.rank != L.rank:
        raise ProblemError(f"cocycle {label} has rank {f.rank}, {L.name} has rank {L.rank}")
    rep = _report_from_verdict(f"cocycle[{label}]", "closed", is_cocycle(L, f), ctx.seed)
    return rep


def t_check_axioms(ctx: Ctx, task: TaskSpec):
    T = ctx.env.any_dlie(_arg(task, 0, "dlie"))
    return check_dlie_axioms(T, samples=option(task.opts, "samples", 50, int), seed=ctx.seed)


def t_cohomologous(ctx: Ctx, task: TaskSpec):
    L = ctx.env.lie(_arg(task, 0, "lie_rinehart"))
    f = ctx.env.cocycle(_arg(task, 1, "cocycle"))
    g = ctx.env.cocycle(_arg(task, 2, "1-cochain"))
    return lib.cohomologous_report(L, f, g, seed=ctx.seed)


def t_curvature(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    T = rho.source
    rep = Report(f"curvature[{rho.name}]", ctx.seed)
    values = {}
    bound = 0 if rho.is_identity else 1
    ok = True
    for i, j in itertools.combinations(range(T.rank), 2):
        R = conn.curvature(rho, T.basis(i), T.basis(j))
        order = conn.diff_order(R, 1)
        ok = ok and order is not None and order <= bound
        names = T.names()
        values[f"R({names[i]},{names[j]})"] = str(R.matrix()) if order == 0 else str(R)
    rep.record(f"order_le_{bound}", ok)
    rep.values = values
    return rep


def t_transfer(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    return conn.curvature_transfer_check(rho, samples=option(task.opts, "samples", 50, int), seed=ctx.seed)


def t_correspondence(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    return conn.correspondence_report(rho, seed=ctx.seed)


def t_curvature_type(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    f = _lift_f(rho, ctx.env.cocycle(_arg(task, 1, "cocycle")))
    return _report_from_verdict(f"curvature_type[{rho.name}]", "curvature_type", conn.curvature_type_check(rho, f), ctx.seed)


def t_annihilation(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    f = _lift_f(rho, ctx.env.cocycle(_arg(task, 1, "cocycle")))
    ann = ideal_annihilation_check(rho, curvature_generators(rho.source, f))
    ct = conn.curvature_type_check(rho, f)
    rep = Report(f"annihilation[{rho.name}]", ctx.seed)
    rep.record("equivalence", bool(ann) == bool(ct), {"annihilated": ann.witness, "curvature_type": ct.witness})
    rep.values = {"annihilated": bool(ann), "curvature_type": bool(ct)}
    return rep


def t_nf(ctx: Ctx, task: TaskSpec):
    T = ctx.env.any_dlie(_arg(task, 0, "dlie"))
    kind = QuotientKind.parse(task.opts.get("kind", "utensor"))
    if "expr" not in task.opts:
        raise ProblemError("nf needs expr=...")
    try:
        el = parse_tensor(task.opts["expr"], T)
    except ParseError as e:
        raise ProblemError(f"expr: {e}") from None
    res = normal_form_ex(el, kind, task.opts.get("strategy", "leftmost"), **_nf_opts(ctx))
    rep = Report(f"nf[{kind.value}]", ctx.seed)
    rep.record("terminated", True, count=res.steps)
    rep.values = {"normal_form": str(res.element), "degree": res.element.degree(), "steps": res.steps}
    return rep


def t_nf_suite(ctx: Ctx, task: TaskSpec):
    """Idempotence, and strategy agreement for tilde kinds, on random elements."""
    T = ctx.env.any_dlie(_arg(task, 0, "dlie"))
    kinds = [QuotientKind.parse(task.opts["kind"])] if "kind" in task.opts else list(QuotientKind)
    samples = option(task.opts, "samples", 100, int)
    max_len = option(task.opts, "degree", 4, int)
    rep = Report(f"nf_suite[{T.name}]", ctx.seed)
    opts = _nf_opts(ctx)
    for kind in kinds:
        rng = random.Random(ctx.seed)
        bad_idem = bad_conf = None
        steps = 0
        for _ in range(samples):
            el = random_tensor(rng, T, max_len=max_len)
            r = normal_form_ex(el, kind, **opts)
            steps = max(steps, r.steps)
            if normal_form(r.element, kind, **opts) != r.element and bad_idem is None:
                bad_idem = str(el)
            if kind.tilde and bad_conf is None:
                other = normal_form(el, kind, "rightmost", **opts)
                if other != r.element:
                    bad_conf = {"element": str(el), "leftmost": str(r.element), "rightmost": str(other)}
        rep.record(f"idempotent[{kind.value}]", bad_idem is None, bad_idem, samples)
        if kind.tilde:
            rep.record(f"strategies_agree[{kind.value}]", bad_conf is None, bad_conf, samples)
        rep.record(f"within_budget[{kind.value}]", steps <= ctx.max_steps, steps, samples)
    return rep


def t_evaluation(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    kinds = [QuotientKind.parse(task.opts["kind"])] if "kind" in task.opts else [QuotientKind.UTensor, QuotientKind.URho]
    samples = option(task.opts, "samples", 50, int)
    rep = Report(f"evaluation[{rho.name}]", ctx.seed)
    for kind in kinds:
        rng = random.Random(ctx.seed)
        bad = None
        for _ in range(samples):
            el = random_tensor(rng, rho.source, max_len=option(task.opts, "degree", 3, int), max_coeff_deg=2)
            if evaluate(normal_form(el, kind, **_nf_opts(ctx)), rho) != evaluate(el, rho):
                bad = str(el)
                break
        rep.record(f"invariant[{kind.value}]", bad is None, bad, samples)
    return rep


def t_almost_comm(ctx: Ctx, task: TaskSpec):
    T = ctx.env.any_dlie(_arg(task, 0, "dlie"))
    kinds = [QuotientKind.parse(task.opts["kind"])] if "kind" in task.opts else [QuotientKind.UTensorTilde, QuotientKind.URhoTilde]
    samples = option(task.opts, "samples", 100, int)
    deg = option(task.opts, "degree", 3, int)
    rep = Report(f"almost_comm[{T.name}]", ctx.seed)
    for kind in kinds:
        rng = random.Random(ctx.seed)
        bad = None
        for _ in range(samples):
            x = random_tensor(rng, T, max_len=deg, max_coeff_deg=2)
            y = random_tensor(rng, T, max_len=deg, max_coeff_deg=2)
            w = almost_comm_witness(x, y, kind, **_nf_opts(ctx))
            if not w["ok"]:
                bad = {"x": str(x), "y": str(y), **w}
                break
        rep.record(f"filtration_drop[{kind.value}]", bad is None, bad, samples)
    return rep


def t_projective_curvature(ctx: Ctx, task: TaskSpec):
    pb = ctx.env.basis(_arg(task, 0, "projective_basis"))
    m = pb.nvars
    i, j = option(task.opts, "i", 1, int) - 1, option(task.opts, "j", 2, int) - 1
    rep = conn.idempotent_curvature_check(pb, Derivation.partial(m, i), Derivation.partial(m, j))
    rep.seed = ctx.seed
    rep.values = {"M": str(rep.M)}
    return rep


def t_rkl(ctx: Ctx, task: TaskSpec):
    pb = ctx.env.basis(_arg(task, 0, "projective_basis"))
    m = pb.nvars
    rep = Report(f"rkl[{pb.name}]", ctx.seed)
    bad = None
    for i, j in itertools.product(range(m), repeat=2):
        v = conn.rkl_antisymmetry_check(pb, Derivation.partial(m, i), Derivation.partial(m, j))
        if not v:
            bad = (i + 1, j + 1, v.witness)
            break
    rep.record("antisymmetrization", bad is None, bad)
    ring = conn.ring_map_check(pb)
    rep.values = {"ring_map": bool(ring), "ring_map_witness": ring.witness}
    return rep


def t_diff_orders(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    return conn.diff_order_report(rho, seed=ctx.seed, max_len=option(task.opts, "length", 3, int))


def t_end_ext(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    check = task.opts.get("check", "axioms")
    if check == "axioms":
        return check_end_dlie_axioms(rho, samples=option(task.opts, "samples", 50, int), seed=ctx.seed)
    if check == "hom":
        return rho_shriek_hom_check(rho, samples=option(task.opts, "samples", 50, int), seed=ctx.seed,
                                    exhaustive=task.opts.get("exhaustive", "no") in ("1", "yes", "true"))
    if check == "orders":
        return image_order_check(rho, degree=option(task.opts, "degree", 3, int),
                                 samples=option(task.opts, "samples", 30, int), seed=ctx.seed)
    raise ProblemError(f"end-ext: unknown check {check!r}")


def t_jet(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    check = task.opts.get("check", "split")
    if check == "split":
        rep = splitting_report(splitting_from_connection(rho), rho.source, rho.r, seed=ctx.seed)
        reading = connection_from_splitting(splitting_from_connection(rho), rho.source, rho.r, seed=ctx.seed)
        rep.values = {"recovered_psi": None if reading.psi is None else str(reading.psi)}
        return rep
    if check == "roundtrip":
        return _report_from_verdict(f"jet_roundtrip[{rho.name}]", "roundtrip", splitting_round_trip(rho, seed=ctx.seed), ctx.seed)
    if check == "sequence":
        return atiyah_sequence_check(rho.source, rho.r, seed=ctx.seed)
    raise ProblemError(f"jet: unknown check {check!r}")


def t_chern(ctx: Ctx, task: TaskSpec):
    rho = ctx.env.connection(_arg(task, 0, "connection"))
    f = _lift_f(rho, ctx.env.cocycle(_arg(task, 1, "cocycle")))
    k = option(task.opts, "k", 2, int)
    require = task.opts.get("require", "yes") not in ("0", "no", "false")
    rep = Report(f"chern[{rho.name}, k={k}]", ctx.seed)
    if require:
        ct = conn.curvature_type_check(rho, f)
        rep.record("curvature_type", bool(ct), ct.witness)
    v = chern_relation_check(rho, f, k, require_curvature_type=False)
    rep.record("relation", bool(v), v.witness)
    rep.values = {"c1": str(chern_cochain(rho, 1)), f"c{k}": str(chern_cochain(rho, k))}
    return rep


TASKS: dict[str, Callable] = {
    "check-lr": t_check_lr,
    "check-cocycle": t_check_cocycle,
    "check-axioms": t_check_axioms,
    "cohomologous": t_cohomologous,
    "curvature": t_curvature,
    "curvature-transfer": t_transfer,
    "psi-correspondence": t_correspondence,
    "curvature-type": t_curvature_type,
    "annihilation": t_annihilation,
    "nf": t_nf,
    "nf-suite": t_nf_suite,
    "evaluation": t_evaluation,
    "almost-comm": t_almost_comm,
    "projective-curvature": t_projective_curvature,
    "rkl": t_rkl,
    "diff-orders": t_diff_orders,
    "end-ext": t_end_ext,
    "jet": t_jet,
    "chern": t_chern,
}


# runner --------------------------------------------------------------------


class InputError(Exception):
    pass


def run_task(env: Env, task: TaskSpec, index: int, seed: int, max_steps: int, truncate: int | None, timings: bool) -> dict:
    fn = TASKS.get(task.name)
    out = {"index": index, "task": task.text, "seed": seed + index}
    if fn is None:
        raise InputError(f"line {task.line}: unknown task {task.name!r}")
    expect_fail = task.opts.pop("expect", "pass") == "fail"
    ctx = Ctx(env, seed + index, max_steps, truncate)
    t0 = time.perf_counter()
    try:
        rep = fn(ctx, task)
    except (ProblemError, ResolutionError, KeyError) as e:
        raise InputError(f"line {task.line}: {e}") from None
    except (StepBudgetExceeded, ArithmeticError, ValueError) as e:
        # budget exhaustion and unmet domain preconditions (e.g. psi != Id)
        out.update(status="error", error=str(e))
        return out
    passed = rep.passed
    if expect_fail:
        out["expected"] = "fail"
        passed = not passed
    out["status"] = "pass" if passed else "fail"
    out["checks"] = rep.to_json()["checks"]
    if getattr(rep, "values", None) is not None:
        out["values"] = stringify(rep.values)
    if timings:
        out["seconds"] = round(time.perf_counter() - t0, 4)
    return out


def run_problem(text: str, seed: int = 0, max_steps: int = DEFAULT_BUDGET, truncate: int | None = None,
                parallel: bool = False, timings: bool = False, label: str = "<input>") -> dict:
    try:
        pf, env = load(text)
    except ProblemError as e:
        raise InputError(str(e)) from None
    for t in pf.tasks:
        if t.name not in TASKS:
            raise InputError(f"line {t.line}: unknown task {t.name!r}")

    def one(it):
        k, t = it
        return run_task(env, t, k, seed, max_steps, truncate, timings)

    if parallel:
        with ThreadPoolExecutor() as ex:
            results = list(ex.map(one, enumerate(pf.tasks)))
    else:
        results = [one(it) for it in enumerate(pf.tasks)]
    status = "pass" if all(r["status"] == "pass" for r in results) else "fail"
    return {"file": label, "seed": seed, "status": status, "tasks": results}


def _emit(report: dict, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
        return
    for r in report["tasks"]:
        line = f"[{r['status']}] {r['task']}"
        if r.get("error"):
            line += f"  ({r['error']})"
        out.write(line + "\n")
        for c in r.get("checks", []):
            if c["status"] == "fail":
                out.write(f"    fail {c['name']}: {json.dumps(c['witness'], ensure_ascii=False)}\n")
        for k, v in (r.get("values") or {}).items():
            out.write(f"    {k} = {v}\n")
    out.write(f"{report['status']}\n")


def _single(task_line: str, file: str | None) -> str:
    """A problem text with one task, on top of an optional file's declarations."""
    base = ""
    if file:
        with open(file, encoding="utf-8") as fh:
            base = fh.read()
        base = _drop_tasks(base)
    return base + "\ntasks {\n" + task_line + "\n}\n"


def _drop_tasks(text: str) -> str:
    k = text.find("tasks")
    while k >= 0:
        before = text[:k]
        if before.strip() == "" or before.rstrip().endswith("}"):
            end = text.find("}", k)
            return text[:k] + text[end + 1:]
        k = text.find("tasks", k + 1)
    return text


def _quote(s: str) -> str:
    return "'" + s.replace("'", "'\"'\"'") + "'"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dliekit", description="Exact checks for D-Lie algebras, connections and their universal rings.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-steps", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--truncate-degree", type=int, default=None)
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--timings", action="store_true", help="include per-task wall time (not deterministic)")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", parents=[common], help="run every task of a problem file")
    r.add_argument("path", nargs="?")
    r.add_argument("--file", dest="file_opt")
    r.add_argument("--parallel", action="store_true")

    n = sub.add_parser("nf", parents=[common], help="normal form of a tensor expression")
    n.add_argument("--kind", default="utensor")
    n.add_argument("--expr", required=True)
    n.add_argument("--algebra", default="der2_const", help="D-Lie algebra name (library or --file)")
    n.add_argument("--strategy", default="leftmost", choices=["leftmost", "rightmost"])
    n.add_argument("--file")

    e = sub.add_parser("end-ext", parents=[common], help="checks on End(L~, E)")
    e.add_argument("--connection", default="curvature_type")
    e.add_argument("--check", default="axioms", choices=["axioms", "hom", "orders"])
    e.add_argument("--degree", type=int, default=3)
    e.add_argument("--file")

    j = sub.add_parser("jet", parents=[common], help="jet splittings of a connection")
    j.add_argument("--connection", default="curvature_type")
    j.add_argument("--check", default="split", choices=["split", "roundtrip", "sequence"])
    j.add_argument("--file")

    c = sub.add_parser("chern", parents=[common], help="Chern relation r^(k-1) c_k = c_1^k")
    c.add_argument("--connection", default="chern4")
    c.add_argument("--cocycle", default="chern4")
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--file")

    k = sub.add_parser("check-cocycle", parents=[common], help="closedness of a 2-form")
    k.add_argument("--cocycle")
    k.add_argument("--value", help="polynomial f with the form f dx1 ^ dx2")
    k.add_argument("--on", help="Lie-Rinehart algebra name (default Der_k(A))")
    k.add_argument("--file")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "run":
            path = args.path or args.file_opt
            if not path:
                raise InputError("run needs a problem file")
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as e:
                raise InputError(str(e)) from None
            report = run_problem(text, args.seed, args.max_steps, args.truncate_degree,
                                 args.parallel, args.timings, label=path)
        else:
            if args.cmd == "nf":
                line = f"nf {args.algebra} kind={args.kind} strategy={args.strategy} expr={_quote(args.expr)}"
            elif args.cmd == "end-ext":
                line = f"end-ext {args.connection} check={args.check} degree={args.degree}"
            elif args.cmd == "jet":
                line = f"jet {args.connection} check={args.check}"
            elif args.cmd == "chern":
                line = f"chern {args.connection} {args.cocycle} k={args.k}"
            else:
                if args.value is not None:
                    line = f"check-cocycle f={_quote(args.value)}"
                elif args.cocycle:
                    line = f"check-cocycle {args.cocycle}"
                else:
                    raise InputError("check-cocycle needs --cocycle or --value")
                if args.on:
                    line += f" on={args.on}"
            try:
                text = _single(line, args.file)
            except OSError as e:
                raise InputError(str(e)) from None
            report = run_problem(text, args.seed, args.max_steps, args.truncate_degree,
                                 False, args.timings, label=args.file or "<library>")
    except InputError as e:
        print(f"dliekit: input error: {e}", file=sys.stderr)
        return 2
    _emit(report, args.json)
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
