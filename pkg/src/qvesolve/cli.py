"""Command-line front end ``qvesolve``.

Verbs
-----
run       solve one problem file with one solver, print the residual history
compare   run several solvers side by side
gen       write a seeded random problem file
pattern   print the support of the minimal solution
validate  parse and check a problem file

Exit codes: 0 converged (or success), 1 parse/validation error,
2 breakdown, 3 iteration limit.
"""

import argparse
import sys

import numpy as np

from .core import check_supersolution
from .generate import GenerationError, generate
from .positivity import positivity_pattern, solve_with_reduction
from .problem_io import ProblemFileError, build, dumps, load
from .report import SolveOptions
from .solvers import QVE_SOLVERS, get_solver
from .unilateral import solve_cr, solve_lr

ALL_SOLVERS = (*QVE_SOLVERS, "lr", "cr")
EXIT_PARSE = 1


def _parse_solver(text, default_splitting):
    name, _, splitting = text.partition(":")
    if name not in ALL_SOLVERS:
        raise ValueError(f"unknown solver {name!r}; choose from {', '.join(ALL_SOLVERS)}")
    return name, splitting or default_splitting


def _label(name, splitting):
    return f"{name}:{splitting}" if name in ("funit", "gs") else name


def _execute(loaded, name, splitting, opts, reduce):
    if name in ("lr", "cr"):
        if loaded.unilateral is None:
            raise ValueError(f"solver {name} requires an e4 problem")
        return (solve_lr if name == "lr" else solve_cr)(loaded.unilateral, opts)
    solver = get_solver(name, splitting)
    if reduce:
        return solve_with_reduction(loaded.problem, solver, opts)
    return solver(loaded.problem, opts)


def format_history(rep, label, timing=True):
    """Tab-separated residual history preceded by ``#`` summary lines."""
    lines = [
        f"# solver\t{label}",
        f"# status\t{rep.status.value}",
        f"# iterations\t{rep.iterations}",
    ]
    if rep.message:
        lines.append(f"# message\t{rep.message}")
    if rep.eliminated:
        lines.append(f"# eliminated\t{' '.join(str(i) for i in rep.eliminated)}")
    lines.append("iter\tresidual\telapsed" if timing else "iter\tresidual")
    for k, r in enumerate(rep.residuals):
        row = f"{k}\t{r:.6e}"
        if timing:
            row += f"\t{rep.times[k]:.6f}" if k < len(rep.times) else "\t"
        lines.append(row)
    return "\n".join(lines) + "\n"


def format_comparison(results, labels):
    """One row per iteration, one residual column per run.

    When both a Newton and a modified-Newton run are present, a
    ``mnewton<=newton`` column marks each row where both have a value.
    """
    names = [lab.split(":")[0] for lab in labels]
    pair = None
    for base, mod in (("newton", "mnewton"), ("newton-cr", "mnewton-cr"), ("newton", "mnewton-cr")):
        if base in names and mod in names:
            pair = (names.index(base), names.index(mod))
            break
    header = ["iter", *labels]
    if pair:
        header.append("mnewton<=newton")
    lines = []
    for lab, rep in zip(labels, results):
        if isinstance(rep, Exception):
            lines.append(f"# {lab}\tfailed: {rep}")
        else:
            lines.append(f"# {lab}\t{rep.status.value}\t{rep.iterations} iterations")
    lines.append("\t".join(header))
    hist = [[] if isinstance(r, Exception) else r.residuals for r in results]
    for k in range(max((len(h) for h in hist), default=0)):
        row = [str(k)] + [f"{h[k]:.6e}" if k < len(h) else "" for h in hist]
        if pair:
            hb, hm = hist[pair[0]], hist[pair[1]]
            if k < len(hb) and k < len(hm):
                row.append("pass" if hm[k] <= hb[k] * (1 + 1e-10) + 1e-300 else "fail")
            else:
                row.append("")
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _options(args):
    return SolveOptions(tol=args.tol, maxit=args.maxit)


def cmd_run(args):
    loaded = build(load(args.problem))
    name, splitting = _parse_solver(args.solver, args.splitting)
    rep = _execute(loaded, name, splitting, _options(args), args.reduce)
    _emit(format_history(rep, _label(name, splitting), timing=not args.no_timing), args.out)
    return rep.exit_code


def cmd_compare(args):
    loaded = build(load(args.problem))
    runs = [_parse_solver(s, args.splitting) for item in args.solver for s in item.split(",") if s]
    if not runs:
        raise ValueError("compare needs at least one --solver")
    labels = [_label(n, s) for n, s in runs]
    results = []
    for name, splitting in runs:
        try:
            results.append(_execute(loaded, name, splitting, _options(args), args.reduce))
        except (ValueError, ArithmeticError) as exc:
            results.append(exc)
    _emit(format_comparison(results, labels), args.out)
    codes = [1 if isinstance(r, Exception) else r.exit_code for r in results]
    return max(codes)


def cmd_gen(args):
    pf = generate(args.model, args.size, seed=args.seed, scale=args.scale, density=args.density)
    _emit(dumps(pf), args.out)
    return 0


def cmd_pattern(args):
    loaded = build(load(args.problem))
    pat = positivity_pattern(loaded.problem)
    lines = [
        f"# n\t{pat.n}",
        f"support\t{' '.join(str(i) for i in pat.support)}",
        f"eliminated\t{' '.join(str(i) for i in pat.eliminated)}",
        "popped\tinserted",
    ]
    lines += [f"{t}\t{' '.join(str(i) for i in new)}" for t, new in pat.trace]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_validate(args):
    pf = load(args.problem)
    loaded = build(pf)
    msg = [f"ok\t{pf.format}\tn={loaded.problem.n}"]
    if pf.supersolution is not None:
        if pf.supersolution.shape != (loaded.problem.n,) or not check_supersolution(loaded.problem, pf.supersolution):
            raise ProblemFileError("supersolution certificate fails: F(y) >= 0 does not hold")
        msg.append("supersolution\tok")
    if pf.expected is not None:
        x = pf.expected["x"]
        if x.shape != (loaded.problem.n,):
            raise ProblemFileError("expected.x has the wrong length")
        r = loaded.problem.M @ x - loaded.problem.a - loaded.problem.b.apply(x, x)
        msg.append(f"expected residual\t{float(np.max(np.abs(r))):.3e}")
    _emit("\n".join(msg) + "\n", args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="qvesolve", description="Minimal solutions of quadratic vector equations.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, solver_default=None, many=False):
        p.add_argument("problem", help="problem file (JSON)")
        if many:
            p.add_argument("--solver", action="append", default=[], help="solver[:splitting], repeatable or comma separated")
        elif solver_default:
            p.add_argument("--solver", default=solver_default, help=f"one of {', '.join(ALL_SOLVERS)}")
        p.add_argument("--splitting", default="order", help="splitting for funit/gs (order, order-swapped, depth, jacobi, half)")
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--maxit", type=int, default=500)
        p.add_argument("--reduce", action="store_true", help="solve on the support of the minimal solution")
        p.add_argument("--seed", type=int, default=0, help="accepted for reproducibility; solvers are deterministic")
        p.add_argument("--out", help="write output here instead of stdout")

    p_run = sub.add_parser("run", help="run one solver")
    common(p_run, solver_default="newton")
    p_run.add_argument("--no-timing", action="store_true", help="omit the elapsed-time column")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run several solvers")
    common(p_cmp, many=True)
    p_cmp.set_defaults(func=cmd_compare)

    p_gen = sub.add_parser("gen", help="generate a random problem file")
    p_gen.add_argument("model", help="generic, e1, e2, e3, e4 or treelike")
    p_gen.add_argument("--size", type=int, default=2)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--scale", type=float, default=None)
    p_gen.add_argument("--density", type=float, default=1.0)
    p_gen.add_argument("--out")
    p_gen.set_defaults(func=cmd_gen)

    for verb, func, text in (
        ("pattern", cmd_pattern, "print the positivity pattern"),
        ("validate", cmd_validate, "check a problem file"),
    ):
        p = sub.add_parser(verb, help=text)
        p.add_argument("problem")
        p.add_argument("--out")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProblemFileError as exc:
        print(f"qvesolve: {args.problem}: {exc}", file=sys.stderr)
    except (GenerationError, ValueError, OSError) as exc:
        print(f"qvesolve: error: {exc}", file=sys.stderr)
    return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
