"""Command-line front end: ``tww <command> [<subcommand>] [flags]``.

Every witness is re-checked before it is reported. Exit codes: 0 success,
1 usage, 2 input error, 3 failed re-verification (a bug), 4 size limit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .bst import STRATEGIES, TERNARY, bst_build, bst_validate, check_branch, left_to_right, order_rank
from .chain_order import (
    IntervalFamily,
    budget,
    chain_quasi_order,
    extract_nonoverlapping,
    oriented_budget,
    verify_extraction,
)
from .errors import BudgetUnderflow, InputError, KindMismatch, NotInImage, SizeLimitError, TwwError
from .fo_logic import ds_formula, fvs_formula, model_check, parse, to_sexp
from .formats import (
    read_bst,
    read_digraph,
    read_family,
    read_matrix,
    read_permutation,
    read_sequence,
    write_bst,
    write_digraph,
    write_permutation,
    write_sequence,
)
from .graph import independence_number, is_transitive
from .matrix import (
    Matrix,
    MatrixClassKind,
    adjacency_matrix,
    apply_log,
    build_M,
    diversity,
    find_grid_division,
    find_rank_division,
    is_k_grid,
    is_rank_division,
    normalize_matrix_class,
)
from .obstructions import (
    ObstructionKind,
    build_F,
    decode_roles,
    disjointify_division,
    enumerate_family,
    extend_sigma,
    restrict_extension,
    separated,
)
from .permutation import Permutation, contains_pattern, grid_permutation, max_grid
from .structure import from_graph
from .twin_width import (
    approximate_tournament_tww,
    exact_twin_width,
    verify_approx,
    width_of_sequence,
)

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_VERIFY, EXIT_SIZE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class VerificationFailed(TwwError):
    """A witness did not pass its independent re-check."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Context:
    """Inputs read so far (for digests) and shared flags."""

    def __init__(self, args):
        self.args = args
        self.digests: dict[str, str] = {}

    def read(self, label: str, path: str) -> str:
        data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
        self.digests[label] = hashlib.sha256(data).hexdigest()
        return data.decode("utf-8")

    def graph(self, label: str = "input", path: str | None = None, kind: str | None = None):
        path = path or self.args.input
        if path is None:
            raise UsageError("--input is required")
        g = read_digraph(self.read(label, path), kind or self.args.kind)
        cap = self.args.max_n
        if cap is not None and g.n > cap:
            raise SizeLimitError("input", g.n, cap)
        return g

    def tree(self, g, spec: str | None):
        spec = spec or "build:random"
        if spec.startswith("build:"):
            strategy = spec[len("build:"):]
            if strategy not in STRATEGIES:
                raise UsageError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
            return bst_build(g, strategy, seed=self.args.seed)
        t = read_bst(self.read("bst", spec))
        if t.n != g.n:
            raise InputError(f"tree has {t.n} nodes, graph has {g.n} vertices")
        return t


def _check(ok: bool, what: str) -> None:
    if not ok:
        raise VerificationFailed(f"re-verification failed: {what}")


def _division_dict(d) -> dict | None:
    if d is None:
        return None
    return {"row_cuts": list(d.row_cuts), "col_cuts": list(d.col_cuts)}


def _require_tournament(g) -> None:
    if not g.is_tournament():
        raise KindMismatch("this command needs a tournament")


# tww


def cmd_tww_approx(ctx: Context) -> dict:
    a = ctx.args
    g = ctx.graph()
    _require_tournament(g)
    tree = None
    if a.bst and not a.bst.startswith("build:"):
        tree = ctx.tree(g, a.bst)
    strategy = a.bst[len("build:"):] if a.bst and a.bst.startswith("build:") else "random"
    if strategy not in STRATEGIES:
        raise UsageError(f"unknown strategy {strategy!r}")
    r = approximate_tournament_tww(g, a.k, strategy=strategy, seed=a.seed, tree=tree)
    _check(verify_approx(g, r), "approximation witness")
    out = {"witness": r.kind, "k": a.k, "order": r.order, "verified": True, "notes": r.notes}
    if r.division is not None:
        out["division"] = _division_dict(r.division)
        out["division_search"] = "exhaustive" if r.division_exact else "heuristic"
    else:
        out["width"] = r.report.width
        out["sequence"] = [list(m) for m in r.sequence.merges]
        out["width_report"] = r.report.to_dict()
    return out


def cmd_tww_exact(ctx: Context) -> dict:
    g = ctx.graph()
    s = from_graph(g)
    width, seq = exact_twin_width(s)
    _check(width_of_sequence(s, seq, mode="recompute").width == width, "sequence replay")
    ctx.artifact = write_sequence(seq)
    return {"width": width, "sequence": [list(m) for m in seq.merges], "verified": True}


def cmd_tww_check(ctx: Context) -> dict:
    a = ctx.args
    g = ctx.graph()
    seq = read_sequence(ctx.read("sequence", a.sequence))
    if seq.n != g.n:
        raise InputError(f"sequence is on {seq.n} vertices, graph has {g.n}")
    s = from_graph(g)
    rep = width_of_sequence(s, seq)
    _check(width_of_sequence(s, seq, mode="recompute") == rep, "incremental and recomputed widths differ")
    return {"width_report": rep.to_dict(), "width": rep.width, "verified": True}


# extraction and the composite pipeline


def _family(ctx: Context, g, t):
    spec = ctx.args.family
    if spec in (None, "singletons"):
        return IntervalFamily.singletons(left_to_right(t))
    return read_family(ctx.read("family", spec))


def _extraction_dict(e, problems) -> dict:
    tr = e.trace
    return {
        "chain": list(e.chain),
        "orientation": e.orientation,
        "parts": [list(p) for p in e.parts.parts],
        "count": len(e.parts),
        "trace": {
            "branch": tr.branch,
            "weights": tr.weights,
            "indices": tr.indices,
            "arity": tr.arity,
            "side": tr.side,
            "removed": tr.removed,
            "dropped_parts": tr.dropped_parts,
        },
        "verified": not problems,
    }


def cmd_extract(ctx: Context) -> dict:
    a = ctx.args
    g = ctx.graph()
    t = ctx.tree(g, a.bst)
    fam = _family(ctx, g, t)
    if a.k == 0:
        return {"chain": [], "orientation": "+", "parts": [], "count": 0, "verified": True}
    e = extract_nonoverlapping(g, t, fam, a.k, enforce_budget=a.enforce_budget)
    problems = verify_extraction(g, e) + e.trace.check()
    _check(not problems, "; ".join(problems))
    out = _extraction_dict(e, problems)
    if g.is_tournament():
        arity = 3 if t.arity == TERNARY else 2
        out["budget"] = budget(a.k, arity)
    else:
        out["budget"] = oriented_budget(a.k, independence_number(g))
    out["budget_enforced"] = a.enforce_budget
    return out


def grid_pipeline(g, t, k: int, target: int | None = None) -> dict:
    """Ordered adjacency matrix, then a division into 2k' row and 2k' column
    intervals with k-diverse cells, then disjoint halves, then one extraction
    per half. ``k'`` defaults to ``budget(k)`` so each extraction keeps k parts.
    """
    kp = budget(k) if target is None else target
    out: dict = {"k": k, "target": kp}

    def stop(stage, reason):
        out.update(status="not-found", stage=stage, reason=reason)
        return out

    if k < 1 or kp < 1:
        return stop("rank-division", "k and the target must be positive")
    order = left_to_right(t)
    m = adjacency_matrix(g, order)
    res = find_rank_division(m, k, parts=2 * kp)
    out["rank_division_search"] = "exhaustive" if res.exact else "heuristic"
    if not res.found:
        return stop("rank-division", f"no division into {2 * kp} parts with {k}-diverse cells ({res.status})")
    d = res.division
    _check(is_rank_division(m, d, k) if kp == k else _all_diverse(m, d, k), "division cells")
    out["division"] = _division_dict(d)
    rows = [[order[i] for i in r] for r in d.row_parts(m.rows)]
    cols = [[order[i] for i in c] for c in d.col_parts(m.cols)]
    try:
        ra, cb, how = disjointify_division(order, rows, cols)
    except ValueError as exc:
        return stop("disjointify", str(exc))
    _check(separated(order, ra, cb), "disjoint halves")
    out["disjointify"] = how
    halves = {}
    for name, parts in (("A", ra), ("B", cb)):
        e = extract_nonoverlapping(g, t, IntervalFamily.of(parts), k)
        problems = verify_extraction(g, e) + e.trace.check()
        _check(not problems, f"extraction {name}: " + "; ".join(problems))
        halves[name] = e
        out[f"extraction_{name}"] = _extraction_dict(e, problems)
    ea, eb = halves["A"], halves["B"]
    if len(ea.parts) < k or len(eb.parts) < k:
        return stop("extraction", f"kept {len(ea.parts)} and {len(eb.parts)} parts, need {k}")
    cells = []
    for pa in ea.parts.parts:
        row = []
        for pb in eb.parts.parts:
            sub = Matrix.of([[int(g.has_arc(u, v)) for v in pb] for u in pa], 2)
            row.append(list(diversity(sub)))
        cells.append(row)
    _check(all(min(c) >= k for r in cells for c in r), "cell diversity")
    qa = chain_quasi_order(g, ea.chain, ea.orientation)
    qb = chain_quasi_order(g, eb.chain, eb.orientation)
    out["representation"] = {
        "A": [list(p) for p in ea.parts.parts],
        "B": [list(p) for p in eb.parts.parts],
        "quasi_order_A": {"chain": list(ea.chain), "orientation": ea.orientation, "classes": len(qa.classes)},
        "quasi_order_B": {"chain": list(eb.chain), "orientation": eb.orientation, "classes": len(qb.classes)},
        "cell_diversity": cells,
    }
    out["status"] = "found"
    out["verified"] = True
    return out


def _all_diverse(m, d, k) -> bool:
    rp, cp = d.row_parts(m.rows), d.col_parts(m.cols)
    return all(min(diversity(m.submatrix(r, c))) >= k for r in rp for c in cp)


def cmd_grid_pipeline(ctx: Context) -> dict:
    a = ctx.args
    g = ctx.graph()
    _require_tournament(g)
    t = ctx.tree(g, a.bst)
    return grid_pipeline(g, t, a.k, a.target)


# bst


def cmd_bst_build(ctx: Context) -> dict:
    a = ctx.args
    g = ctx.graph()
    t = bst_build(g, a.strategy, seed=a.seed)
    _check(bst_validate(g, t) is None, "tree validity")
    ctx.artifact = write_bst(t)
    return {"arity": t.arity, "root": t.root, "depth": t.depth(), "order": left_to_right(t), "verified": True}


def cmd_bst_check(ctx: Context) -> dict:
    g = ctx.graph()
    t = read_bst(ctx.read("tree", ctx.args.tree))
    if t.n != g.n:
        raise InputError(f"tree has {t.n} nodes, graph has {g.n} vertices")
    v = bst_validate(g, t)
    out = {"valid": v is None}
    if v is not None:
        out["violation"] = {"node": v.node, "child": v.child, "reason": v.reason}
        return out
    rank = order_rank(left_to_right(t))
    bad = [leaf for leaf in t.leaves() if not check_branch(g, t, leaf, rank)]
    out["branches_checked"] = len(t.leaves())
    out["bad_branches"] = bad
    out["order"] = left_to_right(t)
    return out


# obstructions


def _perm(ctx: Context, label: str, path: str | None) -> Permutation:
    if path is None:
        raise UsageError(f"--{label} is required")
    return read_permutation(ctx.read(label, path))


def cmd_obstruct_gen(ctx: Context) -> dict:
    a = ctx.args
    r = ObstructionKind.parse(a.kind)
    sigma = _perm(ctx, "perm", a.perm)
    used = extend_sigma(r, sigma) if a.extend else sigma
    t, roles = build_F(r, used)
    ctx.artifact = write_digraph(t)
    return {"kind": r.value, "permutation": list(used.image), "n": t.n, "x": list(roles.x), "y": list(roles.y)}


def cmd_obstruct_decode(ctx: Context) -> dict:
    a = ctx.args
    r = ObstructionKind.parse(a.kind)
    g = ctx.graph(kind="tournament")
    try:
        ext, roles = decode_roles(r, g)
        sigma = restrict_extension(r, ext)
    except NotInImage as exc:
        return {"kind": r.value, "in_image": False, "reason": str(exc)}
    ref, _ = build_F(r, extend_sigma(r, sigma))
    label = dict(zip(range(1, ref.n + 1), roles.x + roles.y))
    _check(all(g.has_arc(label[u], label[v]) for u, v in ref.arcs()), "rebuilt encoding")
    ctx.artifact = write_permutation(sigma)
    return {"kind": r.value, "in_image": True, "permutation": list(sigma.image), "x": list(roles.x), "y": list(roles.y)}


def cmd_obstruct_enumerate(ctx: Context) -> dict:
    a = ctx.args
    r = ObstructionKind.parse(a.kind)
    rows = enumerate_family(r, a.m_max)
    return {"kind": r.value, "table": [c.to_dict() for c in rows]}


# matrices and permutations


def cmd_matrix_grid(ctx: Context) -> dict:
    a = ctx.args
    m = read_matrix(ctx.read("input", a.input))
    d = find_grid_division(m, a.k)
    if d is not None:
        _check(is_k_grid(m, d, a.k), "grid cells")
    return {"k": a.k, "found": d is not None, "division": _division_dict(d)}


def cmd_matrix_rankdiv(ctx: Context) -> dict:
    a = ctx.args
    m = read_matrix(ctx.read("input", a.input))
    res = find_rank_division(m, a.k, seed=a.seed)
    if res.found:
        _check(is_rank_division(m, res.division, a.k), "division cells")
    return {"k": a.k, "status": res.status, "exhaustive": res.exact, "division": _division_dict(res.division)}


def cmd_matrix_class(ctx: Context) -> dict:
    a = ctx.args
    sigma = _perm(ctx, "perm", a.perm)
    s = MatrixClassKind(a.kind)
    norm = normalize_matrix_class(s, sigma, a.reverse_rows, a.reverse_cols)
    replay = apply_log(build_M(s, sigma), norm.log)
    _check(replay == build_M(norm.kind, norm.sigma), "transform log replay")
    return {
        "kind": s.value,
        "matrix": ["".join(map(str, row)) for row in build_M(s, sigma).entries],
        "normalized_kind": norm.kind.value,
        "normalized_permutation": list(norm.sigma.image),
        "log": [list(step) for step in norm.log],
        "verified": True,
    }


def cmd_perm_pattern(ctx: Context) -> dict:
    a = ctx.args
    sigma = _perm(ctx, "input", a.input)
    tau = _perm(ctx, "pattern", a.pattern)
    w = contains_pattern(sigma, tau)
    if w is not None:
        _check(Permutation.of(_standardize([sigma(i) for i in w])) == tau, "pattern witness")
    return {"contained": w is not None, "indices": list(w) if w else None}


def _standardize(vals):
    ranks = {v: i for i, v in enumerate(sorted(vals), 1)}
    return [ranks[v] for v in vals]


def cmd_perm_grid(ctx: Context) -> dict:
    a = ctx.args
    if a.input is None:
        if a.k is None:
            raise UsageError("give --input or --k")
        p = grid_permutation(a.k)
        ctx.artifact = write_permutation(p)
        return {"k": a.k, "permutation": list(p.image)}
    sigma = _perm(ctx, "input", a.input)
    return {"max_grid": max_grid(sigma)}


# logic


def cmd_fo_check(ctx: Context) -> dict:
    a = ctx.args
    g = ctx.graph()
    if a.formula:
        f = parse(ctx.read("formula", a.formula))
    elif a.ds is not None:
        f = ds_formula(a.ds)
    elif a.fvs is not None:
        f = fvs_formula(a.fvs)
    else:
        raise UsageError("give --formula, --ds or --fvs")
    return {"formula": to_sexp(f), "holds": model_check(g, f), "transitive": is_transitive(g)}


# wiring


def _common(p: argparse.ArgumentParser, graph: bool = True) -> None:
    p.add_argument("--input", help="input file ('-' for stdin)")
    if graph:
        p.add_argument("--kind", choices=("tournament", "oriented"), default="tournament")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=None, help="reject larger inputs (exit 4)")
    p.add_argument("--threads", type=int, default=1, help="worker cap")
    p.add_argument("--emit", choices=("json", "text"), default="json")
    p.add_argument("--output", help="write the produced file (graph, tree, sequence, ...) here")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="tww", description="Twin-width tools for tournaments and oriented graphs.")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    tww = sub.add_parser("tww").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = tww.add_parser("approx")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--bst", help="tree file or build:<strategy>")
    p.set_defaults(func=cmd_tww_approx)
    p = tww.add_parser("exact")
    _common(p)
    p.set_defaults(func=cmd_tww_exact)
    p = tww.add_parser("check")
    _common(p)
    p.add_argument("--sequence", required=True)
    p.set_defaults(func=cmd_tww_check)

    p = sub.add_parser("extract")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--bst", help="tree file or build:<strategy>")
    p.add_argument("--family", help="interval family file, or 'singletons'")
    p.add_argument("--enforce-budget", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("grid-pipeline")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--bst", help="tree file or build:<strategy>")
    p.add_argument("--target", type=int, default=None, help="parts kept per side (default budget(k))")
    p.set_defaults(func=cmd_grid_pipeline)

    bst = sub.add_parser("bst").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = bst.add_parser("build")
    _common(p)
    p.add_argument("--strategy", choices=STRATEGIES, default="random")
    p.set_defaults(func=cmd_bst_build)
    p = bst.add_parser("check")
    _common(p)
    p.add_argument("--tree", required=True)
    p.set_defaults(func=cmd_bst_check)

    ob = sub.add_parser("obstruct").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    kinds = ("eq", "le", "ge", "=", "<=", ">=")
    p = ob.add_parser("gen")
    _common(p, graph=False)
    p.add_argument("--kind", choices=kinds, required=True)
    p.add_argument("--perm", required=True)
    p.add_argument("--extend", action="store_true", help="encode the extended permutation")
    p.set_defaults(func=cmd_obstruct_gen)
    p = ob.add_parser("decode")
    _common(p, graph=False)
    p.add_argument("--kind", choices=kinds, required=True)
    p.set_defaults(func=cmd_obstruct_decode)
    p = ob.add_parser("enumerate")
    _common(p, graph=False)
    p.add_argument("--kind", choices=kinds, required=True)
    p.add_argument("--m-max", type=int, default=3)
    p.set_defaults(func=cmd_obstruct_enumerate)

    mx = sub.add_parser("matrix").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = mx.add_parser("grid")
    _common(p, graph=False)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_matrix_grid)
    p = mx.add_parser("rankdiv")
    _common(p, graph=False)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_matrix_rankdiv)
    p = mx.add_parser("class")
    _common(p, graph=False)
    p.add_argument("--kind", choices=[s.value for s in MatrixClassKind], required=True)
    p.add_argument("--perm", required=True)
    p.add_argument("--reverse-rows", action="store_true")
    p.add_argument("--reverse-cols", action="store_true")
    p.set_defaults(func=cmd_matrix_class)

    pm = sub.add_parser("perm").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = pm.add_parser("pattern")
    _common(p, graph=False)
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_perm_pattern)
    p = pm.add_parser("grid")
    _common(p, graph=False)
    p.add_argument("--k", type=int, default=None, help="emit the k-grid construction")
    p.set_defaults(func=cmd_perm_grid)

    fo = sub.add_parser("fo").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = fo.add_parser("check")
    _common(p)
    p.add_argument("--formula")
    p.add_argument("--ds", type=int)
    p.add_argument("--fvs", type=int)
    p.set_defaults(func=cmd_fo_check)
    return top


def _emit(report: dict, args, artifact: str | None) -> None:
    out = getattr(args, "output", None)
    if artifact is not None and out:
        Path(out).write_text(artifact)
    if getattr(args, "emit", "json") == "json":
        if artifact is not None and not out:
            report["result"]["file"] = artifact
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    elif artifact is not None and not out:
        sys.stdout.write(artifact)
    else:
        for key in sorted(report["result"]):
            sys.stdout.write(f"{key}: {json.dumps(report['result'][key], sort_keys=True)}\n")


def _fail(args, code: int, exc: BaseException) -> int:
    sys.stderr.write(f"tww: error: {exc}\n")
    if getattr(args, "emit", None) == "json":
        err = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, BudgetUnderflow):
            err.update(have=exc.have, need=exc.need, k=exc.k)
        if getattr(exc, "line", None) is not None:
            err["line"] = exc.line
        sys.stdout.write(json.dumps({"schema": SCHEMA, "error": err, "exit": code}, sort_keys=True, indent=2) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be positive")
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"tww: error: {exc}\n")
        return EXIT_USAGE
    ctx = Context(args)
    ctx.artifact = None
    start = time.perf_counter()
    try:
        result = args.func(ctx)
    except UsageError as exc:
        return _fail(args, EXIT_USAGE, exc)
    except VerificationFailed as exc:
        return _fail(args, EXIT_VERIFY, exc)
    except SizeLimitError as exc:
        return _fail(args, EXIT_SIZE, exc)
    except (InputError, BudgetUnderflow, OSError, UnicodeDecodeError, ValueError, TwwError) as exc:
        return _fail(args, EXIT_INPUT, exc)
    report = {
        "schema": SCHEMA,
        "command": argv,
        "inputs": dict(sorted(ctx.digests.items())),
        "seed": args.seed,
        "mode": {
            "threads": args.threads,
            "enforce_budget": bool(getattr(args, "enforce_budget", False)),
        },
        "result": result,
        "timing": {"seconds": round(time.perf_counter() - start, 6)},
    }
    _emit(report, args, ctx.artifact)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
