"""Command-line entry point: ``fmgt <subcommand> ...``.

Exit codes: 0 success, 2 bad input or usage, 1 internal failure. Every report
echoes the full run configuration so it can be reproduced byte-for-byte.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import blockmodel, centrality, convexhull, facility, generators, io, nn_index
from .embed import EmbedConfig, Paspd, ShortestPath, SqrtShortestPath, embed
from .graph import GraphError

DEFAULT_SEED = 42
DEFAULT_KAPPA = {"embed": 4, "flp": 100, "centrality": 4, "blockmodel": 4, "hull": 4}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _ids(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated vertex ids, got {text!r}") from exc


def _common(p, kappa=True):
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out", default=None, help="report path (stdout when omitted)")
    p.add_argument("--timing", action="store_true", help="add wall-clock timings (breaks byte-identical reruns)")
    if kappa:
        p.add_argument("--kappa", type=int, default=None)
        p.add_argument("--epsilon", type=float, default=1e-4)
        p.add_argument("--Q", type=int, default=10, help="pivot-changing iterations")
        p.add_argument("--L", type=int, default=4)
        p.add_argument("--F", type=int, default=10)


def _graph_arg(p, required=True):
    p.add_argument("--graph", required=required, help="edge list: 'n m' header then 'u v [w]' lines")
    p.add_argument("--grid", action="store_true", help="read --graph as a grid map instead")
    p.add_argument("--eight", action="store_true", help="8-connected grid moves")
    p.add_argument("--keep-all", action="store_true", help="keep every component, not just the largest")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fmgt", description="FastMap graph embedding and analytics")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic graph")
    p.add_argument("family", choices=("waxman", "sbm", "tree", "smallworld", "grid"))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--unit", action="store_true", help="unit edge weights (waxman)")
    p.add_argument("--k", type=int, default=2, help="blocks (sbm) or lattice degree (smallworld)")
    p.add_argument("--p", type=float, default=None, help="sbm base density / shortcut probability")
    p.add_argument("--model", type=int, choices=(1, 2), default=1)
    p.add_argument("--dense", action="store_true")
    p.add_argument("--noise", action="store_true")
    p.add_argument("--obstacles", type=float, default=0.2)
    p.add_argument("--truth-out", default=None, help="write planted sbm labels here")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None)

    p = sub.add_parser("embed", help="FastMap embedding")
    _graph_arg(p)
    _common(p)
    p.add_argument("--mode", choices=("sp", "sqrt", "paspd"), default="sp")
    p.add_argument("--no-complement", action="store_true")
    p.add_argument("--paspd-sqrt", action="store_true")
    p.add_argument("--mask", default=None, help="file of pertinent vertex ids")
    p.add_argument("--text", action="store_true", help="emit the plain 'n r' text format")

    p = sub.add_parser("flp", help="facility location")
    p.add_argument("problem", choices=facility.PROBLEMS)
    _graph_arg(p)
    _common(p)
    p.add_argument("--starts", type=_ids, default=None, help="agent start vertices (mam)")
    p.add_argument("--agents", type=int, default=None, help="random agent count (mam)")
    p.add_argument("--K", "--k", dest="K", type=int, default=1)
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--weights", default=None, help="vertex weight file (wvkm)")
    p.add_argument("--exact", action="store_true", help="exact solver (exhaustive for K-median)")
    p.add_argument("--compare", action="store_true", help="also solve exactly and report suboptimality")

    p = sub.add_parser("centrality", help="top-K (projected) centrality")
    _graph_arg(p)
    _common(p)
    p.add_argument("--measure", choices=centrality.MEASURES, default="closeness")
    p.add_argument("--method", choices=centrality.METHODS, default="fastmap")
    p.add_argument("--topk", type=int, default=10)
    p.add_argument("--mask", default=None, help="file of pertinent vertex ids")
    p.add_argument("--compare", action="store_true", help="report nDCG against the exact (or apd) ranking")

    p = sub.add_parser("blockmodel", help="FMBM block modeling")
    _graph_arg(p)
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--T", type=int, default=10)
    p.add_argument("--truth", default=None, help="planted labels, one per line")
    p.add_argument("--full-objective", action="store_true")

    p = sub.add_parser("hull", help="graph convex hull")
    _graph_arg(p)
    _common(p)
    p.add_argument("--set", required=True, help="file of vertex ids S")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--compare-fmgch", action="store_true", help="with --exact, also run FMGCH and score it")
    p.add_argument("--max-iters", type=int, default=10)

    p = sub.add_parser("eval", help="score saved outputs")
    p.add_argument("what", choices=("flp", "nmi", "hull", "ndcg"))
    _graph_arg(p, required=False)
    p.add_argument("--solution", default=None, help="flp solution JSON")
    p.add_argument("--a", default=None, help="labels / vertex set / ranking file")
    p.add_argument("--b", default=None, help="labels / vertex set / truth values file")
    p.add_argument("--topk", type=int, default=10)
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--timing", action="store_true")
    return ap


def run_config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "timing"}
    if "kappa" in cfg and cfg["kappa"] is None:
        cfg["kappa"] = DEFAULT_KAPPA.get(args.command, 4)
    return cfg


class Timer:
    def __init__(self):
        self.phases = {}

    @contextmanager
    def phase(self, name):
        t = time.perf_counter()
        yield
        self.phases[name] = self.phases.get(name, 0.0) + time.perf_counter() - t


def _load_graph(args):
    if args.graph is None:
        raise InputError("--graph is required")
    try:
        if args.grid:
            return io.read_grid_map(args.graph, eight_connected=args.eight, keep_all=args.keep_all)[0]
        return io.read_edge_list(args.graph, keep_all=args.keep_all)
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _read_ids(path):
    try:
        return io.read_vertex_set(path)
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _read_floats(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return np.array([float(x) for x in fh.read().replace(",", " ").split()])
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _emit(args, report: dict, timer: Timer | None = None):
    if timer is not None and getattr(args, "timing", False):
        report["timing"] = {k: round(v, 6) for k, v in timer.phases.items()}
    if args.format == "tsv":
        flat = {k: v for k, v in report.items() if not isinstance(v, (dict, list))}
        for key in ("summary", "timing"):
            for k, v in report.get(key, {}).items():
                flat[k if key == "summary" else f"time_{k}"] = v
        text = "\t".join(flat) + "\n" + "\t".join(str(v) for v in flat.values()) + "\n"
    else:
        text = io.dump_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kappa(args, g):
    k = args.kappa if args.kappa is not None else DEFAULT_KAPPA[args.command]
    if k < 1:
        raise InputError("--kappa must be >= 1")
    return k


def _embed_cfg(args, mode, g):
    return EmbedConfig(kappa=_kappa(args, g), epsilon=args.epsilon, q_max=args.Q, mode=mode)


def cmd_gen(args):
    rng = np.random.default_rng(args.seed)
    truth = None
    if args.family == "waxman":
        g = generators.gen_waxman(args.n, args.alpha, args.beta, rng=rng)
        if args.unit:
            g = g.with_unit_weights()
    elif args.family == "sbm":
        p = args.p if args.p is not None else float(np.log(args.n) / args.n)
        g, truth = generators.gen_sbm(args.n, args.k, p, args.model, rng, dense=args.dense, noise=args.noise)
    elif args.family == "tree":
        g = generators.random_tree(args.n, rng)
    elif args.family == "smallworld":
        g = generators.small_world(args.n, max(args.k, 2), 0.1 if args.p is None else args.p, rng)
    else:
        side = max(2, int(round(np.sqrt(args.n))))
        g = generators.random_grid(side, side, args.obstacles, rng)
    text = io.format_edge_list(g)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.truth_out and truth is not None:
        with open(args.truth_out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(str(x) for x in truth.labels.tolist()) + "\n")


def cmd_embed(args):
    g = _load_graph(args)
    if args.mode == "sp":
        mode = ShortestPath()
    elif args.mode == "sqrt":
        mode = SqrtShortestPath()
    else:
        mode = Paspd(args.L, args.F, not args.no_complement, args.paspd_sqrt)
    mask = _read_ids(args.mask) if args.mask else None
    timer = Timer()
    with timer.phase("preprocess"):
        e = embed(g, _embed_cfg(args, mode, g), args.seed, mask=mask)
    if args.text:
        text = io.format_embedding_text(e)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return
    _emit(args, io.embedding_to_json(e, run_config(args)), timer)


def cmd_flp(args):
    g = _load_graph(args)
    rng = np.random.default_rng(args.seed)
    timer = Timer()
    report = {"config": run_config(args)}
    weights = _read_floats(args.weights) if args.weights else None
    if args.problem == "wvkm" and weights is None and g.vertex_weights is None:
        raise InputError("wvkm needs --weights")
    if args.problem == "mam":
        if args.starts is None:
            if args.agents is None:
                raise InputError("mam needs --starts or --agents")
            starts = facility.random_starts(g, args.agents, rng)
        else:
            starts = args.starts
        report["starts"] = list(starts)
    K = args.K

    def exact():
        if args.problem == "mam":
            return facility.solve_mam_exact(g, starts)
        return facility.solve_exhaustive(g, args.problem, K, args.tau, weights)

    def fastmap():
        with timer.phase("preprocess"):
            e = embed(g, _embed_cfg(args, SqrtShortestPath(), g), rng)
            idx = nn_index.build(e, nn_index.Lsh(seed=int(rng.integers(2**31))))
        with timer.phase("query"):
            if args.problem == "mam":
                return facility.solve_mam_fastmap(g, starts, e, idx)
            if args.problem == "vkm":
                return facility.solve_vkm(g, K, e, idx, rng)
            if args.problem == "wvkm":
                return facility.solve_wvkm(g, K, e, idx, weights, rng)
            return facility.solve_cvkm(g, K, e, idx, args.tau, rng)

    if args.exact:
        with timer.phase("query"):
            sol = exact()
    else:
        sol = fastmap()
    report["solution"] = sol.to_json(args.seed)
    if args.compare and not args.exact:
        with timer.phase("exact"):
            opt = exact()
        report["optimum"] = opt.cost
        report["summary"] = {"cost": sol.cost, "optimum": opt.cost,
                             "suboptimality_pct": 100 * facility.suboptimality(sol.cost, opt.cost)}
    else:
        report["summary"] = {"cost": sol.cost}
    _emit(args, report, timer)


def cmd_centrality(args):
    g = _load_graph(args)
    rng = np.random.default_rng(args.seed)
    timer = Timer()
    mask = _read_ids(args.mask) if args.mask else None
    K = args.topk
    kappa = _kappa(args, g)
    if args.method in ("apd", "fmav", "fmpv") and mask is None:
        raise InputError(f"method {args.method} needs --mask")
    if args.method in ("fastmap", "exact") and mask is not None:
        raise InputError("--mask applies to apd/fmav/fmpv only")
    with timer.phase("query"):
        if args.method == "exact":
            res = centrality.topk_exact(g, args.measure, K)
        elif args.method == "fastmap":
            res = centrality.topk_fastmap(g, args.measure, K, rng, kappa=kappa, epsilon=args.epsilon,
                                          L=args.L, F=args.F)
        else:
            res = centrality.topk_projected(g, mask, args.measure, args.method, K, rng, kappa=kappa,
                                            epsilon=args.epsilon, L=args.L, F=args.F)
    report = {"config": run_config(args)}
    if args.compare or res.values is None:
        with timer.phase("exact"):
            if mask is None:
                truth = centrality.exact_centrality(g, args.measure)
            else:
                truth = np.nan_to_num(centrality.projected_values(g, mask, args.measure, args.seed,
                                                                  L=args.L, F=args.F))
        res = res.with_values(truth)
        if args.compare:
            report["ndcg"] = centrality.ndcg(res, truth, K)
    report.update(res.to_json())
    report["summary"] = {"ndcg": report.get("ndcg")}
    _emit(args, report, timer)


def cmd_blockmodel(args):
    g = _load_graph(args)
    if args.k < 1:
        raise InputError("--k must be >= 1")
    timer = Timer()
    params = blockmodel.FmbmParams(args.L, args.F, args.T, _kappa(args, g), args.epsilon)
    with timer.phase("query"):
        a, rep = blockmodel.fmbm(g, args.k, params, args.seed, full_objective=args.full_objective)
    report = {"config": run_config(args), "k": args.k, "labels": a.labels.tolist(),
              "objective": rep.value, "sampled_nonedges": rep.sampled_nonedges}
    if args.truth:
        truth = _read_ids(args.truth)
        if len(truth) != g.n:
            raise InputError(f"truth has {len(truth)} labels for {g.n} vertices")
        report["nmi"] = blockmodel.nmi(a.labels, np.array(truth))
    report["summary"] = {"objective": rep.value, "nmi": report.get("nmi")}
    _emit(args, report, timer)


def cmd_hull(args):
    g = _load_graph(args)
    S = _read_ids(args.set)
    timer = Timer()
    report = {"config": run_config(args)}
    if args.exact:
        with timer.phase("exact"):
            res = convexhull.exact_graph_convex_hull(g, S, args.seed)
        if args.compare_fmgch:
            with timer.phase("preprocess"):
                e = embed(g, _embed_cfg(args, ShortestPath(), g), args.seed)
            with timer.phase("query"):
                approx = convexhull.fmgch(g, S, max_iters=args.max_iters, embedding=e)
            p, r, j = convexhull.hull_scores(approx, res)
            report["scores"] = {"precision": p, "recall": r, "jaccard": j}
            report["fmgch"] = {"vertices": approx.sorted(), "iterations": approx.iterations}
    else:
        with timer.phase("preprocess"):
            e = embed(g, _embed_cfg(args, ShortestPath(), g), args.seed)
        with timer.phase("query"):
            res = convexhull.fmgch(g, S, max_iters=args.max_iters, embedding=e)
    report.update({"method": res.method, "vertices": res.sorted(), "iterations": res.iterations})
    report["summary"] = dict(report.get("scores", {}), size=len(res.vertices))
    _emit(args, report, timer)


def cmd_eval(args):
    report = {"config": run_config(args)}
    if args.what == "flp":
        g = _load_graph(args)
        if not args.solution:
            raise InputError("eval flp needs --solution")
        try:
            with open(args.solution, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        data = data.get("solution", data)
        sol = facility.FlpSolution(
            data["problem"], tuple(data["facilities"]), float(data["cost"]), data.get("method", "fastmap"),
            np.array(data["assignment"]) if "assignment" in data else None, data.get("tau"),
            tuple(data["starts"]) if "starts" in data else None)
        weights = _read_floats(args.b) if args.b else None
        cost = facility.evaluate_flp(g, sol, weights=weights)
        report["summary"] = {"cost": cost, "reported": sol.cost, "match": cost == sol.cost}
    elif args.what == "nmi":
        a, b = _need_ab(args)
        report["summary"] = {"nmi": blockmodel.nmi(np.array(_read_ids(a)), np.array(_read_ids(b)))}
    elif args.what == "hull":
        a, b = _need_ab(args)
        p, r, j = convexhull.hull_scores(convexhull.HullResult(frozenset(_read_ids(a)), 0, "approx"),
                                         convexhull.HullResult(frozenset(_read_ids(b)), 0, "truth"))
        report["summary"] = {"precision": p, "recall": r, "jaccard": j}
    else:
        a, b = _need_ab(args)
        report["summary"] = {"ndcg": centrality.ndcg(_read_ids(a), _read_floats(b), args.topk)}
    _emit(args, report)


def _need_ab(args):
    if not (args.a and args.b):
        raise InputError(f"eval {args.what} needs --a and --b")
    return args.a, args.b


COMMANDS = {"gen": cmd_gen, "embed": cmd_embed, "flp": cmd_flp, "centrality": cmd_centrality,
            "blockmodel": cmd_blockmodel, "hull": cmd_hull, "eval": cmd_eval}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); nothing left to report
        sys.stderr.close()
        return 0
    except (InputError, GraphError, ValueError, KeyError) as exc:
        print(f"fmgt {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"fmgt {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
