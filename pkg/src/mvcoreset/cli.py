"""Command-line front door.

Every command takes --seed and is byte-deterministic under it, except
for the wall-clock timing file the lloyd-speedup sweep writes
separately.  Flags override values from --config (a JSON file), which
override built-in defaults.  The only environment override is
MVCORESET_OUT_DIR for the sweep output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, io
from .core import ClusteringParams, InputError, cost
from .coreset import build_coreset, imputation_coreset, uniform_coreset
from .family import CoordinateFamily, build_family, verify_family
from .lloyd import lloyd
from .sensitivity import estimate_sensitivities


def _add_seed(parser):
    parser.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    parser.add_argument("--config", type=str, default=None, help="JSON config file")


# output destinations are not semantic configuration; keep them out of
# the provenance hash so equal runs to different files match byte-wise
_NON_CONFIG_ARGS = {"func", "out", "out_dir", "scores_out", "centers_out", "assign_out"}


class _Resolver:
    """flags > config file > defaults"""

    def __init__(self, args):
        self.args = vars(args)
        self.config = {}
        if self.args.get("config"):
            self.config = json.loads(Path(self.args["config"]).read_text())

    def get(self, name, default=None):
        flag = self.args.get(name)
        if flag is not None:
            return flag
        if name in self.config:
            return self.config[name]
        return default

    def seed(self) -> int:
        return int(self.get("seed", 0))

    def public_args(self) -> dict:
        return {
            k: str(v) if isinstance(v, Path) else v
            for k, v in self.args.items()
            if v is not None and k not in _NON_CONFIG_ARGS
        }


def _provenance(res: _Resolver, command: str):
    return io.provenance_lines(command, seed=res.seed(), config=res.public_args())


def _params(res: _Resolver) -> ClusteringParams:
    return ClusteringParams(
        k=int(res.get("k", 3)),
        z=float(res.get("z", 2.0)),
        epsilon=float(res.get("epsilon", 0.25)),
    )


# -- gen ---------------------------------------------------------------


def cmd_gen_synthetic(args):
    res = _Resolver(args)
    dataset = bench.gen_synthetic(
        n=int(res.get("n")),
        frac_far=float(res.get("frac_far", 0.03)),
        delete_frac=float(res.get("delete_frac", 0.25)),
        seed=res.seed(),
    )
    io.save_dataset(dataset, args.out, _provenance(res, "gen synthetic"))
    print(f"wrote {dataset.n} points (d={dataset.d}, j={dataset.j}) to {args.out}")


def cmd_gen_lowerbound(args):
    res = _Resolver(args)
    dataset = bench.gen_lower_bound(int(res.get("j")))
    io.save_dataset(dataset, args.out, _provenance(res, "gen lowerbound"))
    print(f"wrote {dataset.n} points (d={dataset.d}, j={dataset.j}) to {args.out}")


# -- family ------------------------------------------------------------


def cmd_family_build(args):
    res = _Resolver(args)
    fam = build_family(
        d=int(res.get("d")),
        j=int(res.get("j")),
        k=int(res.get("k")),
        size_override=res.get("size"),
        seed=res.seed(),
        size_cap=int(res.get("cap", 512)),
    )
    io.save_json(
        fam.to_dict(), args.out, "family build", seed=res.seed(), config=res.public_args()
    )
    print(f"wrote family of {len(fam)} subsets to {args.out}")


def cmd_family_verify(args):
    res = _Resolver(args)
    fam = CoordinateFamily.from_dict(io.load_json(args.family))
    result = verify_family(
        fam,
        mode=res.get("mode", "exhaustive"),
        trials=int(res.get("trials", 10000)),
        seed=res.seed(),
    )
    report = {
        "ok": result.ok,
        "mode": result.mode,
        "pairs_checked": result.pairs_checked,
        "counterexample": result.counterexample,
    }
    if args.out:
        io.save_json(report, args.out, "family verify", seed=res.seed(), config=res.public_args())
    print(json.dumps(report))
    if not result.ok:
        sys.exit(1)


# -- coreset -----------------------------------------------------------


def _coreset_common(args, res):
    dataset = io.load_dataset(args.data, delimiter=res.get("delimiter", ","))
    n_samples = int(res.get("n_samples"))
    merge = not bool(res.get("no_merge", False))
    return dataset, n_samples, merge


def cmd_coreset_build(args):
    res = _Resolver(args)
    dataset, n_samples, merge = _coreset_common(args, res)
    params = _params(res)
    scores = estimate_sensitivities(
        dataset,
        params,
        family_size=res.get("family_size"),
        seed=res.seed(),
        c_sigma=float(res.get("c_sigma", 1.0)),
        c_alpha=float(res.get("c_alpha", 1.0)),
        c_l=float(res.get("c_l", 2.0)),
        engine=res.get("engine", "auto"),
    )
    coreset = build_coreset(
        dataset, params, n_samples, seed=res.seed(), merge_duplicates=merge, scores=scores
    )
    header = _provenance(res, "coreset build")
    io.save_coreset(coreset, args.out, header)
    if res.get("scores_out"):
        io.save_scores(scores.sigma, res.get("scores_out"), header)
    print(f"wrote coreset of {coreset.size} entries to {args.out}")


def cmd_coreset_uniform(args):
    res = _Resolver(args)
    dataset, n_samples, merge = _coreset_common(args, res)
    coreset = uniform_coreset(dataset, n_samples, seed=res.seed(), merge_duplicates=merge)
    io.save_coreset(coreset, args.out, _provenance(res, "coreset uniform"))
    print(f"wrote coreset of {coreset.size} entries to {args.out}")


def cmd_coreset_impute(args):
    res = _Resolver(args)
    dataset, n_samples, merge = _coreset_common(args, res)
    coreset = imputation_coreset(
        dataset,
        _params(res),
        n_samples,
        family_size=res.get("family_size"),
        seed=res.seed(),
        merge_duplicates=merge,
    )
    io.save_coreset(coreset, args.out, _provenance(res, "coreset impute"))
    print(f"wrote coreset of {coreset.size} entries to {args.out}")


# -- evaluate ----------------------------------------------------------


def cmd_evaluate(args):
    res = _Resolver(args)
    dataset = io.load_dataset(args.data, delimiter=res.get("delimiter", ","))
    coreset = io.load_coreset(args.coreset, dataset)
    z = float(res.get("z", 2.0))
    if args.adversarial:
        in_coreset = np.zeros(dataset.n, dtype=bool)
        in_coreset[coreset.ids] = True
        missing = np.flatnonzero(~in_coreset)
        if missing.size == 0:
            report = {"empirical_error": 0.0, "missing_point": None}
        else:
            pid = int(missing[0])
            centers = bench.adversarial_centers(dataset, pid)
            err = bench.empirical_error(dataset, coreset, [centers], z)
            report = {"empirical_error": err, "missing_point": pid}
    else:
        k = int(res.get("k", 3))
        centers = bench.random_centers(
            dataset, k, int(res.get("centers", 100)), seed=res.seed()
        )
        err = bench.empirical_error(dataset, coreset, centers, z)
        report = {"empirical_error": err, "center_sets": len(centers)}
    if args.out:
        io.save_json(report, args.out, "evaluate", seed=res.seed(), config=res.public_args())
    print(json.dumps(report))


# -- lloyd -------------------------------------------------------------


def cmd_lloyd(args):
    res = _Resolver(args)
    dataset = io.load_dataset(args.data, delimiter=res.get("delimiter", ","))
    data = dataset
    if args.coreset:
        data = io.load_coreset(args.coreset, dataset)
    result = lloyd(
        data,
        k=int(res.get("k", 3)),
        iters=int(res.get("iters", 100)),
        tol=float(res.get("tol", 1e-7)),
        seed=res.seed(),
    )
    header = _provenance(res, "lloyd")
    if args.centers_out:
        io.save_centers(result.centers, args.centers_out, header)
    if args.assign_out:
        io.save_assignment(result.labels, args.assign_out, header)
    full_cost = cost(dataset, result.centers, 2.0)
    print(
        json.dumps(
            {
                "cost": result.cost,
                "cost_on_full_data": full_cost,
                "iterations": result.iterations,
                "converged": result.converged,
            }
        )
    )


# -- sweep -------------------------------------------------------------


def cmd_sweep(args):
    res = _Resolver(args)
    dataset = io.load_dataset(args.data, delimiter=res.get("delimiter", ","))
    sizes = res.get("sizes", (200, 700, 1200, 2000))
    if isinstance(sizes, str):
        sizes = tuple(int(s) for s in sizes.split(","))
    methods = res.get("methods", ("ours", "uniform", "imputation"))
    if isinstance(methods, str):
        methods = tuple(methods.split(","))
    cfg = bench.ExperimentConfig(
        k=int(res.get("k", 3)),
        z=float(res.get("z", 2.0)),
        sizes=tuple(int(s) for s in sizes),
        trials=int(res.get("trials", 10)),
        n_center_sets=int(res.get("centers", 100)),
        family_size=res.get("family_size", 20),
        c_l=float(res.get("c_l", 2.0)),
        seed=res.seed(),
        methods=methods,
        lloyd_iters=int(res.get("iters", 500)),
        lloyd_tol=float(res.get("tol", 0.0)),
        threads=int(res.get("threads", 1)),
    )
    out_dir = Path(args.out_dir or os.environ.get("MVCORESET_OUT_DIR", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    mode = res.get("mode", "size-error")
    header = _provenance(res, f"sweep {mode}")
    if mode == "size-error":
        result = bench.run_size_error_sweep(dataset, cfg)
        _write_rows(result.rows, out_dir / "size_error.csv", header)
        io.save_json(
            {"summary": result.summary},
            out_dir / "size_error_summary.json",
            "sweep size-error",
            seed=res.seed(),
            config=res.public_args(),
        )
    elif mode == "lloyd-speedup":
        result = bench.run_lloyd_speedup(dataset, cfg)
        deterministic = [
            {k: v for k, v in row.items() if not k.startswith("t_") and k != "speedup"}
            for row in result.rows
        ]
        _write_rows(deterministic, out_dir / "lloyd_speedup.csv", header)
        # wall-clock timings are hardware-dependent; they go to their own file
        io.save_json(
            {"rows": result.rows, "summary": result.summary},
            out_dir / "lloyd_speedup_timings.json",
            "sweep lloyd-speedup",
            seed=res.seed(),
            config=res.public_args(),
        )
    else:
        raise InputError(f"unknown sweep mode {mode!r}")
    print(f"wrote sweep results to {out_dir}")


def _write_rows(rows, path, header_lines):
    import csv

    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        if not rows:
            return
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


# -- parser ------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvcoreset",
        description="Coresets for clustering points with missing coordinates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate datasets").add_subparsers(
        dest="kind", required=True
    )
    g = gen.add_parser("synthetic", help="unit box + far cluster, attributes deleted")
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--frac-far", dest="frac_far", type=float, default=None)
    g.add_argument("--delete-frac", dest="delete_frac", type=float, default=None)
    g.add_argument("--out", required=True)
    _add_seed(g)
    g.set_defaults(func=cmd_gen_synthetic)
    g = gen.add_parser("lowerbound", help="hard instance needing every point")
    g.add_argument("--j", type=int, default=None)
    g.add_argument("--out", required=True)
    _add_seed(g)
    g.set_defaults(func=cmd_gen_lowerbound)

    fam = sub.add_parser("family", help="coordinate families").add_subparsers(
        dest="kind", required=True
    )
    f = fam.add_parser("build")
    for flag in ("--d", "--j", "--k", "--size", "--cap"):
        f.add_argument(flag, type=int, default=None)
    f.add_argument("--out", required=True)
    _add_seed(f)
    f.set_defaults(func=cmd_family_build)
    f = fam.add_parser("verify")
    f.add_argument("--family", required=True)
    f.add_argument("--mode", choices=["exhaustive", "sampled"], default=None)
    f.add_argument("--trials", type=int, default=None)
    f.add_argument("--out", default=None)
    _add_seed(f)
    f.set_defaults(func=cmd_family_verify)

    cs = sub.add_parser("coreset", help="coreset constructions").add_subparsers(
        dest="kind", required=True
    )
    for kind, func in (
        ("build", cmd_coreset_build),
        ("uniform", cmd_coreset_uniform),
        ("impute", cmd_coreset_impute),
    ):
        c = cs.add_parser(kind)
        c.add_argument("--data", required=True)
        c.add_argument("--n-samples", dest="n_samples", type=int, default=None)
        c.add_argument("--out", required=True)
        c.add_argument("--no-merge", dest="no_merge", action="store_true", default=None)
        c.add_argument("--delimiter", default=None)
        if kind != "uniform":
            c.add_argument("--k", type=int, default=None)
            c.add_argument("--z", type=float, default=None)
            c.add_argument("--epsilon", type=float, default=None)
            c.add_argument("--family-size", dest="family_size", type=int, default=None)
        if kind == "build":
            c.add_argument("--c-sigma", dest="c_sigma", type=float, default=None)
            c.add_argument("--c-alpha", dest="c_alpha", type=float, default=None)
            c.add_argument("--c-l", dest="c_l", type=float, default=None)
            c.add_argument("--engine", choices=["auto", "fast", "tree"], default=None)
            c.add_argument("--scores-out", dest="scores_out", default=None)
        _add_seed(c)
        c.set_defaults(func=func)

    e = sub.add_parser("evaluate", help="empirical error of a coreset")
    e.add_argument("--data", required=True)
    e.add_argument("--coreset", required=True)
    e.add_argument("--k", type=int, default=None)
    e.add_argument("--z", type=float, default=None)
    e.add_argument("--centers", type=int, default=None)
    e.add_argument("--adversarial", action="store_true")
    e.add_argument("--delimiter", default=None)
    e.add_argument("--out", default=None)
    _add_seed(e)
    e.set_defaults(func=cmd_evaluate)

    ll = sub.add_parser("lloyd", help="k-means heuristic with missing values")
    ll.add_argument("--data", required=True)
    ll.add_argument("--coreset", default=None)
    ll.add_argument("--k", type=int, default=None)
    ll.add_argument("--iters", type=int, default=None)
    ll.add_argument("--tol", type=float, default=None)
    ll.add_argument("--delimiter", default=None)
    ll.add_argument("--centers-out", dest="centers_out", default=None)
    ll.add_argument("--assign-out", dest="assign_out", default=None)
    _add_seed(ll)
    ll.set_defaults(func=cmd_lloyd)

    sw = sub.add_parser("sweep", help="size-vs-error and Lloyd speedup runs")
    sw.add_argument("--data", required=True)
    sw.add_argument("--mode", choices=["size-error", "lloyd-speedup"], default=None)
    sw.add_argument("--sizes", default=None, help="comma-separated coreset sizes")
    sw.add_argument("--trials", type=int, default=None)
    sw.add_argument("--k", type=int, default=None)
    sw.add_argument("--z", type=float, default=None)
    sw.add_argument("--centers", type=int, default=None)
    sw.add_argument("--family-size", dest="family_size", type=int, default=None)
    sw.add_argument("--c-l", dest="c_l", type=float, default=None)
    sw.add_argument("--iters", type=int, default=None)
    sw.add_argument("--tol", type=float, default=None)
    sw.add_argument("--methods", default=None)
    sw.add_argument("--threads", type=int, default=None)
    sw.add_argument("--delimiter", default=None)
    sw.add_argument("--out-dir", dest="out_dir", default=None)
    _add_seed(sw)
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
