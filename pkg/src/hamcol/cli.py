"""Command line interface.

Subcommands: ``simulate`` (pipeline sweeps), ``hamilton`` (standalone
cycle-patching engine), ``verify`` (re-check artifacts), ``stats``
(re-aggregate a records CSV).  Every flag can also be set through an
environment variable named HAMCOL_<FLAG> (dashes become underscores),
e.g. ``HAMCOL_EPS_FRAC=0.03``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import harness
from .coloring import read_coloring
from .cycle_merger import ArcPool, PatchworkInput, patchwork_hamilton, split_pools
from .errors import InvalidInput
from .minor import read_contraction_paths
from .one_factor import read_factor
from .process import DIRECTED, ProcessParams
from .rng import SplitMix64, philox_generator, stable_seed
from .verify import is_hamilton_cycle, verify_monochromatic, verify_rainbow

ENV_PREFIX = "HAMCOL_"


def _env(flag: str, default):
    return os.environ.get(ENV_PREFIX + flag.replace("-", "_").upper(), default)


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in str(text).replace(",", " ").split()]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hamcol", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run full pipeline sweeps")
    sim.add_argument("--n", default=_env("n", "500"), help="comma-separated vertex counts")
    sim.add_argument("--q", default=_env("q", "1"), help="comma-separated color counts")
    sim.add_argument("--mode", default=_env("mode", "directed"),
                     choices=["directed", "undirected", "rainbow"])
    sim.add_argument("--trials", type=int, default=int(_env("trials", 10)))
    sim.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    sim.add_argument("--alpha", type=float, default=float(_env("alpha", 0.05)))
    sim.add_argument("--eps-frac", type=float, default=float(_env("eps-frac", 0.02)))
    sim.add_argument("--small-frac", type=float, default=float(_env("small-frac", 0.01)))
    sim.add_argument("--k", type=int, default=int(_env("k", 6)))
    sim.add_argument("--rounds", type=int, default=_env("rounds", None))
    sim.add_argument("--max-paths", type=int, default=_env("max-paths", None))
    sim.add_argument("--out", default=_env("out", "hamcol-out"))
    sim.add_argument("--jobs", type=int, default=int(_env("jobs", 1)))
    sim.add_argument("--artifacts", default=_env("artifacts", None),
                     help="directory for per-trial coloring/cycle files")

    ham = sub.add_parser("hamilton", help="standalone cycle-patching engine")
    ham.add_argument("--factor", required=True, help="factor file: 'v phi(v)' per line, 1-based")
    ham.add_argument("--forbidden", default=None, help="arc file of forbidden arcs")
    ham.add_argument("--pool", default=None,
                     help="arc file; arcs are split half/half into the two pools")
    ham.add_argument("--density", type=float, default=None,
                     help="generate each pool with this per-arc probability instead")
    ham.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    ham.add_argument("--rounds", type=int, default=_env("rounds", None))
    ham.add_argument("--max-paths", type=int, default=_env("max-paths", None))
    ham.add_argument("--out", default=None, help="write the cycle here instead of stdout")
    ham.add_argument("--stats", default=None, help="write the JSON stats record here")

    ver = sub.add_parser("verify", help="re-check coloring/cycle artifacts")
    ver.add_argument("--coloring", required=True)
    ver.add_argument("--cycle", action="append", default=[],
                     help="cycle file: line 1 = color, line 2 = 1-based vertices")
    ver.add_argument("--rainbow", action="store_true",
                     help="also check pairwise-distinct tail colors per cycle")
    ver.add_argument("--contraction", default=None,
                     help="contraction file to re-check the minor arc criterion")
    ver.add_argument("--color", type=int, default=None,
                     help="color class for --contraction")

    sta = sub.add_parser("stats", help="re-aggregate a records CSV")
    sta.add_argument("--csv", required=True)

    args = parser.parse_args(argv)
    return {
        "simulate": _cmd_simulate,
        "hamilton": _cmd_hamilton,
        "verify": _cmd_verify,
        "stats": _cmd_stats,
    }[args.command](args)


def _cmd_simulate(args) -> int:
    params = ProcessParams(
        q=1,
        alpha=args.alpha,
        eps_frac=args.eps_frac,
        small_frac=args.small_frac,
        k=args.k,
        rotation_rounds_override=None if args.rounds is None else int(args.rounds),
        max_paths=None if args.max_paths is None else int(args.max_paths),
    )
    config = harness.ExperimentConfig(
        n_list=_int_list(args.n),
        q_list=_int_list(args.q),
        mode=args.mode,
        trials=args.trials,
        master_seed=args.seed,
        params=params,
        out=args.out,
        jobs=args.jobs,
    )
    records, aggregates = harness.run_experiment(config)
    paths = harness.emit_report(records, args.out, config)
    if args.artifacts:
        _write_artifacts(records, config, args.artifacts)
    for agg in aggregates:
        print(
            f"n={agg['n']} q={agg['q']} trials={agg['trials']} "
            f"success_rate={agg['success_rate']:.3f} "
            f"color_degree_rate={agg['color_degree_rate']:.3f} "
            f"tau_median={agg['tau_median']}"
        )
    print(f"wrote {paths['csv']} and {paths['json']}")
    return 0


def _write_artifacts(records, config, out_dir):
    import dataclasses

    from .coloring import run_col, run_col_orient, write_coloring
    from .process import UNDIRECTED, generate_schedule
    from .rng import STREAM_COLORING, STREAM_SCHEDULE

    os.makedirs(out_dir, exist_ok=True)
    for r in records:
        sched_mode = DIRECTED if r.mode == DIRECTED else UNDIRECTED
        schedule = generate_schedule(r.n, sched_mode, stable_seed(r.seed, STREAM_SCHEDULE))
        params = dataclasses.replace(config.params, q=r.q)
        rng = SplitMix64(r.seed)
        root = rng.next_u64()
        col_rng = SplitMix64(stable_seed(root, STREAM_COLORING))
        import warnings

        from .coloring import PhaseDegenerateWarning

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PhaseDegenerateWarning)
            if sched_mode == DIRECTED:
                result = run_col(schedule, params, col_rng)
            else:
                result = run_col_orient(schedule, params, col_rng)
        stem = f"{r.mode}-n{r.n}-q{r.q}-t{r.trial}"
        write_coloring(result, os.path.join(out_dir, stem + ".coloring"))
        for c in r.colors:
            if c.cycle:
                with open(os.path.join(out_dir, f"{stem}-c{c.color}.cycle"), "w") as fh:
                    fh.write(f"{c.color}\n")
                    fh.write(" ".join(str(v + 1) for v in c.cycle) + "\n")


def _read_arc_file(path) -> list[tuple[int, int]]:
    arcs = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            u, v = line.split()
            arcs.append((int(u) - 1, int(v) - 1))
    return arcs


def _bernoulli_pool(n, density, gen) -> list[tuple[int, int]]:
    mask = gen.random((n, n)) < density
    np.fill_diagonal(mask, False)
    tails, heads = np.nonzero(mask)
    return list(zip(tails.tolist(), heads.tolist()))


def _cmd_hamilton(args) -> int:
    factor = read_factor(args.factor)
    n = len(factor)
    forbidden = _read_arc_file(args.forbidden) if args.forbidden else []
    if (args.pool is None) == (args.density is None):
        print("hamilton: provide exactly one of --pool / --density", file=sys.stderr)
        return 2
    if args.pool:
        arcs = _read_arc_file(args.pool)
        e2, e3 = split_pools(arcs, SplitMix64(stable_seed(args.seed, 2)))
    else:
        gen = philox_generator(stable_seed(args.seed, 2))
        e2 = _bernoulli_pool(n, args.density, gen)
        e3 = _bernoulli_pool(n, args.density, gen)
    pinput = PatchworkInput.build(
        factor, e2, e3, forbidden_arcs=forbidden,
        rounds=None if args.rounds is None else int(args.rounds),
        max_paths=None if args.max_paths is None else int(args.max_paths),
    )
    res = patchwork_hamilton(pinput)
    stats = {
        "success": res.ok,
        "merges": len(res.merges),
        "phase2_cycles": res.phase2_cycles,
        "phase2_largest": res.phase2_largest,
        "rounds_used": res.rounds_used,
        "frontier_peak": res.frontier_peak,
        "failure_index": res.failure_index,
        "pool_sizes": [len(pinput.e2), len(pinput.e3)],
    }
    if res.ok:
        line = " ".join(str(v + 1) for v in res.cycle)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(line + "\n")
        else:
            print(line)
    if args.stats:
        with open(args.stats, "w") as fh:
            json.dump(stats, fh, indent=2, sort_keys=True)
    else:
        print(json.dumps(stats, sort_keys=True), file=sys.stderr)
    return 0 if res.ok else 1


def _read_cycle_file(path):
    with open(path) as fh:
        color = int(fh.readline().strip())
        verts = [int(tok) - 1 for tok in fh.readline().split()]
    return color, verts


def _cmd_verify(args) -> int:
    result = read_coloring(args.coloring)
    arc_table = result.arc_table()
    out = {"coloring": args.coloring, "cycles": []}
    all_ok = True
    rainbow_table = None
    if args.rainbow:
        from .coloring import rainbow_relabel
        from .verify import rainbow_color_table

        rainbow_table = rainbow_color_table(result, rainbow_relabel(result))
    for path in args.cycle:
        color, cyc = _read_cycle_file(path)
        entry = {
            "file": path,
            "color": color,
            "hamilton": is_hamilton_cycle(cyc, result.n, arc_table).as_dict(),
            "monochromatic": verify_monochromatic(cyc, result, color).as_dict(),
        }
        if rainbow_table is not None:
            entry["rainbow"] = verify_rainbow(cyc, rainbow_table).as_dict()
        all_ok &= all(v["pass"] for v in entry.values() if isinstance(v, dict))
        out["cycles"].append(entry)
    if args.contraction:
        if args.color is None:
            print("verify: --contraction needs --color", file=sys.stderr)
            return 2
        out["contraction"] = _verify_contraction(result, args.contraction, args.color)
        all_ok &= out["contraction"]["pass"]
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0 if all_ok else 1


def _verify_contraction(result, path, color) -> dict:
    from .coloring import color_class
    from .minor import ContractionMap
    from .verify import verify_contraction_equivalence

    paths = read_contraction_paths(path)
    dc = color_class(result, color)
    n = result.n
    minor_of = np.full(n, -1, dtype=np.int64)
    for i, p in enumerate(paths):
        for v in p:
            minor_of[v] = i
    if (minor_of < 0).any():
        raise InvalidInput("contraction paths do not cover all vertices")
    starts = np.array([p[0] for p in paths], dtype=np.int64)
    ends = np.array([p[-1] for p in paths], dtype=np.int64)
    contr = [(p[i], p[i + 1]) for p in paths for i in range(len(p) - 1)]
    v_plus = np.ones(n, dtype=bool)
    v_minus = np.ones(n, dtype=bool)
    for x, y in contr:
        v_plus[x] = False
        v_minus[y] = False
    mt, mh, mr = [], [], []
    contr_set = set(contr)
    for x, y, r in zip(dc.tails.tolist(), dc.heads.tolist(), dc.reveal.tolist()):
        if (x, y) in contr_set:
            continue
        if v_plus[x] and v_minus[y] and minor_of[x] != minor_of[y]:
            mt.append(minor_of[x])
            mh.append(minor_of[y])
            mr.append(r)
    cmap = ContractionMap(
        n=n, paths=paths, minor_of=minor_of, starts=starts, ends=ends,
        contr_arcs=sorted(contr_set), removed_arcs=[],
        minor_tails=np.array(mt, dtype=np.int64),
        minor_heads=np.array(mh, dtype=np.int64),
        minor_reveal=np.array(mr, dtype=np.int64),
    )
    verdict = verify_contraction_equivalence(cmap, dc.arc_set)
    return verdict.as_dict()


def _cmd_stats(args) -> int:
    rows = harness.read_csv_rows(args.csv)
    print(json.dumps(harness.aggregate_rows(rows), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
