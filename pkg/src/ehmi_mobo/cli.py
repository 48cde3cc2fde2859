"""Command-line interface: serve, simulate, analyze, demo."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .acquisition import AcquisitionConfig
from .analysis import (
    correlation_matrix,
    export_front_csv,
    objective_bf_table,
    parameter_bf_table,
    parameter_iqr,
    ingest_dataset,
    pareto_counts,
    pareto_flags,
    session_to_study_records,
    table_label,
    write_records_csv,
)
from .design_space import validate_params
from .errors import EhmiMoboError
from .objectives import OBJECTIVE_NAMES
from .optimizer import SessionConfig, SessionStore, start_session, submit_rating
from .pareto import default_reference, hypervolume_of_points
from .synthetic_user import make_rater, rate


def _parse_seeds(spec: str) -> list[int]:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in spec.split(",") if s]


def run_synthetic_session(
    rater, seed: int, n_candidates: int, n_mc: int, n_optimization: int,
    store: SessionStore | None = None, participant: str | None = None,
):
    """One full MOBO session rated by a synthetic rater."""
    config = SessionConfig(
        acquisition=AcquisitionConfig(
            n_candidates=n_candidates, n_mc_samples=n_mc, seed=seed
        ),
        n_optimization=n_optimization,
    )
    session = start_session(config, session_id=participant)
    while not session.finished:
        resp = rate(rater, session.pending_design, iteration=session.iteration + 1)
        submit_rating(session, resp)
    if store is not None:
        store.save_new(session)
    return session


def random_search_objectives(rater, seed: int, n_iterations: int, log_path=None):
    """Matched baseline: uniform random designs rated by the same rater."""
    from .objectives import OBJECTIVE_NAMES, response_to_objectives

    rng = np.random.default_rng((seed, 0xBA5E))
    out = []
    records = []
    for i in range(n_iterations):
        design = validate_params(rng.uniform(0.0, 1.0, size=9))
        resp = rate(rater, design, iteration=i + 1)
        raw, vec = response_to_objectives(resp)
        out.append(vec)
        records.append({
            "iteration": i + 1,
            "phase": "random",
            "params": design.as_list(),
            "response": resp.to_dict(),
            "raw_scores": {n: raw[n] for n in OBJECTIVE_NAMES},
            "objectives": vec.as_list(),
        })
    if log_path is not None:
        with open(log_path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    return out


def hypervolume_progression(objective_vectors) -> list[float]:
    """Hypervolume of the archive after each iteration."""
    ref = default_reference(len(OBJECTIVE_NAMES))
    values = [v.as_tuple() for v in objective_vectors]
    return [
        hypervolume_of_points(values[: i + 1], ref) for i in range(len(values))
    ]


def cmd_simulate(args) -> int:
    seeds = _parse_seeds(args.seeds)
    if len(seeds) < args.raters:
        print(f"error: NEED_MORE_SEEDS: {args.raters} raters, {len(seeds)} seeds",
              file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    store = SessionStore(out_dir / "sessions")
    rows = []
    records = []
    for i in range(args.raters):
        seed = seeds[i]
        rater = make_rater(seed, noise_sd=args.noise_sd)
        session = run_synthetic_session(
            rater, seed, args.candidates, args.mc, args.iterations,
            store=store, participant=f"mobo-{seed}",
        )
        mobo_hv = hypervolume_progression([r.objectives for r in session.history])
        baseline = random_search_objectives(
            rater, seed, args.iterations + session.config.acquisition.n_sobol,
            log_path=out_dir / "sessions" / f"random-{seed}.jsonl",
        )
        base_hv = hypervolume_progression(baseline)
        for it, hv in enumerate(mobo_hv, start=1):
            rows.append({"rater": seed, "method": "mobo", "iteration": it,
                         "hypervolume": hv})
        for it, hv in enumerate(base_hv, start=1):
            rows.append({"rater": seed, "method": "random", "iteration": it,
                         "hypervolume": hv})
        records.extend(session_to_study_records(session, f"P{seed}", "synthetic"))
        print(
            f"rater {seed}: mobo final HV {mobo_hv[-1]:.4f} "
            f"({len(mobo_hv)} iters), random final HV {base_hv[-1]:.4f}"
        )
    hv_path = out_dir / "hypervolume.csv"
    with open(hv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["rater", "method", "iteration", "hypervolume"]
        )
        writer.writeheader()
        writer.writerows(rows)
    write_records_csv(out_dir / "records.csv", records)
    print(f"wrote {hv_path} and {out_dir / 'records.csv'}")
    return 0


def cmd_analyze(args) -> int:
    result = ingest_dataset(args.data, mapping=args.mapping)
    records = result.records
    for message in result.violations:
        print(f"violation: {message}", file=sys.stderr)
    print(f"ingested {len(records)} records "
          f"({len(result.violations)} rows rejected)")
    if not records:
        print("error: NO_RECORDS: dataset has no valid rows", file=sys.stderr)
        return 2

    counts = pareto_counts(records, mode=args.mode)
    print("\nPareto design counts per group:")
    for group in sorted(counts):
        print(f"  {group}: {counts[group]}")

    groups = args.groups.split(",") if args.groups else sorted(counts)[:2]
    if len(groups) == 2:
        print(f"\nDesign parameters, {groups[0]} vs {groups[1]} "
              f"(Pareto-only={args.pareto_only}):")
        flags = pareto_flags(records, mode=args.mode)
        front_records = [r for r, keep in zip(records, flags) if keep]
        scope = front_records if args.pareto_only else records
        try:
            bf_table = parameter_bf_table(
                records, (groups[0], groups[1]),
                pareto_only=args.pareto_only, mode=args.mode,
            )
            iqrs = {g: parameter_iqr(scope, g) for g in groups}
            print(f"  {'parameter':<20}{'BF (+/- %)':>16}  "
                  f"{groups[0] + ' IQR':>14}  {groups[1] + ' IQR':>14}  evidence")
            for name, res in bf_table.items():
                cells = "  ".join(
                    f"{iqrs[g][name][0]:.2f}-{iqrs[g][name][1]:.2f}".rjust(14)
                    for g in groups
                )
                print(
                    f"  {name:<20}{res.bf10:>8.2f} {res.error_pct:>5.2f}%  "
                    f"{cells}  {table_label(res.bf10)}"
                )
        except EhmiMoboError as exc:
            print(f"  skipped: {exc}")

        print(f"\nObjective Bayes factors ({groups[0]} vs {groups[1]}):")
        try:
            obj_table = objective_bf_table(
                records, (groups[0], groups[1]), pareto_only=args.pareto_only
            )
            for name, res in obj_table.items():
                print(f"  {name:<20}{res.bf10:>8.2f}  {table_label(res.bf10)}")
        except EhmiMoboError as exc:
            print(f"  skipped: {exc}")

    corr = correlation_matrix(records, pareto_only=args.pareto_only)
    print(f"\nObjective correlations (Pearson r, Holm-adjusted; n={corr.n}; "
          "* = significant at p<0.05):")
    header = " ".join(f"{n[:7]:>9}" for n in corr.names)
    print(f"  {'':<16}{header}")
    for i, name in enumerate(corr.names):
        cells = " ".join(
            f"{corr.r[i, j]:>8.2f}{'*' if corr.significant[i, j] and i != j else ' '}"
            for j in range(len(corr.names))
        )
        print(f"  {name:<16}{cells}")

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        export_front_csv(records, out_dir / "pareto_front.csv", mode=args.mode)
        with open(out_dir / "pareto_counts.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["group", "count"])
            for group in sorted(counts):
                writer.writerow([group, counts[group]])
        with open(out_dir / "correlations.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["objective_a", "objective_b", "r", "p_adjusted",
                             "significant"])
            for i in range(len(corr.names)):
                for j in range(i + 1, len(corr.names)):
                    writer.writerow([
                        corr.names[i], corr.names[j],
                        f"{corr.r[i, j]:.6f}", f"{corr.p_adjusted[i, j]:.6g}",
                        corr.significant[i, j],
                    ])
        print(f"\nwrote report CSVs to {out_dir}")
    return 0


def cmd_demo(args) -> int:
    rater = make_rater(args.seed, noise_sd=0.0)
    config = SessionConfig(
        acquisition=AcquisitionConfig(n_candidates=128, n_mc_samples=64,
                                      seed=args.seed)
    )
    session = start_session(config, session_id=f"demo-{args.seed}")
    print(f"session {session.id}: {session.config.total_iterations} iterations "
          f"({session.config.acquisition.n_sobol} sampling + "
          f"{session.config.n_optimization} optimization)")
    n_sobol = config.acquisition.n_sobol
    while not session.finished:
        i = session.iteration + 1
        design = session.pending_design
        resp = rate(rater, design, iteration=i)
        result = submit_rating(session, resp)
        params = " ".join(f"{v:.2f}" for v in design.as_list())
        objs = " ".join(f"{v:+.2f}" for v in session.history[-1].objectives.as_list())
        phase = "sampling" if i <= n_sobol else "optimization"
        print(f"iter {i:>2} [{phase}] params [{params}] -> objectives [{objs}]")
        if result.finished:
            print(f"finished: stopped_early={result.stopped_early}")
    hv = hypervolume_progression([r.objectives for r in session.history])
    print(f"final hypervolume: {hv[-1]:.4f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    overrides = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            overrides = json.load(fh)
    cfg = ServiceConfig.from_env(**overrides)
    if args.port is not None:
        cfg.port = args.port
    if args.store is not None:
        cfg.store_dir = args.store
    app = create_app(cfg)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehmi-mobo",
        description="Human-in-the-loop multi-objective Bayesian optimization "
        "engine for eHMI design",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP/JSON service")
    p_serve.add_argument("--config", help="JSON file with ServiceConfig fields")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--store", default=None, help="session store directory")
    p_serve.set_defaults(func=cmd_serve)

    p_sim = sub.add_parser(
        "simulate", help="run synthetic MOBO sessions plus random baselines"
    )
    p_sim.add_argument("--raters", type=int, required=True)
    p_sim.add_argument("--seeds", required=True, help="for example 1..20 or 1,5,7")
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--noise-sd", type=float, default=0.0)
    p_sim.add_argument("--candidates", type=int, default=256)
    p_sim.add_argument("--mc", type=int, default=128)
    p_sim.add_argument("--iterations", type=int, default=15,
                       help="optimization iterations after the sampling phase")
    p_sim.set_defaults(func=cmd_simulate)

    p_an = sub.add_parser("analyze", help="post-hoc statistics over a dataset")
    p_an.add_argument("--data", required=True)
    p_an.add_argument("--mapping", default=None,
                      help="JSON schema-mapping config for external column names")
    p_an.add_argument("--pareto-only", action="store_true")
    p_an.add_argument("--group-col", dest="groups", default=None,
                      help="two comma-separated group labels to compare")
    p_an.add_argument("--mode", choices=("normalized", "raw"), default="normalized")
    p_an.add_argument("--out", default=None, help="directory for report CSVs")
    p_an.set_defaults(func=cmd_analyze)

    p_demo = sub.add_parser("demo", help="one scripted synthetic session")
    p_demo.add_argument("--seed", type=int, default=7)
    p_demo.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EhmiMoboError as exc:
        code = type(exc).__name__.upper()
        print(f"error: {code}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
