"""
Command-line harness.

    python cli.py generate --d 3 --out runs/data
    python cli.py release --input runs/data/dataset.csv --mode element --k 2 --out runs/release
    python cli.py table1 --out runs/table1
    python cli.py distance-recovery --out runs/distances
    python cli.py std-curve --out runs/std
    python cli.py verify --suite all --out runs/verify
    python cli.py replay --manifest runs/table1/manifest.json --out runs/table1-again

Every command writes manifest.json next to its outputs. Exit status is 0 only
when all outputs were written (and, for verify, every property passed).
"""

import argparse
import shlex
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from config import DEFAULT_ALPHA, DEFAULT_CENTER_DISTANCE, DEFAULT_CLUSTER_STD, DEFAULT_EPSILON
from config import DEFAULT_N_PAIRS, DEFAULT_N_PER_CLUSTER, DEFAULT_N_REPEATS, DEFAULT_SEED, DEFAULT_T_MULTIPLIER
from config import KMEANS_MAX_ITER, KMEANS_N_INIT, KMEANS_TOL, TABLE1_SEEDS
from experiments import distance_recovery, std_curve, table1, verify
from experiments.datagen import make_blobs
from io_formats import build_manifest, read_csv, read_manifest, write_csv, write_manifest, write_report, write_table
from privacy.errors import InvalidDataError, ReleaseError
from privacy.mechanism import release
from privacy.noise import calibrate
from privacy.rng import root_seed
from privacy.types import DataMatrix
from schemas import PrivacyMode, RunManifest
from utils.logger import logger, set_level

MANIFEST_NAME = "manifest.json"


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(out: Path, manifest: RunManifest) -> None:
    write_manifest(manifest, out / MANIFEST_NAME)
    logger.info(f"Wrote {', '.join(manifest.outputs + [MANIFEST_NAME])} to {out}")


def parse_k_values(text: str) -> List[int]:
    """'2-20' or '2,4,8'."""
    try:
        if "-" in text:
            low, high = (int(v) for v in text.split("-"))
            return list(range(low, high + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidDataError(f"cannot parse k values {text!r}") from None


def resolved_command(parser: argparse.ArgumentParser, args: argparse.Namespace) -> str:
    """The subcommand with every option spelled out at its parsed value.

    Defaults that came from the environment end up on the line, so a replay
    does not depend on the environment it runs in. --verbose is left out.
    """
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    argv = [args.command]
    for action in subparsers.choices[args.command]._actions:
        if not action.option_strings or isinstance(action, argparse._HelpAction):
            continue
        value = getattr(args, action.dest, None)
        if value is None or value is False:
            continue
        if value is True:
            argv.append(action.option_strings[0])
        else:
            argv += [action.option_strings[0], str(value)]
    return shlex.join(argv)


def _set_option(argv: List[str], flag: str, value: str) -> None:
    if flag in argv:
        argv[argv.index(flag) + 1] = value
    else:
        argv += [flag, value]


# ---------- commands ----------

def cmd_generate(args, command: str) -> int:
    out = _out_dir(args)
    dataset = make_blobs(args.n_per_cluster, args.d, args.center_distance, args.cluster_std, rng=root_seed(args.seed))
    write_csv(dataset.data, dataset.labels.tolist(), out / "dataset.csv")
    manifest = build_manifest(
        command, args.seed, experiment="generate", n=dataset.data.rows, d=dataset.data.cols,
        outputs=["dataset.csv"],
    )
    _finish(out, manifest)
    return 0


def cmd_release(args, command: str) -> int:
    out = _out_dir(args)
    data, labels = read_csv(args.input)
    params = calibrate(PrivacyMode(args.mode), args.k, args.epsilon, d=data.cols, alpha=args.alpha,
                       t_multiplier=args.t_multiplier)
    released = release(data, params, root_seed(args.seed))
    write_csv(DataMatrix(released.z), labels, out / "released.csv")
    manifest = build_manifest(
        command, args.seed, params, experiment="release", n=data.rows, d=data.cols,
        labels_passed_through=labels is not None, outputs=["released.csv"],
    )
    _finish(out, manifest)
    return 0


def cmd_table1(args, command: str) -> int:
    out = _out_dir(args)
    grid = table1.parse_grid(args.grid) if args.grid is not None else list(table1.DEFAULT_GRID)
    report = table1.run_table1(
        grid, args.epsilon, args.seeds, args.seed, args.alpha, args.t_multiplier, args.n_per_cluster,
        args.center_distance, args.cluster_std, args.kmeans_n_init, args.kmeans_max_iter, args.kmeans_tol,
    )
    report.manifest = MANIFEST_NAME
    write_report(report, out / "table1.json")
    write_table(table1.TABLE_HEADER, table1.table_rows(report), out / "table1.csv")
    manifest = build_manifest(
        command, args.seed, experiment="table1", epsilon=args.epsilon, alpha=args.alpha,
        t_multiplier=args.t_multiplier, outputs=["table1.json", "table1.csv"], settings=report.config,
    )
    _finish(out, manifest)
    return 0


def cmd_distance_recovery(args, command: str) -> int:
    out = _out_dir(args)
    modes = list(PrivacyMode) if args.mode == "both" else [PrivacyMode(args.mode)]
    report, differences = distance_recovery.run_distance_recovery(
        args.n_pairs, args.n_repeats, args.d, args.k, args.epsilon, modes, args.seed, args.alpha,
        args.t_multiplier, args.n_per_cluster, args.exact_projection, args.center_distance, args.cluster_std,
    )
    report.manifest = MANIFEST_NAME
    outputs = ["distance_recovery.json"]
    for mode, errors in differences.items():
        write_table(["difference"], [[float(v)] for v in errors], out / f"differences_{mode}.csv")
        counts, edges = distance_recovery.histogram(errors)
        rows = [[float(edges[i]), float(edges[i + 1]), int(counts[i])] for i in range(counts.size)]
        write_table(["bin_left", "bin_right", "count"], rows, out / f"histogram_{mode}.csv")
        outputs += [f"differences_{mode}.csv", f"histogram_{mode}.csv"]
    write_report(report, out / "distance_recovery.json")

    params = None
    if len(modes) == 1:
        params = calibrate(modes[0], args.k, args.epsilon, d=args.d, alpha=args.alpha, t_multiplier=args.t_multiplier)
    extra = {} if params else {"epsilon": args.epsilon, "k": args.k, "alpha": args.alpha, "t_multiplier": args.t_multiplier}
    manifest = build_manifest(command, args.seed, params, experiment="distance_recovery", d=args.d,
                              outputs=outputs, settings=report.config, **extra)
    _finish(out, manifest)
    return 0


def cmd_std_curve(args, command: str) -> int:
    out = _out_dir(args)
    report = std_curve.run_std_curve(parse_k_values(args.k_values), args.epsilon, args.alpha, args.t_multiplier)
    report.manifest = MANIFEST_NAME
    write_report(report, out / "std_curve.json")
    write_table(std_curve.TABLE_HEADER, [[r[h] for h in std_curve.TABLE_HEADER] for r in report.results],
                out / "std_curve.csv")
    manifest = build_manifest(
        command, args.seed, experiment="std_curve", epsilon=args.epsilon, alpha=args.alpha,
        t_multiplier=args.t_multiplier, outputs=["std_curve.json", "std_curve.csv"],
    )
    _finish(out, manifest)
    return 0


def cmd_verify(args, command: str) -> int:
    out = _out_dir(args)
    report = verify.run_verify(args.suite, args.seed, args.trials)
    report.manifest = MANIFEST_NAME
    write_report(report, out / "verify.json")
    _finish(out, build_manifest(command, args.seed, experiment="verify", outputs=["verify.json"]))
    passed = verify.all_passed(report)
    failed = [r["name"] for r in report.results if not r["passed"]]
    if passed:
        logger.info(f"All {len(report.results)} properties passed")
    else:
        logger.error(f"{len(failed)} of {len(report.results)} properties failed: {'; '.join(failed)}")
    return 0 if passed else 1


def cmd_replay(args, command: str) -> int:
    manifest = read_manifest(args.manifest)
    argv = shlex.split(manifest.command)
    _set_option(argv, "--seed", str(manifest.seed))
    _set_option(argv, "--out", args.out)
    logger.info(f"Replaying: {shlex.join(argv)}")
    return main(argv)


# ---------- parser ----------

def _add_privacy_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="row-wise bound on ||X_m - X'_m||^2")
    parser.add_argument("--t-multiplier", type=float, default=DEFAULT_T_MULTIPLIER,
                        help="row-wise t as a multiple of its minimum; 1 makes the failure bound vacuous")


def _add_blob_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-per-cluster", type=int, default=DEFAULT_N_PER_CLUSTER)
    parser.add_argument("--center-distance", type=float, default=DEFAULT_CENTER_DISTANCE)
    parser.add_argument("--cluster-std", type=float, default=DEFAULT_CLUSTER_STD)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli.py", description="JL + Laplace private data release experiments")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", required=name != "replay", default=None, help="output directory")
        p.set_defaults(handler=handler)
        return p

    p = command("generate", cmd_generate, "two-blob synthetic dataset")
    _add_blob_flags(p)
    p.add_argument("--d", type=int, default=3)

    p = command("release", cmd_release, "privately release a dataset CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=[m.value for m in PrivacyMode], default=PrivacyMode.ELEMENT_WISE.value)
    p.add_argument("--k", type=int, required=True)
    _add_privacy_flags(p)

    p = command("table1", cmd_table1, "k-means accuracy on original and private data")
    p.add_argument("--grid", default=None, help="d:k cells, e.g. 3:2,10:3")
    p.add_argument("--seeds", "--trials", dest="seeds", type=int, default=TABLE1_SEEDS)
    _add_blob_flags(p)
    p.add_argument("--kmeans-n-init", type=int, default=KMEANS_N_INIT)
    p.add_argument("--kmeans-max-iter", type=int, default=KMEANS_MAX_ITER)
    p.add_argument("--kmeans-tol", type=float, default=KMEANS_TOL)
    _add_privacy_flags(p)

    p = command("distance-recovery", cmd_distance_recovery, "distribution of distance-recovery errors")
    p.add_argument("--n-pairs", type=int, default=DEFAULT_N_PAIRS)
    p.add_argument("--n-repeats", "--trials", dest="n_repeats", type=int, default=DEFAULT_N_REPEATS)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--mode", choices=[m.value for m in PrivacyMode] + ["both"], default="both")
    _add_blob_flags(p)
    p.add_argument("--exact-projection", action="store_true", help="draw full d x k matrices per repeat")
    _add_privacy_flags(p)

    p = command("std-curve", cmd_std_curve, "sqrt(1 + 2b^2) against k")
    p.add_argument("--k-values", default="2-20")
    _add_privacy_flags(p)

    p = command("verify", cmd_verify, "statistical property suites")
    p.add_argument("--suite", default="all", help=f"all or one of: {', '.join(verify.SUITES)}")
    p.add_argument("--trials", type=int, default=None, help="override each suite's trial count")

    p = command("replay", cmd_replay, "re-run the command recorded in a manifest")
    p.add_argument("--manifest", required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        set_level("DEBUG")
    if args.command == "replay" and args.out is None:
        logger.error("replay needs --out")
        return 1
    try:
        return args.handler(args, resolved_command(parser, args))
    except ReleaseError as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
    except OSError as e:
        logger.error(f"{args.command} failed on I/O: {e}")
        return 1
    except Exception:
        logger.exception(f"Unhandled error in {args.command}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
