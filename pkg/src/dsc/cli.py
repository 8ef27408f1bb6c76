"""Command-line front end: simulate test signals, analyze WAV recordings,
compare selector filters, and run Monte Carlo grids.

Every command exits 0 on success; on failure a machine-readable JSON object
{"error": <code>, "message": <text>} is printed to stderr and the exit code
is 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .audio import read_wav, write_wav
from .config import load_config, serialize_config
from .errors import DscError
from .montecarlo import MCReport, resolve_threads, run_grid
from .pipeline import analyze_signal, compare_selectors
from .signals import simulate


def _print_json(data: dict, path: str | None):
    text = json.dumps(data, indent=2)
    if path:
        Path(path).write_text(text + "\n")
        print(f"report written to {path}")
    else:
        print(text)


def _write_matrix_csv(path: Path, matrix: np.ndarray, header: list[str] | None = None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow(header)
        writer.writerows(np.asarray(matrix).tolist())


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    sim = simulate(config.simulation)
    write_wav(args.out, sim.signal)
    print(f"wrote {len(sim.signal)} samples at {sim.signal.sample_rate:.0f} Hz "
          f"to {args.out}")
    if args.sidecar:
        sidecar = {
            "sample_rate": sim.signal.sample_rate,
            "n_samples": len(sim.signal),
            "params": serialize_config(config)["simulation"],
            "soi_onsets": sim.soi_onsets.tolist(),
            "noncyclic_onsets": {
                "low": {"indices": sim.low_onsets.tolist(),
                        "amplitude": config.simulation.impulses.amp_low},
                "high": {"indices": sim.high_onsets.tolist(),
                         "amplitude": config.simulation.impulses.amp_high},
            },
        }
        Path(args.sidecar).write_text(json.dumps(sidecar, indent=2) + "\n")
        print(f"ground truth written to {args.sidecar}")
    return 0


def _emit_plots(result, directory: str):
    plots = Path(directory)
    plots.mkdir(parents=True, exist_ok=True)
    spec = result.spectrogram
    _write_matrix_csv(plots / "spectrogram.csv", spec.values)
    for name, z in (("z1", result.partition.z1), ("z2", result.partition.z2),
                    ("z3", result.partition.z3)):
        _write_matrix_csv(plots / f"{name}.csv", z.values)
    _write_matrix_csv(plots / "frame_classes.csv",
                      result.partition.class_of_frame[None, :])
    for name, ses in result.spectra.items():
        _write_matrix_csv(plots / f"ses_{name}.csv",
                          np.column_stack([ses.freqs, ses.amplitudes]),
                          header=["freq_hz", "amplitude"])
    print(f"plot data written to {plots}/")


def cmd_analyze(args) -> int:
    config = load_config(args.config)
    signal = read_wav(args.input)
    result = analyze_signal(signal, config.analysis, keep_spectrogram=bool(args.plots))
    _print_json(result.to_report(), args.report)
    if args.plots:
        _emit_plots(result, args.plots)
    return 0


def cmd_selectors(args) -> int:
    config = load_config(args.config)
    signal = read_wav(args.input)
    comparison = compare_selectors(signal, config.analysis)
    _print_json(comparison.to_report(), args.report)
    return 0


def _print_detection_matrix(report: MCReport):
    header = "sigma\\gamma" + "".join(f"{g:>8.2f}" for g in report.gamma_levels)
    print(header)
    for si, sigma in enumerate(report.sigma_levels):
        row = "".join(f"{r:>8.2f}" for r in report.detection_matrix[si])
        print(f"{sigma:>11.2f}{row}")


def _dump_cells(report: MCReport, out_dir: Path):
    classes = ["class1", "class2", "class3", "raw"]
    for row in report.cells:
        for cell in row:
            name = f"cell_sigma{cell.sigma:g}_gamma{cell.gamma:g}.csv"
            with open(out_dir / name, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["iteration", "detected", "frequency", "failure"]
                                + [f"envsi_{c}" for c in classes])
                for it, outcome in enumerate(cell.outcomes):
                    envsi = outcome["envsi"] or {}
                    writer.writerow(
                        [it, int(outcome["detected"]),
                         "" if outcome["frequency"] is None else outcome["frequency"],
                         "" if outcome["failure"] is None else outcome["failure"]]
                        + [envsi.get(c, "") for c in classes]
                    )


def cmd_montecarlo(args) -> int:
    config = load_config(args.config)
    grid = config.mc_grid(full=args.full)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    progress = None
    if args.verbose:
        def progress(done, total):
            print(f"\r{done}/{total} iterations", end="", file=sys.stderr)
            if done == total:
                print(file=sys.stderr)

    report = run_grid(grid, threads=resolve_threads(args.threads), progress=progress)
    (out_dir / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    _dump_cells(report, out_dir)
    print(f"results written to {out_dir}/")
    print("detection rate (fraction of runs within the frequency tolerance):")
    _print_detection_matrix(report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsc",
        description="Separate cyclic fault signatures from impulsive noise by "
                    "double spectral clustering",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic test signal as WAV")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--sidecar", default=None,
                   help="write exact onset ground truth to this JSON file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="run the full separation pipeline on a WAV file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--plots", default=None,
                   help="directory for spectrogram/partition/SES CSV dumps")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("selectors", help="compare selector filters against the pipeline")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_selectors)

    p = sub.add_parser("montecarlo", help="run the evaluation grid")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--full", action="store_true",
                   help="full 100-iteration grid instead of the desk-scale preset")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: DSC_THREADS or machine parallelism)")
    p.set_defaults(func=cmd_montecarlo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DscError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"error": "io-error", "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
