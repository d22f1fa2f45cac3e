"""Machine-readable experiment outputs (JSON summaries and plot-ready CSVs)."""
from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .config import ExperimentConfig
from .simulate import ExperimentSummary, ReplicationResult


@dataclass
class RunManifest:
    config_digest: str
    artifact_paths: list[str]
    wall_time_seconds: float
    version: str


def _fmt(value: float) -> str:
    return repr(float(value))


def write_outputs(summary: ExperimentSummary, reps: list[ReplicationResult], out_dir,
                  cfg: ExperimentConfig, wall_time_seconds: float = 0.0) -> RunManifest:
    """Write the summary, CSV tables and manifest into ``out_dir``.

    Files already written are removed again if any write fails.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def open_new(name):
        path = out / name
        written.append(path)
        return open(path, "w", newline="")

    try:
        with open_new("summary.json") as fh:
            json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

        with open_new("mse.csv") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "mse", "mean_abs_error"])
            for n in sorted(summary.mse_at):
                w.writerow([n, _fmt(summary.mse_at[n]), _fmt(summary.mean_abs_error_at[n])])

        with open_new("standardized_errors.csv") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["rep_id", "sqrt_n_error"])
            for r in reps:
                w.writerow([r.rep_id, _fmt(r.final_standardized_error)])

        for r in reps:
            if not r.trajectory:
                continue
            with open_new(f"trajectory_{r.rep_id}.csv") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["n", "theta_hat"])
                for n, theta in r.trajectory:
                    w.writerow([n, _fmt(theta)])

        manifest = RunManifest(
            config_digest=cfg.digest(),
            artifact_paths=[p.name for p in written] + ["manifest.json"],
            wall_time_seconds=float(wall_time_seconds),
            version=__version__,
        )
        with open_new("manifest.json") as fh:
            json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except BaseException:
        for path in written:
            try:
                os.unlink(path)
            except FileNotFoundError:
                pass
        raise
    return manifest


PLOT_SCRIPT = """\
# gnuplot script for the CSV files in this directory
set datafile separator ','
set key autotitle columnhead
set terminal pngcairo size 900,600

set output 'mse.png'
set logscale xy
set xlabel 'n'
set ylabel 'error'
plot 'mse.csv' using 1:2 with linespoints title 'MSE', \\
     'mse.csv' using 1:3 with linespoints title 'mean |error|'

set output 'standardized_errors.png'
unset logscale
set xlabel 'sqrt(n) (theta_hat - theta)'
set ylabel 'count'
binwidth = 0.05
bin(x) = binwidth * floor(x / binwidth)
plot 'standardized_errors.csv' using (bin($2)):(1.0) smooth freq with boxes title 'replications'
{trajectories}"""


def plot_script(out_dir) -> Path:
    """Write ``plot.gp`` referencing whatever trajectory files exist in ``out_dir``."""
    out = Path(out_dir)
    if not out.is_dir():
        raise FileNotFoundError(f"output directory {out} does not exist")
    traj = sorted(out.glob("trajectory_*.csv"),
                  key=lambda p: int(p.stem.split("_")[1]))
    extra = ""
    if traj:
        curves = ", \\\n     ".join(f"'{p.name}' using 1:2 with lines title '{p.stem}'"
                                    for p in traj)
        extra = ("\nset output 'trajectories.png'\nset logscale x\n"
                 "set xlabel 'n'\nset ylabel 'theta_hat'\n"
                 f"plot {curves}\n")
    path = out / "plot.gp"
    path.write_text(PLOT_SCRIPT.format(trajectories=extra))
    return path
