"""Named experiments: each writes headered CSV datasets plus a run manifest.

Every experiment is keyed by a master seed; sub-runs derive their own seeds
by hashing (seed, tag), so outputs are reproducible byte-for-byte and
insensitive to the order in which sub-runs execute.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from erravg import analytics
from erravg.analytics import ChainParams
from erravg.circuit import mz_circuit
from erravg.encoding import EncodingScheme, encode_circuit
from erravg.fourmode import INPUT_STATES, TABLE_COEFFS, measure_slopes
from erravg.montecarlo import MCConfig, _TrialStreams, run, variance_scan
from erravg.phasestats import sample_variance, total_phases_batch, histogram
from erravg.reporting import write_csv, write_manifest

DEFAULT_SEED = 20260809

EXPERIMENT_NAMES = (
    "fig1",
    "fig4",
    "fig6",
    "fig7",
    "fig8",
    "fig10",
    "fig11",
    "tables4",
    "scan",
    "validate",
)


def seed_for(master_seed: int, tag: str) -> int:
    """Stable 63-bit sub-seed derived from (master seed, tag)."""
    digest = hashlib.blake2b(f"{master_seed}:{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


@dataclass
class ExperimentSpec:
    """Experiment name plus parameter overrides (v, N, M, trials, seed)."""

    name: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in EXPERIMENT_NAMES:
            raise ValueError(f"unknown experiment {self.name!r}")

    def seed(self) -> int:
        return int(self.parameters.get("seed", DEFAULT_SEED))

    def get(self, key: str, default):
        value = self.parameters.get(key)
        return default if value is None else value

    def n_list(self, default: list[int]) -> list[int]:
        n = self.parameters.get("N")
        return default if n is None else [int(n)]


def _phase_noise_samples(seed: int, runs: int, copies: int, shifters: int) -> np.ndarray:
    """(runs, copies, shifters) standard normals, one substream per run."""
    streams = _TrialStreams(seed)
    out = np.empty((runs, copies, shifters))
    for t in range(runs):
        out[t] = streams.standard_normal(t, copies * shifters).reshape(copies, shifters)
    return out


def _run_fig1(spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """Output-probability masses (correct / wrong / error modes) for a noisy
    MZ interferometer at several redundancies."""
    v = float(spec.get("v", 0.5))
    trials = int(spec.get("trials", 100000))
    n_list = spec.n_list([1, 2, 4, 8, 16])
    rows = []
    for n in n_list:
        enc = encode_circuit(mz_circuit(0.0, v), EncodingScheme(n, "tree", "whole"))
        cfg = MCConfig(
            circuit=enc,
            input_state=(1, 0),
            observables=("p_success", "correct"),
            trials=trials,
            master_seed=seed_for(spec.seed(), f"fig1:N={n}"),
        )
        res = run(cfg)
        p_correct = res["correct"].mean
        p_success = res["p_success"].mean
        rows.append(
            [v, n, trials, p_correct, p_success - p_correct, 1.0 - p_success, res["correct"].stderr]
        )
    write_csv(
        out_dir / "fig1.csv",
        ["v", "N", "trials", "p_correct", "p_wrong", "p_error_modes", "stderr_correct"],
        rows,
    )
    return ["fig1.csv"]


def _run_fig4(spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """Single-photon success and post-selected correct probability vs N."""
    v = float(spec.get("v", 0.1))
    trials = int(spec.get("trials", 100000))
    n_list = spec.n_list([1, 2, 4, 8, 16, 32])
    rows = []
    for n in n_list:
        enc = encode_circuit(mz_circuit(0.0, v), EncodingScheme(n, "tree", "whole"))
        cfg = MCConfig(
            circuit=enc,
            input_state=(1, 0),
            observables=("p_success", "correct_post"),
            trials=trials,
            master_seed=seed_for(spec.seed(), f"fig4:N={n}"),
        )
        res = run(cfg)
        rows.append(
            [
                v,
                n,
                trials,
                res["p_success"].mean,
                res["p_success"].stderr,
                analytics.sp_success_exact(v, n),
                analytics.sp_success(v, n),
                res["correct_post"].mean,
                res["correct_post"].stderr,
                analytics.sp_correct_post(v, n),
            ]
        )
    write_csv(
        out_dir / "fig4.csv",
        [
            "v",
            "N",
            "trials",
            "success_mc",
            "success_stderr",
            "success_exact",
            "success_first_order",
            "correct_post_mc",
            "correct_post_stderr",
            "correct_post_first_order",
        ],
        rows,
    )
    return ["fig4.csv"]


def _run_fig6(spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """Conditional correct probability vs chain length for the three
    phase-averaging schemes (second-order series)."""
    v = float(spec.get("v", 0.005))
    m_max = int(spec.get("M", 15))
    n_list = spec.n_list([2, 4, 16])
    rows = []
    for n in n_list:
        for m in range(1, m_max + 1):
            p = ChainParams(m, v, n)
            rows.append(
                [
                    v,
                    n,
                    m,
                    analytics.chain_correct_noavg(p),
                    analytics.chain_correct_avg_whole(p),
                    analytics.chain_correct_avg_each(p),
                ]
            )
    write_csv(
        out_dir / "fig6.csv",
        ["v", "N", "M", "correct_noavg", "correct_whole", "correct_each"],
        rows,
    )
    return ["fig6.csv"]


def _run_fig7(spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """First- vs second-order success series for both averaging schemes.

    The first-order series truncates each bracket at linear order in v.
    """
    m_max = int(spec.get("M", 15))
    if spec.parameters.get("v") is not None or spec.parameters.get("N") is not None:
        pairs = [(float(spec.get("v", 0.005)), int(spec.get("N", 4)))]
    else:
        pairs = [(0.005, 4), (0.005, 16), (0.1, 16)]
    rows = []
    for v, n in pairs:
        frac = 1.0 - 1.0 / n
        for m in range(1, m_max + 1):
            p = ChainParams(m, v, n)
            rows.append(
                [
                    v,
                    n,
                    m,
                    1.0 - frac * m * v,
                    analytics.chain_success_avg_whole(p),
                    (1.0 - v * frac) ** m,
                    analytics.chain_success_avg_each(p),
                ]
            )
    write_csv(
        out_dir / "fig7.csv",
        [
            "v",
            "N",
            "M",
            "success_whole_first_order",
            "success_whole_second_order",
            "success_each_first_order",
            "success_each_second_order",
        ],
        rows,
    )
    return ["fig7.csv"]


def _run_fig8(spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """Total applied phase samples and histogram for an M-shifter chain."""
    v = float(spec.get("v", 0.1))
    m = int(spec.get("M", 15))
    n = int(spec.get("N", 4))
    runs = int(spec.get("trials", 5000))
    deltas = _phase_noise_samples(seed_for(spec.seed(), "fig8"), runs, n, m) * math.sqrt(v)
    phases = {scheme: total_phases_batch(deltas, scheme) for scheme in ("noavg", "whole", "each")}
    rows = [
        [v, m, n, t, phases["noavg"][t], phases["whole"][t], phases["each"][t]]
        for t in range(runs)
    ]
    write_csv(
        out_dir / "fig8_samples.csv",
        ["v", "M", "N", "run", "phase_noavg", "phase_whole", "phase_each"],
        rows,
    )
    edges, _ = histogram(phases["noavg"])
    counts = {scheme: histogram(phases[scheme])[1] for scheme in phases}
    hist_rows = [
        [v, m, n, edges[b], edges[b + 1], counts["noavg"][b], counts["whole"][b], counts["each"][b]]
        for b in range(len(edges) - 1)
    ]
    write_csv(
        out_dir / "fig8_histogram.csv",
        ["v", "M", "N", "bin_left", "bin_right", "count_noavg", "count_whole", "count_each"],
        hist_rows,
    )
    return ["fig8_samples.csv", "fig8_histogram.csv"]


def _run_fig10(spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """Variance of the total applied phase vs chain length M."""
    v = float(spec.get("v", 0.1))
    n = int(spec.get("N", 4))
    m_max = int(spec.get("M", 15))
    runs = int(spec.get("trials", 50000))
    normals = _phase_noise_samples(seed_for(spec.seed(), "fig10"), runs, n, m_max)
    deltas = normals * math.sqrt(v)
    rows = []
    for m in range(1, m_max + 1):
        sub = deltas[:, :, :m]
        rows.append(
            [
                v,
                n,
                m,
                runs,
                sample_variance(total_phases_batch(sub, "noavg")),
                sample_variance(total_phases_batch(sub, "whole")),
                sample_variance(total_phases_batch(sub, "each")),
                analytics.variance_predicted(v, m, 1),
                analytics.variance_predicted(v, m, n),
                analytics.variance_max(),
            ]
        )
    write_csv(
        out_dir / "fig10.csv",
        [
            "v",
            "N",
            "M",
            "runs",
            "var_noavg",
            "var_whole",
            "var_each",
            "predicted_noavg",
            "predicted_avg",
            "variance_max",
        ],
        rows,
    )
    return ["fig10.csv"]


def _run_fig11(spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """Variance of the total applied phase vs single-shifter variance v."""
    m = int(spec.get("M", 4))
    n = int(spec.get("N", 4))
    runs = int(spec.get("trials", 50000))
    if spec.parameters.get("v") is not None:
        v_grid = [float(spec.parameters["v"])]
    else:
        v_grid = [round(0.02 * k, 10) for k in range(1, 16)]
    normals = _phase_noise_samples(seed_for(spec.seed(), "fig11"), runs, n, m)
    rows = []
    for v in v_grid:
        deltas = normals * math.sqrt(v)
        rows.append(
            [
                v,
                n,
                m,
                runs,
                m * v,
                sample_variance(total_phases_batch(deltas, "noavg")),
                sample_variance(total_phases_batch(deltas, "whole")),
                sample_variance(total_phases_batch(deltas, "each")),
                analytics.variance_predicted(v, m, 1),
                analytics.variance_predicted(v, m, n),
                analytics.variance_max(),
            ]
        )
    write_csv(
        out_dir / "fig11.csv",
        [
            "v",
            "N",
            "M",
            "runs",
            "Mv",
            "var_noavg",
            "var_whole",
            "var_each",
            "predicted_noavg",
            "predicted_avg",
            "variance_max",
        ],
        rows,
    )
    return ["fig11.csv"]


def _run_tables4(spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """First-order coefficients of the four-mode network by finite-difference
    slope estimation, against the benchmark table values."""
    trials = int(spec.get("trials", 200000))
    n_list = spec.n_list([1, 2, 4])
    v_pair = (0.004, 0.008)
    rows = []
    for input_state in INPUT_STATES:
        table = TABLE_COEFFS[input_state]
        for n in n_list:
            strategies = ("bare",) if n == 1 else ("whole", "each")
            for label in strategies:
                strategy = "whole" if label == "bare" else label
                tag = f"tables4:{input_state}:N={n}:{label}"
                slopes = measure_slopes(
                    input_state, n, strategy, trials, seed_for(spec.seed(), tag), v_pair
                )
                name = "".join(map(str, input_state))
                common = [name, n, label, trials, v_pair[0], v_pair[1]]
                for occ, est in slopes.outcomes.items():
                    expected = table["rows"].get(occ, {}).get(n, 0)
                    sign = -1.0 if occ == input_state else 1.0
                    rows.append(
                        common + ["".join(map(str, occ)), sign * est.slope, est.stderr, float(expected)]
                    )
                rows.append(
                    common
                    + [
                        "correct_post",
                        -slopes.correct_post.slope,
                        slopes.correct_post.stderr,
                        float(table["post"][n]),
                    ]
                )
    write_csv(
        out_dir / "tables4.csv",
        [
            "input",
            "N",
            "strategy",
            "trials",
            "v_lo",
            "v_hi",
            "outcome",
            "coeff_measured",
            "stderr",
            "coeff_expected",
        ],
        rows,
    )
    return ["tables4.csv"]


def _run_scan(spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """Entrywise variance of the averaged matrix vs redundancy N."""
    v = float(spec.get("v", 0.1))
    seeds = int(spec.get("trials", 500))
    n_list = spec.n_list([1, 2, 4, 8, 16])
    result = variance_scan(
        mz_circuit(0.0, v), None, n_list, seeds, seed_for(spec.seed(), "scan")
    )
    rows = []
    for n in n_list:
        var_re = result[n]["var_re"]
        var_im = result[n]["var_im"]
        for r in range(var_re.shape[0]):
            for c in range(var_re.shape[1]):
                rows.append([v, n, seeds, r, c, var_re[r, c], var_im[r, c]])
    write_csv(
        out_dir / "scan.csv",
        ["v", "N", "seeds", "row", "col", "var_re", "var_im"],
        rows,
    )
    return ["scan.csv"]


_PLOTTABLE = {
    "fig1": ("fig1.csv", "N", ["p_correct", "p_wrong", "p_error_modes"]),
    "fig4": ("fig4.csv", "N", ["success_mc", "correct_post_mc"]),
    "fig6": ("fig6.csv", "M", ["correct_noavg", "correct_whole", "correct_each"]),
    "fig7": ("fig7.csv", "M", ["success_whole_second_order", "success_each_second_order"]),
    "fig8": ("fig8_histogram.csv", "bin_left", ["count_noavg", "count_whole", "count_each"]),
    "fig10": ("fig10.csv", "M", ["var_noavg", "var_whole", "var_each"]),
    "fig11": ("fig11.csv", "v", ["var_noavg", "var_whole", "var_each"]),
    "tables4": ("tables4.csv", "N", ["coeff_measured"]),
    "scan": ("scan.csv", "N", ["var_re"]),
}


def _write_plot_script(name: str, out_dir: Path) -> str:
    csv_file, x, ys = _PLOTTABLE[name]
    path = out_dir / f"{name}.gnuplot"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("set datafile separator ','\n")
        fh.write("set key autotitle columnhead\n")
        fh.write(f"set xlabel '{x}'\n")
        plots = ", ".join(f"'{csv_file}' using '{x}':'{y}' with linespoints" for y in ys)
        fh.write(f"plot {plots}\n")
    return path.name


_RUNNERS = {
    "fig1": _run_fig1,
    "fig4": _run_fig4,
    "fig6": _run_fig6,
    "fig7": _run_fig7,
    "fig8": _run_fig8,
    "fig10": _run_fig10,
    "fig11": _run_fig11,
    "tables4": _run_tables4,
    "scan": _run_scan,
}


def run_experiment(spec: ExperimentSpec, out_dir, plot_script: bool = False) -> list[str]:
    """Run one named experiment, writing CSV outputs and a manifest.

    Returns the list of files written (relative to ``out_dir``).
    """
    if spec.name == "validate":
        raise ValueError("validate is dispatched separately")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = _RUNNERS[spec.name](spec, out_dir)
    if plot_script and spec.name in _PLOTTABLE:
        files.append(_write_plot_script(spec.name, out_dir))
    manifest_name = f"{spec.name}_manifest.json"
    write_manifest(
        out_dir / manifest_name,
        spec.name,
        spec.seed(),
        {k: v for k, v in sorted(spec.parameters.items()) if v is not None},
        files,
    )
    files.append(manifest_name)
    return files
