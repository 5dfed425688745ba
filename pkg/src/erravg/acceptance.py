"""Validation suite: every advertised numerical behavior, one check each.

Each criterion function runs its measurement at the stated tolerance and
returns a :class:`CriterionResult`; :func:`run_all` executes the full suite
and :func:`format_report` renders one pass/fail line per criterion with the
measured and expected values.

Criterion 3's second clause compares the simulated post-selected two-photon
coincidence against the first-order reference constant 1 - v/2N.  The exact
expectation ratio is 1 - v/N + O(v^2) (analytics.tp_coincidence_post_exact),
so that clause fails by construction; it is reported honestly rather than
retuned.
"""

from __future__ import annotations

import filecmp
import math
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from erravg import analytics
from erravg.analytics import ChainParams, RecurrenceParams
from erravg.circuit import compile_circuit, mz_circuit, sample_realization
from erravg.encoding import EncodingScheme, effective_matrix, encode_circuit, encode_matrix
from erravg.experiments import (
    DEFAULT_SEED,
    ExperimentSpec,
    _phase_noise_samples,
    run_experiment,
    seed_for,
)
from erravg.fock import output_distribution, postselect
from erravg.fourmode import INPUT_STATES, TABLE_COEFFS, four_mode_circuit, measure_slopes
from erravg.montecarlo import MCConfig, run, trial_rng, variance_scan
from erravg.phasestats import sample_variance, total_phases_batch

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"


@dataclass
class CriterionResult:
    number: int
    title: str
    status: str
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        return f"[{self.status}] criterion {self.number:2d}: {self.title}"


class _Checker:
    def __init__(self, number: int, title: str):
        self.result = CriterionResult(number, title, PASS)

    def check(self, ok: bool, detail: str) -> None:
        if not ok:
            self.result.status = FAIL
        self.result.details.append(f"{'ok ' if ok else 'BAD'} {detail}")

    def skip(self, reason: str) -> CriterionResult:
        self.result.status = SKIP
        self.result.details.append(reason)
        return self.result


def _encoded_mz(theta: float, v: float, n: int, strategy: str = "whole"):
    return encode_circuit(mz_circuit(theta, v), EncodingScheme(n, "tree", strategy))


def _guard(checker: _Checker, trials: int | None, minimum: int):
    if trials is not None and trials < minimum:
        return checker.skip(
            f"insufficient statistical power: {trials} trials < required {minimum}"
        )
    return None


def criterion_1(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(1, "single-photon success asymptote vs exact law")
    guard = _guard(c, trials, 20000)
    if guard:
        return guard
    trials = trials or 100000
    v = 0.1
    last = None
    for n in (1, 2, 4, 8, 16, 32):
        cfg = MCConfig(
            circuit=_encoded_mz(0.0, v, n),
            input_state=(1, 0),
            observables=("p_success",),
            trials=trials,
            master_seed=seed_for(seed, f"c1:N={n}"),
        )
        est = run(cfg)["p_success"]
        expected = analytics.sp_success_exact(v, n)
        tol = 3.0 * est.stderr + 1e-9
        c.check(
            abs(est.mean - expected) <= tol,
            f"N={n}: success {est.mean:.6f} vs exact {expected:.6f} (tol {tol:.2e})",
        )
        last = est
    c.check(
        abs(last.mean - 0.95) <= 0.01,
        f"N=32 success {last.mean:.6f} within 0.01 of 0.95",
    )
    return c.result


def criterion_2(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(2, "post-selected correctness 1 - v/4N")
    guard = _guard(c, trials, 20000)
    if guard:
        return guard
    trials = trials or 100000
    v = 0.01
    for n in (2, 4, 8):
        cfg = MCConfig(
            circuit=_encoded_mz(0.0, v, n),
            input_state=(1, 0),
            observables=("correct_post",),
            trials=trials,
            master_seed=seed_for(seed, f"c2:N={n}"),
        )
        est = run(cfg)["correct_post"]
        expected = analytics.sp_correct_post(v, n)
        tol = 5e-4 + 3.0 * est.stderr
        c.check(
            abs(est.mean - expected) <= tol,
            f"N={n}: correct|post {est.mean:.6f} vs {expected:.6f} (tol {tol:.2e})",
        )
    return c.result


def criterion_3(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(3, "two-photon HOM baseline and coincidence 1 - v/2N")
    guard = _guard(c, trials, 20000)
    if guard:
        return guard
    trials = trials or 100000
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    hom = output_distribution(h, (1, 1)).entries[(1, 1)]
    c.check(hom == 0.0, f"noiseless HOM P(|1,1>) = {hom!r} (exact zero)")
    v, n = 0.01, 4
    cfg = MCConfig(
        circuit=_encoded_mz(0.0, v, n),
        input_state=(1, 1),
        observables=("coincidence_post",),
        trials=trials,
        master_seed=seed_for(seed, "c3"),
    )
    est = run(cfg)["coincidence_post"]
    expected = analytics.tp_coincidence_post(v, n)
    tol = 5e-4 + 3.0 * est.stderr
    exact = analytics.tp_coincidence_post_exact(v, n)
    c.check(
        abs(est.mean - expected) <= tol,
        f"coincidence|post {est.mean:.6f} vs 1-v/2N = {expected:.6f} "
        f"(tol {tol:.2e}; exact ratio {exact:.6f} = 1-v/N at first order)",
    )
    return c.result


def criterion_4(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(4, "averaged-matrix variance halves when N doubles")
    guard = _guard(c, trials, 100)
    if guard:
        return guard
    seeds = trials or 500
    scan = variance_scan(
        mz_circuit(0.0, 0.1), None, [1, 2, 4, 8, 16], seeds, seed_for(seed, "c4")
    )
    pooled = {n: float(v["var_re"].sum() + v["var_im"].sum()) for n, v in scan.items()}
    for n in (1, 2, 4, 8):
        ratio = pooled[n] / pooled[2 * n]
        c.check(1.5 <= ratio <= 2.5, f"var({n})/var({2 * n}) = {ratio:.3f} in [1.5, 2.5]")
    return c.result


def criterion_5(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(5, "kept block equals the copy average for both encoders")
    seeds = trials or 100
    base = mz_circuit(0.3, 0.1)
    worst = 0.0
    for n in (2, 4, 8):
        for s in range(seeds):
            rng = trial_rng(seed_for(seed, f"c5:N={n}"), s)
            copies = [compile_circuit(base, sample_realization(base, rng)) for _ in range(n)]
            mean = effective_matrix(copies)
            for encoder in ("tree", "dft"):
                full = encode_matrix(copies, encoder)
                kept = full[np.ix_([0, n], [0, n])]
                worst = max(worst, float(np.max(np.abs(kept - mean))))
    c.check(worst <= 1e-12, f"max kept-block deviation {worst:.2e} <= 1e-12 over {seeds} seeds")
    return c.result


def criterion_6(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(6, "zero noise gives P(success)=1 and the target distribution")
    cases = []
    for theta in (0.0, 0.7):
        for inp in ((1, 0), (1, 1)):
            cases.append((mz_circuit(theta, 0.0), inp))
    four = four_mode_circuit(0.0)
    for inp in ((1, 0, 0, 0), (2, 0, 0, 0), (1, 1, 0, 0)):
        cases.append((four, inp))
    for base, inp in cases:
        target_u = compile_circuit(base, np.zeros(len(base.phase_shifters())))
        target_dist = output_distribution(target_u, inp)
        for n in (2, 4):
            for strategy in ("whole", "each"):
                enc = encode_circuit(base, EncodingScheme(n, "tree", strategy))
                u = compile_circuit(enc.circuit, np.zeros(len(enc.circuit.phase_shifters())))
                full_input = [0] * enc.circuit.mode_count
                for j, nptn in enumerate(inp):
                    full_input[enc.kept_modes[j]] = nptn
                result = postselect(output_distribution(u, tuple(full_input)), enc.kept_modes)
                dev = abs(result.p_success - 1.0)
                for occ, p in target_dist.entries.items():
                    dev = max(dev, abs(result.conditional.entries.get(occ, 0.0) - p))
                c.check(
                    dev <= 1e-10,
                    f"{strategy} N={n} input {inp} on {base.mode_count} modes: max dev {dev:.2e}",
                )
    return c.result


def criterion_7(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(7, "phase-chain variance laws and the pi^2/3 cap")
    guard = _guard(c, trials, 5000)
    if guard:
        return guard
    runs = trials or 50000
    v, n, m_max = 0.1, 4, 15
    normals = _phase_noise_samples(seed_for(seed, "c7"), runs, n, m_max)
    deltas = normals * math.sqrt(v)
    variances = {}
    for m in range(1, m_max + 1):
        sub = deltas[:, :, :m]
        variances[m] = {
            scheme: sample_variance(total_phases_batch(sub, scheme))
            for scheme in ("noavg", "whole", "each")
        }
    for m in range(1, 6):
        row = variances[m]
        dev_noavg = abs(row["noavg"] - v * m) / (v * m)
        dev_whole = abs(row["whole"] - v * m / n) / (v * m / n)
        dev_each = abs(row["each"] - v * m / n) / (v * m / n)
        c.check(dev_noavg <= 0.10, f"M={m}: noavg within 10% of vM (dev {dev_noavg:.1%})")
        c.check(dev_whole <= 0.10, f"M={m}: whole within 10% of vM/N (dev {dev_whole:.1%})")
        c.check(dev_each <= 0.10, f"M={m}: each within 10% of vM/N (dev {dev_each:.1%})")
    whole_devs = [abs(variances[m]["whole"] - v * m / n) / (v * m / n) for m in range(6, m_max + 1)]
    each_devs = [abs(variances[m]["each"] - v * m / n) / (v * m / n) for m in range(6, m_max + 1)]
    c.check(
        max(whole_devs) > 0.20,
        f"whole departs > 20% somewhere in M=6..15 (max dev {max(whole_devs):.1%})",
    )
    c.check(
        max(each_devs) <= 0.20,
        f"each never departs > 20% in M=6..15 (max dev {max(each_devs):.1%})",
    )
    uniform = trial_rng(seed_for(seed, "c7:uniform"), 0).uniform(-math.pi, math.pi, size=1_000_000)
    cap = analytics.variance_max()
    dev_cap = abs(sample_variance(uniform) - cap) / cap
    c.check(dev_cap <= 0.01, f"uniform-phase variance within 1% of pi^2/3 (dev {dev_cap:.2%})")
    return c.result


def criterion_8(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(8, "whole-system averaging threshold near Mv = 0.5")
    guard = _guard(c, trials, 5000)
    if guard:
        return guard
    runs = trials or 50000
    m, n = 4, 4
    v_grid = [0.02 * k for k in range(1, 16)]
    normals = _phase_noise_samples(seed_for(seed, "c8"), runs, n, m)
    var_whole = []
    for v in v_grid:
        deltas = normals * math.sqrt(v)
        var_whole.append(sample_variance(total_phases_batch(deltas, "whole")))
    departure_mv = None
    for k in range(1, len(v_grid) - 1):
        local_slope = (var_whole[k + 1] - var_whole[k - 1]) / (v_grid[k + 1] - v_grid[k - 1])
        if abs(local_slope - m / n) / (m / n) > 0.20:
            departure_mv = m * v_grid[k]
            break
    c.check(
        departure_mv is not None and 0.3 <= departure_mv <= 0.8,
        f"local slope departs > 20% from M/N at Mv = {departure_mv}",
    )
    return c.result


def criterion_9(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(9, "four-mode first-order coefficients match the tables")
    guard = _guard(c, trials, 50000)
    if guard:
        return guard
    trials = trials or 200000
    for input_state in INPUT_STATES:
        table = TABLE_COEFFS[input_state]
        for n in (1, 2, 4):
            strategies = ("whole",) if n == 1 else ("whole", "each")
            for strategy in strategies:
                tag = f"c9:{input_state}:N={n}:{strategy}"
                slopes = measure_slopes(
                    input_state, n, strategy, trials, seed_for(seed, tag)
                )
                label = f"{''.join(map(str, input_state))} N={n} {strategy}"
                for occ, est in slopes.outcomes.items():
                    expected = float(table["rows"].get(occ, {}).get(n, 0))
                    measured = -est.slope if occ == input_state else est.slope
                    if expected == 0.0:
                        c.check(
                            abs(measured) < 0.1,
                            f"{label} {occ}: zero entry, |slope| {abs(measured):.4f} < 0.1",
                        )
                    else:
                        rel = abs(measured - expected) / expected
                        c.check(
                            rel <= 0.15,
                            f"{label} {occ}: coeff {measured:.4f} vs {expected:.4f} "
                            f"(dev {rel:.1%})",
                        )
                expected_post = float(table["post"][n])
                measured_post = -slopes.correct_post.slope
                rel = abs(measured_post - expected_post) / expected_post
                c.check(
                    rel <= 0.15,
                    f"{label} post-correct: coeff {measured_post:.4f} vs {expected_post:.4f} "
                    f"(dev {rel:.1%})",
                )
    return c.result


def criterion_10(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(10, "recurrence reproduces post-selected rows exactly")
    expected_posts = {
        (1, 2): {1: Fraction(1, 2), 2: Fraction(1, 4), 3: Fraction(1, 8)},
        (2, 2): {1: Fraction(1, 1), 2: Fraction(1, 2), 3: Fraction(1, 4)},
        (3, 2): {1: Fraction(3, 2), 2: Fraction(3, 4), 3: Fraction(3, 8)},
    }
    for (a1, b1), targets in expected_posts.items():
        params = RecurrenceParams(a1, b1)
        for rounds, target in targets.items():
            coeff = analytics.recurrence_coefficients(params, rounds)["correct_post"]
            c.check(
                coeff == target,
                f"(a1,b1)=({a1},{b1}) rounds={rounds}: post coeff {coeff} == {target}",
            )
    return c.result


def criterion_11(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(11, "averaging strategies agree to first order")
    for m, n in ((3, 4), (8, 2)):
        diffs = {}
        for v in (1e-3, 1e-4):
            p = ChainParams(m, v, n)
            diffs[v] = abs(
                analytics.chain_success_avg_whole(p) - analytics.chain_success_avg_each(p)
            )
        ratio = diffs[1e-3] / diffs[1e-4]
        c.check(
            80.0 <= ratio <= 120.0,
            f"M={m} N={n}: difference ratio at v=1e-3 vs 1e-4 = {ratio:.1f} (O(v^2))",
        )
    return c.result


def criterion_12(seed: int, trials: int | None = None) -> CriterionResult:
    c = _Checker(12, "seeded experiment reruns are byte-identical")
    with tempfile.TemporaryDirectory() as tmp:
        dirs = [Path(tmp) / "a", Path(tmp) / "b"]
        params: dict = {"seed": 42}
        if trials is not None:
            params["trials"] = trials
        files = []
        for d in dirs:
            files = run_experiment(ExperimentSpec("fig4", dict(params)), d)
        for name in files:
            same = filecmp.cmp(dirs[0] / name, dirs[1] / name, shallow=False)
            c.check(same, f"{name}: identical bytes across reruns")
    return c.result


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
}


def run_all(
    seed: int = DEFAULT_SEED,
    trials: int | None = None,
    only: list[int] | None = None,
) -> list[CriterionResult]:
    numbers = sorted(only) if only else sorted(CRITERIA)
    unknown = [k for k in numbers if k not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criterion numbers: {unknown}; valid: 1..{len(CRITERIA)}")
    return [CRITERIA[k](seed, trials) for k in numbers]


def format_report(results: list[CriterionResult], verbose: bool = True) -> str:
    lines = []
    for res in results:
        lines.append(res.line())
        if verbose:
            lines.extend(f"    {d}" for d in res.details if d.startswith("BAD") or res.status == SKIP)
    counts = {s: sum(1 for r in results if r.status == s) for s in (PASS, FAIL, SKIP)}
    lines.append(
        f"{counts[PASS]} passed, {counts[FAIL]} failed, {counts[SKIP]} skipped"
    )
    return "\n".join(lines)
