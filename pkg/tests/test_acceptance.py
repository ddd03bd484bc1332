"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the status lines go
straight to the terminal even without ``-s``.
"""

import csv
import io
import math
import time

import numpy as np
import pytest

from rrdps import cli, security_bounds, spectral_oracle, verify
from rrdps.protocol_sim import ChannelModel, SimConfig, bob_measure_batch, outcome_table, run_rounds


@pytest.fixture
def report(capsys):
    def _report(n, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail})")
        assert ok, f"criterion {n} failed: {detail}"

    return _report


def cli_output(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    assert code == 0, err
    return out


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def within_3_sigma(hits, n, p):
    return abs(hits - n * p) <= 3 * math.sqrt(n * p * (1 - p))


def test_criterion_1_determinant(report):
    t0 = time.perf_counter()
    check = verify.check_determinant_identity(n_draws=1000, max_dim=8, seed=0)
    elapsed = time.perf_counter() - t0
    report(
        1, "closed-form determinant vs elimination", check.passed and elapsed < 1.0,
        f"worst scaled error {check.max_deviation:.2e} <= 1e-9, {elapsed:.2f}s < 1s",
    )


def test_criterion_2_eigenvalue_closure(report):
    t0 = time.perf_counter()
    check = verify.check_eigenvalue_closure(range(3, 13), (0.0, 0.1, 1.0, 10.0))
    elapsed = time.perf_counter() - t0
    spot_m = spectral_oracle.max_eigenvalue(spectral_oracle.build_lambda_minus(6, 2, 1.0))
    spot_p = spectral_oracle.max_eigenvalue(spectral_oracle.build_lambda_plus(6, 4, 1.0))
    spots_ok = abs(spot_m - 0.34641016) < 1e-8 and abs(spot_p - 0.4) < 1e-9
    report(
        2, "dense eigenvalues equal closed forms", check.passed and spots_ok and elapsed < 5.0,
        f"worst {check.max_deviation:.2e} <= 1e-9, spots {spot_m:.8f}/{spot_p:.8f}, {elapsed:.2f}s < 5s",
    )


def test_criterion_3_joint_space(report):
    t0 = time.perf_counter()
    checks = verify.check_joint_space(L_values=(3, 4, 5))
    elapsed = time.perf_counter() - t0
    failed = [c.check_name for c in checks if not c.passed]
    worst = {c.check_name: c.max_deviation for c in checks}
    report(
        3, "joint-space eigenvalues and conjugation identities, L=3..5",
        not failed and elapsed < 60.0,
        f"failed={failed}, eigen dev {max(v for k, v in worst.items() if 'eigen' in k):.1e}, {elapsed:.1f}s < 60s",
    )


def test_criterion_4_bound_endpoints(report):
    worst_cap = worst_zero = 0.0
    for L in (6, 10, 64):
        for nu in range(1, L - 1):
            for extra in (0.0, 0.01, 0.2):
                e = min(security_bounds.e_star(L, nu) + extra, 0.5)
                worst_cap = max(worst_cap, abs(security_bounds.phase_error_bound_value(L, nu, e) - nu / (L - 1)))
            worst_zero = max(worst_zero, abs(security_bounds.phase_error_bound_value(L, nu, 0.0) - (nu - 1) / L))
    ex1 = security_bounds.phase_error_bound_value(6, 3, 0.3)
    ex2 = security_bounds.phase_error_bound_value(6, 3, 0.0)
    ok = worst_cap <= 1e-6 and worst_zero <= 1e-4 and abs(ex1 - 0.6) <= 1e-6 and abs(ex2 - 1 / 3) <= 1e-4
    report(
        4, "bound saturates above threshold and matches zero-error limit", ok,
        f"cap dev {worst_cap:.1e} <= 1e-6, e=0 dev {worst_zero:.1e} <= 1e-4, F(6,3,0.3)={ex1:.6f}, F(6,3,0)={ex2:.6f}",
    )


def test_criterion_5_bound_curves(report, capsys):
    problems = []
    worst_seg = 0.0
    for L, nu_max in ((6, 3), (64, 32)):
        table = csv_rows(cli_output(capsys, "bounds", "--L", str(L), "--nu-max", str(nu_max)))
        by_nu = {}
        for r in table:
            by_nu.setdefault(int(r["nu"]), []).append((float(r["e"]), float(r["F"]), float(r["F_segment"])))
        if sorted(by_nu) != list(range(1, min(nu_max, L - 2) + 1)):
            problems.append(f"L={L} missing nu rows")
        curves = {}
        for nu, pts in by_nu.items():
            pts.sort()
            f = np.array([p[1] for p in pts])
            seg = np.array([p[2] for p in pts])
            curves[nu] = f
            if np.any(np.diff(f) < -1e-12):
                problems.append(f"L={L} nu={nu} not monotone in e")
            if np.any(f > nu / (L - 1) + 1e-12) or np.any(f < 0):
                problems.append(f"L={L} nu={nu} exceeds cap")
            worst_seg = max(worst_seg, float(np.max(np.abs(f - seg))))
        for nu in sorted(curves)[:-1]:
            if np.any(curves[nu] > curves[nu + 1] + 1e-12):
                problems.append(f"L={L} nu={nu} not monotone in nu")
    ok = not problems and worst_seg <= 0.02
    report(5, "bound curves for L=6 and L=64", ok, f"segment fit {worst_seg:.4f} <= 0.02, issues={problems}")


def test_criterion_6_rate_curves(report, capsys):
    t0 = time.perf_counter()
    curves = {}
    for L in (6, 64):
        out = cli_output(
            capsys, "keyrate", "--L", str(L), "--e", "0.03", "--f-ec", "1.1",
            "--eta-min", "1e-3", "--eta-max", "1", "--eta-points", "13",
        )
        for r in csv_rows(out):
            curves.setdefault((L, r["monitored"] == "1"), []).append((float(r["eta"]), float(r["rate_per_pulse"])))
    elapsed = time.perf_counter() - t0
    problems = []
    gains = {}
    for L in (6, 64):
        mon = sorted(curves[(L, True)], reverse=True)
        unm = sorted(curves[(L, False)], reverse=True)
        if [m[0] for m in mon] != [u[0] for u in unm]:
            problems.append(f"L={L} eta grids differ")
        for (eta, rm), (_, ru) in zip(mon, unm):
            if rm < ru:
                problems.append(f"L={L} eta={eta:.3g} monitored below unmonitored")
        for rates in ([m[1] for m in mon], [u[1] for u in unm]):
            if np.any(np.diff(rates) > 0):
                problems.append(f"L={L} rate grows as eta falls")
        gains[L] = [(rm - ru) / ru for (_, rm), (_, ru) in zip(mon, unm) if ru > 0]
    n_matched = min(len(gains[6]), len(gains[64]))
    gain_ok = n_matched > 0 and all(g6 > g64 for g6, g64 in zip(gains[6], gains[64]))
    ok = not problems and gain_ok and elapsed < 300
    report(
        6, "key-rate curves for L=6 and L=64", ok,
        f"gain L=6 min {min(gains[6]):.3g} vs L=64 max {max(gains[64]):.3g} over {n_matched} points, "
        f"issues={problems}, {elapsed:.0f}s < 300s",
    )


def test_criterion_7_simulator(report):
    t0 = time.perf_counter()
    n = 10**6
    ideal = run_rounds(SimConfig(6, 0.1, 0.5, n, seed=0))
    flip = run_rounds(SimConfig(6, 0.1, 0.5, n, channel=ChannelModel("phase_flip", 0.015), seed=0))
    deph = run_rounds(SimConfig(6, 0.1, 0.5, n, channel=ChannelModel("position_dephase", 1.0), seed=0))

    rng = np.random.default_rng(np.random.SeedSequence(0))
    psi = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
    success, k, l, s_b = bob_measure_batch(np.tile(psi, (n, 1)), rng)
    k_tab, l_tab, s_tab = outcome_table(3)
    expected = {(0, 1, 0): 0.5, (0, 1, 1): 0.0, (0, 2, 0): 0.125, (0, 2, 1): 0.125, (1, 2, 0): 0.125, (1, 2, 1): 0.125}
    n_ok = int(success.sum())
    freq_ok = True
    for key, p in expected.items():
        hits = int(np.sum((k == key[0]) & (l == key[1]) & (s_b == key[2])))
        freq_ok &= hits == 0 if p == 0 else within_3_sigma(hits, n_ok, p)
    elapsed = time.perf_counter() - t0

    ok = (
        ideal.errors_in_sample == 0
        and within_3_sigma(flip.errors_in_sample, flip.sampled, 0.02955)
        and within_3_sigma(deph.errors_in_sample, deph.sampled, 0.5)
        and freq_ok
        and elapsed < 120
    )
    report(
        7, "simulator statistics at 1e6 rounds", ok,
        f"e ideal {ideal.e_emp}, flip {flip.e_emp:.5f} vs 0.02955, dephase {deph.e_emp:.4f} vs 0.5, "
        f"outcome frequencies ok={freq_ok}, {elapsed:.1f}s < 120s",
    )


def test_criterion_8_povm_identities(report):
    checks = verify.check_povm_identities(range(3, 9))
    worst = max(c.max_deviation for c in checks)
    report(8, "measurement operator identities, L=3..8", all(c.passed for c in checks), f"worst {worst:.1e} <= 1e-12")


def test_criterion_9_determinism(report, capsys, tmp_path):
    runs = [
        ["bounds", "--L", "6", "--e-points", "21"],
        ["keyrate", "--L", "6", "--eta-points", "3"],
        ["simulate", "--rounds", "100000", "--channel", "phase_flip", "--channel-param", "0.015", "--seed", "42"],
        ["verify", "--seed", "3"],
    ]
    mismatched = []
    for argv in runs:
        target = tmp_path / f"{argv[0]}.out"
        side = tmp_path / f"{argv[0]}.out.manifest.json"
        outputs = []
        for _ in range(2):
            cli.main(argv + ["--out", str(target)])
            capsys.readouterr()
            outputs.append(target.read_bytes() + (side.read_bytes() if side.exists() else b""))
        if outputs[0] != outputs[1]:
            mismatched.append(argv[0])
    report(9, "byte-identical repeated runs of every subcommand", not mismatched, f"mismatched={mismatched}")
