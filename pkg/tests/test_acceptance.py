"""Acceptance suite: one test per criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance and runtime bound is asserted, not just printed.
"""

import time
from pathlib import Path

import numpy as np

from ceapost.core import PsaDataset, new_analysis, sim_table, summarize
from ceapost.extensions import (
    apply_mixed_strategy,
    apply_risk_aversion,
    multi_ce,
    risk_averse_utility,
)
from ceapost.frontier import efficiency_frontier
from ceapost.ingest import archive_hash, load_archive, save_archive
from ceapost.plotspecs import ceac_spec, ceplane_spec, eib_spec, evi_spec, grid_spec
from ceapost.svgrender import render_svg
from ceapost.voi import create_inputs, evppi

from conftest import TINY_COSTS, TINY_EFFECTS, TINY_LABELS
from naive_oracle import naive_stats

GOLDEN = Path(__file__).parent / "golden"


def _report(name: str, started: float, limit: float) -> None:
    elapsed = time.monotonic() - started
    assert elapsed < limit, f"{name}: {elapsed:.2f}s exceeded {limit}s budget"
    print(f"[ACCEPTANCE] {name}: PASS ({elapsed:.2f}s)")


def _rel_ok(value, expected, rel=1e-12):
    expected = np.asarray(expected, dtype=float)
    return np.all(np.abs(np.asarray(value) - expected)
                  <= rel * np.maximum(np.abs(expected), 1e-30))


def tiny_analysis(grid_points=31):
    ds = PsaDataset(TINY_EFFECTS, TINY_COSTS, TINY_LABELS)
    return new_analysis(ds, ref=1, kmax=30.0, grid_points=grid_points)


def test_tiny_fixture_exactness():
    started = time.monotonic()
    a = tiny_analysis()  # 31 points on [0, 30]: contains k = 15 and k = 20
    ki = a.grid.nearest_index(20.0)
    assert a.grid.values[ki] == 20.0
    assert _rel_ok(a.icer[0], 15.0)
    assert _rel_ok(a.eib[ki, 0], 5.0)
    assert _rel_ok(a.ceac[ki, 0], 2 / 3)
    assert _rel_ok(a.evi[ki], 5 / 3)
    assert _rel_ok(a.Ustar[:, ki], [15.0, 25.0, 10.0])
    assert _rel_ok(a.ol[:, ki], [0.0, 0.0, 5.0])
    assert list(a.kstar) == [15.0]
    _report("TINY fixture exactness", started, 1.0)


def test_identity_suite_200_instances():
    started = time.monotonic()
    rng = np.random.default_rng(20260808)
    for _ in range(200):
        n_sim = int(rng.integers(2, 2001))
        n_int = int(rng.integers(2, 6))
        ds = PsaDataset(rng.random((n_sim, n_int)),
                        rng.random((n_sim, n_int)) * 100)
        ref = int(rng.integers(0, n_int))
        a = new_analysis(ds, ref=ref, kmax=float(rng.uniform(10, 100)),
                         grid_points=21)
        # EIB linear in k
        expected = (a.grid.values[:, None] * a.delta_e.mean(axis=0)[None, :]
                    - a.delta_c.mean(axis=0)[None, :])
        scale = max(1.0, float(np.abs(expected).max()))
        assert np.abs(a.eib - expected).max() <= 1e-9 * scale
        # EVPI identities and signs
        assert np.abs(a.evi - a.ol.mean(axis=0)).max() == 0.0
        assert _rel_ok(a.vi.mean(axis=0), a.evi)
        assert np.all(a.evi >= 0)
        assert np.all(a.ol >= 0)
        # CEAC times n_sim is integral
        counts = a.ceac * n_sim
        assert np.abs(counts - np.round(counts)).max() <= 1e-6
        # simultaneous probabilities sum to one
        res = multi_ce(a)
        assert np.abs(res.p_best.sum(axis=1) - 1.0).max() <= 1e-12
    _report("identity suite (200 random instances)", started, 30.0)


def test_brute_force_oracle_equivalence():
    started = time.monotonic()
    rng = np.random.default_rng(7)
    for _ in range(50):
        n_sim = int(rng.integers(2, 7))
        n_int = int(rng.integers(2, 4))
        ds = PsaDataset(rng.random((n_sim, n_int)),
                        rng.random((n_sim, n_int)) * 100)
        ref = int(rng.integers(0, n_int))
        a = new_analysis(ds, ref=ref, kmax=40.0, grid_points=9)
        naive = naive_stats(ds.effects.tolist(), ds.costs.tolist(), ref,
                            list(a.comparisons), a.grid.values.tolist())
        assert a.U.tolist() == naive.U
        assert a.Ustar.tolist() == naive.Ustar
        assert a.ib.tolist() == naive.ib
        assert a.eib.tolist() == naive.eib
        assert a.ceac.tolist() == naive.ceac
        assert a.best.tolist() == naive.best
        assert list(a.kstar) == naive.kstar
        assert a.ol.tolist() == naive.ol
        assert a.vi.tolist() == naive.vi
        assert a.evi.tolist() == naive.evi
        assert [float(x) if d else None
                for x, d in zip(a.icer, a.icer_defined)] == naive.icer
    _report("brute-force oracle equivalence (50 instances)", started, 5.0)


def test_risk_aversion_criteria():
    started = time.monotonic()
    assert abs(risk_averse_utility(10.0, 0.005) - 9.754115) <= 1e-6
    a = tiny_analysis()
    near_zero = apply_risk_aversion(a, [1e-8]).overlays[0]
    # EIB crosses zero at the break-even point, so "relative" is taken
    # against the curve magnitude rather than pointwise.
    scale = max(1.0, float(np.abs(a.eib).max()))
    assert np.abs(near_zero.eib - a.eib).max() <= 1e-6 * scale
    exact = apply_risk_aversion(a, [0.0]).overlays[0]
    assert np.array_equal(exact.eib, a.eib)
    assert np.array_equal(exact.U, a.U)
    assert np.array_equal(exact.evi, a.evi)
    _report("risk aversion", started, 5.0)


def test_mixed_strategy_criteria():
    started = time.monotonic()
    rng = np.random.default_rng(99)
    cases = [tiny_analysis()]
    for _ in range(100):
        n_sim = int(rng.integers(2, 200))
        n_int = int(rng.integers(2, 6))
        ds = PsaDataset(rng.random((n_sim, n_int)),
                        rng.random((n_sim, n_int)) * 100)
        cases.append(new_analysis(ds, ref=0, kmax=50.0, grid_points=11))
    for a in cases:
        q = rng.random(a.n_int)
        q /= q.sum()
        mixed = apply_mixed_strategy(a, q.tolist())
        scale = np.maximum(
            1e-30, np.maximum(np.abs(a.evi), np.abs(mixed.evi))
        )
        assert np.all(mixed.evi >= a.evi - 1e-12 * scale)
        # indicator of the optimal arm reproduces the baseline
        ki = a.n_k // 2
        indicator = np.zeros(a.n_int)
        indicator[int(a.best[ki])] = 1.0
        deg = apply_mixed_strategy(a, indicator.tolist())
        same = a.best == int(a.best[ki])
        diff = np.abs(deg.evi[same] - a.evi[same])
        assert np.all(diff <= 1e-12 * np.maximum(np.abs(a.evi[same]), 1e-30))
    _report("mixed strategy (100 random instances + TINY)", started, 30.0)


def test_evppi_estimator_validation():
    started = time.monotonic()
    rng = np.random.default_rng(424242)
    n = 10_000

    # noiseless: net benefit an exact function of the parameter
    phi = rng.uniform(-1, 1, n)
    ds = PsaDataset(np.column_stack([np.zeros(n), phi]),
                    np.column_stack([np.zeros(n), 2 * phi]))
    a = new_analysis(ds, ref=1, kmax=4.0, grid_points=41)
    inputs = create_inputs(phi[:, None], ["phi"])
    res = evppi(a, ["phi"], inputs, k_subset="full")
    mask = a.evi > 0.05 * a.evi.max()
    rel = np.abs(res.evppi[mask] - a.evi[mask]) / a.evi[mask]
    assert rel.max() <= 0.02

    # independent noise parameter
    ds2 = PsaDataset(rng.normal(1.0, 0.2, (n, 2)), rng.normal(20, 5, (n, 2)))
    a2 = new_analysis(ds2, ref=1, kmax=100.0, grid_points=41)
    noise_inputs = create_inputs(rng.normal(0, 1, (n, 1)), ["noise"])
    res2 = evppi(a2, ["noise"], noise_inputs, k_subset="full")
    mask2 = a2.evi > 0
    assert (res2.evppi[mask2] / a2.evi[mask2]).max() <= 0.05

    # two-point parameter: exact conditional means by group
    g = (rng.random(n) < 0.37).astype(float)
    e3 = np.column_stack([1 + 0.5 * g, 2 - 0.8 * g])
    c3 = np.column_stack([10 + 5 * g, 12 + 2 * g])
    a3 = new_analysis(PsaDataset(e3, c3), ref=1, kmax=40.0, grid_points=41)
    res3 = evppi(a3, ["g"], create_inputs(g[:, None], ["g"]), k_subset="full")
    p1 = g.mean()
    for ki, k in enumerate(a3.grid.values):
        u = k * e3 - c3
        exact = ((1 - p1) * u[g == 0].mean(axis=0).max()
                 + p1 * u[g == 1].mean(axis=0).max() - u.mean(axis=0).max())
        exact = min(max(exact, 0.0), float(a3.evi[ki]))
        if exact > 1e-9:
            assert abs(res3.evppi[ki] - exact) <= 0.01 * exact
    _report("EVPPI estimator validation (n_sim = 10000)", started, 60.0)


def test_create_inputs_deterministic_drop_log():
    started = time.monotonic()
    rng = np.random.default_rng(11)
    x = rng.random(200)
    y = rng.random(200)
    z = rng.random(200)
    mat = np.column_stack([x, y, 2 * x, np.ones(200), x + y, z])
    inputs = create_inputs(
        mat, ["x", "y", "two_x", "ones", "x_plus_y", "z"]
    )
    assert inputs.names == ("x", "y", "z")
    assert [(d.name, d.reason) for d in inputs.dropped] == [
        ("ones", "constant"),
        ("two_x", "linear-combination"),
        ("x_plus_y", "linear-combination"),
    ]
    _report("create_inputs constant/linear-combination drops", started, 5.0)


def test_rendering_determinism_and_frontier():
    started = time.monotonic()
    a = tiny_analysis()
    for spec in (ceplane_spec(a, k=15.0), ceac_spec(a), eib_spec(a),
                 evi_spec(a), grid_spec(a)):
        assert render_svg(spec) == render_svg(spec)
    rng = np.random.default_rng(31)
    for _ in range(100):
        e = rng.random(4)
        c = rng.random(4) * 100
        icers = list(efficiency_frontier(e, c).icers)
        assert all(lo < hi for lo, hi in zip(icers, icers[1:]))
    _report("rendering determinism + frontier ICERs", started, 10.0)


def test_summary_and_sim_table_layout():
    started = time.monotonic()
    a = tiny_analysis(grid_points=7)
    block = summarize(a, 20.0).render()
    assert block == (GOLDEN / "summary_tiny_k20.txt").read_text()
    markers = [
        "Cost-effectiveness analysis summary",
        "Reference intervention:",
        "Comparator intervention:",
        "Optimal decision:",
        "Analysis for willingness to pay parameter k =",
        "Expected utility",
        "EIB",
        "Optimal intervention (max expected utility)",
        "EVPI",
    ]
    positions = [block.index(m) for m in markers]
    assert positions == sorted(positions)
    table = sim_table(a, 20.0)
    assert table.columns == ("U1", "U2", "U*", "IB2_1", "OL", "VI")
    assert table.render() == (GOLDEN / "sim_table_tiny_k20.txt").read_text()
    _report("summary and sim_table layout", started, 5.0)


def test_archive_round_trip_hash_identity(tmp_path):
    started = time.monotonic()
    # TINY
    a = tiny_analysis(grid_points=7)
    path = tmp_path / "tiny.json"
    digest = save_archive(a, path)
    loaded = load_archive(path)
    assert loaded.intact
    rebuilt = new_analysis(a.dataset, ref=a.ref, kmax=a.kmax,
                           grid_points=a.grid_points)
    assert archive_hash(rebuilt) == digest
    # one 10^4-simulation instance
    rng = np.random.default_rng(77)
    big = PsaDataset(rng.random((10_000, 2)), rng.random((10_000, 2)) * 100)
    ab = new_analysis(big, ref=1, kmax=50.0, grid_points=21)
    path2 = tmp_path / "big.json"
    digest2 = save_archive(ab, path2)
    loaded2 = load_archive(path2)
    assert loaded2.intact
    rebuilt2 = new_analysis(big, ref=1, kmax=50.0, grid_points=21)
    assert archive_hash(rebuilt2) == digest2
    _report("archive round trip (TINY + 10^4 sims)", started, 30.0)
