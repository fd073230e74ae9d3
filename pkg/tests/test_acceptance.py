"""Acceptance suite: one test per criterion, each prints a pass line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the
per-criterion lines; every tolerance is pinned here, not configurable.
"""

import time

import numpy as np
import pytest

from twogrid import cli, linalg, problems, relaxation, twolevel
from twogrid.rng import SplitMix64

SEEDS = list(range(1001, 1011))
CENTERS = {m: (1.0, relaxation.clustered_eigenvalue(m)) for m in (1, 2, 3)}

# deterministic regression baselines: numerical radii of the W-cycle
# preconditioned operators for the default seeded system, 24 angles
FOV_RADIUS_BASELINES = {
    "B": 8.024141558479545,
    1: 78.8277348111586,
    2: 2184.7812734204645,
    3: 1586684.7062192454,
}


@pytest.fixture(scope="module")
def seeded_systems():
    systems = []
    for seed in SEEDS:
        sys_ = problems.random_block_system(24, 16, seed)
        systems.append((sys_, twolevel.exact_components(sys_)))
    return systems


def test_criterion_01_theorem_clustering(seeded_systems):
    started = time.monotonic()
    worst = 0.0
    for sys_, comp in seeded_systems:
        for m in (1, 2, 3):
            cfg = twolevel.CycleConfig(schedule=relaxation.theorem_schedule(m))
            report = twolevel.preconditioned_spectrum(sys_, comp, cfg)
            centers = np.array(CENTERS[m])
            deviation = np.min(
                np.abs(report.eigenvalues[:, None] - centers[None, :]), axis=1
            ).max()
            worst = max(worst, float(deviation))
            assert deviation <= 1e-8
    elapsed = time.monotonic() - started
    assert elapsed < 5.0
    print(f"\nACCEPTANCE 1 PASS: clustering within {worst:.2e} of "
          f"{{1, 1-1/(2m+1)^2}} on 10 systems, m in {{1,2,3}}, {elapsed:.2f}s")


def test_criterion_02_gmres_direct_method(seeded_systems):
    worst_iters = 0
    worst_res = 0.0
    for index, (sys_, comp) in enumerate(seeded_systems):
        atil = sys_.matrix()
        b = SplitMix64(5000 + index).complex_matrix(sys_.n, 1)[:, 0]
        for m in (1, 2, 3):
            cfg = twolevel.CycleConfig(schedule=relaxation.theorem_schedule(m))
            out = linalg.gmres(
                lambda x: atil @ x,
                lambda r: twolevel.vcycle_apply(sys_, comp, cfg, r),
                b,
                tol=1e-12,
            )
            rel = out.true_residual / np.linalg.norm(b)
            worst_iters = max(worst_iters, out.iterations)
            worst_res = max(worst_res, rel)
            assert out.iterations <= 2
            assert rel <= 1e-10
    print(f"\nACCEPTANCE 2 PASS: preconditioned GMRES done at iteration "
          f"<= {worst_iters}, worst true relative residual {worst_res:.2e}")


def test_criterion_03_scalar_response_constancy():
    gen = SplitMix64(33)
    lams = []
    for _ in range(80):
        radius = 4.0 * np.sqrt(gen.uniform())
        phi = 2.0 * np.pi * gen.uniform()
        lams.append(complex(radius * np.cos(phi), radius * np.sin(phi)))
    lams += [-4.0 * gen.uniform() for _ in range(19)] + [0.0]
    worst = 0.0
    for m in range(1, 7):
        sched = relaxation.theorem_schedule(m)
        target = 1.0 / (2 * m + 1) ** 2
        for lam in lams:
            value = relaxation.scalar_response_closed(sched, lam).value
            worst = max(worst, abs(value - target))
            assert abs(value - target) <= 1e-12
    worst_pair = 0.0
    for _ in range(200):
        m = 1 + gen.next_uint64() % 5
        sched = relaxation.schedule_from_alphas(
            [0.05 + 0.9 * gen.uniform() for _ in range(m)]
        )
        lam = complex(4.0 * (gen.uniform() - 0.5), 4.0 * (gen.uniform() - 0.5))
        closed = relaxation.scalar_response_closed(sched, lam).value
        oracle = relaxation.scalar_response_oracle(sched, lam).value
        diff = abs(closed - oracle) / max(1.0, abs(closed))
        worst_pair = max(worst_pair, diff)
        assert diff <= 1e-12
    print(f"\nACCEPTANCE 3 PASS: constancy within {worst:.2e} over m=1..6, "
          f"closed-vs-oracle within {worst_pair:.2e} on random schedules")


def test_criterion_04_two_block_identity():
    worst_res = 0.0
    worst_lu = 0.0
    for seed, n1, n2 in ((61, 8, 8), (62, 24, 16), (63, 40, 24), (64, 32, 32)):
        sys_ = problems.random_block_system(n1, n2, seed)
        f = SplitMix64(seed + 7000).complex_matrix(sys_.n, 1)[:, 0]
        u = twolevel.two_block_inverse_apply(sys_, f)
        rel = np.linalg.norm(sys_.matrix() @ u - f) / np.linalg.norm(f)
        direct = linalg.lu_solve(linalg.lu_factor(sys_.matrix()), f)
        lu_diff = np.linalg.norm(u - direct) / np.linalg.norm(direct)
        worst_res = max(worst_res, rel)
        worst_lu = max(worst_lu, lu_diff)
        assert rel <= 1e-10
        assert lu_diff <= 1e-9
    print(f"\nACCEPTANCE 4 PASS: one-shot inverse residual {worst_res:.2e}, "
          f"LU agreement {worst_lu:.2e} up to n=64")


def test_criterion_05_trig_identities():
    gen = SplitMix64(55)
    worst = 0.0
    for m in range(1, 11):
        checked = 0
        while checked < 20:
            x = complex(2.4 * (gen.uniform() - 0.5), 2.4 * (gen.uniform() - 0.5))
            if abs(x) < 0.3 or abs(x - 1) < 0.2 or abs(x + 1) < 0.2:
                continue
            for sign in (1, -1):
                lhs, rhs = relaxation.trig_identity_check(m, x, sign)
                diff = abs(lhs - rhs)
                worst = max(worst, diff)
                assert diff <= 1e-12
            checked += 1
        thetas = [2.0 * np.pi * i / (2 * m + 1) for i in range(1, m + 1)]
        product = np.prod([(1.0 - np.cos(t)) ** 2 for t in thetas])
        expected = ((2 * m + 1) / 2.0 ** m) ** 2
        assert abs(product - expected) <= 1e-12 * max(1.0, expected)
    print(f"\nACCEPTANCE 5 PASS: product identities within {worst:.2e} "
          f"for m <= 10, 20 random x per sign")


def test_criterion_06_invariant_subspaces():
    worst = 0.0
    for seed in (71, 72, 73):
        sys_ = problems.random_block_system(24, 16, seed)
        analysis = twolevel.coupling_analysis(sys_)
        for alpha in (0.3, 0.7, 1.2):
            residual = twolevel.invariant_check(sys_, analysis, alpha)
            worst = max(worst, residual)
            assert residual <= 1e-8
    print(f"\nACCEPTANCE 6 PASS: invariant-subspace residuals within {worst:.2e}")


def test_criterion_07_sweep_ordering(tmp_path):
    started = time.monotonic()
    out = tmp_path / "sweep.csv"
    code = cli.main(["sweep-rho", "--N", "16", "--m-max", "6", "--out", str(out)])
    elapsed = time.monotonic() - started
    assert code == 0
    assert elapsed < 60.0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    assert len(rows) == 10 * 6 + 6 + 6
    rho = {}
    for family, alpha, m, value in rows:
        rho[(family, int(m))] = float(value)
    for m in range(1, 7):
        assert rho[("theorem", m)] <= rho[("constant-2/3", m)] + 1e-14
    for m in range(1, 6):
        assert rho[("theorem", m + 1)] < rho[("theorem", m)]
    gap_m1 = abs(rho[("theorem", 1)] - rho[("constant-2/3", 1)])
    assert gap_m1 <= 1e-10 * rho[("constant-2/3", 1)]
    print(f"\nACCEPTANCE 7 PASS: theorem family at or below constant 2/3 for "
          f"m=1..6 (equal at m=1 within {gap_m1:.1e}), sweep in {elapsed:.1f}s")


def test_criterion_08_dg_stencils_and_sipg():
    for delta in (0.75, 1.0, 2.0, 10.0):
        u = delta / (4.0 * delta - 2.0)
        v = (delta - 1.0) / (4.0 * delta - 2.0)
        expected_el = np.array([
            [u, v, 0, 0], [v, u, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0],
            [u, v, u, v], [v, u, v, u], [0, 0, 1, 0], [0, 0, 0, 1],
        ])
        assert np.abs(
            problems.dg_local_prolongation("element", delta) - expected_el
        ).max() <= 1e-14
        g = (delta - 1.0) / delta
        w = 1.0 / (2.0 * delta)
        expected_int = np.array([
            [g, w, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [w, g, w, 0],
            [0, w, g, w], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, w, g],
        ])
        assert np.abs(
            problems.dg_local_prolongation("interface", delta) - expected_int
        ).max() <= 1e-14
        expected_sm = np.array([[delta, delta - 1.0], [delta - 1.0, delta]])
        expected_sm /= (2.0 * delta - 1.0)
        assert np.abs(
            problems.dg_local_smoother("element", delta) - expected_sm
        ).max() <= 1e-14
        assert np.abs(
            problems.dg_local_smoother("interface", delta) - np.eye(2) / delta
        ).max() <= 1e-14
    matrix = problems.sipg_1d_matrix(8, 2.0)
    sys_ = problems.dg_element_redblack_split(matrix)
    comp = twolevel.exact_components(sys_)
    worst = 0.0
    for m in (1, 2):
        cfg = twolevel.CycleConfig(schedule=relaxation.theorem_schedule(m))
        report = twolevel.preconditioned_spectrum(sys_, comp, cfg)
        worst = max(worst, report.max_deviation)
        assert len(report.cluster_centers) == 2
        assert report.max_deviation <= 1e-8
    print(f"\nACCEPTANCE 8 PASS: printed stencils reproduced at 4 penalties, "
          f"SIPG clustering within {worst:.2e} for m in {{1,2}}")


def test_criterion_09_nonsymmetric_study():
    spec = problems.RandomNonnormalSpec()  # n=64, eta=1, gamma=0.5, seed=42
    b = problems.random_nonnormal(spec)
    sys_ = problems.alternating_split(b)
    comp = twolevel.exact_components(sys_)
    worst = 0.0
    for m in (1, 2, 3):
        cfg = twolevel.CycleConfig(schedule=relaxation.theorem_schedule(m))
        report = twolevel.preconditioned_spectrum(sys_, comp, cfg, refine=True)
        worst = max(worst, report.max_deviation)
        assert len(report.cluster_centers) == 2
        assert all(count > 0 for count in report.multiplicity_per_center)
        assert report.max_deviation <= 1e-7
    boundary_b = linalg.fov_boundary(b, 48)
    enclosure = linalg.hull_distance(boundary_b.points, linalg.eigenvalues(b))
    assert enclosure <= 1e-6 * np.linalg.norm(b, 2)
    policy = twolevel.CoarsePolicy(kind="recursive", direct_threshold=8)
    wcycle = twolevel.exact_components(sys_, coarse_policy=policy)
    radii = {}
    for m in (1, 2, 3):
        cfg = twolevel.CycleConfig(schedule=relaxation.theorem_schedule(m))
        op = twolevel.vcycle_apply(sys_, wcycle, cfg, sys_.matrix())
        radii[m] = linalg.fov_boundary(op, 24).numerical_radius()
        baseline = FOV_RADIUS_BASELINES[m]
        assert abs(radii[m] - baseline) <= 1e-9 * baseline
    assert abs(boundary_b.numerical_radius() - FOV_RADIUS_BASELINES["B"]) \
        <= 1e-9 * FOV_RADIUS_BASELINES["B"]
    # qualitative check on the fixed seed: the range widens with m
    assert radii[1] < radii[2] < radii[3]
    print(f"\nACCEPTANCE 9 PASS: two clusters within {worst:.2e} for m in "
          f"{{1,2,3}}, spectrum enclosed (violation {enclosure:.1e}), "
          f"radii {radii[1]:.3g} < {radii[2]:.3g} < {radii[3]:.3g}")


def test_criterion_10_kernel_sanity():
    gen_seed = 2024
    a = SplitMix64(gen_seed).complex_matrix(48, 48)
    eigs = linalg.eigenvalues(a)
    trace_gap = abs(eigs.sum() - np.trace(a))
    assert trace_gap <= 1e-8 * np.linalg.norm(a)
    det = linalg.lu_factor(a).det()
    det_gap = abs(np.prod(eigs) - det) / abs(det)
    assert det_gap <= 1e-6
    boundary = linalg.fov_boundary(np.array([[0.0, 1.0], [0.0, 0.0]]), 64)
    disc_gap = np.abs(np.abs(boundary.points) - 0.5).max()
    assert disc_gap <= 1e-6
    gen = SplitMix64(77)
    m1, m2 = gen.complex_matrix(3, 3), gen.complex_matrix(3, 3)
    x, y = gen.complex_matrix(3, 1)[:, 0], gen.complex_matrix(3, 1)[:, 0]
    mixed = linalg.kron(m1, m2) @ np.kron(x, y) - np.kron(m1 @ x, m2 @ y)
    mixed_gap = np.abs(mixed).max() / max(1.0, np.abs(np.kron(m1 @ x, m2 @ y)).max())
    assert mixed_gap <= 1e-12
    print(f"\nACCEPTANCE 10 PASS: trace gap {trace_gap:.1e}, det gap "
          f"{det_gap:.1e}, nilpotent disc within {disc_gap:.1e}, "
          f"mixed product within {mixed_gap:.1e}")
