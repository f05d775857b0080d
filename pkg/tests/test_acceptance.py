"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them).  Tolerances are pinned here and
nowhere else; the fixtures are seed-frozen in conftest.py.
"""

import subprocess
import sys

import numpy as np
import pytest

import hankelpath as hp

from oracles import bisect_gap_crossing, solve_k3_oracle

EPS = 0.01


def _report(number: int, name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:2d} [{status}] {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {number} failed: {name} {detail}"


def _segment_bound(pr, g_o, t):
    """(f_approx, gap) of the path segment owning t (bootstrap included)."""
    owner = hp.segment_owner(pr, t)
    if owner < 0:
        return g_o.norm() ** 2, hp.bootstrap_gap(g_o, t)
    g_owner = pr.exact_solutions[owner].g_tilde
    cert = pr.certificates[owner]
    return hp.approx_objective(g_owner, g_o, t), hp.duality_gap(cert, g_o, t)


@pytest.fixture(scope="module")
def scalar_paths():
    out = []
    for g0 in (2.0, -1.5, 0.7):
        g_o = hp.ImpulseResponse(np.array([g0]))
        out.append((g_o, hp.compute_path(g_o, eps=0.04 if g0 != 0.7 else 0.001)))
    return out


@pytest.fixture(scope="module")
def rank1_path(rank1_impulse):
    return hp.compute_path(rank1_impulse, eps=1e-4)


def test_criterion_1_sandwich(sixth_order_impulse, sixth_order_path):
    g_o = sixth_order_impulse
    pr = sixth_order_path
    slack = 1e-6 * (1 + g_o.norm() ** 2)
    worst = -np.inf
    for t in np.linspace(pr.t_max / 60.0, pr.t_max, 50):
        f_ap, gap = _segment_bound(pr, g_o, float(t))
        fresh = hp.solve_constrained(g_o, float(t)).objective
        lower_viol = (f_ap - gap - slack) - fresh
        upper_viol = fresh - (f_ap + slack)
        worst = max(worst, lower_viol, upper_viol)
    _report(1, "sandwich certificate on 50 fresh solves", worst <= 0.0,
            f"worst violation {worst:.3e}")


def test_criterion_2_eps_guarantee(sixth_order_impulse, sixth_order_path):
    g_o = sixth_order_impulse
    pr = sixth_order_path
    ok_samples = all(s.gap <= 1.05 * EPS for s in pr.samples)
    breakpoint_gaps = []
    for i, t in enumerate(pr.breakpoints):
        if t >= pr.t_max * (1 - 1e-12):
            continue  # capped
        if i == 0:
            breakpoint_gaps.append(hp.bootstrap_gap(g_o, t))
        else:
            breakpoint_gaps.append(hp.duality_gap(pr.certificates[i - 1], g_o, t))
    ok_bps = all(0.95 * EPS <= g <= 1.05 * EPS for g in breakpoint_gaps)
    _report(2, "eps-guarantee along the path", ok_samples and ok_bps,
            f"max sample gap {max(s.gap for s in pr.samples):.6f}, "
            f"breakpoint gaps {['%.6f' % g for g in breakpoint_gaps]}")


def test_criterion_3_zero_gap_at_breakpoints(
    sixth_order_impulse, sixth_order_path, rank1_impulse, rank1_path, scalar_paths
):
    worst = 0.0
    cases = [(sixth_order_impulse, sixth_order_path), (rank1_impulse, rank1_path)]
    cases += [(g, p) for g, p in scalar_paths]
    for g_o, pr in cases:
        budget = 1e-6 * (1 + g_o.norm() ** 2)
        for t, cert in zip(pr.breakpoints, pr.certificates):
            worst = max(worst, hp.duality_gap(cert, g_o, t) / budget)
    _report(3, "fresh-certificate gap vanishes at its own breakpoint", worst <= 1.0,
            f"worst gap/budget {worst:.3e}")


def test_criterion_4_perfect_fit_endpoint(sixth_order_impulse):
    g_o = sixth_order_impulse
    t_max = hp.compute_t_max(g_o)
    res = hp.solve_constrained(g_o, t_max)
    err_inf = float(np.max(np.abs(t_max * res.g_tilde.values - g_o.values)))
    ok = res.objective <= 1e-8 * g_o.norm() ** 2 and err_inf <= 1e-4 * float(
        np.max(np.abs(g_o.values))
    )
    _report(4, "perfect fit at t_max", ok,
            f"objective {res.objective:.3e}, sup error {err_inf:.3e}")


def test_criterion_5_scalar_oracle():
    rng = np.random.RandomState(50)
    opts = hp.SolverOptions(primal_tol=1e-13, dual_tol=1e-13, max_iters=20000)
    worst_sol, worst_gap = 0.0, 0.0
    for _ in range(100):
        g0 = float(rng.uniform(-3, 3))
        t = float(rng.uniform(0.05, 3.0))
        res = hp.solve_constrained([g0], t, opts)
        exact = float(np.clip(g0 / t, -1.0, 1.0))
        worst_sol = max(worst_sol, abs(res.g_tilde.values[0] - exact))
        if np.any(res.g_tilde.values):
            cert = hp.subgradient_vector(res.g_tilde, t, g_o=[g0])
            for dt in (0.0, 0.3):
                worst_gap = max(worst_gap, hp.duality_gap(cert, [g0], t + dt))
    # the path on a scalar instance reproduces the clamp at every breakpoint,
    # and the certificate gap vanishes identically along every segment
    g_o = hp.ImpulseResponse(np.array([2.0]))
    pr = hp.compute_path(g_o, eps=0.04, solver_opts=opts)
    for t, sol in zip(pr.breakpoints, pr.exact_solutions):
        exact = float(np.clip(2.0 / t, -1.0, 1.0))
        worst_sol = max(worst_sol, abs(sol.g_tilde.values[0] - exact))
    for i, cert in enumerate(pr.certificates[:-1]):
        for t in np.linspace(pr.breakpoints[i], pr.breakpoints[i + 1], 20):
            worst_gap = max(worst_gap, hp.duality_gap(cert, g_o, float(t)))
    ok = worst_sol <= 1e-10 and worst_gap <= 1e-12
    _report(5, "scalar clamp oracle (100 random pairs + path)", ok,
            f"worst solution error {worst_sol:.3e}, worst gap {worst_gap:.3e}")


def test_criterion_6_small_instance_oracle():
    rng = np.random.RandomState(51)
    worst = 0.0
    for _ in range(20):
        g_o = rng.randn(3)
        t = float(rng.uniform(0.1, 2.0))
        res = hp.solve_constrained(g_o, t)
        _, obj_ref = solve_k3_oracle(g_o, t)
        scale = max(obj_ref, 1e-12)
        worst = max(worst, abs(res.objective - obj_ref) / scale)
    _report(6, "k_max=3 dense-grid + projected-gradient oracle (20 instances)",
            worst <= 1e-4, f"worst relative objective error {worst:.3e}")


def test_criterion_7_quadratic_gap_law(
    sixth_order_impulse, sixth_order_path, rank1_impulse, rank1_path
):
    worst_quad, worst_dt = 0.0, 0.0
    for g_o, pr in ((sixth_order_impulse, sixth_order_path), (rank1_impulse, rank1_path)):
        budget = 1e-6 * (1 + g_o.norm() ** 2)
        for i in range(pr.m - 1):
            cert = pr.certificates[i]
            a = cert.residual_dir_norm
            t_lo, t_hi = pr.breakpoints[i], pr.breakpoints[i + 1]
            for t in np.linspace(t_lo, t_hi, 20):
                gap = hp.duality_gap(cert, g_o, float(t))
                worst_quad = max(worst_quad, abs(gap - (t - t_lo) ** 2 * a**2) / budget)
            if t_hi < pr.t_max * (1 - 1e-12) and a > 0:
                t_closed = t_lo + np.sqrt(pr.epsilon) / a
                t_bisect = bisect_gap_crossing(
                    lambda x: hp.duality_gap(cert, g_o, x), pr.epsilon, t_lo, pr.t_max
                )
                worst_dt = max(worst_dt, abs(t_closed - t_bisect))
    ok = worst_quad <= 1.0 and worst_dt <= 1e-8
    _report(7, "quadratic gap law and closed-form breakpoint step", ok,
            f"worst |d-(dt a)^2|/budget {worst_quad:.3e}, closed-vs-bisect {worst_dt:.3e}")


def test_criterion_8_order_selection(sixth_order_impulse, sixth_order_path):
    pr = sixth_order_path
    sig0 = hp.hankel_singular_values(sixth_order_impulse)
    fixture_ok = sig0[2] / sig0[0] <= 0.01
    ratios = [s[2] / s[0] for s in pr.singular_values]
    prefix = 0
    for v in ratios:
        if v <= 0.05:
            prefix += 1
        else:
            break
    ok = fixture_ok and prefix >= 1 and pr.m <= 30
    _report(8, "sigma_3 drop prefix and bounded solve count", ok,
            f"sigma3/sigma1 per breakpoint {['%.1e' % v for v in ratios]}, m={pr.m}")


def test_criterion_9_property_suites():
    rng = np.random.RandomState(52)
    failures = 0

    # adjoint identity
    for _ in range(1000):
        n = rng.randint(1, 7)
        g = rng.randn(2 * n - 1)
        M = rng.randn(n, n)
        lhs = float(np.sum(hp.hankel_embed(g).entries * M))
        rhs = float(np.dot(g, hp.hankel_adjoint(M)))
        if abs(lhs - rhs) > 1e-10 * (np.linalg.norm(g) * np.linalg.norm(M)):
            failures += 1

    # multiplicity composition, exact
    for _ in range(1000):
        n = rng.randint(1, 12)
        g = rng.randn(2 * n - 1) * np.exp(rng.uniform(-6, 6))
        if not np.array_equal(
            hp.hankel_adjoint(hp.hankel_embed(g).entries), hp.multiplicities(n) * g
        ):
            failures += 1

    # nuclear-ball projection: idempotent and non-expansive
    for _ in range(1000):
        n = rng.randint(1, 6)
        A = rng.randn(n, n) * rng.uniform(0.2, 4)
        B = rng.randn(n, n) * rng.uniform(0.2, 4)
        PA = hp.project_nuclear_ball(A, 1.0)
        PB = hp.project_nuclear_ball(B, 1.0)
        if np.linalg.norm(hp.project_nuclear_ball(PA, 1.0) - PA) > 1e-12:
            failures += 1
        if np.linalg.norm(PA - PB) > np.linalg.norm(A - B) + 1e-10:
            failures += 1

    # realization rank: order-r response gives numerical Hankel rank r
    for _ in range(1000):
        r = rng.randint(1, 4)
        spec = hp.random_system(r, int(rng.randint(0, 10**9)), pole_radius_range=(0.2, 0.6))
        g = hp.impulse_response(spec, 2 * r + 7)
        sig = hp.hankel_singular_values(g)
        if sig[0] > 0 and sig[r] / sig[0] > 1e-8:
            failures += 1

    _report(9, "structure/property suites, 4 x 1000 randomized trials",
            failures == 0, f"{failures} failures")


def test_criterion_10_cli_determinism(tmp_path, sixth_order_impulse):
    src = tmp_path / "impulse.csv"
    hp.write_impulse_csv(sixth_order_impulse, src)
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "hankelpath", "path", "--input", str(src),
             "--epsilon", "0.01", "--out", str(out), "--format", "both"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append({
            f: (out / f).read_bytes()
            for f in ("path.json", "samples.csv", "singular_values.csv")
        })
    ok = outputs[0] == outputs[1]
    _report(10, "byte-identical CLI path reruns", ok)
