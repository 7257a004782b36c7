"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""
import math
import time

import numpy as np
import pytest
from scipy import integrate

from conftest import record_criterion
from jitterkde._rng import derive_stream
from jitterkde.cli import main
from jitterkde.data import Bandwidths, GridSpec, MixedDataset
from jitterkde.estimator import fit, sample_frequency_points
from jitterkde.io import load_model, save_model
from jitterkde.kernels import KERNEL_FAMILIES, KernelSpec, kernel_moment, kernel_roughness
from jitterkde.noise import NoiseSpec, validate_noise_class
from jitterkde.simharness import (
    RateConfig,
    ScenarioConfig,
    discrete_point_replicates,
    rate_experiment,
    run_scenario,
)
from jitterkde.theory import (
    DiscretePmf,
    are,
    bias_corollary1,
    bias_lemma2,
    bias_oracle_quadrature,
    jitter_weight,
    theorem1_variance,
)

NOISES = (NoiseSpec.uniform(), NoiseSpec.trapezoid())


def check(number, passed, detail):
    record_criterion(number, bool(passed), detail)
    assert passed, f"criterion {number}: {detail}"


def random_pmf(stream):
    size = int(stream.integers(1, 7))
    return DiscretePmf(int(stream.integers(-3, 4)), stream.dirichlet(np.ones(size)))


def test_criterion_1_are(capsys):
    start = time.time()
    assert main(["are", "--f", "0.5", "--kernel", "epanechnikov", "--gamma1", "0.5", "--gamma2", "0.5"]) == 0
    printed = float(capsys.readouterr().out)
    value = are(0.5, "uniform", "epanechnikov")

    n, reps, h = 100_000, 2000, 0.5
    jit, freq = np.empty(reps), np.empty(reps)
    for r in range(reps):
        data = MixedDataset.from_arrays(z=derive_stream(101, r).binomial(1, 0.5, n))
        model = fit(data, "epanechnikov", "uniform", Bandwidths([h]), seed=r)
        jit[r] = model.evaluate([0])
        freq[r] = sample_frequency_points(data, [[0]])[0]
    ratio = freq.var(ddof=1) / jit.var(ddof=1)
    elapsed = time.time() - start
    ok = abs(printed - 0.714286) <= 1e-6 and abs(value - 0.714286) <= 1e-6 and 0.65 <= ratio <= 0.78
    check(1, ok and elapsed < 120, f"ARE={value:.7f} (cli {printed}), MC ratio={ratio:.4f} in [0.65, 0.78], {elapsed:.0f}s")


def test_criterion_2_sample_frequency_equivalence():
    start = time.time()
    worst = 0.0
    for d in range(100):
        stream = derive_stream(202, d)
        n = int(stream.integers(1, 300))
        lo = int(stream.integers(-5, 5))
        z = lo + stream.integers(0, int(stream.integers(1, 8)), size=n)
        data = MixedDataset.from_arrays(z=z)
        cells = np.arange(z.min() - 2, z.max() + 3).reshape(-1, 1)
        freq = sample_frequency_points(data, cells)
        for seed in (0, d, int(stream.integers(0, 2**63))):
            model = fit(data, "uniform", "uniform", Bandwidths([0.5]), seed=seed)
            worst = max(worst, float(np.max(np.abs(model.evaluate_points(cells) - freq))))
    elapsed = time.time() - start
    check(2, worst <= 1e-12 and elapsed < 10, f"max |f~ - f_n| = {worst:.2e} over 100 datasets, {elapsed:.1f}s")


def test_criterion_3_unbiasedness():
    start = time.time()
    worst = 0.0
    for i in range(50):
        stream = derive_stream(303, i)
        pmf = random_pmf(stream)
        noise = NOISES[i % 2]
        kernel = KERNEL_FAMILIES[i % 3]
        h = float(stream.uniform(0.01, 1.0)) * noise.max_plateau_bandwidth
        z = int(stream.integers(pmf.z_min - 1, pmf.z_max + 2))
        worst = max(worst, abs(bias_oracle_quadrature(pmf, z, h, kernel, noise)))

    probs = [0.2, 0.5, 0.3]
    reps = discrete_point_replicates(probs, 1, 50, 0.375, 2000, "epanechnikov", "trapezoid", seed=33)
    bias = reps.jittered.mean() - reps.truth
    se = reps.jittered.std(ddof=1) / math.sqrt(reps.jittered.size)
    elapsed = time.time() - start
    ok = worst <= 1e-10 and abs(bias) <= 3 * se and elapsed < 120
    check(3, ok, f"max |oracle bias| = {worst:.2e}; MC bias {bias:.2e} vs 3 SE {3 * se:.2e}, {elapsed:.0f}s")


def test_criterion_4_bias_triangle():
    start = time.time()
    worst = 0.0
    for i in range(200):
        stream = derive_stream(404, i)
        pmf = random_pmf(stream)
        kernel = KERNEL_FAMILIES[i % 3]
        h = float(3.0 - stream.uniform(0.0, 2.5))  # (0.5, 3]
        z = int(stream.integers(pmf.z_min - 1, pmf.z_max + 2))
        c = bias_corollary1(pmf, z, h, kernel)
        l2 = bias_lemma2(pmf, z, h, kernel, "uniform")
        o = bias_oracle_quadrature(pmf, z, h, kernel, "uniform")
        worst = max(worst, abs(c - o), abs(l2 - o), abs(c - l2))
        # the general-noise route against the oracle
        lt = bias_lemma2(pmf, z, h, kernel, "trapezoid")
        ot = bias_oracle_quadrature(pmf, z, h, kernel, "trapezoid")
        worst = max(worst, abs(lt - ot))
    hand = DiscretePmf(0, [0.7, 0.3])
    vals = [bias_corollary1(hand, 0, 1.0, "uniform"), bias_lemma2(hand, 0, 1.0, "uniform", "uniform"),
            bias_oracle_quadrature(hand, 0, 1.0, "uniform", "uniform")]
    hand_err = max(abs(v + 0.275) for v in vals)
    elapsed = time.time() - start
    ok = worst <= 1e-8 and hand_err <= 1e-10 and elapsed < 60
    check(4, ok, f"max disagreement {worst:.2e} over 200 instances; hand example error {hand_err:.1e}, {elapsed:.0f}s")


def test_criterion_5_variance_formula():
    start = time.time()
    reps = discrete_point_replicates([0.7, 0.3], 0, 100, 0.5, 5000, "epanechnikov", "uniform", seed=55)
    mc = reps.jittered.var(ddof=1)
    theory = theorem1_variance(0.7, 100, [0.5], [], "epanechnikov")
    rel = abs(mc / theory - 1)
    elapsed = time.time() - start
    check(5, rel <= 0.15 and elapsed < 120, f"MC var {mc:.3e} vs theory {theory:.3e} (rel err {rel:.3f}), {elapsed:.0f}s")


def test_criterion_6_rate_slopes():
    start = time.time()
    ladder = (250, 500, 1000, 2000, 4000, 8000)
    parts, ok = [], True
    for p, q, target in ((1, 0, -0.5), (1, 1, -0.4), (0, 1, -0.4)):
        res = rate_experiment(RateConfig(p=p, q=q, ell=2, ladder=ladder, reps=400, seed=66))
        ok &= abs(res.slope - target) <= 0.08
        parts.append(f"p={p},q={q}: {res.slope:.3f} (target {target})")
    elapsed = time.time() - start
    check(6, ok and elapsed < 900, "; ".join(parts) + f", {elapsed:.0f}s")


@pytest.fixture(scope="module")
def scenario_tables():
    start = time.time()
    tables = [run_scenario(ScenarioConfig(p=1, q=1, m=m, n_list=(50, 200), n_sim=200, seed=42)) for m in (1, 15)]
    return tables, time.time() - start


def test_criterion_7_simulation_study(scenario_tables):
    tables, elapsed = scenario_tables
    ok, parts = True, []
    for t in tables:
        med = {(e, n): t.median(e, n) for (e, n) in t.rase}
        for n in (50, 200):
            gap = abs(med[("jkde", n)] / med[("jkde2", n)] - 1)
            ok &= gap <= 0.10
            parts.append(f"{t.scenario} n={n}: jkde {med[('jkde', n)]:.4f} jkde2 {med[('jkde2', n)]:.4f} "
                         f"liracine {med[('liracine', n)]:.4f}")
        ok &= all(med[(e, 200)] < med[(e, 50)] for e in ("jkde", "jkde2", "liracine"))
        if t.scenario.endswith("m=15"):
            ok &= all(med[("jkde", n)] <= med[("liracine", n)] for n in (50, 200))
    check(7, ok and elapsed < 1800, " | ".join(parts) + f", {elapsed:.0f}s")


def test_criterion_8_property_suites(tmp_path):
    quad = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    moment_err = 0.0
    for fam in KERNEL_FAMILIES:
        k = KernelSpec(fam)
        for j in range(5):
            moment_err = max(moment_err, abs(kernel_moment(k, j) - integrate.quad(lambda t: t**j * k(t), -1, 1, **quad)[0]))
        moment_err = max(moment_err, abs(kernel_roughness(k) - integrate.quad(lambda t: k(t) ** 2, -1, 1, **quad)[0]))

    shipped_ok = all(validate_noise_class(n).passed for n in NOISES)
    bad = [NoiseSpec.unchecked("trapezoid", 0.2, 0.6), NoiseSpec.unchecked("uniform", 0.4, 0.4),
           NoiseSpec.unchecked("trapezoid", 0.6, 0.7)]
    counter_ok = not any(validate_noise_class(n).passed for n in bad)

    weight_err = 0.0
    stream = derive_stream(808)
    for i in range(50):
        h = float(stream.uniform(0.01, 4.0))
        noise = NOISES[i % 2]
        reach = math.ceil(h + noise.gamma2)
        total = sum(jitter_weight(h, d, KERNEL_FAMILIES[i % 3], noise) for d in range(-reach, reach + 1))
        weight_err = max(weight_err, abs(total - 1.0))

    data = MixedDataset.from_arrays(z=derive_stream(9).binomial(3, 0.3, 30), x=derive_stream(10).normal(size=30))
    m1 = fit(data, "biweight", "trapezoid", Bandwidths([0.6], [0.5]), seed=77)
    m2 = fit(data, "biweight", "trapezoid", Bandwidths([0.6], [0.5]), seed=77)
    save_model(m1, tmp_path / "m.json")
    m3 = load_model(tmp_path / "m.json")
    grid = GridSpec((np.arange(-1, 5),), (np.linspace(-2, 2, 21),))
    det_ok = np.array_equal(m1.evaluate_grid(grid), m2.evaluate_grid(grid))
    rt_ok = np.array_equal(m1.evaluate_grid(grid), m3.evaluate_grid(grid))

    ok = moment_err <= 1e-10 and shipped_ok and counter_ok and weight_err <= 1e-12 and det_ok and rt_ok
    check(8, ok, f"moment err {moment_err:.1e}; noise pass/fail {shipped_ok}/{counter_ok}; "
                 f"weight-sum err {weight_err:.1e}; determinism {det_ok}; round-trip {rt_ok}")
