"""
Statistical verification suites.

Each suite checks one analytic property of the mechanism against simulation
and returns PropertyResult records (observed value vs. bound). `run_verify`
passes only if every record passes.
"""

import math
from typing import Callable, Dict, List, Optional

import numpy as np

from experiments.datagen import make_blobs
from privacy.diagnostics import iter_projection_batches, simulate_pair, standard_error
from privacy.mechanism import diagnostics_enabled, release_with_transcript
from privacy.noise import calibrate_element_wise, calibrate_row_wise
from privacy.projection import max_row_norm2
from privacy.recovery import PUBLISHED_CROSS_TERM_COEFFICIENT, analytic_variance, chebyshev_error_bound
from privacy.errors import InvalidDataError
from privacy.rng import RngSeed, derive_stream, generator, root_seed
from schemas import ExperimentKind, ExperimentReport, PropertyResult
from utils.logger import logger

SuiteFn = Callable[[Optional[int], RngSeed], List[PropertyResult]]


def _trials(trials: Optional[int], default: int) -> int:
    if trials is None:
        return default
    if trials < 1:
        raise InvalidDataError(f"trials must be positive, got {trials}")
    return trials


def suite_streams(trials: Optional[int], seed: RngSeed) -> List[PropertyResult]:
    n = _trials(trials, 100_000)
    first = generator(derive_stream(seed, 1)).standard_normal(n)
    second = generator(derive_stream(seed, 2)).standard_normal(n)
    rho = float(np.corrcoef(first, second)[0, 1])
    again = generator(derive_stream(seed, 1)).standard_normal(n)
    return [
        PropertyResult(suite="streams", name="sibling correlation", passed=abs(rho) < 0.02,
                       observed=abs(rho), bound=0.02, trials=n),
        PropertyResult(suite="streams", name="determinism", passed=bool(np.array_equal(first, again)),
                       observed=float(np.max(np.abs(first - again))), bound=0.0, trials=n),
    ]


def suite_jl(trials: Optional[int], seed: RngSeed) -> List[PropertyResult]:
    n, d, k, n_points = _trials(trials, 100_000), 50, 10, 10
    diffs = generator(derive_stream(seed, 0)).normal(size=(n_points, d))
    true = np.sum(diffs * diffs, axis=1)
    totals = np.zeros(n_points)
    for batch in iter_projection_batches(d, k, n, derive_stream(seed, 1)):
        projected = np.einsum("pd,mdk->mpk", diffs, batch)
        totals += np.sum(projected * projected, axis=2).sum(axis=0)
    relative = np.abs(totals / n - true) / true
    return [
        PropertyResult(suite="jl", name=f"E||aP||^2 = ||a||^2 (pair {p})", passed=bool(relative[p] < 0.01),
                       observed=float(relative[p]), bound=0.01, trials=n)
        for p in range(n_points)
    ]


def suite_lemma1(trials: Optional[int], seed: RngSeed) -> List[PropertyResult]:
    n_trials, rows, d, k = _trials(trials, 10_000), 4, 8, 5
    gen = generator(seed)
    violations, worst = 0, 0.0
    for _ in range(n_trials):
        x = gen.normal(size=(rows, d))
        a = gen.normal(0.0, 1.0 / math.sqrt(k), size=(d, k))
        neighbour = x.copy()
        neighbour[gen.integers(rows), gen.integers(d)] += gen.uniform(-1.0, 1.0)
        lhs = float(np.abs(x @ a - neighbour @ a).sum())
        rhs = math.sqrt(k) * max_row_norm2(a)
        worst = max(worst, lhs / rhs)
        if lhs > rhs * (1.0 + 1e-12):
            violations += 1
    return [PropertyResult(suite="lemma1", name="||XA - X'A||_1 <= sqrt(k) max_i ||A_i||_2",
                           passed=violations == 0, observed=float(violations), bound=0.0, trials=n_trials,
                           detail=f"largest lhs/rhs ratio {worst:.6f}")]


def suite_lemma2(trials: Optional[int], seed: RngSeed) -> List[PropertyResult]:
    n, d, k = _trials(trials, 100_000), 50, 10
    maxima = np.concatenate([
        np.max(np.linalg.norm(batch, axis=2), axis=1)
        for batch in iter_projection_batches(d, k, n, seed)
    ])
    results = []
    for x in (3.0, 5.0):
        threshold = 1.0 + math.sqrt(2.0 * x / k)
        frequency = float(np.mean(maxima > threshold))
        bound = d * math.exp(-x)
        results.append(PropertyResult(suite="lemma2", name=f"P(max_i ||P_i|| > {threshold:.4f}) <= d e^-{x:g}",
                                      passed=frequency <= bound, observed=frequency, bound=bound, trials=n))
    return results


def suite_lemma4(trials: Optional[int], seed: RngSeed) -> List[PropertyResult]:
    n, d, k = _trials(trials, 100_000), 20, 10
    v = generator(derive_stream(seed, 0)).normal(size=d)
    norm2 = float(v @ v)
    coords = np.concatenate([
        np.einsum("d,mdk->mk", v, batch) for batch in iter_projection_batches(d, k, n, derive_stream(seed, 1))
    ])
    scale = math.sqrt(norm2 / k)
    results = []
    for multiple in (1.0, 2.0, 3.0):
        t = multiple * scale
        per_coordinate = np.mean(np.abs(coords) > t, axis=0)
        bound = 2.0 * math.exp(-k * t * t / (2.0 * norm2))
        observed = float(per_coordinate.max())
        results.append(PropertyResult(suite="lemma4", name=f"P(|(vP)_i| > {t:.4f}) <= 2e^(-kt^2/2||v||^2)",
                                      passed=observed <= bound, observed=observed, bound=bound, trials=n))
    return results


def suite_claim6(trials: Optional[int], seed: RngSeed) -> List[PropertyResult]:
    n, d, k, n_pairs = _trials(trials, 100_000), 10, 5, 20
    gen = generator(derive_stream(seed, 0))
    params = calibrate_element_wise(k, 4.0, d)
    results = []
    cross_terms = []
    for p in range(n_pairs):
        direction = gen.normal(size=d)
        a = direction / np.linalg.norm(direction) * gen.uniform(0.5, 10.0)
        samples = simulate_pair(a, k, params.b, n, derive_stream(seed, 1 + p))
        se = standard_error(samples.estimates)
        z = abs(float(samples.estimates.mean()) - samples.dist2) / se
        results.append(PropertyResult(suite="claim6", name=f"unbiased at ||a||^2={samples.dist2:.3f}",
                                      passed=z < 3.0, observed=z, bound=3.0, trials=n,
                                      detail="|mean - ||a||^2| in standard errors"))
        cross_terms.append(samples.z3)
    pooled = np.concatenate(cross_terms)
    z = abs(float(pooled.mean())) / standard_error(pooled)
    results.append(PropertyResult(suite="claim6", name="cross term has mean zero", passed=z < 3.0,
                                  observed=z, bound=3.0, trials=int(pooled.size),
                                  detail="|mean| in standard errors"))
    return results


def suite_claim7(trials: Optional[int], seed: RngSeed) -> List[PropertyResult]:
    n, d, k, b, dist2 = _trials(trials, 1_000_000), 10, 10, 1.0, 16.0
    sigma2 = 2.0 * b * b
    a = np.zeros(d)
    a[0] = math.sqrt(dist2)
    samples = simulate_pair(a, k, b, n, seed)
    report = analytic_variance(dist2, k, sigma2)

    var_z1 = float(np.var(samples.z1, ddof=1))
    var_z2 = float(np.var(samples.z2, ddof=1))
    var_z3 = float(np.var(samples.z3, ddof=1))
    total = float(np.var(samples.estimates, ddof=1))
    coefficient = var_z3 / (sigma2 * dist2)

    def relative(observed: float, expected: float) -> float:
        return abs(observed - expected) / expected

    return [
        PropertyResult(suite="claim7", name="Var(Z1) = (2/k)||a||^4", passed=relative(var_z1, report.var_z1) < 0.05,
                       observed=var_z1, bound=report.var_z1, trials=n),
        PropertyResult(suite="claim7", name="Var(Z2) = 14k sigma^4", passed=relative(var_z2, report.var_z2) < 0.05,
                       observed=var_z2, bound=report.var_z2, trials=n),
        PropertyResult(suite="claim7", name="Var(Z3) coefficient", passed=relative(coefficient, report.cross_coefficient) < 0.05,
                       observed=coefficient, bound=report.cross_coefficient, trials=n,
                       detail=f"simulated coefficient {coefficient:.4f}; implemented {report.cross_coefficient:g}; "
                              f"published {PUBLISHED_CROSS_TERM_COEFFICIENT:g}"),
        PropertyResult(suite="claim7", name="Var(D) = Var(Z1) + Var(Z2) + Var(Z3)",
                       passed=relative(total, report.total) < 0.03, observed=total, bound=report.total, trials=n,
                       detail=f"published closed form gives {report.published_total:g} "
                              f"(discrepancy {report.discrepancy:+g}, simulated total {total:.4g})"),
    ]


def suite_chebyshev(trials: Optional[int], seed: RngSeed) -> List[PropertyResult]:
    n = _trials(trials, 100_000)
    # k=1 and dist2 <= sigma^2 keep Var/lambda^2 below 1 at every lambda checked
    configs = ((1, 2.0, 1.0), (1, 1.0, 1.0), (1, 0.5, 0.25))
    results = []
    for index, (k, b, dist2) in enumerate(configs):
        a = np.zeros(3)
        a[0] = math.sqrt(dist2)
        samples = simulate_pair(a, k, b, n, derive_stream(seed, index), exact_projection=False)
        variance = analytic_variance(dist2, k, samples.sigma2).total
        deviations = np.abs(samples.errors)
        for multiple in (5.0, 10.0, 20.0):
            lam = multiple * samples.sigma2
            frequency = float(np.mean(deviations > lam))
            bound = chebyshev_error_bound(variance, lam)
            results.append(PropertyResult(suite="chebyshev", name=f"k={k}, b={b:.4g}, lambda={multiple:g} sigma^2",
                                          passed=frequency <= bound, observed=frequency, bound=bound, trials=n))
    return results


def suite_mechanism(trials: Optional[int], seed: RngSeed) -> List[PropertyResult]:
    n_rows = _trials(trials, 1_000)
    d, k = 200, 100
    data = make_blobs(max(1, n_rows // 2), d, rng=derive_stream(seed, 0)).data
    params = calibrate_row_wise(k, 4.0, 1.0, 2.0)
    with diagnostics_enabled():
        released, p, delta = release_with_transcript(data, params, derive_stream(seed, 1))
    recomposed = data.values @ p.values + delta.values
    noise_var = float(np.var(delta.values, ddof=1))
    return [
        PropertyResult(suite="mechanism", name="Z = XP + Delta", passed=bool(np.array_equal(released.z, recomposed)),
                       observed=float(np.max(np.abs(released.z - recomposed))), bound=0.0, trials=1),
        PropertyResult(suite="mechanism", name="Var(Delta) = 2b^2", passed=abs(noise_var / params.sigma2 - 1.0) < 0.05,
                       observed=noise_var, bound=params.sigma2, trials=int(delta.values.size)),
        PropertyResult(suite="mechanism", name="shape n x k", passed=released.z.shape == (data.rows, k),
                       observed=float(released.k), bound=float(k), trials=1),
    ]


SUITES: Dict[str, SuiteFn] = {
    "streams": suite_streams,
    "jl": suite_jl,
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "lemma4": suite_lemma4,
    "claim6": suite_claim6,
    "claim7": suite_claim7,
    "chebyshev": suite_chebyshev,
    "mechanism": suite_mechanism,
}


def suite_seed(seed: int, name: str) -> RngSeed:
    """Stream of one suite, keyed by its place in SUITES so it is the same alone or under 'all'."""
    return derive_stream(root_seed(seed), list(SUITES).index(name))


def run_verify(suite: str = "all", seed: int = 0, trials: Optional[int] = None) -> ExperimentReport:
    names = list(SUITES) if suite == "all" else [suite]
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise InvalidDataError(f"unknown suite {unknown[0]!r}; choose from all, {', '.join(SUITES)}")
    results: List[PropertyResult] = []
    for name in names:
        logger.info(f"Running verify suite '{name}'")
        outcome = SUITES[name](trials, suite_seed(seed, name))
        for record in outcome:
            if not record.passed:
                logger.warning(f"[{name}] {record.name}: observed {record.observed:g} vs bound {record.bound:g}")
        results.extend(outcome)
    return ExperimentReport(
        experiment=ExperimentKind.VERIFY,
        config={"suite": suite, "seed": seed, "trials": trials},
        results=[r.model_dump() for r in results],
    )


def all_passed(report: ExperimentReport) -> bool:
    return all(r["passed"] for r in report.results)
