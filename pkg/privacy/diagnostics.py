"""
Batched Monte-Carlo simulation of the mechanism.

Used by the verify suites, the distance-recovery experiment and the tests.
Every draw uses a fresh projection matrix and fresh noise, exactly like an
independent call to `mechanism.release` on the two rows involved, but the
draws are produced in vectorised chunks.
"""

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from privacy.errors import InvalidDataError
from privacy.noise import draw_laplace
from privacy.rng import RngSeed, derive_stream, generator

# float64 values generated per chunk
_CHUNK_BUDGET = 2_000_000


def _chunk_sizes(total: int, per_draw: int) -> Iterator[int]:
    step = max(1, _CHUNK_BUDGET // max(1, per_draw))
    remaining = total
    while remaining > 0:
        size = min(step, remaining)
        yield size
        remaining -= size


def iter_projection_batches(d: int, k: int, n_samples: int, rng: RngSeed) -> Iterator[np.ndarray]:
    """Yield (m, d, k) stacks of independent N(0, 1/k) projection matrices, n_samples in total."""
    if d < 1 or k < 1 or n_samples < 0:
        raise InvalidDataError(f"bad projection batch request d={d}, k={k}, n={n_samples}")
    gen = generator(rng)
    scale = 1.0 / math.sqrt(k)
    for size in _chunk_sizes(n_samples, d * k):
        yield gen.normal(0.0, scale, size=(size, d, k))


@dataclass(frozen=True)
class EstimatorSamples:
    """Per-draw components of the recovered distance for one row pair."""

    z1: np.ndarray  # ||aP||^2
    z2: np.ndarray  # ||Delta_i - Delta_j||^2
    z3: np.ndarray  # 2 <aP, Delta_i - Delta_j>
    k: int
    sigma2: float
    dist2: float

    @property
    def estimates(self) -> np.ndarray:
        return self.z1 + self.z2 + self.z3 - 2.0 * self.k * self.sigma2

    @property
    def errors(self) -> np.ndarray:
        return self.estimates - self.dist2


def simulate_pair(
    a: np.ndarray,
    k: int,
    b: float,
    n_draws: int,
    rng: RngSeed,
    exact_projection: bool = True,
) -> EstimatorSamples:
    """Simulate D(Z_i, Z_j) for a row pair with difference a = x_i - x_j.

    With exact_projection=False the projected difference aP is drawn directly
    from N(0, ||a||^2/k I_k), which is its exact distribution for Gaussian P,
    at O(k) instead of O(dk) cost per draw.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or a.size < 1:
        raise InvalidDataError("row difference must be a non-empty 1-D vector")
    if not (b > 0 and n_draws >= 1 and k >= 1):
        raise InvalidDataError(f"bad simulation request k={k}, b={b}, n_draws={n_draws}")
    dist2 = float(a @ a)
    proj_gen = generator(derive_stream(rng, 0))
    noise_gen = generator(derive_stream(rng, 1))

    z1, z2, z3 = (np.empty(n_draws) for _ in range(3))
    per_draw = (a.size if exact_projection else 1) * k
    start = 0
    for size in _chunk_sizes(n_draws, per_draw):
        if exact_projection:
            p = proj_gen.normal(0.0, 1.0 / math.sqrt(k), size=(size, a.size, k))
            ap = np.einsum("d,mdk->mk", a, p)
        else:
            ap = proj_gen.normal(0.0, math.sqrt(dist2 / k), size=(size, k))
        u = draw_laplace(noise_gen, b, (size, k)) - draw_laplace(noise_gen, b, (size, k))
        stop = start + size
        z1[start:stop] = np.sum(ap * ap, axis=1)
        z2[start:stop] = np.sum(u * u, axis=1)
        z3[start:stop] = 2.0 * np.sum(ap * u, axis=1)
        start = stop

    return EstimatorSamples(z1=z1, z2=z2, z3=z3, k=k, sigma2=2.0 * b * b, dist2=dist2)


def standard_error(samples: np.ndarray) -> float:
    if samples.size < 2:
        return float("inf")
    return float(np.std(samples, ddof=1) / math.sqrt(samples.size))
