"""Proximity of two-qubit gate families to exact 2-designs.

The 2-fold moment operator E[U x U x U* x U*] is represented as a
d^4 x d^4 matrix acting on row-major vectorized operators, qubit 0 most
significant, the two register copies ordered (copy, copy').  The exact
Haar moment is the orthogonal projection onto the span of vec(identity)
and vec(swap), Gram-corrected; sampled moments are plain elementwise
means accumulated chunkwise in double precision.

Norm interpretation: the distance lambda_p is reported in *induced*
operator p-norms (max column sum, max row sum, spectral norm).  Schatten
norms are ruled out by the observed ordering lambda_2 < lambda_inf; the
trace-norm reading stays available through `schatten_norms` for
comparison, since the choice is a reconstruction rather than a stated
definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gates import FAMILY_NAMES, sample_blocks

CHUNK = 2048
POWER_ITERATION_TOL = 1e-8
POWER_ITERATION_CAP = 10_000


class ConvergenceError(RuntimeError):
    """Power iteration failed to converge within the iteration cap."""


@dataclass(frozen=True)
class MomentMatrix:
    """2-fold moment operator of a gate distribution on U(dim)."""

    dim: int
    matrix: np.ndarray
    sample_count: int  # 0 marks the exact Haar matrix


@dataclass(frozen=True)
class TpeReport:
    family: str
    sample_count: int
    lambda1: float
    lambda_inf: float
    lambda2: float
    master_seed: int
    schatten: dict[str, float] = field(default_factory=dict)


def swap_matrix(dim: int) -> np.ndarray:
    s = np.zeros((dim * dim, dim * dim))
    for i in range(dim):
        for j in range(dim):
            s[i * dim + j, j * dim + i] = 1.0
    return s


def haar_moment_exact(dim: int) -> MomentMatrix:
    """Exact Haar 2-fold moment: projection fixing vec(1) and vec(swap)."""
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    eye_vec = np.eye(dim * dim).reshape(-1)
    swap_vec = swap_matrix(dim).reshape(-1)
    m = (
        np.outer(eye_vec, eye_vec - swap_vec / dim)
        + np.outer(swap_vec, swap_vec - eye_vec / dim)
    ) / (dim * dim - 1)
    return MomentMatrix(dim, m.astype(complex), 0)


def moment_term(u: np.ndarray) -> np.ndarray:
    """Single-sample tensor U x U x U* x U* as a dense matrix."""
    uu = np.kron(u, u)
    return np.kron(uu, uu.conj())


def sampled_moment(
    family: str, samples: int, master_seed: int | tuple[int, int]
) -> MomentMatrix:
    """Elementwise mean of U x U x U* x U* over sampled blocks.

    Chunked accumulation: per-chunk sums come from one BLAS contraction,
    partial sums are merged in chunk order, so results are deterministic
    per (master_seed, samples).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(master_seed)
    d2 = 16
    total = np.zeros((d2 * d2, d2 * d2), dtype=complex)
    done = 0
    while done < samples:
        size = min(CHUNK, samples - done)
        blocks = sample_blocks(family, size, rng)
        uu = np.einsum("sij,skl->sikjl", blocks, blocks).reshape(size, d2, d2)
        flat = uu.reshape(size, d2 * d2)
        corr = np.tensordot(flat, flat.conj(), axes=(0, 0))
        total += (
            corr.reshape(d2, d2, d2, d2).transpose(0, 2, 1, 3).reshape(256, 256)
        )
        done += size
    return MomentMatrix(4, total / samples, samples)


def lambda_norms(diff: np.ndarray) -> tuple[float, float, float]:
    """Induced (1, inf, 2) norms of a difference of moment matrices.

    The spectral norm comes from power iteration on the Gram matrix with
    relative tolerance 1e-8, capped at 10^4 iterations; non-convergence
    raises instead of silently truncating.
    """
    if diff.ndim != 2 or diff.shape[0] != diff.shape[1]:
        raise ValueError("lambda norms need a square matrix")
    absd = np.abs(diff)
    lam1 = float(absd.sum(axis=0).max())
    lam_inf = float(absd.sum(axis=1).max())
    return lam1, lam_inf, _spectral_norm(diff)


def _spectral_norm(matrix: np.ndarray) -> float:
    if not np.any(matrix):
        return 0.0
    gram = matrix.conj().T @ matrix
    v = np.ones(matrix.shape[1], dtype=complex)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for iteration in range(POWER_ITERATION_CAP):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # ones vector sits in the kernel; restart off a skewed direction
            v = np.arange(1, matrix.shape[1] + 1, dtype=complex)
            v /= np.linalg.norm(v)
            continue
        previous, estimate = estimate, float(norm)
        v = w / norm
        if iteration > 0 and abs(estimate - previous) <= POWER_ITERATION_TOL * estimate:
            return math.sqrt(estimate)
    raise ConvergenceError(
        f"power iteration did not converge in {POWER_ITERATION_CAP} steps"
    )


def schatten_norms(diff: np.ndarray) -> dict[str, float]:
    """Trace/Frobenius/spectral (Schatten 1, 2, inf) norms, for comparison."""
    singulars = np.linalg.svd(diff, compute_uv=False)
    return {
        "trace": float(singulars.sum()),
        "frobenius": float(np.sqrt((singulars**2).sum())),
        "spectral": float(singulars[0]),
    }


def tpe_benchmark(
    families: list[str] | tuple[str, ...],
    samples: int,
    master_seed: int,
    include_schatten: bool = False,
) -> list[TpeReport]:
    """lambda norms per family against the exact Haar moment.

    Always includes the haar4 self-test row, which calibrates the pure
    sampling-noise floor.  Per-family seeds derive from the master seed
    and the fixed registry order, so adding or reordering the request
    does not change any family's numbers.
    """
    if samples < 1000:
        raise ValueError("benchmark needs at least 1000 samples")
    names = list(families)
    if "haar4" not in names:
        names.append("haar4")
    for name in names:
        if name not in FAMILY_NAMES:
            raise ValueError(f"unknown gate family {name!r}")
    exact = haar_moment_exact(4).matrix
    reports = []
    for name in sorted(names, key=FAMILY_NAMES.index):
        seed = (master_seed, FAMILY_NAMES.index(name))
        moment = sampled_moment(name, samples, seed)
        diff = exact - moment.matrix
        lam1, lam_inf, lam2 = lambda_norms(diff)
        if lam2 > min(lam1, lam_inf) + 1e-9:
            raise ValueError(
                f"{name}: spectral norm {lam2} exceeds induced norms "
                f"({lam1}, {lam_inf}); vectorization conventions diverged"
            )
        reports.append(
            TpeReport(
                family=name,
                sample_count=samples,
                lambda1=lam1,
                lambda_inf=lam_inf,
                lambda2=lam2,
                master_seed=master_seed,
                schatten=schatten_norms(diff) if include_schatten else {},
            )
        )
    return reports
