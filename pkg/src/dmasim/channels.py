"""Random generators for the link: scattering channel, antenna inner
response, training matrices, and transmitted symbol blocks.

All generators are pure functions of an explicit ``numpy.random.Generator``
so a campaign can reproduce any single draw from its seed.
"""

import math
from dataclasses import dataclass

import numpy as np


class GenerationError(RuntimeError):
    """Raised when a random generator cannot produce a valid draw."""


@dataclass(frozen=True)
class InnerChannel:
    """Frequency response of the antenna's internal feed, one entry per
    radiating element (waveguide-major ordering: element index fast)."""

    m: np.ndarray
    mode: str  # "random-phase" | "physical"
    alpha: float = 0.0
    beta: float = 0.0
    positions: np.ndarray | None = None


@dataclass(frozen=True)
class SymbolBlock:
    s: np.ndarray
    kind: str  # "qam-data" | "vandermonde-pilot"
    order: int | None = None


@dataclass(frozen=True)
class TrainingMatrix:
    f: np.ndarray
    kind: str  # "lorentzian" | "semi-unitary-dft"


def gen_wireless(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. circularly-symmetric unit-variance complex Gaussian (k, n)."""
    if k < 1 or n < 1:
        raise ValueError("channel dimensions must be positive")
    re = rng.standard_normal((k, n))
    im = rng.standard_normal((k, n))
    return (re + 1j * im) / math.sqrt(2.0)


def gen_inner_random_phase(n: int, rng: np.random.Generator) -> InnerChannel:
    """Unit-modulus inner response with i.i.d. uniform phases."""
    if n < 1:
        raise ValueError("n must be positive")
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return InnerChannel(m=np.exp(1j * theta), mode="random-phase")


def gen_inner_physical(
    d: int, l: int, alpha: float, beta: float, spacing: float
) -> InnerChannel:
    """Deterministic damped-propagation inner response.

    Parameters
    ----------
    d, l : number of waveguides and elements per waveguide (n = d*l).
    alpha : attenuation constant (nepers per unit length, >= 0).
    beta : propagation constant (radians per unit length).
    spacing : element pitch along each waveguide (> 0).

    The element at position ``x = l_idx * spacing`` (l_idx = 1..l) responds
    with ``exp(-(alpha + 1j*beta) * x)``; every waveguide is identical and
    the output is ordered waveguide-major (element index varying fastest).
    """
    if d < 1 or l < 1:
        raise ValueError("d and l must be positive")
    if spacing <= 0.0:
        raise ValueError("spacing must be positive")
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    x = spacing * np.arange(1, l + 1, dtype=float)
    per_guide = np.exp(-(alpha + 1j * beta) * x)
    m = np.tile(per_guide, d)
    positions = np.tile(x, d)
    return InnerChannel(
        m=m, mode="physical", alpha=alpha, beta=beta, positions=positions
    )


def lorentzian_entry(phi: np.ndarray | float) -> np.ndarray | complex:
    """Map a tuning phase to its constrained weight (1j + exp(1j*phi)) / 2."""
    return (1j + np.exp(1j * np.asarray(phi))) / 2.0


def gen_lorentzian_training(
    p: int, n: int, rng: np.random.Generator, max_attempts: int = 10
) -> TrainingMatrix:
    """Random constrained training matrix with i.i.d. uniform tuning phases.

    Every entry lies on the circle of radius 1/2 centred at 1j/2.  The draw
    is rejected and repeated (at most ``max_attempts`` times) until the
    matrix has full column rank.
    """
    if p < 1 or n < 1:
        raise ValueError("p and n must be positive")
    if p < n:
        raise GenerationError(
            f"cannot reach full column rank with p={p} < n={n}"
        )
    for _ in range(max_attempts):
        phi = rng.uniform(0.0, 2.0 * np.pi, size=(p, n))
        f = lorentzian_entry(phi)
        if np.linalg.matrix_rank(f) == n:
            return TrainingMatrix(f=f, kind="lorentzian")
    raise GenerationError(
        f"no full-column-rank draw in {max_attempts} attempts (p={p}, n={n})"
    )


def gen_dft_training(p: int, n: int) -> TrainingMatrix:
    """Semi-unitary training built from the first n columns of the p-point
    DFT matrix: f[p_idx, n_idx] = exp(-2j*pi*p_idx*n_idx / p).

    Satisfies ``f.T @ f.conj() == p * eye(n)`` exactly, which the closed-form
    estimators rely on.  Requires p >= n.
    """
    if p < 1 or n < 1:
        raise ValueError("p and n must be positive")
    if p < n:
        raise ValueError(f"semi-unitary training needs p >= n, got {p} < {n}")
    rows = np.arange(p)[:, None]
    cols = np.arange(n)[None, :]
    f = np.exp(-2j * np.pi * rows * cols / p)
    return TrainingMatrix(f=f, kind="semi-unitary-dft")


def _qam_side(order: int) -> int:
    side = int(round(math.sqrt(order)))
    if side * side != order or side < 2 or (side & (side - 1)) != 0:
        raise ValueError(
            f"qam order must be a square power of 4 (4/16/64/256), got {order}"
        )
    return side


def qam_alphabet(order: int) -> np.ndarray:
    """Unit-average-energy square QAM constellation.

    Index convention: point ``i * side + q`` carries in-phase level
    ``2*i - (side-1)`` and quadrature level ``2*q - (side-1)`` (both before
    normalisation), i.e. the (I, Q) grid enumerated row-major.  Bit labels
    follow the standard per-axis Gray code of ``i`` and ``q``; symbol-error
    counting never consults bits, so only this index order matters.
    """
    side = _qam_side(order)
    levels = 2.0 * np.arange(side) - (side - 1)
    pts = levels[:, None] + 1j * levels[None, :]
    # unit average energy: E|s|^2 = 2*(order-1)/3 before scaling
    scale = math.sqrt(2.0 * (order - 1) / 3.0)
    return pts.ravel() / scale


def gen_qam(t: int, order: int, rng: np.random.Generator) -> SymbolBlock:
    """Draw t i.i.d. uniform symbols from the unit-energy QAM alphabet."""
    if t < 1:
        raise ValueError("t must be positive")
    alphabet = qam_alphabet(order)
    idx = rng.integers(0, order, size=t)
    return SymbolBlock(s=alphabet[idx], kind="qam-data", order=order)


def gen_pilots(t: int) -> SymbolBlock:
    """Deterministic unit-modulus pilot block s[t_idx] = exp(1j*t_idx/t)."""
    if t < 1:
        raise ValueError("t must be positive")
    s = np.exp(1j * np.arange(t) / t)
    return SymbolBlock(s=s, kind="vandermonde-pilot", order=None)


def qam_demap(s_hat: np.ndarray, order: int) -> np.ndarray:
    """Nearest-neighbour hard decisions; ties resolve to the smaller index."""
    alphabet = qam_alphabet(order)
    s_hat = np.asarray(s_hat)
    d2 = np.abs(s_hat[..., None] - alphabet) ** 2
    return np.argmin(d2, axis=-1)
