"""Estimation-quality metrics with explicit ambiguity-fit classes.

Semi-blind estimates are only defined up to a residual ambiguity, so every
normalised error here names the transformation class that is optimally
fitted (by least squares against the ground truth) before the error is
measured: ``none``, a single complex ``scalar``, or a ``diagonal`` acting
on the last (per-column) axis.  The classes are nested, so
``nmse(fit="diagonal") <= nmse(fit="scalar") <= nmse(fit="none")``.
"""

import numpy as np

from .channels import qam_demap

FIT_CLASSES = ("none", "scalar", "diagonal")


def to_db(x: float) -> float:
    """Linear power ratio in decibels; 0 maps to -inf."""
    with np.errstate(divide="ignore"):
        return float(10.0 * np.log10(x))


def scalar_fit(est: np.ndarray, truth: np.ndarray) -> complex:
    """Least-squares complex scale c minimising ||c*est - truth||."""
    denom = np.vdot(est, est)
    if denom == 0:
        return 0.0 + 0.0j
    return complex(np.vdot(est, truth) / denom)


def diagonal_fit(est: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Per-column least-squares scales along the last axis.

    For a (K, N) pair this returns the N scales minimising
    ||est @ diag(d) - truth||_F; for vectors each entry is fitted alone.
    Columns with zero estimate get scale 0.
    """
    e = est.reshape(-1, est.shape[-1])
    t = truth.reshape(-1, truth.shape[-1])
    num = np.sum(e.conj() * t, axis=0)
    den = np.sum(e.conj() * e, axis=0).real
    d = np.zeros(est.shape[-1], dtype=complex)
    nz = den > 0
    d[nz] = num[nz] / den[nz]
    return d


def nmse(est: np.ndarray, truth: np.ndarray, fit: str = "none") -> float:
    """Normalised mean squared error ||est' - truth||^2 / ||truth||^2 where
    est' is est after the optimal fit of the declared ambiguity class."""
    est = np.asarray(est)
    truth = np.asarray(truth)
    if est.shape != truth.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {truth.shape}")
    tnorm = float(np.linalg.norm(truth) ** 2)
    if tnorm == 0.0:
        raise ValueError("nmse is undefined for an all-zero truth")
    if fit == "none":
        fitted = est
    elif fit == "scalar":
        fitted = scalar_fit(est, truth) * est
    elif fit == "diagonal":
        fitted = est * diagonal_fit(est, truth)
    else:
        raise ValueError(f"unknown fit class {fit!r}; use one of {FIT_CLASSES}")
    return float(np.linalg.norm(fitted - truth) ** 2) / tnorm


def ser(
    s_hat: np.ndarray,
    s_true: np.ndarray,
    order: int,
    anchor_index: int = 0,
) -> float:
    """Symbol-error rate after hard demapping, excluding the anchor position
    (whose symbol the receiver knows by construction)."""
    s_hat = np.asarray(s_hat)
    s_true = np.asarray(s_true)
    if s_hat.shape != s_true.shape or s_hat.ndim != 1:
        raise ValueError("ser expects two equal-length symbol vectors")
    keep = np.ones(s_hat.shape[0], dtype=bool)
    keep[anchor_index] = False
    if not np.any(keep):
        return 0.0
    errs = qam_demap(s_hat[keep], order) != qam_demap(s_true[keep], order)
    return float(np.mean(errs))
