"""Reference oracles for the test suite.

Everything in here is deliberately written the slow, obvious way (index
loops, exhaustive search) so the fast vectorised implementations in the
package are checked against an independent computation rather than against
themselves.
"""

from __future__ import annotations

import numpy as np


def rand_cn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """Unit-variance circular complex Gaussian draws."""
    return (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    ) / np.sqrt(2.0)


def tensor_oracle(h: np.ndarray, x: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Scalar triple-sum construction of the received block: one explicit
    loop per index, summing h[k,n] * x[t,n] * f[p,n] over n."""
    k_dim, n_dim = h.shape
    t_dim = x.shape[0]
    p_dim = f.shape[0]
    y = np.zeros((k_dim, t_dim, p_dim), dtype=complex)
    for k in range(k_dim):
        for t in range(t_dim):
            for p in range(p_dim):
                acc = 0.0 + 0.0j
                for n in range(n_dim):
                    acc += h[k, n] * x[t, n] * f[p, n]
                y[k, t, p] = acc
    return y


def unfold1_oracle(y: np.ndarray) -> np.ndarray:
    """Loop placement of y[k,t,p] into row k, column p*T + t."""
    k_dim, t_dim, p_dim = y.shape
    out = np.zeros((k_dim, p_dim * t_dim), dtype=y.dtype)
    for k in range(k_dim):
        for t in range(t_dim):
            for p in range(p_dim):
                out[k, p * t_dim + t] = y[k, t, p]
    return out


def unfold2_oracle(y: np.ndarray) -> np.ndarray:
    """Loop placement of y[k,t,p] into row t, column p*K + k."""
    k_dim, t_dim, p_dim = y.shape
    out = np.zeros((t_dim, p_dim * k_dim), dtype=y.dtype)
    for k in range(k_dim):
        for t in range(t_dim):
            for p in range(p_dim):
                out[t, p * k_dim + k] = y[k, t, p]
    return out


def khatri_rao_oracle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Columnwise Kronecker product with explicit loops, rows of ``a``
    varying slowest."""
    i_dim, n_dim = a.shape
    j_dim = b.shape[0]
    out = np.zeros((i_dim * j_dim, n_dim), dtype=complex)
    for n in range(n_dim):
        for i in range(i_dim):
            for j in range(j_dim):
                out[i * j_dim + j, n] = a[i, n] * b[j, n]
    return out


def demap_oracle(value: complex, alphabet: np.ndarray) -> int:
    """Exhaustive nearest-point search; ties go to the smaller index."""
    best = 0
    best_d = abs(value - alphabet[0])
    for idx in range(1, alphabet.size):
        d = abs(value - alphabet[idx])
        if d < best_d - 0.0:  # strict: ties keep the earlier index
            best = idx
            best_d = d
    return best


def relerr(est: np.ndarray, ref: np.ndarray) -> float:
    """Frobenius relative error against a reference."""
    denom = np.linalg.norm(ref)
    if denom == 0.0:
        return float(np.linalg.norm(est))
    return float(np.linalg.norm(est - ref) / denom)
