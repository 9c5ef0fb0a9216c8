"""Quick built-in sanity checks, runnable from the CLI on any install.

Each check exercises one load-bearing identity on seeded random data and
is intentionally small (the pytest suite is the thorough one).
"""

import numpy as np

from .benchmarks import oracle_weights, semi_unitary_h, semi_unitary_x
from .channels import (
    gen_dft_training,
    gen_lorentzian_training,
    gen_pilots,
    gen_qam,
    gen_wireless,
    qam_alphabet,
)
from .metrics import nmse
from .receiver import BalsConfig, two_stage_estimate
from .signals import build_noiseless, build_rank_one
from .tensor_ops import khatri_rao, parafac_build, pinv, unfold_mode1, unfold_mode2


def _rand_cn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _check_unfoldings(rng) -> bool:
    for _ in range(10):
        k, t, p, n = rng.integers(2, 6, size=4)
        h, x, f = _rand_cn(rng, k, n), _rand_cn(rng, t, n), _rand_cn(rng, p, n)
        y = parafac_build(h, x, f)
        ok1 = np.allclose(unfold_mode1(y), h @ khatri_rao(f, x).T, atol=1e-12)
        ok2 = np.allclose(unfold_mode2(y), x @ khatri_rao(f, h).T, atol=1e-12)
        if not (ok1 and ok2):
            return False
    return True


def _check_khatri_rao_gram(rng) -> bool:
    a, b = _rand_cn(rng, 5, 3), _rand_cn(rng, 4, 3)
    kr = khatri_rao(a, b)
    return np.allclose(kr.T @ kr.conj(), (a.T @ a.conj()) * (b.T @ b.conj()), atol=1e-12)


def _check_pinv(rng) -> bool:
    a = _rand_cn(rng, 6, 3)
    pa = pinv(a)
    return np.allclose(a @ pa @ a, a, atol=1e-10) and np.allclose(
        pa @ a, np.eye(3), atol=1e-10
    )


def _check_training(rng) -> bool:
    f = gen_lorentzian_training(8, 4, rng).f
    on_circle = np.allclose(np.abs(f - 0.5j), 0.5, atol=1e-12)
    fd = gen_dft_training(8, 4).f
    gram_ok = np.allclose(fd.T @ fd.conj(), 8 * np.eye(4), atol=1e-10)
    return on_circle and gram_ok


def _check_symbols(rng) -> bool:
    alpha = qam_alphabet(64)
    unit = abs(np.mean(np.abs(alpha) ** 2) - 1.0) < 1e-12
    pilots = gen_pilots(10).s
    return unit and abs(np.linalg.norm(pilots) ** 2 - 10.0) < 1e-9


def _check_nmse_nesting(rng) -> bool:
    est, truth = _rand_cn(rng, 6, 4), _rand_cn(rng, 6, 4)
    a = nmse(est, truth, fit="diagonal")
    b = nmse(est, truth, fit="scalar")
    c = nmse(est, truth, fit="none")
    return a <= b + 1e-12 and b <= c + 1e-12


def _check_noiseless_recovery(rng) -> bool:
    k, t, p, n = 4, 8, 12, 6
    h = gen_wireless(k, n, rng)
    m = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    s = gen_qam(t, 16, rng).s
    f = gen_lorentzian_training(p, n, rng).f
    y = build_noiseless(h, build_rank_one(s, m), f).y
    report = two_stage_estimate(y, f, s1_ref=s[0], cfg=BalsConfig(), rng=rng)
    return nmse(report.s_hat, s) < 1e-10


def _check_closed_form(rng) -> bool:
    k, t, p, n = 4, 6, 8, 5
    h = gen_wireless(k, n, rng)
    m = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    s = gen_qam(t, 16, rng).s
    f = gen_dft_training(p, n).f
    x = build_rank_one(s, m)
    y = build_noiseless(h, x, f).y + 0.05 * _rand_cn(rng, k, t, p)
    m_tilde, h_tilde = oracle_weights(h, m)
    h_closed = semi_unitary_h(unfold_mode1(y), f, x, m_tilde)
    h_pinv = unfold_mode1(y) @ pinv(khatri_rao(f, x).T)
    x_closed = semi_unitary_x(unfold_mode2(y), f, h, h_tilde)
    x_pinv = unfold_mode2(y) @ pinv(khatri_rao(f, h).T)
    return np.allclose(h_closed, h_pinv, atol=1e-10) and np.allclose(
        x_closed, x_pinv, atol=1e-10
    )


CHECKS = [
    ("tensor unfolding identities", _check_unfoldings),
    ("khatri-rao gram identity", _check_khatri_rao_gram),
    ("pseudo-inverse identities", _check_pinv),
    ("training matrix invariants", _check_training),
    ("symbol block invariants", _check_symbols),
    ("nmse fit-class nesting", _check_nmse_nesting),
    ("noiseless end-to-end recovery", _check_noiseless_recovery),
    ("closed-form / pseudo-inverse equivalence", _check_closed_form),
]


def run_selftest(seed: int = 1234, out=print) -> bool:
    rng = np.random.default_rng(seed)
    all_ok = True
    for name, check in CHECKS:
        try:
            ok = check(rng)
        except Exception as exc:  # a crash is a failure, not an abort
            ok = False
            out(f"FAIL {name} (raised {type(exc).__name__}: {exc})")
            all_ok = False
            continue
        out(f"{'PASS' if ok else 'FAIL'} {name}")
        all_ok = all_ok and ok
    return all_ok
