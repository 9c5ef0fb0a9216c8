import numpy as np
import pytest

from dmasim.benchmarks import (
    data_aided_estimate,
    oracle_weights,
    pilot_aided_estimate,
    pilot_aided_h,
    pilot_aided_m,
    semi_unitary_h,
    semi_unitary_x,
)
from dmasim.channels import (
    gen_dft_training,
    gen_inner_random_phase,
    gen_lorentzian_training,
    gen_pilots,
    gen_qam,
    gen_wireless,
)
from dmasim.metrics import nmse
from dmasim.signals import add_noise, build_noiseless, build_rank_one
from dmasim.tensor_ops import khatri_rao, pinv, unfold_mode1, unfold_mode2
from helpers import rand_cn, relerr


def _scene(seed, k=4, t=6, p=8, n=5, pilots=False):
    rng = np.random.default_rng(seed)
    h = gen_wireless(k, n, rng)
    m = gen_inner_random_phase(n, rng).m
    s = gen_pilots(t).s if pilots else gen_qam(t, 16, rng).s
    f = gen_dft_training(p, n).f
    x = build_rank_one(s, m)
    return h, m, s, f, x


def test_oracle_weights_frozen_small_case():
    h = np.array([[3.0, 0.0], [4.0, 1.0]], dtype=complex)
    m = np.array([2.0, 0.5j])
    m_tilde, h_tilde = oracle_weights(h, m)
    np.testing.assert_allclose(m_tilde, [0.25, 4.0])
    np.testing.assert_allclose(h_tilde, [1.0 / 25.0, 1.0])


def test_closed_form_channel_update_equals_pseudoinverse_form():
    for seed in range(20):
        h, m, s, f, x = _scene(seed)
        rt = add_noise(
            build_noiseless(h, x, f), 10.0, np.random.default_rng(seed + 100)
        )
        y1 = unfold_mode1(rt.y)
        m_tilde, _ = oracle_weights(h, m)
        closed = semi_unitary_h(y1, f, x, m_tilde)
        generic = y1 @ pinv(khatri_rao(f, x).T)
        assert relerr(closed, generic) < 1e-10


def test_closed_form_symbol_update_equals_pseudoinverse_form():
    for seed in range(20):
        h, m, s, f, x = _scene(seed)
        rt = add_noise(
            build_noiseless(h, x, f), 10.0, np.random.default_rng(seed + 200)
        )
        y2 = unfold_mode2(rt.y)
        _, h_tilde = oracle_weights(h, m)
        closed = semi_unitary_x(y2, f, h, h_tilde)
        generic = y2 @ pinv(khatri_rao(f, h).T)
        assert relerr(closed, generic) < 1e-10


def test_closed_forms_reject_non_semi_unitary_training():
    h, m, s, f, x = _scene(0)
    bad_f = gen_lorentzian_training(8, 5, np.random.default_rng(0)).f
    y = build_noiseless(h, x, bad_f).y
    m_tilde, h_tilde = oracle_weights(h, m)
    with pytest.raises(ValueError):
        semi_unitary_h(unfold_mode1(y), bad_f, x, m_tilde)
    with pytest.raises(ValueError):
        semi_unitary_x(unfold_mode2(y), bad_f, h, h_tilde)


def test_weight_validation():
    h, m, s, f, x = _scene(1)
    y1 = unfold_mode1(build_noiseless(h, x, f).y)
    with pytest.raises(ValueError):
        semi_unitary_h(y1, f, x, np.array([1.0, -1.0, 1.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        semi_unitary_h(y1, f, x, np.array([1.0, np.inf, 1.0, 1.0, 1.0]))


def test_pilot_aided_closed_forms_are_exact_on_noiseless_data():
    h, m, s, f, x = _scene(2, pilots=True)
    y = build_noiseless(h, x, f).y
    m_tilde, h_tilde = oracle_weights(h, m)
    h_hat = pilot_aided_h(unfold_mode1(y), f, s, m, m_tilde)
    m_hat = pilot_aided_m(unfold_mode2(y), f, h, h_tilde, s)
    assert relerr(h_hat, h) < 1e-10
    assert relerr(m_hat, m) < 1e-10


def test_pilot_aided_m_is_matched_filter_of_symbol_estimate():
    # The inner-response estimator must equal the matched filter
    # X_hat.T @ conj(pilots) / T applied to the closed-form symbol estimate.
    h, m, s, f, x = _scene(3, pilots=True)
    rt = add_noise(build_noiseless(h, x, f), 5.0, np.random.default_rng(33))
    y2 = unfold_mode2(rt.y)
    m_tilde, h_tilde = oracle_weights(h, m)
    x_hat = semi_unitary_x(y2, f, h, h_tilde)
    direct = pilot_aided_m(y2, f, h, h_tilde, s)
    assert relerr(direct, x_hat.T @ s.conj() / s.shape[0]) < 1e-12


def test_pilot_aided_rejects_unnormalised_pilots():
    h, m, s, f, x = _scene(4, pilots=True)
    y = build_noiseless(h, x, f).y
    m_tilde, h_tilde = oracle_weights(h, m)
    bad = 2.0 * s
    with pytest.raises(ValueError):
        pilot_aided_h(unfold_mode1(y), f, bad, m, m_tilde)
    with pytest.raises(ValueError):
        pilot_aided_m(unfold_mode2(y), f, h, h_tilde, bad)


def test_data_aided_estimate_noiseless_is_exact():
    h, m, s, f, x = _scene(5)
    y = build_noiseless(h, x, f).y
    rep = data_aided_estimate(y, f, x_true=x, h_true=h, m_true=m, s1_ref=s[0])
    assert nmse(rep.h_hat, h) < 1e-20
    assert nmse(rep.m_hat, m) < 1e-20
    np.testing.assert_allclose(rep.s_hat, s, atol=1e-10)
    assert rep.iterations == 1
    assert rep.converged
    assert rep.residual_trace.shape == (1,)


def test_pilot_aided_estimate_noiseless_is_exact():
    h, m, s, f, x = _scene(6, pilots=True)
    y = build_noiseless(h, x, f).y
    rep = pilot_aided_estimate(y, f, h_true=h, m_true=m, pilots=s)
    assert nmse(rep.h_hat, h) < 1e-20
    assert nmse(rep.m_hat, m) < 1e-20
    np.testing.assert_array_equal(rep.s_hat, s)
    assert rep.iterations == 1


def test_data_aided_estimate_tracks_noise_level():
    h, m, s, f, x = _scene(7)
    errs = []
    for snr in (10.0, 30.0):
        rt = add_noise(build_noiseless(h, x, f), snr, np.random.default_rng(70))
        rep = data_aided_estimate(
            rt.y, f, x_true=x, h_true=h, m_true=m, s1_ref=s[0]
        )
        errs.append(nmse(rep.h_hat, h))
    # 20 dB more SNR must buy roughly 20 dB lower error (paired noise draw).
    assert 10 * np.log10(errs[0] / errs[1]) == pytest.approx(20.0, abs=1.0)
