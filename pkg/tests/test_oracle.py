import numpy as np
import pytest

from formda.geometry import Box, Simplex
from formda.metrics import finite_difference_check
from formda.oracle import (
    RegularizedView,
    load_domain_csv,
    make_quadratic_saddle,
    make_robust_multidomain,
    make_wgan_toy,
    regularized_sample_gradients,
    synthetic_domains,
)


def _scalar_quadratic():
    return make_quadratic_saddle(1, 1, A=[[0.0]], B=[[1.0]], C=[[1.0]], x_radius=10.0, y_radius=10.0)


def test_quadratic_ystar_example():
    o = _scalar_quadratic()
    assert o.ystar_unconstrained(np.array([2.0]), 1.0) == pytest.approx([1.0], abs=1e-15)


def test_decoupled_quadratic():
    o = make_quadratic_saddle(2, 2, A=np.zeros((2, 2)), B=np.zeros((2, 2)), C=np.eye(2), x_radius=100, y_radius=100)
    x = np.array([3.0, -7.0])
    assert np.array_equal(o.ystar_unconstrained(x, 0.0), np.zeros(2))
    assert o.value(x, np.zeros(2)) == 0.0


def test_quadratic_rejects_indefinite_c():
    with pytest.raises(ValueError):
        make_quadratic_saddle(1, 2, C=np.diag([1.0, -0.5]))


def test_regularized_view_examples():
    o = _scalar_quadratic()
    y0 = np.array([0.7])
    gx, gy = RegularizedView(o, 1.0).exact_gradients(np.zeros(1), y0)
    ex, ey = o.exact_gradients(np.zeros(1), y0)
    assert np.array_equal(gx, ex) and np.array_equal(gy, ey - y0)
    # rho = 0 leaves the sampled gradients unchanged for the same stream
    noisy = make_quadratic_saddle(3, 2, noise=0.4, seed=1)
    x, y = noisy.initial_point()
    a = regularized_sample_gradients(RegularizedView(noisy, 0.0), x, y, 5, np.random.default_rng(9))
    b = noisy.sample_gradients(x, y, 5, np.random.default_rng(9))
    assert all(np.array_equal(u, v) for u, v in zip(a, b))
    # zero noise: sampled equals exact minus (0, rho y)
    clean = make_quadratic_saddle(3, 2, seed=1)
    sx, sy = regularized_sample_gradients(RegularizedView(clean, 0.3), x, y + 0.2, 17, np.random.default_rng(0))
    ex, ey = clean.exact_gradients(x, y + 0.2)
    np.testing.assert_allclose(sx, ex, atol=1e-15)
    np.testing.assert_allclose(sy, ey - 0.3 * (y + 0.2), atol=1e-15)


def test_regularized_identity_exact():
    rng = np.random.default_rng(0)
    for o in (make_quadratic_saddle(4, 3, noise=1.0, seed=2), make_wgan_toy()):
        for _ in range(50):
            x = rng.uniform(-1, 1, o.d_x)
            y = rng.uniform(-1, 1, o.d_y)
            rho = rng.uniform(0, 3)
            base = o.sample_gradients(x, y, 4, np.random.default_rng(1))
            reg = RegularizedView(o, rho).sample_gradients(x, y, 4, np.random.default_rng(1))
            assert np.array_equal(reg[0], base[0])
            assert np.max(np.abs(reg[1] + rho * y - base[1])) <= 1e-15


def test_quadratic_noise_frequency():
    # each coordinate of the b = 1e4 mean is N(exact, (0.1/100)^2); |z| <= 3 has probability 0.9973
    o = make_quadratic_saddle(3, 2, noise=0.1, seed=4)
    x, y = o.initial_point()
    ex, ey = o.exact_gradients(x, y)
    exact = np.concatenate([ex, ey])
    rng = np.random.default_rng(0)
    inside = []
    for _ in range(200):
        gx, gy = o.sample_gradients(x, y, 10_000, rng)
        inside.extend(np.abs(np.concatenate([gx, gy]) - exact) <= 3 * 0.1 / 100)
    assert np.mean(inside) >= 0.99


def test_wgan_examples():
    o = make_wgan_toy(real_mean=0.0, real_std=0.1, z_std=1.0)
    gx, gy = o.exact_gradients(o.target(), np.array([0.4, -1.3]))
    np.testing.assert_allclose(gy, [0.0, 0.0], atol=1e-15)
    gx, gy = o.exact_gradients(np.array([0.0, 0.1]), np.zeros(2))
    assert np.array_equal(gx, [0.0, 0.0])
    a = o.sample_gradients(np.array([0.3, 0.8]), np.array([0.1, 0.2]), 100, np.random.default_rng(5))
    b = o.sample_gradients(np.array([0.3, 0.8]), np.array([0.1, 0.2]), 100, np.random.default_rng(5))
    assert all(np.array_equal(u, v) for u, v in zip(a, b))
    assert o.sigma_y == pytest.approx(2 * np.sqrt(2))
    assert isinstance(o.x_set, Box) and np.array_equal(o.x_set.upper, [2.0, 2.0])


def test_wgan_large_batch_converges():
    o = make_wgan_toy()
    x, y = np.array([0.3, 0.7]), np.array([-0.5, 0.9])
    gx, gy = o.per_sample_gradients(x, y, o.draw(10**6, np.random.default_rng(11)))
    ex, ey = o.exact_gradients(x, y)
    for g, e in ((gx, ex), (gy, ey)):
        se = g.std(axis=0, ddof=1) / np.sqrt(len(g))
        assert np.all(np.abs(g.mean(axis=0) - e) <= 4 * se)


def test_wgan_rejects_bad_std():
    with pytest.raises(ValueError):
        make_wgan_toy(real_std=0.0)


@pytest.mark.parametrize("make", [lambda: make_quadratic_saddle(3, 2, a_range=(-2, 2), seed=8), make_wgan_toy])
def test_finite_differences(make):
    o = make()
    rng = np.random.default_rng(1)
    for _ in range(10):
        x = rng.uniform(-0.9, 0.9, o.d_x)
        y = rng.uniform(-0.9, 0.9, o.d_y)
        assert finite_difference_check(o, x, y, h=1e-5) <= 1e-6


def test_finite_difference_zero_oracle():
    o = make_quadratic_saddle(2, 2, A=np.zeros((2, 2)), B=np.zeros((2, 2)), C=np.zeros((2, 2)))
    assert finite_difference_check(o, np.zeros(2), np.zeros(2)) == 0.0


def test_unbiasedness_small():
    rng = np.random.default_rng(2)
    problems = [make_quadratic_saddle(3, 2, noise=0.5, seed=3), make_wgan_toy(),
                make_robust_multidomain(synthetic_domains(3, 80, 4, seed=1))]
    for o in problems:
        for _ in range(3):
            x = o.x_set.lower * 0 + rng.uniform(-1, 1, o.d_x)
            y = np.full(o.d_y, 1.0 / o.d_y) if isinstance(o.y_set, Simplex) else rng.uniform(-1, 1, o.d_y)
            gx, gy = o.per_sample_gradients(x, y, o.draw(20_000, rng))
            ex, ey = o.exact_gradients(x, y)
            for g, e in ((gx, ex), (gy, ey)):
                se = g.std(axis=0, ddof=1) / np.sqrt(len(g))
                assert np.all(np.abs(g.mean(axis=0) - e) <= 4 * se + 1e-12)


def test_robust_symmetry_and_vertices():
    X = np.random.default_rng(0).standard_normal((30, 3))
    lab = np.sign(X[:, 0])
    o = make_robust_multidomain([(X, lab), (X, lab)])
    x = np.array([0.2, -0.1, 0.4])
    g1, gy = o.exact_gradients(x, np.array([0.3, 0.7]))
    g2, _ = o.exact_gradients(x, np.array([0.9, 0.1]))
    np.testing.assert_allclose(g1, g2, atol=1e-15)
    assert gy[0] == gy[1]
    o3 = make_robust_multidomain(synthetic_domains(3, 50, 4, seed=2))
    x4 = np.array([0.2, -0.1, 0.4, 0.1])
    for m in range(3):
        gx, _ = o3.exact_gradients(x4, np.eye(3)[m])
        np.testing.assert_allclose(gx, o3.domain_gradients(x4)[m], atol=1e-15)


def test_robust_contract():
    o = make_robust_multidomain(synthetic_domains(3, 20, 3, seed=0))
    assert isinstance(o.y_set, Simplex) and o.sigma_y == 1.0
    assert np.array_equal(o.x_set.upper, np.full(3, 1e3))
    with pytest.raises(ValueError):
        make_robust_multidomain(synthetic_domains(1, 20, 3))
    with pytest.raises(ValueError):
        make_robust_multidomain([(np.zeros((0, 3)), np.zeros(0)), (np.ones((2, 3)), np.ones(2))])


def test_robust_logistic_against_direct_formula():
    doms = synthetic_domains(2, 40, 3, seed=5)
    o = make_robust_multidomain(doms)
    x = np.array([0.5, -0.3, 0.2])
    for (X, lab), f in zip(doms, o.domain_losses(x)):
        assert f == pytest.approx(np.mean(np.log1p(np.exp(-lab * (X @ x)))), rel=1e-13)
    assert finite_difference_check(o, x, np.array([0.4, 0.6])) <= 1e-6


def test_csv_ingestion(tmp_path):
    doms = synthetic_domains(2, 10, 3, seed=1)
    paths = []
    for m, (X, lab) in enumerate(doms):
        p = tmp_path / f"d{m}.csv"
        rows = ["f0,f1,f2,label"] + [",".join([*(repr(float(v)) for v in r), str(int(l))]) for r, l in zip(X, lab)]
        p.write_text("\n".join(rows) + "\n")
        paths.append(str(p))
    loaded = load_domain_csv(paths)
    for (X, lab), (X2, lab2) in zip(doms, loaded):
        assert np.array_equal(X, X2) and np.array_equal(lab, lab2)
