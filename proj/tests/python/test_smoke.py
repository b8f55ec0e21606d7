import math

import numpy as np
import pytest

import dsgm


def test_version():
    assert dsgm.__version__


def test_latent_grid_and_kernel():
    u = dsgm.latent_grid(4, 0.5)
    assert u == pytest.approx([-0.75, -0.25, 0.25, 0.75])
    assert dsgm.synthetic_kernel(0.8, 0.2, 0.0, 0.0) == pytest.approx(0.8)
    assert dsgm.synthetic_kernel(0.8, 0.2, 1.0, -1.0) == pytest.approx(0.2 / 16)


def test_sampling_is_seeded():
    a = dsgm.sample_dsgm(200, 0.01, seed=3)
    b = dsgm.sample_dsgm(200, 0.01, seed=3)
    assert a.edges() == b.edges()
    assert a.node_count == 200
    A = a.adjacency()
    assert np.allclose(A, A.T)
    assert np.all(np.diag(A) == 0)


def test_eig_and_gft():
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    vals, vecs = dsgm.eig_sym(A)
    assert vals == pytest.approx([1.0, -1.0])
    s = np.array([[3.0], [-1.0]])
    c = dsgm.gft(vecs, s)
    assert np.linalg.norm(c) == pytest.approx(np.linalg.norm(s))
    assert np.allclose(dsgm.inverse_gft(vecs, c), s)


def test_closed_form_spectrum():
    l1, l2 = dsgm.sbk_closed_form_spectrum(0.8, 0.2)
    assert l1 == pytest.approx(1.0 / 3, abs=1e-9)
    assert l2 == pytest.approx(0.2, abs=1e-9)


def test_eigenvalue_bound():
    linear, quadratic = dsgm.eigenvalue_bound(1.0, 1.0, 0.01, 1000)
    assert linear == pytest.approx(0.04)
    assert quadratic == pytest.approx(0.2)


def test_interpolation_round_trip():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(6, 6))
    A = np.triu(A, 1)
    A = A + A.T
    x = rng.normal(size=6)
    y = rng.normal(size=6)
    h = dsgm.interpolate_filter(A, x, y)
    assert np.max(np.abs(dsgm.apply_filter(A, x, list(h)) - y)) < 1e-8


def test_interpolation_precondition_error():
    K3 = np.ones((3, 3)) - np.eye(3)
    x = np.array([1.0, 2.0, 4.0])
    check = dsgm.spectral_coefficient_check(K3, x)
    assert not check["ok"]
    assert check["min_gap"] < 1e-12
    with pytest.raises(ValueError):
        dsgm.interpolate_filter(K3, x, x)


def test_graph_filter_matches_numpy():
    rng = np.random.default_rng(1)
    S = rng.normal(size=(5, 5))
    S = S + S.T
    X = rng.normal(size=(5, 2))
    H = [rng.normal(size=(2, 3)) for _ in range(3)]
    expect = X @ H[0] + S @ X @ H[1] + S @ S @ X @ H[2]
    assert np.allclose(dsgm.graph_filter(S, X, H), expect)


def test_train_gnn_on_synthetic_instance():
    inst = dsgm.synthetic_instance(200, 0.01, seed=5)
    S = inst["graph"].normalized_adjacency()
    out = dsgm.train_gnn(S, inst["features"], inst["labels"], inst["train"], seed=1, epochs=50)
    probs = out["probabilities"]
    assert probs.shape == (200, 2)
    assert np.allclose(probs.sum(axis=1), 1.0)
    assert all(math.isfinite(v) for v in out["loss"])
    assert dsgm.accuracy(probs, inst["labels"], inst["test"]) > 0.8
