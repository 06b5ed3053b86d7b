"""Compiled and numpy kernels must agree."""

import numpy as np
import pytest

from echo_tdoa import _kernels_py as py
from echo_tdoa._core import BACKEND

cy = pytest.importorskip("echo_tdoa._kernels")


def test_backend_selected():
    assert BACKEND in ("cython", "python")


@pytest.mark.parametrize("t_start", [-3.1e-3, 0.0, 7.77e-3, 0.0301])
def test_train_window(t_start):
    args = (t_start, 250e3, 3750, 38e3, 42e3, 15e-3, 0.7)
    np.testing.assert_allclose(cy.train_window(*args), py.train_window(*args), atol=1e-12)


def test_xcorr_direct(rng):
    w, t = rng.normal(size=97), rng.normal(size=97)
    np.testing.assert_allclose(cy.xcorr_direct(w, t), py.xcorr_direct(w, t), rtol=1e-12, atol=1e-12)


def test_xcorr_direct_length_mismatch():
    with pytest.raises(ValueError):
        cy.xcorr_direct(np.ones(4), np.ones(5))


@pytest.mark.parametrize("triple", [(1, 2, 1), (1, 2, 1.5), (2, 2, 2), (0.0, 1.0, 0.999), (5, 1, -3)])
def test_parabolic(triple):
    assert cy.parabolic_offset(*triple) == py.parabolic_offset(*triple)


def test_peak_refine_ties_and_wrap():
    c = np.array([3.0, 1.0, 0.0, 1.0, 3.0, 2.0])
    assert cy.peak_refine(c) == py.peak_refine(c)
    assert cy.peak_refine(c)[0] == 0
    c = np.array([2.0, 0.0, 0.0, 1.0, 5.0])
    assert cy.peak_refine(c) == py.peak_refine(c)


def test_guided_peak_refine(rng):
    for _ in range(50):
        c = rng.normal(size=64)
        env = np.abs(rng.normal(size=64))
        for h in (1, 3, 5):
            assert cy.guided_peak_refine(c, env, h) == py.guided_peak_refine(c, env, h)
