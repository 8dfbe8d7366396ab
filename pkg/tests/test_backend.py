import os
import subprocess
import sys

import numpy as np
import pytest

from svdensity import _backend
from svdensity.rng import RngStream


def test_default_is_best_available():
    assert _backend.DEFAULT in _backend.available()
    assert "python" in _backend.available()


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.get("fortran")


@pytest.mark.skipif("compiled" not in _backend.available(), reason="compiled kernels not built")
def test_sample_moduli_backends_agree():
    sqrt_g = np.sqrt([1.0, 4.0, 9.0, 16.0, 25.0])
    for k in range(50):
        u = RngStream(3, k).uniforms(100)
        r1, _, ok1 = _backend.get("compiled")["sample_moduli"](u, sqrt_g)
        r2, _, ok2 = _backend.get("python")["sample_moduli"](u, sqrt_g)
        assert ok1 and ok2
        assert np.allclose(np.sort(r1), np.sort(r2), rtol=0, atol=1e-12)


@pytest.mark.skipif("compiled" not in _backend.available(), reason="compiled kernels not built")
def test_haar_kernel_matches_numpy_path():
    from svdensity._kernels import haar_from_uniforms
    from svdensity.rng import box_muller
    from svdensity.sampling import haar_from_gaussian
    u = RngStream(4, 2).uniforms(2 * 16)
    q1 = haar_from_uniforms(u, 4)
    q2 = haar_from_gaussian(box_muller(u).reshape(4, 4))
    assert np.max(np.abs(q1 - q2)) < 1e-13


@pytest.mark.parametrize("backend", _backend.available())
def test_singular_first_draw_uses_second(backend):
    # u[0] = 0 and u[1] = 0.25 give a zero radius: a whole zero first column is singular
    n = 2
    u = RngStream(6, 0).uniforms(4 * n * n)
    u[0] = u[4] = 0.0
    r, _, ok = _backend.get(backend)["sample_moduli"](u, np.ones(n))
    assert ok and np.allclose(r, 1.0, atol=1e-12)


def test_env_var_forces_python():
    env = dict(os.environ, SVDENSITY_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from svdensity import _backend; print(_backend.DEFAULT)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
