"""Backend selection and exact agreement between compiled and Python kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from hyperjerk import _kernels, van_der_pol


def model_arrays(model):
    coef, expo = [], []
    for k, feat in enumerate(model.phi.monomials):
        for c, ex in feat:
            coef.append(model.theta[k] * c)
            expo.append(ex)
    return (
        np.asarray(model.xi0, dtype=float),
        np.asarray(coef, dtype=float),
        np.asarray(expo, dtype=np.int32).reshape(len(expo), model.m),
    )


def test_python_backend_always_available():
    xi0, coef, expo = model_arrays(van_der_pol())
    out, fail = _kernels.rk4_polyflow_python(xi0, coef, expo, 100, 4, 1.0)
    assert out.shape == (101, 3)
    assert fail == -1
    assert np.all(np.isfinite(out))


@pytest.mark.skipif(not _kernels.HAVE_COMPILED, reason="extension not built")
def test_backends_agree_exactly():
    xi0, coef, expo = model_arrays(van_der_pol())
    out_c, fail_c = _kernels.rk4_polyflow_compiled(xi0, coef, expo, 2000, 6, 1.0)
    out_p, fail_p = _kernels.rk4_polyflow_python(xi0, coef, expo, 2000, 6, 1.0)
    assert fail_c == fail_p == -1
    assert np.allclose(np.asarray(out_c), out_p, rtol=1e-12, atol=0.0)


@pytest.mark.skipif(not _kernels.HAVE_COMPILED, reason="extension not built")
def test_divergence_index_agrees():
    model = van_der_pol(theta1=-40.0)
    xi0, coef, expo = model_arrays(model)
    out_c, fail_c = _kernels.rk4_polyflow_compiled(xi0, coef, expo, 500, 2, 1.0)
    out_p, fail_p = _kernels.rk4_polyflow_python(xi0, coef, expo, 500, 2, 1.0)
    assert fail_c == fail_p > 0


def test_env_var_forces_python_backend():
    code = (
        "import hyperjerk._kernels as k; "
        "print(k.ACTIVE_BACKEND)"
    )
    env = dict(os.environ, HYPERJERK_PURE_PYTHON="1")
    result = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
    )
    assert result.stdout.strip() == "python"
