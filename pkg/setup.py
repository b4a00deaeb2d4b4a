"""Build script: compiles the optional RK4 kernel extension when Cython is present.

The package works without the extension (a pure-Python kernel is selected at
import time), so any build failure here should fall back to a source-only
install rather than abort.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/hyperjerk/_kernels/_rk4.pyx",
        compiler_directives={"language_level": "3"},
    )
    # -ffp-contract=off keeps C arithmetic bit-compatible with the Python
    # fallback (no fused multiply-add), so both backends agree exactly.
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3", "-ffp-contract=off"]
except ImportError:
    pass

setup(ext_modules=ext_modules)
