"""Build script: compiles the optional time-stepping extension.

The extension is a performance accelerator only; every computation has a
pure-Python twin in ``parosc._step_py``, selected at import time when the
compiled module is unavailable.  Set PAROSC_PURE_PYTHON=1 to skip the build.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("PAROSC_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "parosc._step_c",
                    ["src/parosc/_step_c.pyx"],
                    # -ffp-contract=off: keep float rounding identical to the
                    # pure-Python kernel (no FMA contraction).
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    optional=True,
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
