"""Build hook: compiles the optional C kernel extension.

The package works without the extension (a pure-Python backend is selected at
import time), so a failed compile only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy

    extensions = cythonize(
        [
            Extension(
                "rhosolve.kernels._ckernels",
                ["src/rhosolve/kernels/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                # CYTHON_CCOMPLEX=0 forces Cython's own complex arithmetic
                # (plain mul/add formulas) instead of the C compiler's, and
                # -ffp-contract=off stops fused multiply-adds, so the
                # compiled kernels match the Python backend bit for bit.
                define_macros=[
                    ("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"),
                    ("CYTHON_CCOMPLEX", "0"),
                ],
                extra_compile_args=["-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
