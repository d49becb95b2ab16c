"""Build script for the optional compiled kernels.

The package works without them; ``lvattn.kernels`` falls back to the
pure-Python implementation when ``lvattn._core`` cannot be imported.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("LVATTN_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "lvattn._core",
                    ["src/lvattn/_core.pyx"],
                    include_dirs=[np.get_include()],
                    # no FMA contraction: keeps RK4 bit-identical with the fallback
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
