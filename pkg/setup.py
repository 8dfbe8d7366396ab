"""Build the optional compiled kernels.

The package works without them; ``svdensity._backend`` falls back to the
pure-Python implementation when the extension is missing.
"""

import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SVDENSITY_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "svdensity._kernels",
                    ["src/svdensity/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # limited-range complex arithmetic: inline mul/div, no Annex G NaN recovery
                    extra_compile_args=["-O3", "-fcx-limited-range"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
