"""Build script for the optional compiled dispatch kernel.

`pip install -e . --no-build-isolation` compiles ``pemc._dispatch_cy`` when
Cython and a C compiler are available. If either is missing (or
``PEMC_SKIP_EXT`` is set) the install still succeeds and the package falls
back to the pure-Python kernel at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PEMC_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "pemc._dispatch_cy",
                    sources=["src/pemc/_dispatch_cy.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
