"""Build glue for the optional compiled kernels.

The package is pure Python; if Cython is available the hot loops in
``motifkit._kernels`` are additionally compiled to a C extension that is
picked up at import time.  Set MOTIFKIT_NO_EXT=1 to skip the extension
build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("MOTIFKIT_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/motifkit/_kernels/_speedups.pyx"],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
