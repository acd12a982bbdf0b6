"""Build the optional Cython warp kernel.

The package works without the extension: playbc.datasets.kernels falls back
to the pure-numpy implementation at import time if the compiled module is
missing (or if PLAYBC_DISABLE_EXT=1).
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/playbc/datasets/_warp_cython.pyx"],
        compiler_directives={"language_level": 3},
    )
    include_dirs = [numpy.get_include()]
except ImportError:
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
