"""Builds the optional Cython merge kernels; the package works without them."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("TWW_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "tournament_tww._twkernels",
                    ["src/tournament_tww/_twkernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
