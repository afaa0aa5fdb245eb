"""Build script: compiles the optional Cython kernels when a toolchain is
available and falls back to the pure-Python twins otherwise."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("PULSRODON_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/pulsrodon/kernels/_core.pyx"],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
