"""Build script: compiles the optional extension module.

The package works without the extension (a pure-Python kernel module is
selected at import time), so a missing compiler or ADELIC_ZETA_NO_EXT=1
degrades to a source-only install instead of failing.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("ADELIC_ZETA_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "adelic_zeta._ckernels",
                    ["src/adelic_zeta/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
