"""Build script: compiles the optional fast kernel extension.

The package works without the extension (a pure-Python twin of every
kernel is selected at import time), so compilation failures are not
fatal.  Set INCOMPAT_NO_EXT=1 to skip building the extension entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("INCOMPAT_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "incompat._kernels._fast",
                ["src/incompat/_kernels/_fast.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
