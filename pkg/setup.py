"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-NumPy backend is selected at
import time); the extension just makes the per-iteration training kernels
faster at small batch sizes. Build failures therefore do not fail the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "coclearn._kernels._speedups",
                sources=["src/coclearn/_kernels/_speedups.pyx"],
                optional=True,
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )

setup(ext_modules=ext_modules)
