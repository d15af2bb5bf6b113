"""Builds the compiled solver kernel.

The extension is an optimization only: when it is missing (no compiler) or
a variable has more than 64 states, the solver runs on the pure-Python
engine with identical behavior.
"""

from setuptools import Extension, setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        [Extension("dsat._engine", ["src/dsat/_engine.pyx"],
                   extra_compile_args=["-O3"])],
        language_level="3",
    ),
)
