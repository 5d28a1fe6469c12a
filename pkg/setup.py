import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; oddsymp.kernel falls back
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("ODDSYMP_PURE"):
    ext_modules = cythonize(
        [Extension("oddsymp._speedups", ["src/oddsymp/_speedups.pyx"], extra_compile_args=["-O2"])],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)
