"""Build the optional compiled kernel; the package works without it."""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CONSLAW_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("conslaw._fastpoly", ["src/conslaw/_fastpoly.pyx"], extra_compile_args=["-O2"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
