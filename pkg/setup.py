"""Builds the optional Cython kernel; the package falls back to numpy when it is absent."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("CALCFORGE_PURE"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("calcforge._kernel", ["src/calcforge/_kernel.pyx"], include_dirs=[numpy.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
            compiler_directives={"language_level": 3},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
