"""Build script: compiles the optional row-reduction extension.

The package is fully functional without the extension; a pure-Python
fallback is selected at import time if the build is unavailable.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/svsplit/_modred.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
