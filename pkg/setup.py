"""Build script: compiles the optional FSA kernel extension.

Set POLICH_PURE=1 to skip the extension and use the pure-Python kernels.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("POLICH_PURE") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("polich.kernels._fsa", ["src/polich/kernels/_fsa.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
