"""Build script.

The compiled kernel module is optional: when Cython (and a C compiler) is
available the hot loops are built as an extension, otherwise the package
installs pure-Python and twpakit falls back to the numpy kernels at import
time.  Set TWPAKIT_NO_EXT=1 to skip the extension build explicitly.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("TWPAKIT_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/twpakit/_kernels.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
