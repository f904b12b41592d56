"""Build script: compiles the optional term-list kernel extension.

The compiled kernel is optional — if Cython or a C compiler is missing
the package installs anyway and uses the pure-Python kernel (see
pqdd._kernels).  Set PQDD_NO_EXT=1 to skip the extension entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("PQDD_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("pqdd._poly_c", ["src/pqdd/_poly_c.pyx"],
                       extra_compile_args=["-O2"]),
             Extension("pqdd._gate_c", ["src/pqdd/_gate_c.pyx"],
                       extra_compile_args=["-O2"])],
            language_level=3)
    except ImportError:
        print("Cython not available; building without the compiled kernel")

setup(ext_modules=ext_modules)
