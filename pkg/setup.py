"""Build script for the optional Cython kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so compilation failures are downgraded to a warning rather
than aborting the install.
"""

import sys

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    # -ffp-contract=off: the numpy fallback must produce bit-identical
    # float results, so FMA contraction has to stay disabled.
    ext = Extension(
        "haarscan._kernels",
        ["src/haarscan/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"haarscan: skipping Cython extension ({exc}); "
          "pure-Python kernels will be used", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
