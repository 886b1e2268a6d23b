"""Build script for the optional compiled kernels.

The package is fully functional without the extension; ``hamcol._backend``
falls back to the pure-Python kernels when ``hamcol._speedups`` is missing.
Build in place with  ``python setup.py build_ext --inplace``  or just
``pip install -e . --no-build-isolation``.
"""

import os

from setuptools import Extension, setup

try:
    if not os.path.exists("src/hamcol/_speedups.pyx"):
        raise ImportError
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "hamcol._speedups",
                ["src/hamcol/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
