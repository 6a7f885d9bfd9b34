import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PARABEXT_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "parabext._kernels",
                    ["src/parabext/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    language="c++",
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython/numpy at build time: install the pure-numpy backend only.
        ext_modules = []

setup(ext_modules=ext_modules)
