"""Build the optional Cython kernel; the package falls back to numpy if it is absent."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SWIPTSEC_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "swiptsec._kernels",
                    ["src/swiptsec/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    # plain complex multiply; the C99 default routes every product through a NaN-safe call
                    extra_compile_args=[] if os.name == "nt" else ["-O3", "-fcx-limited-range"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
