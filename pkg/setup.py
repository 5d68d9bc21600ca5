import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("EQCNN_SKIP_CYTHON"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "eqcnn._kernels",
                    ["src/eqcnn/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython available: install pure-Python only; the package
        # falls back to the numpy kernels at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
