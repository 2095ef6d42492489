import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("DARP_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "darp._ckernel",
                    ["src/darp/_ckernel.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                    optional=True,
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
