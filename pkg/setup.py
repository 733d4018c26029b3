import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; lkm3._kernels falls back at import
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("LKM3_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "lkm3._kernels._ckernel",
                ["src/lkm3/_kernels/_ckernel.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)
