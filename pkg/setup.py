import os

import numpy as np
from setuptools import Extension, setup

# FASTBALL_NO_EXT=1 skips the compiled core; the package then runs on the
# pure-Python kernels.
if os.environ.get("FASTBALL_NO_EXT"):
    ext_modules = []
else:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fastball._kernels",
                ["src/fastball/_kernels.pyx"],
                include_dirs=[np.get_include(), "src/fastball"],
                language="c++",
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
