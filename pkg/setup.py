"""Build the optional compiled kernels.

The package is fully functional without them: ``k3kit._core`` falls back to
the numpy implementations in ``k3kit._kernels_py`` when the extension is
missing.  Set ``K3KIT_NO_EXT=1`` to skip the build entirely.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("K3KIT_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "k3kit._kernels",
                    ["src/k3kit/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
