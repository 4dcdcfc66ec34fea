"""Build hook for the optional compiled kernel extension.

The package is fully functional without the extension: ``bhtlab._kernels``
falls back to the numpy implementation when the compiled module is absent
or when ``BHTLAB_PURE_PYTHON=1`` is set.  Set ``BHTLAB_SKIP_EXT=1`` to skip
compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("BHTLAB_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "bhtlab._kernels._ckernels",
                    ["src/bhtlab/_kernels/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
