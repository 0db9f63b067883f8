"""Build script: compiles the optional Cython kernel extension.

Set NOISYSHOR_SKIP_EXT=1 to install without the compiled kernels; the
package then falls back to the pure-numpy implementations at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("NOISYSHOR_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("noisyshor._kernels", ["src/noisyshor/_kernels.pyx"])],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
