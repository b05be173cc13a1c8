"""Build script: compiles the optional Cython kernel extension.

The extension is a speed-up only; if the build fails (no compiler, no
Cython) the package installs anyway and falls back to the scipy/numpy
kernels at import time.
"""

import warnings

from setuptools import setup
from setuptools.errors import CCompilerError, ExecError, PlatformError


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        warnings.warn(f"Cython kernels skipped ({exc}); using pure fallback")
        return []
    ext = Extension(
        "gtvsoftmax._kernels",
        ["src/gtvsoftmax/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


try:
    setup(ext_modules=_extensions())
except (CCompilerError, ExecError, PlatformError) as exc:
    warnings.warn(f"Cython kernel build failed ({exc}); installing pure fallback")
    setup(ext_modules=[])
