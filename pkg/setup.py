"""Build script for the optional compiled kernel backend.

The package itself is pure Python; ``wealthnet.backend._speedups`` is a
Cython extension holding the two inner-loop kernels.  If Cython or a C
compiler is unavailable the extension is simply skipped and the package
falls back to the numpy kernels at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "wealthnet.backend._speedups",
                ["src/wealthnet/backend/_speedups.pyx"],
                # No -ffast-math: the fallback kernels must stay bit-identical.
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
else:
    extensions = []

setup(ext_modules=extensions)
