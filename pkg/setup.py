"""Build script: compiles the exact linear algebra kernel when Cython and a
C compiler are available, and degrades to the pure-Python kernel otherwise.
The two kernels implement the same algorithm; `fansheaf._linalg` picks the
compiled one at import time when present.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/fansheaf/_linalg/_fastrref.pyx",
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on toolchain
    import sys

    print(f"fansheaf: building without compiled kernel ({exc})", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
