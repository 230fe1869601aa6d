"""Build script.

The geodesic kernel in src/tagscout/geo/_cgeo.pyx is compiled when Cython
and a C toolchain are available. The build is best-effort: if it fails,
the package installs anyway and falls back to the pure-Python kernel at
import time (see tagscout/geo/__init__.py).
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/tagscout/geo/_cgeo.pyx",
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"tagscout: skipping compiled geo kernel ({exc})")

setup(ext_modules=ext_modules)
