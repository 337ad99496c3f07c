"""Build script for the optional compiled simulation core.

The package is fully functional without the extension (a pure-Python core is
selected at import time), so a failed native build downgrades to a warning
instead of aborting the install.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "linkey.engine._native",
                ["src/linkey/engine/_native.pyx"],
                language="c++",
                extra_compile_args=["-O3", "-std=c++17"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    import warnings

    warnings.warn("native core not built (%s); pure-Python core will be used" % exc)
    extensions = []

setup(ext_modules=extensions)
