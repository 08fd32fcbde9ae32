"""Build script: compiles the optional Cython kernel core.

The package works without the extension (a pure-NumPy fallback is selected
at import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, missing headers, ...
            warnings.warn(f"compiled kernels skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernels skipped: {exc}")


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    exts = [
        Extension(
            "sphera._kernels._core",
            ["src/sphera/_kernels/_core.pyx"],
            include_dirs=[np.get_include()],
            # No -ffast-math: the Kahan compensation must not be optimized away.
            extra_compile_args=["-O3"],
        )
    ]
    return cythonize(exts, language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
