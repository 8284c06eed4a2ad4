"""Build the optional compiled kernels.

The package works without them; ``aubalance.kernels`` falls back to the
pure-Python implementation when ``aubalance._ckernels`` cannot be imported.
"""
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext

# -ffp-contract=off keeps floating-point results identical to the Python fallback
CFLAGS = ["-O3", "-ffp-contract=off"]


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels not built ({exc}); using pure-Python fallback", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc})", file=sys.stderr)


def extensions():
    if os.environ.get("AUBALANCE_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "aubalance._ckernels",
        ["src/aubalance/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=CFLAGS,
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
