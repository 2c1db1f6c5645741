"""Build script: compiles the hot-loop kernels when Cython and a C compiler
are available, and falls back to a pure-Python install otherwise.

    python setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible; a failed build is not fatal.

    The package selects the pure-Python kernels at import time when the
    compiled module is missing, so installation must not require a compiler.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: compiled kernels skipped ({exc}); "
                  "pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "pure-Python fallback will be used")


extensions = []
if not os.environ.get("SATOCENSUS_PURE"):
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "satocensus._kernels_c",
                    ["src/satocensus/_kernels_c.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        print("warning: Cython not available; pure-Python fallback will be used")

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
