"""Build the optional compiled integration kernels.

The package works without the extension (a pure-Python backend is selected
at import time), so any build failure here downgrades to a warning instead
of aborting the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or Cython missing
            print(f"warning: skipping compiled kernels ({exc}); "
                  "pure-Python backend will be used", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "pure-Python backend will be used", file=sys.stderr)


def extensions():
    import os
    if not os.path.exists("src/spreadfield/_kernels.pyx"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython not available; compiled kernels disabled",
              file=sys.stderr)
        return []
    ext = Extension(
        "spreadfield._kernels",
        sources=["src/spreadfield/_kernels.pyx"],
        # -ffp-contract=off keeps the C arithmetic bit-identical to the
        # pure-Python backend (no FMA contraction).
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
