import sys

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the compiled kernels if possible, fall back to pure numpy otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing, not a packaging bug
            print(f"warning: compiled kernels skipped ({exc}); "
                  "oriq will use the numpy fallback", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "oriq will use the numpy fallback", file=sys.stderr)


extra_args = []
if not sys.platform.startswith("win"):
    # -ffp-contract=off keeps float accumulation order identical to the
    # numpy fallback (no FMA contraction), so the backends agree bitwise.
    extra_args = ["-O3", "-ffp-contract=off"]

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "oriq._kernels._cykernels",
                ["src/oriq/_kernels/_cykernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=extra_args,
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    print("warning: Cython not available; oriq will use the numpy fallback",
          file=sys.stderr)

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
