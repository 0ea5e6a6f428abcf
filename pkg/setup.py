"""Build script for the optional compiled summation kernel.

The package is pure Python plus one Cython extension, g2eis._dcsum, that
accelerates the double-coset summation over the Stern-Brocot tree.  The
extension relies on error-free double-double transforms, so it must NOT be
compiled with -ffast-math (that flag licenses the compiler to re-associate
the very additions whose rounding errors we recover).  If the toolchain is
unavailable the build degrades to pure Python; g2eis selects the fallback
at import time.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible; warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # compiler error on this unit
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print("*" * 72)
        print("WARNING: could not build the compiled summation kernel:")
        print(f"  {exc}")
        print("g2eis will fall back to the pure-Python ball-arithmetic path.")
        print("*" * 72)


def make_extensions():
    if os.environ.get("G2EIS_SKIP_EXT") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    # -O2 and strict IEEE semantics; double-double arithmetic breaks under
    # -ffast-math / -funsafe-math-optimizations.  The kernel leans on
    # fma(): without a hardware fused multiply-add the libm software
    # fallback costs ~100 cycles per call, so probe for FMA support and
    # compile for the host when available (the extension is built on the
    # machine it runs on; correctness does not depend on the flag).
    args = ["-O2", "-fno-fast-math"]
    if _host_has_fma():
        args.append("-mfma")
    ext = Extension(
        "g2eis._dcsum",
        sources=["src/g2eis/_dcsum.pyx"],
        extra_compile_args=args,
    )
    return cythonize([ext], language_level=3)


def _host_has_fma():
    try:
        with open("/proc/cpuinfo") as fh:
            return any(line.startswith("flags") and "fma" in line.split()
                       for line in fh)
    except OSError:
        return False


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
