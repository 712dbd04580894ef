from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "wavebound._step",
        ["src/wavebound/_step.pyx"],
        # -ffp-contract=off: FMA contraction would merge multiply-add pairs
        # into single roundings and change the per-operation IEEE semantics
        # that the round-off measurements rely on.  No -ffast-math for the
        # same reason.
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]


class optional_build_ext(build_ext):
    """Build the compiled kernels if possible; fall back to pure Python."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: compiled kernels skipped ({exc}); "
                  "using the NumPy fallback engine")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "using the NumPy fallback engine")


setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    ) if cythonize is not None else [],
    cmdclass={"build_ext": optional_build_ext},
)
