"""Build hook for the optional compiled special-function core.

The package is fully functional without the extension; anything that fails
here (missing Cython, missing compiler) downgrades the install to the pure
numpy backend instead of aborting it.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class _OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken toolchain
            warnings.warn(f"compiled core skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled core skipped for {ext.name}: {exc}")


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        warnings.warn(f"compiled core skipped: {exc}")
        return []
    ext = Extension(
        "ersraman._specfun_cy",
        ["src/ersraman/_specfun_cy.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions(), cmdclass={"build_ext": _OptionalBuildExt})
