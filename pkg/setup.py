"""Build script: compiles the optional accelerator extension.

The package is fully functional without the extension (a pure-Python
integration path is selected at import time when ``relcrawl._core`` is
missing), so compilation failures downgrade to a warning instead of
aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible; fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing / compile error
            warnings.warn(
                "building relcrawl._core failed (%s); the pure-Python "
                "integration path will be used" % (exc,)
            )

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(
                "building %s failed (%s); the pure-Python integration "
                "path will be used" % (ext.name, exc)
            )


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "relcrawl._core",
                ["src/relcrawl/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
