"""Optional compiled kernels; the package works without them."""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("CEFASOLVE_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(["src/cefasolve/_kernels.pyx"], quiet=True,
                                compiler_directives={"language_level": "3"})


class OptionalBuildExt:
    pass


try:
    from setuptools.command.build_ext import build_ext

    class OptionalBuildExt(build_ext):  # type: ignore[no-redef]
        def run(self):
            try:
                super().run()
            except Exception as e:  # noqa: BLE001 - fall back to pure Python
                print(f"warning: compiled kernels not built ({e}); using pure Python")

        def build_extension(self, ext):
            try:
                super().build_extension(ext)
            except Exception as e:  # noqa: BLE001
                print(f"warning: could not build {ext.name} ({e}); using pure Python")
except ImportError:  # pragma: no cover
    pass

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
