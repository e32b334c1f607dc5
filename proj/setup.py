"""CMake-driven build of the sparsemix._core extension.

The C++ core and the pybind11 module are configured and compiled by CMake
(with SPARSEMIX_BUILD_PYTHON=ON and test/CLI targets off); setuptools only
packages the result. Install with `pip install .` (add
--no-build-isolation when the build environment already provides
setuptools and pybind11).
"""

import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        import pybind11

        source_dir = Path(__file__).parent.resolve()
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        configure = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            "-DCMAKE_BUILD_TYPE=Release",
            "-DSPARSEMIX_BUILD_PYTHON=ON",
            "-DSPARSEMIX_BUILD_TESTS=OFF",
            "-DSPARSEMIX_BUILD_CLI=OFF",
            f"-DPython_EXECUTABLE={sys.executable}",
            f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
        ]
        subprocess.run(configure, check=True)
        subprocess.run(["cmake", "--build", str(build_dir), "--target", "_core"], check=True)


setup(
    ext_modules=[CMakeExtension("sparsemix._core")],
    cmdclass={"build_ext": CMakeBuild},
)
