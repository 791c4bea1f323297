import shutil
import subprocess
import sys
from pathlib import Path

import pybind11
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).parent.resolve()


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                str(ROOT),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DMCKM_BUILD_CLI=OFF",
                "-DMCKM_BUILD_TESTS=OFF",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                f"-DPython_EXECUTABLE={sys.executable}",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_mckm", "-j"],
            cwd=build_dir,
            check=True,
        )
        # cmake placed the module inside the source package; mirror it to the
        # location setuptools expects for non-editable builds
        built = sorted((ROOT / "python" / "mckm").glob("_mckm*.so"))
        if not built:
            raise RuntimeError("cmake did not produce the _mckm module")
        target = Path(self.get_ext_fullpath(ext.name)).resolve()
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built[-1], target)


setup(
    ext_modules=[CMakeExtension("mckm._mckm")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
