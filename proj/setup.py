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
        source = Path(__file__).parent.resolve()
        build = Path(self.build_temp).resolve()
        out = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        build.mkdir(parents=True, exist_ok=True)
        out.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                "-S", str(source),
                "-B", str(build),
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build), "--target", "_xlayersurv"],
            check=True,
        )
        built = sorted(build.glob("_xlayersurv*.so")) + sorted(build.glob("_xlayersurv*.pyd"))
        if not built:
            raise RuntimeError("cmake did not produce the extension module")
        self.copy_file(str(built[0]), str(out / built[0].name))


setup(
    ext_modules=[CMakeExtension("xlayer_surv._xlayersurv")],
    cmdclass={"build_ext": CMakeBuild},
)
