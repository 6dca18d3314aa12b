"""Builds the `rewriteval._core` extension from the C++ sources.

The CMake project remains the canonical build for the static library, the
command-line tool, and the test suites; this setup script compiles the
same sources directly so `pip install` works without CMake.
"""

from glob import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "rewriteval._core",
    sources=sorted(glob("src/*.cpp")) + ["bindings/module.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
    extra_compile_args=["-pthread"],
    extra_link_args=["-pthread"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
