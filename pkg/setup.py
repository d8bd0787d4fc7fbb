import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "wavelocate._kernels._core",
    ["src/wavelocate/_kernels/_core.pyx"],
    include_dirs=[numpy.get_include()],
    # -ffp-contract=off keeps the compiled kernels bit-identical to the
    # numpy fallback (no FMA reassociation).
    extra_compile_args=["-O3", "-ffp-contract=off"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(
    ext_modules=cythonize([ext], compiler_directives={"language_level": 3}),
)
