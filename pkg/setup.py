"""Build script: compiles the Cython kernel core when a toolchain is available.

The package is fully functional without the extension; helix_mse.kernels
falls back to the pure NumPy implementation at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "helix_mse.kernels._kernels_cy",
                ["src/helix_mse/kernels/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - toolchain-less installs
    print(f"helix-mse: skipping Cython extension build ({exc}); "
          "pure-Python kernels will be used")

setup(ext_modules=ext_modules)
