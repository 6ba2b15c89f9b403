"""Build script: compiles the optional Cython evaluation core.

A plain ``pip install -e . --no-build-isolation`` builds
``hyperball._kernels_cy`` when Cython and a C compiler are available.
If either is missing the install still succeeds and the package falls
back to the pure-NumPy kernels at import time (see hyperball.backend).
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hyperball._kernels_cy",
                ["src/hyperball/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
