from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "szwalk._kernels_cy",
                ["src/szwalk/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # The package runs on the pure-numpy kernels when the compiled
    # extension cannot be built.
    ext_modules = []

setup(ext_modules=ext_modules)
