from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    # Source-tree installs without Cython fall back to the pure-Python engine.
    ext_modules = []
else:
    # No -ffast-math and no -march=native: the kernel must produce the exact
    # same IEEE-754 results as the pure-Python reference backend.
    ext_modules = cythonize(
        [
            Extension(
                "agora._kernel",
                ["src/agora/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
