import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "phonalign.align._kernel",
                ["src/phonalign/align/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level="3",
    )
except ImportError:
    # Pure-python fallback is selected at import time when the
    # extension is unavailable.
    ext_modules = []

setup(ext_modules=ext_modules)
