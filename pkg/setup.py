import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are a speedup, not a requirement: epispread falls back
# to the pure-Python implementation in epispread._purepy when the extension
# is unavailable, so a failed build must not fail the install.
extensions = [
    Extension(
        "epispread._core",
        ["src/epispread/_core.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"})
    if cythonize is not None
    else [],
)
