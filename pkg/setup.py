from setuptools import setup

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        ["src/evosym/_kernel.pyx"],
        language_level=3,
        compiler_directives={"binding": False},
    )
except ImportError:
    # the pure-Python kernels are selected at import when the extension
    # is missing, so building without Cython still yields a working package
    ext_modules = []

setup(ext_modules=ext_modules)
