"""Build the optional compiled flow kernels.

The extension is optional: without Cython or a C compiler the package
installs and runs on the pure-Python kernels.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("pld._flows", ["src/pld/_flows.pyx"], optional=True)],
        language_level=3,
    )

setup(ext_modules=ext_modules)
