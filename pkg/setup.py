import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the numpy fallback in hqcf._pykernels covers this case
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "hqcf._ckernels",
                ["src/hqcf/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
