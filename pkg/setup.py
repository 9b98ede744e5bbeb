import sys

from setuptools import Extension, setup

# The compiled evaluator kernel is optional: the package falls back to a pure
# Python interpreter for the same bytecode when the extension is unavailable.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext = Extension(
        "finquo.fmcheck._evalcore",
        sources=["src/finquo/fmcheck/_evalcore.pyx"],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"warning: building without compiled kernel ({exc})\n")
    ext_modules = []

setup(ext_modules=ext_modules)
