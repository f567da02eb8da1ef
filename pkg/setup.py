from setuptools import Extension, setup

# The saturation kernel compiles to a C extension when Cython and a C
# compiler are available; otherwise the package installs with the pure
# Python kernel only (selected at import in armordb.reasoner.saturate).
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "armordb.reasoner._satcore",
                ["src/armordb/reasoner/_satcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
