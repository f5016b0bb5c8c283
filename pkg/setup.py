# these lines allow the version to be specified in Makefile.private
import os

from setuptools import setup

version = os.environ.get("MODULEVER", "0.0")

setup(
    name="probmodels",
    version=version,
    description="Solve probability puzzles by counting finite models of first order theories",
    author="Tim Guite",
    author_email="tim.guite@diamond.ac.uk",
    packages=["probmodels"],
    package_data={"probmodels": ["puzzles/*.in", "puzzles/cases.yaml"]},
    install_requires=["pyparsing>=3.0", "PyYaml", "pandas", "configargparse"],
    extras_require={"test": ["pytest", "procrunner"]},
    entry_points={"console_scripts": ["probmodels = probmodels.cli:main"]},
    zip_safe=False,
)
