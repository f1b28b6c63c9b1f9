#!/usr/bin/python3

"""
When the cost of moving a continuous-time Markov chain along the edges of a
finite directed graph has entropy form, the Hamilton-Jacobi system of the
optimal control problem turns linear after an exponential change of
variables. entrograph exploits this to compute:

* Exact value functions through matrix exponentials, without overflow.
* Optimal feedback intensities in closed form.
* The ergodic constant and long-run limits from Perron vectors.
* Cross-checks: a Runge-Kutta oracle for the nonlinear system and a Monte
  Carlo simulator of the controlled chain.
"""

import sys
import setuptools

if sys.version_info[:2] < (3, 6):
    raise RuntimeError("Python version >= 3.6 is required.")

with open("README.md", "r") as f:
    long_description = f.read()

MAJOR = 0
MINOR = 3
MICRO = 0
VERSION = "%d.%d.%d" % (MAJOR, MINOR, MICRO)

setuptools.setup(
    name="entrograph",
    version=VERSION,
    description=(
        "Closed-form optimal control and ergodic analysis of continuous-time "
        "Markov chains on graphs with entropy running costs."),
    long_description=long_description,
    long_description_content_type="text/markdown",
    install_requires=["numpy >= 1.17", "scipy >= 1.4", "pandas >= 1.5",
                      "pytest>=7.0"],
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.8",
    license="BSD",
    classifiers=[
        "Development Status :: 2 - Pre-Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics"
    ],
    keywords="optimal control markov chain hamilton-jacobi perron-frobenius",
    entry_points={"console_scripts": "entrograph=entrograph.main:main"}
)
