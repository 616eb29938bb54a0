"""Setup script for the slab scattering library."""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="slab-scatter",
    version="0.1.0",
    description="Band structure, finite-slab scattering and pulse simulation for 1-D periodic potentials",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.9",  # simpson, DOP853
        "tenacity>=8.2.0",
        "python-dotenv>=0.19.0",
        "jsonschema>=4.0.0",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "slab-scatter=slab_scatter.cli.slab_tool:main",
        ],
    },
)
