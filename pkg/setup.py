import os

import pkg_resources
from setuptools import setup, find_packages

setup(
    name="coopic",
    py_modules=["coopic"],
    version="1.0",
    description="Sum-capacity bounds, achievable schemes and verification sweeps for the two-user interference channel with source cooperation.",
    readme="README.md",
    python_requires=">=3.8",
    license="MIT",
    packages=find_packages(exclude=["tests*"]),
    install_requires=[
        str(r)
        for r in pkg_resources.parse_requirements(
            open(os.path.join(os.path.dirname(__file__), "requirements.txt"))
        )
    ],
    entry_points = {
        'console_scripts': ['coopic=coopic.cli:cli'],
    },
    include_package_data=True,
    extras_require={'dev': ['pytest']},
)
