"""
Setup file for the federated learning simulator
"""

from setuptools import setup, find_packages

setup(
    name="fl-simulator",
    version="0.1.0",
    description="Deterministic single-process simulator of synchronous federated learning",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    author="AI Engineer",
    author_email="engineer@example.com",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    py_modules=["main", "config", "logging_config", "utils"],
    package_data={"templates": ["*.yaml"]},
    install_requires=[
        "numpy>=1.21.0",
        "pydantic>=2.5.0",
        "python-dotenv>=1.0.0",
        "PyYAML>=6.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "hypothesis>=6.0.0",
        ]
    },
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "flsim=main:main",
        ],
    },
)
