from setuptools import setup, find_packages

setup(
    name="overflowaudit",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "pydantic>=2.4.0,<3.0.0",
        "pydantic-settings>=2.0.0",
        "numpy>=1.24.0,<2.0.0",
        "pandas>=2.0.0,<3.0.0",
        "scipy>=1.10.0,<2.0.0",
        "mpmath>=1.3.0",
        "python-dotenv>=1.0.0",
        "tqdm>=4.65.0",
    ],
    entry_points={"console_scripts": ["overflowaudit=cli.main:main"]},
    python_requires=">=3.10",
)
