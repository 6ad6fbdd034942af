import sys
from os.path import abspath, dirname, join

from setuptools import setup, find_packages

base_dir = abspath(dirname(__file__))
VERSION = open(join(base_dir, 'shardgame/VERSION')).read().strip()

CURRENT_PYTHON_VERSION = sys.version_info[:2]

# When changing the value of the REQUIRED_PYTHON_VERSION variable,
# make sure to also change the "python_requires" variable
# and the "classifiers" section in this file (setup.py).
REQUIRED_PYTHON_VERSION = (3, 8)

if CURRENT_PYTHON_VERSION < REQUIRED_PYTHON_VERSION:
    sys.stderr.write("""
==========================
Unsupported Python version
==========================
This version of shardgame requires Python {}.{}, but you're trying to
install it on Python {}.{}. Please try to upgrade to a newer Python
version.
""".format(*(REQUIRED_PYTHON_VERSION + CURRENT_PYTHON_VERSION)))
    sys.exit(1)

with open("README.md", encoding='utf-8') as f:
    long_description = f.read()

setup(
    name="shardgame",
    description="Stackelberg incentive game solver for sharded multi-chain networks",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    version=VERSION,
    python_requires=">=3.8",
    install_requires=["numpy>=1.20", "scipy>=1.7", "pandas>=1.5", "tqdm>=4.19.6", "psutil>=5.6.6"],
    tests_require=["pytest~=6.2.5", "coverage==4.5.1", "pyfakefs~=4.5.3"],
    keywords=["game theory", "Stackelberg", "sharding", "blockchain", "incentives"],
    license="Apache License, Version 2.0",
    include_package_data=True,
    package_data={"shardgame": ["VERSION", "config/scenarios/*.json"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3.8"
    ],
    entry_points={
        "console_scripts": [
            "shardgame = shardgame.shardgame:main",
        ]
    }
)
