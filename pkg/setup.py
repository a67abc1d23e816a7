# Copyright 2024 The tscatter Authors. All rights reserved.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from setuptools import find_packages, setup

setup(
    name="tscatter",
    version="0.1.0",
    author="The tscatter Authors",
    packages=find_packages(exclude=["tests", "tests.*"]),
    license="Apache-2.0",
    description="Scattering matrices, resonances and winding numbers on twisted \
        hyperbolic funnel and cusp ends",
    long_description="",
    python_requires=">=3.9",
    install_requires=[
        "numpy",
        "chex",
        "wandb",
        "absl-py",
        "matplotlib",
        "seaborn",
    ],
    extras_require={
        "test": ["pytest", "hypothesis", "mpmath"],
    },
    entry_points={
        "console_scripts": ["tscatter=tscatter.cli:run"],
    },
)
