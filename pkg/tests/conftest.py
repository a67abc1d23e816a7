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

import math
import os
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from tscatter.config import Config, load_config
from tscatter.ends import CuspTwist, FunnelTwist, ModeIndex, SurfaceEnds

mpmath.mp.dps = 30

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "configs")


@pytest.fixture
def untwisted() -> FunnelTwist:
    """Funnel of length 2 pi (omega = 1) with trivial holonomy."""
    return FunnelTwist(2 * math.pi, (Fraction(0),))


@pytest.fixture
def twisted() -> FunnelTwist:
    return FunnelTwist(2 * math.pi, (Fraction(3, 10),))


@pytest.fixture
def mixed() -> FunnelTwist:
    return FunnelTwist(2 * math.pi, (Fraction(0), Fraction(1, 2), Fraction(3, 10), Fraction(0)))


@pytest.fixture(params=[Fraction(0), Fraction(3, 10)], ids=["theta0", "theta0.3"])
def funnel(request: pytest.FixtureRequest) -> FunnelTwist:
    return FunnelTwist(2 * math.pi, (request.param,))


@pytest.fixture
def zero_mode(untwisted: FunnelTwist) -> ModeIndex:
    return ModeIndex(untwisted, 0, 0)


@pytest.fixture
def default_config() -> Config:
    return load_config(None, environ={})


@pytest.fixture
def twisted_config() -> Config:
    return load_config(os.path.join(CONFIG_DIR, "twisted.json"), environ={})


@pytest.fixture
def cusp_config() -> Config:
    return load_config(os.path.join(CONFIG_DIR, "cusp_only.json"), environ={})


@pytest.fixture
def mixed_config() -> Config:
    return load_config(os.path.join(CONFIG_DIR, "mixed.json"), environ={})


@pytest.fixture
def cusp_ends() -> SurfaceEnds:
    return SurfaceEnds(cusps=(CuspTwist((Fraction(0), Fraction(1, 4), Fraction(0))),))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
