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

import json
import math
import os
from fractions import Fraction

import pytest

from tscatter.config import (
    TOL_ENV_VAR,
    Config,
    apply_env_overrides,
    load_config,
    parse_config,
    parse_length,
    parse_phase,
    serialize_config,
)
from tscatter.errors import ConfigError
from tscatter.specfun import EvalOptions

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "configs")


def test_default_config(default_config: Config) -> None:
    assert default_config.name == "default"
    (funnel,) = default_config.ends.funnels
    assert funnel.length == pytest.approx(2 * math.pi)
    assert funnel.phases == (Fraction(0),)
    assert default_config.ends.cusps == ()
    assert default_config.options == EvalOptions()


@pytest.mark.parametrize(
    "text, expected",
    [("2pi", 2 * math.pi), ("2*pi", 2 * math.pi), ("pi/3", math.pi / 3), ("PI", math.pi)],
)
def test_parse_length_multiples_of_pi(text: str, expected: float) -> None:
    assert parse_length(text) == pytest.approx(expected)


def test_parse_length_numbers_and_garbage() -> None:
    assert parse_length(3) == 3.0
    assert parse_length("1.5") == 1.5
    for bad in ("abc", "2pix", True, None, [1]):
        with pytest.raises(ConfigError):
            parse_length(bad)


def test_parse_phase() -> None:
    assert parse_phase("3/10") == Fraction(3, 10)
    assert parse_phase(" 1 / 4 ") == Fraction(1, 4)
    assert parse_phase(0) == Fraction(0)
    assert parse_phase(0.25) == 0.25
    for bad in ("1/0", "x", [], True):
        with pytest.raises(ConfigError):
            parse_phase(bad)


def test_shipped_configs_load() -> None:
    twisted = load_config(os.path.join(CONFIG_DIR, "twisted.json"), environ={})
    assert twisted.name == "twisted"
    assert twisted.ends.funnels[0].phases == (Fraction(3, 10),)

    mixed = load_config(os.path.join(CONFIG_DIR, "mixed.json"), environ={})
    assert mixed.ends.funnels[0].dim == 3
    assert mixed.ends.cusps[0].phases == (Fraction(0), Fraction(1, 4))

    cusp_only = load_config(os.path.join(CONFIG_DIR, "cusp_only.json"), environ={})
    assert cusp_only.ends.n_f == 0
    assert cusp_only.ends.cusps[0].n_c == 1


@pytest.mark.parametrize(
    "raw",
    [
        {"funnels": [], "cusps": []},
        {"funnels": [{"length": 1.0, "phases": [0]}], "extra": 1},
        {"funnels": [{"phases": [0]}]},
        {"funnels": [{"length": 1.0, "phases": 0}]},
        {"funnels": [{"length": -1.0, "phases": [0]}]},
        {"funnels": [{"length": 1.0, "phases": [1]}]},
        {"funnels": [{"length": 1.0, "phases": [0], "twist": 1}]},
        {"cusps": [{"phases": [0]}], "eval": {"tolerance": 1e-3}},
        {"cusps": [{"phases": [0]}], "eval": {"rel_tol": -1.0}},
        {"cusps": [{"phases": [0]}], "eval": {"rel_tol": "x"}},
        {"cusps": ["0"]},
        [],
    ],
)
def test_invalid_configs(raw: object) -> None:
    with pytest.raises(ConfigError):
        parse_config(raw)  # type: ignore


def test_eval_section_reaches_the_options() -> None:
    config = parse_config({"cusps": [{"phases": [0]}], "eval": {"rel_tol": 1e-10}})
    assert config.options.rel_tol == 1e-10


def test_env_override() -> None:
    options = EvalOptions()
    assert apply_env_overrides(options, {TOL_ENV_VAR: "1e-10"}).rel_tol == 1e-10
    assert apply_env_overrides(options, {TOL_ENV_VAR: ""}) == options
    assert apply_env_overrides(options, {}) == options
    for bad in ("abc", "-1"):
        with pytest.raises(ConfigError):
            apply_env_overrides(options, {TOL_ENV_VAR: bad})
    assert load_config(None, environ={TOL_ENV_VAR: "1e-9"}).options.rel_tol == 1e-9


def test_load_config_file_errors(tmp_path) -> None:
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"), environ={})
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(broken), environ={})


def test_serialized_config_parses_back(tmp_path) -> None:
    config = load_config(os.path.join(CONFIG_DIR, "mixed.json"), environ={})
    path = tmp_path / "mixed.json"
    path.write_text(json.dumps(serialize_config(config)))
    assert load_config(str(path), environ={}) == config
