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

"""JSON surface configurations.

A configuration looks like::

    {
        "funnels": [{"length": "2pi", "phases": [0, "3/10"]}],
        "cusps": [{"phases": [0, 0.5]}],
        "eval": {"rel_tol": 1e-12}
    }

Lengths accept numbers and multiples of pi ("2pi", "2*pi", "pi/3"); phases
accept numbers and exact rationals "p/q".
"""

import dataclasses
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional

from tscatter.ends import CuspTwist, FunnelTwist, Phase, SurfaceEnds
from tscatter.errors import ConfigError
from tscatter.specfun import EvalOptions

TOL_ENV_VAR = "TS_EVAL_TOL"

DEFAULT_CONFIG: Dict[str, Any] = {
    "funnels": [{"length": "2pi", "phases": [0]}],
    "cusps": [],
    "eval": {},
}

_TOP_KEYS = {"funnels", "cusps", "eval"}
_FUNNEL_KEYS = {"length", "phases"}
_CUSP_KEYS = {"phases"}
_EVAL_KEYS = {field.name for field in dataclasses.fields(EvalOptions)}


@dataclass(frozen=True)
class Config:
    ends: SurfaceEnds
    options: EvalOptions
    name: str = "default"


def _reject_unknown(section: Mapping, allowed: set, where: str) -> None:
    if not isinstance(section, Mapping):
        raise ConfigError(f"{where} must be an object, got {type(section).__name__}")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(unknown)}")


def parse_length(value: Any) -> float:
    """A positive number, or a multiple of pi such as "2pi", "2*pi" or "pi/3"."""
    if isinstance(value, bool):
        raise ConfigError(f"invalid length {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"invalid length {value!r}")

    text = value.replace(" ", "").lower()
    try:
        if "pi" not in text:
            return float(text)
        coeff, _, rest = text.partition("pi")
        coeff = coeff.rstrip("*")
        length = (float(coeff) if coeff else 1.0) * math.pi
        if rest:
            if not rest.startswith("/"):
                raise ValueError(rest)
            length /= float(rest[1:])
        return length
    except ValueError as err:
        raise ConfigError(f"invalid length {value!r}") from err


def parse_phase(value: Any) -> Phase:
    """Numbers stay floats unless integral; strings are parsed as exact rationals."""
    if isinstance(value, bool):
        raise ConfigError(f"invalid phase {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.replace(" ", ""))
        except (ValueError, ZeroDivisionError) as err:
            raise ConfigError(f"invalid phase {value!r}") from err
    raise ConfigError(f"invalid phase {value!r}")


def _parse_phases(section: Mapping, where: str) -> List[Phase]:
    phases = section.get("phases")
    if not isinstance(phases, list):
        raise ConfigError(f"{where}.phases must be a list")
    return [parse_phase(p) for p in phases]


def parse_options(section: Mapping) -> EvalOptions:
    _reject_unknown(section, _EVAL_KEYS, "eval")
    try:
        return EvalOptions(**section)
    except TypeError as err:
        raise ConfigError(f"invalid eval options: {err}") from err


def apply_env_overrides(
    options: EvalOptions, environ: Optional[Mapping[str, str]] = None
) -> EvalOptions:
    environ = os.environ if environ is None else environ
    value = environ.get(TOL_ENV_VAR)
    if value is None or value == "":
        return options
    try:
        return options.replace(rel_tol=float(value))
    except ValueError as err:
        raise ConfigError(f"{TOL_ENV_VAR} must be a positive number, got {value!r}") from err


def parse_config(raw: Mapping, name: str = "default") -> Config:
    _reject_unknown(raw, _TOP_KEYS, "config")

    funnels = []
    for i, section in enumerate(raw.get("funnels", [])):
        where = f"funnels[{i}]"
        _reject_unknown(section, _FUNNEL_KEYS, where)
        if "length" not in section:
            raise ConfigError(f"{where}.length is required")
        phases = tuple(_parse_phases(section, where))
        funnels.append(FunnelTwist(parse_length(section["length"]), phases))

    cusps = []
    for i, section in enumerate(raw.get("cusps", [])):
        where = f"cusps[{i}]"
        _reject_unknown(section, _CUSP_KEYS, where)
        cusps.append(CuspTwist(tuple(_parse_phases(section, where))))

    options = parse_options(raw.get("eval", {}))
    return Config(SurfaceEnds(tuple(funnels), tuple(cusps)), options, name)


def _serialize_phase(phase: Phase) -> Any:
    if isinstance(phase, Fraction):
        return str(phase)
    return phase


def serialize_config(config: Config) -> Dict[str, Any]:
    """Inverse of `parse_config`."""
    return {
        "funnels": [
            {"length": f.length, "phases": [_serialize_phase(p) for p in f.phases]}
            for f in config.ends.funnels
        ],
        "cusps": [{"phases": [_serialize_phase(p) for p in c.phases]} for c in config.ends.cusps],
        "eval": dataclasses.asdict(config.options),
    }


def load_config(path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None) -> Config:
    """Reads a config file (or the default config) and applies the environment override."""
    if path is None:
        config = parse_config(DEFAULT_CONFIG)
    else:
        try:
            with open(path, "r") as f:
                raw = json.load(f)
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(f"config {path} is not valid json: {err}") from err
        name = os.path.splitext(os.path.basename(path))[0]
        config = parse_config(raw, name)
    return dataclasses.replace(config, options=apply_env_overrides(config.options, environ))
