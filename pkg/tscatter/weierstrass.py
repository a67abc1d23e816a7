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

"""Genus-two Weierstrass products over truncated resonance multisets."""

import cmath
from dataclasses import dataclass

from tscatter.ends import (
    FunnelTwist,
    ModeIndex,
    ResonanceMultiset,
    SurfaceEnds,
    funnel_resonances,
    mode_resonances,
    surface_resonances,
)
from tscatter.errors import PoleProximity
from tscatter.specfun import DEFAULT_OPTIONS, CompensatedSum, EvalOptions, log_e2

__all__ = [
    "ResonanceMultiset",
    "TruncatedProduct",
    "counting_function",
    "counting_function_ends",
    "log_deriv3",
    "log_product_eval",
    "mode_product",
    "product_eval",
]


@dataclass(frozen=True)
class TruncatedProduct:
    """s^m0 prod E_2(s/mu)^mult over a multiset truncated at `radius`."""

    multiset: ResonanceMultiset
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.multiset.max_modulus() > self.radius * (1 + 1e-12):
            raise ValueError(f"multiset has points beyond the radius {self.radius}")

    @classmethod
    def for_funnel(cls, f: FunnelTwist, radius: float) -> "TruncatedProduct":
        return cls(funnel_resonances(f, radius), radius)


def _zero_at(P: TruncatedProduct, s: complex) -> bool:
    if s == 0:
        return P.multiset.m0 > 0
    return any(point == s for point, _ in P.multiset)


def log_product_eval(
    P: TruncatedProduct, s: complex, options: EvalOptions = DEFAULT_OPTIONS
) -> complex:
    """Logarithm of the product, accumulated factor by factor in order of increasing |mu|."""
    s = complex(s)
    if _zero_at(P, s):
        raise PoleProximity(s, s, f"the product vanishes at {s}")
    acc = CompensatedSum()
    if P.multiset.m0:
        acc.add(P.multiset.m0 * cmath.log(s))
    for point, mult in P.multiset:
        acc.add(mult * log_e2(s / point, options))
    return acc.value


def product_eval(
    P: TruncatedProduct, s: complex, options: EvalOptions = DEFAULT_OPTIONS
) -> complex:
    s = complex(s)
    if _zero_at(P, s):
        return 0j
    return cmath.exp(log_product_eval(P, s, options))


def log_deriv3(P: TruncatedProduct, s: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Third derivative of log P: 2 m0/s^3 - sum mult * 2/(mu - s)^3."""
    s = complex(s)
    distance = P.multiset.nearest_distance(s)
    if distance < options.pole_exclusion:
        raise PoleProximity(s, None, f"{s} is within {distance} of a zero of the product")
    acc = CompensatedSum()
    if P.multiset.m0:
        acc.add(2.0 * P.multiset.m0 / s**3)
    for point, mult in P.multiset:
        acc.add(-2.0 * mult / (point - s) ** 3)
    return acc.value


def mode_product(mode: ModeIndex, max_index: int) -> TruncatedProduct:
    """Product over the poles of beta_kappa with 0 <= m <= max_index."""
    multiset = mode_resonances(mode, max_index)
    return TruncatedProduct(multiset, max(multiset.max_modulus(), 1.0))


def counting_function(f: FunnelTwist, r: float) -> int:
    """Number of funnel resonances in |s| <= r, with multiplicity."""
    return funnel_resonances(f, r).total()


def counting_function_ends(ends: SurfaceEnds, r: float) -> int:
    return surface_resonances(ends, r).total()
