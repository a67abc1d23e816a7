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

import cmath
import math

import pytest

from tscatter.ends import FunnelTwist, ModeIndex, ResonanceMultiset, SurfaceEnds
from tscatter.errors import PoleProximity
from tscatter.weierstrass import (
    TruncatedProduct,
    counting_function,
    counting_function_ends,
    log_deriv3,
    log_product_eval,
    mode_product,
    product_eval,
)


def test_single_factor_product() -> None:
    product = TruncatedProduct(ResonanceMultiset([(-1, 1)]), 1.0)
    value = product_eval(product, 1.0)
    assert value.real == pytest.approx(2 * math.exp(-0.5), rel=1e-14)
    assert value.imag == 0
    assert product_eval(product, 0.0) == 1


def test_product_vanishes_on_its_zeros(untwisted: FunnelTwist) -> None:
    product = TruncatedProduct.for_funnel(untwisted, 3.0)
    assert product_eval(product, -1 + 1j) == 0
    with pytest.raises(PoleProximity):
        log_product_eval(product, -1 + 1j)


def test_mass_at_the_origin() -> None:
    product = TruncatedProduct(ResonanceMultiset(m0=2), 1.0)
    assert product_eval(product, 2.0) == pytest.approx(4.0)
    assert product_eval(product, 0.0) == 0
    assert log_deriv3(product, 1.0) == pytest.approx(4.0)


def test_truncated_product_validation(untwisted: FunnelTwist) -> None:
    with pytest.raises(ValueError):
        TruncatedProduct(ResonanceMultiset([(-3, 1)]), 2.0)
    with pytest.raises(ValueError):
        TruncatedProduct(ResonanceMultiset(), 0.0)
    assert TruncatedProduct.for_funnel(untwisted, 2.0).multiset.total() == 6


@pytest.mark.parametrize("s", [0.3 + 0.4j, -2.0 + 1.3j, 1.7 - 2.2j])
def test_product_commutes_with_conjugation(twisted: FunnelTwist, s: complex) -> None:
    product = TruncatedProduct.for_funnel(twisted, 10.0)
    value = product_eval(product, s)
    assert abs(product_eval(product, s.conjugate()) - value.conjugate()) < 1e-10 * abs(value)


def test_log_product_is_a_sum_over_factors() -> None:
    multiset = ResonanceMultiset([(-1 + 2j, 1), (-1 - 2j, 1), (-3, 2)])
    s = 0.4 + 0.1j
    expected = sum(
        mult * (cmath.log(1 - s / mu) + s / mu + (s / mu) ** 2 / 2) for mu, mult in multiset
    )
    assert abs(log_product_eval(TruncatedProduct(multiset, 3.0), s) - expected) < 1e-13


def test_log_deriv3_matches_finite_differences(untwisted: FunnelTwist) -> None:
    product = TruncatedProduct.for_funnel(untwisted, 5.0)
    s, h = 0.3 + 0.4j, 1e-3
    f = lambda z: log_product_eval(product, z)
    numeric = (f(s + 2 * h) - 2 * f(s + h) + 2 * f(s - h) - f(s - 2 * h)) / (2 * h**3)
    exact = log_deriv3(product, s)
    assert abs(numeric - exact) < 1e-3 * abs(exact)


def test_log_deriv3_refuses_zeros(untwisted: FunnelTwist) -> None:
    product = TruncatedProduct.for_funnel(untwisted, 2.0)
    with pytest.raises(PoleProximity):
        log_deriv3(product, -1.0)


def test_mode_product(zero_mode: ModeIndex, twisted: FunnelTwist) -> None:
    product = mode_product(zero_mode, 3)
    assert product.radius == 7.0
    assert product.multiset.total() == 8
    assert product.multiset.multiplicity(-5) == 2
    assert mode_product(ModeIndex(twisted, 0, 1), 0).multiset.total() == 2


def test_counting_function(untwisted: FunnelTwist, cusp_ends: SurfaceEnds) -> None:
    assert counting_function(untwisted, 1.5) == 6
    assert counting_function(untwisted, 0.9) == 0
    ends = SurfaceEnds(funnels=(untwisted,), cusps=cusp_ends.cusps)
    assert counting_function_ends(ends, 1.5) == 8


def test_counting_function_grows_quadratically(untwisted: FunnelTwist) -> None:
    counts = [counting_function(untwisted, r) / r**2 for r in (20.0, 40.0, 60.0)]
    for ratio in counts:
        assert 1.3 < ratio < 1.8
    assert counting_function(untwisted, 40.0) <= counting_function(untwisted, 60.0)
