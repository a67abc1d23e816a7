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

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tscatter.errors import ConfigError, NearIntegerOrder, PoleProximity
from tscatter.specfun import (
    EvalOptions,
    bessel_i,
    bessel_k,
    e2_factor,
    gamma,
    japanese_bracket,
    log_e2,
    log_gamma,
    polygamma,
    regularized_2f1,
    rgamma,
)


def rel(value: complex, expected: complex) -> float:
    return abs(value - expected) / max(abs(expected), 1e-300)


@pytest.mark.parametrize(
    "z", [0.5 + 0.5j, 3.7 - 2.1j, -2.3 + 0.7j, 10 + 20j, 0.1, 25.5, -0.4 - 3.0j]
)
def test_log_gamma_matches_oracle(z: complex) -> None:
    expected = complex(mpmath.loggamma(z))
    assert abs(log_gamma(z) - expected) < 1e-12 * max(1.0, abs(expected))


@pytest.mark.parametrize("z", [0.5 + 0.5j, 3.7 - 2.1j, -2.3 + 0.7j, -4.5, 7.25])
def test_gamma_matches_oracle(z: complex) -> None:
    assert rel(gamma(z), complex(mpmath.gamma(z))) < 1e-12


def test_log_gamma_is_continuous_across_the_lanczos_boundary() -> None:
    for y in (0.0, 0.7, -3.0):
        left = log_gamma(complex(0.5 - 1e-12, y))
        right = log_gamma(complex(0.5, y))
        assert abs(left - right) < 1e-10


def test_gamma_refuses_poles() -> None:
    with pytest.raises(PoleProximity) as info:
        gamma(-2.0)
    assert info.value.pole == -2
    with pytest.raises(PoleProximity):
        log_gamma(1e-8j)


def test_rgamma_is_entire() -> None:
    assert rgamma(0) == 0
    assert rgamma(-3) == 0
    assert rel(rgamma(-2.5), complex(1 / mpmath.gamma(-2.5))) < 1e-12
    z = -3 + 1e-7
    assert rel(rgamma(z), complex(1 / mpmath.gamma(mpmath.mpf(z)))) < 1e-7
    assert rel(rgamma(4.0), 1 / 6) < 1e-14


@given(
    st.floats(min_value=-4.5, max_value=4.5),
    st.floats(min_value=-2.0, max_value=2.0),
)
@settings(max_examples=200, deadline=None)
def test_reflection_formula(x: float, y: float) -> None:
    z = complex(x, y)
    assume(abs(z - round(x)) > 0.1)
    assert abs(gamma(z) * gamma(1 - z) * cmath.sin(math.pi * z) / math.pi - 1) < 1e-10


@given(
    st.floats(min_value=-4.5, max_value=4.5),
    st.floats(min_value=-2.0, max_value=2.0),
)
@settings(max_examples=200, deadline=None)
def test_recurrence(x: float, y: float) -> None:
    z = complex(x, y)
    assume(abs(z - round(x)) > 0.1)
    assert rel(z * gamma(z), gamma(z + 1)) < 1e-11


@pytest.mark.parametrize("n", [0, 1, 2, 3])
@pytest.mark.parametrize("z", [1.5 + 2j, 0.3 - 0.4j, -2.7 + 0.5j, 20 + 1j, 0.05])
def test_polygamma_matches_oracle(n: int, z: complex) -> None:
    assert rel(polygamma(n, z), complex(mpmath.psi(n, z))) < 1e-10


def test_polygamma_rejects_orders_and_poles() -> None:
    with pytest.raises(ValueError):
        polygamma(4, 1.0)
    with pytest.raises(PoleProximity):
        polygamma(2, -1.0)


@pytest.mark.parametrize(
    "a, b, c, z",
    [
        (0.5 + 0.3j, 0.5 - 0.3j, 1.5, 0.3),
        (1.2, -0.7 + 0.4j, 2.3, 0.9),
        (0.3 + 1.0j, 2.0, 1.5, -0.6 + 0.2j),
        (0.8 + 2.0j, 0.8 - 2.0j, 1.5, 0.95),
        (1.0, 1.0, 3.5 + 0.5j, 0.5j),
    ],
)
def test_regularized_2f1_matches_oracle(a: complex, b: complex, c: complex, z: complex) -> None:
    expected = complex(mpmath.hyp2f1(a, b, c, z) / mpmath.gamma(c))
    assert rel(regularized_2f1(a, b, c, z), expected) < 1e-10


@pytest.mark.parametrize("m", [0, 1, 2])
def test_regularized_2f1_at_nonpositive_integer_c(m: int) -> None:
    a, b, z = 0.5 + 0.3j, 1.5 - 0.2j, 0.4
    expected = (
        mpmath.rf(a, m + 1)
        * mpmath.rf(b, m + 1)
        * mpmath.mpc(z) ** (m + 1)
        * mpmath.hyp2f1(a + m + 1, b + m + 1, m + 2, z)
        / mpmath.gamma(m + 2)
    )
    assert rel(regularized_2f1(a, b, -m, z), complex(expected)) < 1e-10


def test_regularized_2f1_terminating_series() -> None:
    # a = -2 leaves a quadratic polynomial: 1 - 2 b z / c + b (b + 1) z^2 / (c (c + 1))
    b, c, z = 0.7, 1.5, 0.3
    expected = (1 - 2 * b * z / c + b * (b + 1) * z * z / (c * (c + 1))) / math.gamma(c)
    assert rel(regularized_2f1(-2, b, c, z), expected) < 1e-13


def test_regularized_2f1_requires_unit_disk() -> None:
    with pytest.raises(ValueError):
        regularized_2f1(0.5, 0.5, 1.5, 1.0)


@pytest.mark.parametrize(
    "nu, x", [(0.3, 1.3), (1.7, 8.0), (0.5 + 2j, 3.0), (-0.4 + 0.6j, 0.5), (-2, 1.5), (0, 12.0)]
)
def test_bessel_i_matches_oracle(nu: complex, x: float) -> None:
    assert rel(bessel_i(nu, x), complex(mpmath.besseli(nu, x))) < 1e-11


@pytest.mark.parametrize(
    "nu, x",
    [(0.3, 1.3), (1.7, 8.0), (0.5 + 2j, 3.0), (2.7 - 0.5j, 0.7), (0.5, 2.5), (3.2, 20.0)],
)
def test_bessel_k_matches_oracle(nu: complex, x: float) -> None:
    assert rel(bessel_k(nu, x), complex(mpmath.besselk(nu, x))) < 1e-10


@pytest.mark.parametrize("nu, x", [(0, 0.5), (1, 1.0), (2, 1.8), (1 + 1e-6, 0.9)])
def test_bessel_k_near_integer_order(nu: complex, x: float) -> None:
    assert rel(bessel_k(nu, x), complex(mpmath.besselk(nu, x))) < 1e-8


def test_bessel_k_near_integer_order_can_refuse() -> None:
    strict = EvalOptions(integer_order_limit=False)
    with pytest.raises(NearIntegerOrder):
        bessel_k(1.0, 1.0, strict)
    # the integral representation has no integer-order problem
    assert rel(bessel_k(1.0, 3.0, strict), complex(mpmath.besselk(1, 3))) < 1e-10


@pytest.mark.parametrize("nu", [0.2, 0.3 + 0.4j, 1.5, 2.7 - 0.5j])
@pytest.mark.parametrize("x", [0.5, 1.5, 3.0, 9.0])
def test_bessel_k_is_even_in_the_order(nu: complex, x: float) -> None:
    assert abs(bessel_k(nu, x) - bessel_k(-nu, x)) < 1e-9 * max(1.0, abs(bessel_k(nu, x)))


@pytest.mark.parametrize("nu", [0.3, 1.7, 0.5 + 2.0j, -0.4 + 0.6j])
@pytest.mark.parametrize("x", [0.5, 1.3, 3.0, 8.0])
def test_bessel_wronskian(nu: complex, x: float) -> None:
    h = 1e-5
    i_prime = (bessel_i(nu, x + h) - bessel_i(nu, x - h)) / (2 * h)
    k_prime = (bessel_k(nu, x + h) - bessel_k(nu, x - h)) / (2 * h)
    wronskian = bessel_i(nu, x) * k_prime - i_prime * bessel_k(nu, x)
    assert abs(wronskian + 1 / x) < 1e-8


def test_bessel_requires_positive_argument() -> None:
    with pytest.raises(ValueError):
        bessel_i(0.5, 0.0)
    with pytest.raises(ValueError):
        bessel_k(0.5, -1.0)


@pytest.mark.parametrize("w", [0.3 + 0.1j, -1.0, 0.9j, 2 + 1j, 1e-3])
def test_log_e2_exponentiates_to_the_factor(w: complex) -> None:
    assert rel(cmath.exp(log_e2(w)), e2_factor(w)) < 1e-13


def test_log_e2_zero_and_singularity() -> None:
    assert log_e2(0) == 0
    assert e2_factor(1.0) == 0
    with pytest.raises(PoleProximity):
        log_e2(1.0)


def test_e2_factor_at_minus_one() -> None:
    assert e2_factor(-1) == pytest.approx(2 * math.exp(-0.5), rel=1e-15)


def test_japanese_bracket() -> None:
    assert japanese_bracket(0) == 1.0
    assert japanese_bracket(3) == pytest.approx(math.sqrt(10))
    assert japanese_bracket(-3) == japanese_bracket(3)
    assert japanese_bracket(4 + 3j) == pytest.approx(math.sqrt(26), rel=1e-15)


@given(
    st.floats(min_value=-1e6, max_value=1e6),
    st.floats(min_value=-1e6, max_value=1e6),
)
def test_japanese_bracket_is_conjugation_invariant(x: float, y: float) -> None:
    z = complex(x, y)
    assert japanese_bracket(z.conjugate()) == japanese_bracket(z)
    assert japanese_bracket(z) >= max(1.0, abs(z))


def test_eval_options_validation() -> None:
    with pytest.raises(ConfigError):
        EvalOptions(rel_tol=0.0)
    with pytest.raises(ConfigError):
        EvalOptions(max_terms=2.5)
    with pytest.raises(ConfigError):
        EvalOptions(pole_exclusion=-1.0)
    assert EvalOptions(max_terms=100.0).max_terms == 100
    assert isinstance(EvalOptions(max_terms=100.0).max_terms, int)


def test_eval_options_replace() -> None:
    options = EvalOptions().replace(rel_tol=1e-10)
    assert options.rel_tol == 1e-10
    assert options.max_terms == EvalOptions().max_terms
