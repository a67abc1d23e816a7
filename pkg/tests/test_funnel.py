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
from hypothesis import given, settings
from hypothesis import strategies as st

from tscatter.ends import FunnelTwist, ModeIndex, rho_funnel
from tscatter.errors import OnSingularSet, PoleProximity, ZeroKappa
from tscatter.funnel import (
    beta,
    beta_pole_distance,
    beta_ratio,
    dk_bound,
    gamma_quotient,
    mode_ode_residual,
    normalized_smatrix_coeff,
    poisson_coeff,
    poisson_leading_coeffs,
    reduced_smatrix_coeff,
    singular_set_distance,
    smatrix_coeff,
    symbol_leading,
    v0,
)
from tscatter.specfun import DEFAULT_OPTIONS


def rel(value: complex, expected: complex) -> float:
    return abs(value - expected) / max(abs(expected), 1e-300)


def mp_beta(y: float, s: complex) -> mpmath.mpc:
    s = mpmath.mpc(s)
    return mpmath.gamma((s + 1j * y + 1) / 2) * mpmath.gamma((s - 1j * y + 1) / 2) / 2


@pytest.mark.parametrize("y, s", [(1.3, 0.3 + 0.4j), (0.0, 2.5), (4.0, -0.6 - 2j), (10.0, 0.5)])
def test_beta_matches_oracle(y: float, s: complex) -> None:
    assert rel(beta(y, s), complex(mp_beta(y, s))) < 1e-11


def test_beta_refuses_its_poles() -> None:
    assert beta_pole_distance(1.0, -1 + 0.5j) == (0.5, -1 + 1j)
    with pytest.raises(PoleProximity) as info:
        beta(1.0, -3 - 1j + 1e-8)
    assert info.value.pole == -3 - 1j


@pytest.mark.parametrize("s", [0.3 + 0.4j, 2 + 1.1j, 1.9 - 0.6j])
def test_beta_ratio_matches_oracle(s: complex) -> None:
    expected = mp_beta(1.0, s) / mp_beta(1.0, 1 - s)
    assert rel(beta_ratio(1.0, s), complex(expected)) < 1e-10


def test_beta_ratio_vanishes_on_reflected_poles() -> None:
    assert abs(beta_ratio(1.0, 2 + 1j)) < 1e-14
    assert abs(beta_ratio(0.0, 4.0)) < 1e-14


@pytest.mark.parametrize("s", [0.3 + 0.4j, 1.2 - 2j, -0.5, -2.5 + 0.1j])
def test_gamma_quotient(s: complex) -> None:
    expected = mpmath.gamma(1.5 - mpmath.mpc(s)) * mpmath.rgamma(mpmath.mpc(s) + 0.5)
    assert abs(gamma_quotient(s) + complex(expected)) < 1e-12 * max(1.0, abs(complex(expected)))
    if abs(s + 0.5) > 0.1:
        oracle = mpmath.gamma(0.5 - mpmath.mpc(s)) / mpmath.gamma(mpmath.mpc(s) - 0.5)
        assert rel(gamma_quotient(s), complex(oracle)) < 1e-11


@given(
    st.floats(min_value=-0.3, max_value=1.3),
    st.floats(min_value=-3.0, max_value=3.0),
)
@settings(max_examples=100, deadline=None)
def test_functional_equation(x: float, t: float) -> None:
    mode = ModeIndex(FunnelTwist(2 * math.pi, (0.3,)), 0, 1)
    s = complex(x, t)
    assert abs(smatrix_coeff(mode, s) * smatrix_coeff(mode, 1 - s) - 1) < 1e-10


@pytest.mark.parametrize("t", [0.0, 0.3, 1.7, 5.0])
@pytest.mark.parametrize("k", [0, 1, 7])
def test_unitarity_on_the_critical_line(twisted: FunnelTwist, k: int, t: float) -> None:
    mode = ModeIndex(twisted, 0, k)
    s = complex(0.5, t)
    assert abs(abs(smatrix_coeff(mode, s)) - 1) < 1e-12
    assert abs(abs(normalized_smatrix_coeff(mode, s)) - 1) < 1e-12


def test_values_at_the_half_point(funnel: FunnelTwist) -> None:
    for k in (0, 1, 5):
        mode = ModeIndex(funnel, 0, k)
        assert abs(smatrix_coeff(mode, 0.5) + 1) < 1e-14
        assert abs(normalized_smatrix_coeff(mode, 0.5) + 1) < 1e-14
        assert reduced_smatrix_coeff(mode, 0.5) == 0


def test_reduced_and_normalized_agree(twisted: FunnelTwist) -> None:
    mode = ModeIndex(twisted, 0, 3)
    s = 0.2 + 1.3j
    reduced = reduced_smatrix_coeff(mode, s)
    assert rel(reduced, -(s - 0.5) * normalized_smatrix_coeff(mode, s)) < 1e-13
    bracket = math.sqrt(10) ** (1 - 2 * s)
    assert rel(reduced, bracket * (s - 0.5) * beta_ratio(mode.omega_kappa, s)) < 1e-12


def test_perturbation_scales_the_smatrix(zero_mode: ModeIndex) -> None:
    s = 0.3 + 0.4j
    perturbed = DEFAULT_OPTIONS.replace(beta_perturbation=1e-3)
    assert rel(smatrix_coeff(zero_mode, s, perturbed), 1.001 * smatrix_coeff(zero_mode, s)) < 1e-14


def test_symbol_leading_approximates_large_modes(untwisted: FunnelTwist) -> None:
    s = 0.25 + 0.5j
    for k in (64, 256):
        mode = ModeIndex(untwisted, 0, k)
        assert rel(smatrix_coeff(mode, s), symbol_leading(mode, s)) < 1e-3


def test_symbol_leading_requires_nonzero_kappa(zero_mode: ModeIndex) -> None:
    with pytest.raises(ZeroKappa):
        symbol_leading(zero_mode, 0.3)


@pytest.mark.parametrize(
    "y, s, r", [(1.3, 0.3 + 0.4j, 0.7), (0.0, 2.2, 1.5), (3.0, -0.4 + 1j, 3.0)]
)
def test_v0_matches_oracle(y: float, s: complex, r: float) -> None:
    z = mpmath.tanh(r) ** 2
    a = (mpmath.mpc(s) + 1j * y + 1) / 2
    b = (mpmath.mpc(s) - 1j * y + 1) / 2
    expected = (
        mpmath.tanh(r) * mpmath.cosh(r) ** (-mpmath.mpc(s)) * mpmath.hyp2f1(a, b, 1.5, z)
    ) / mpmath.gamma(1.5)
    assert rel(v0(y, s, r), complex(expected)) < 1e-10


def test_v0_dirichlet_and_symmetry() -> None:
    assert v0(1.3, 0.3 + 0.4j, 0.0) == 0
    for r in (0.4, 1.0, 2.5):
        s = 0.3 + 0.4j
        assert rel(v0(1.3, s, r), v0(1.3, 1 - s, r)) < 1e-10
    with pytest.raises(ValueError):
        v0(1.3, 0.3, -1.0)


@pytest.mark.parametrize("r", [1.0, 2.5])
def test_v0_solves_the_mode_equation(twisted: FunnelTwist, r: float) -> None:
    mode = ModeIndex(twisted, 0, 1)
    s = 0.3 + 0.4j
    options = DEFAULT_OPTIONS.replace(rel_tol=1e-15)
    f = lambda x: v0(mode.omega_kappa, s, x, options)
    assert abs(mode_ode_residual(mode, s, f, r)) < 1e-6 * max(1.0, abs(f(r)))


def test_mode_ode_residual_flags_wrong_functions(twisted: FunnelTwist) -> None:
    mode = ModeIndex(twisted, 0, 1)
    assert abs(mode_ode_residual(mode, 0.3, lambda x: complex(x), 1.0)) > 0.1
    with pytest.raises(ValueError):
        mode_ode_residual(mode, 0.3, lambda x: complex(x), 1e-3)


def test_poisson_coeff(twisted: FunnelTwist) -> None:
    mode = ModeIndex(twisted, 0, 2)
    s = 0.3 + 0.2j
    assert poisson_coeff(mode, s, 0.0) == 0
    expected = beta(mode.omega_kappa, s) * v0(mode.omega_kappa, s, 1.2) / complex(
        mpmath.gamma(s + 0.5)
    )
    assert rel(poisson_coeff(mode, s, 1.2), expected) < 1e-12


def test_poisson_leading_coeffs_describe_the_far_field(twisted: FunnelTwist) -> None:
    mode = ModeIndex(twisted, 0, 1)
    s = 0.3 + 0.2j
    a0, b0 = poisson_leading_coeffs(mode, s)
    r = 8.0
    log_rho = math.log(rho_funnel(r))
    outgoing = a0 * cmath.exp((1 - s) * log_rho)
    incoming = b0 * cmath.exp(s * log_rho)
    lhs = (2 * s - 1) * poisson_coeff(mode, s, r)
    assert abs(lhs - outgoing - incoming) < 1e-4 * (abs(outgoing) + abs(incoming))


def test_singular_set_distance() -> None:
    assert singular_set_distance(0.5, 1.0, 0) == pytest.approx(math.sqrt(1.25))
    assert singular_set_distance(0.5, 1.0, 0.3) == pytest.approx(math.sqrt(0.34))


def test_dk_bound(untwisted: FunnelTwist) -> None:
    assert dk_bound(1, 0.5, untwisted) == pytest.approx(4 / math.sqrt(1.25))
    assert dk_bound(2, 0.5, untwisted) == pytest.approx(1 / math.sqrt(1.25))
    assert dk_bound(3, 0.5, untwisted) == 1.0
    with pytest.raises(OnSingularSet):
        dk_bound(1, 1.0, untwisted)
    with pytest.raises(ValueError):
        dk_bound(0, 0.5, untwisted)
