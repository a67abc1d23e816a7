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

"""Per-mode analysis of the twisted hyperbolic funnel.

A mode (j, k) of a funnel of length l carries the frequency
y = omega * kappa with omega = 2 pi / l and kappa = k + theta_j. All
coefficients below are functions of y and the spectral parameter s.
"""

import cmath
import math
from typing import Callable, List, Tuple

import numpy as np
from absl import logging

from tscatter.ends import FunnelTwist, ModeIndex, Phase, is_symmetric_phase
from tscatter.errors import OnSingularSet, PoleProximity, ZeroKappa
from tscatter.specfun import (
    DEFAULT_OPTIONS,
    EvalOptions,
    gamma,
    log_gamma,
    regularized_2f1,
    rgamma,
)

RadialFunction = Callable[[float], complex]


def beta_pole_distance(omega_kappa: float, s: complex) -> Tuple[float, complex]:
    """Distance from s to the poles -1 - 2n +- i omega_kappa of beta."""
    n = max(0, round((-1.0 - s.real) / 2.0))
    best = (math.inf, 0j)
    for m in (n - 1, n, n + 1):
        if m < 0:
            continue
        for sign in (1.0, -1.0):
            pole = complex(-1 - 2 * m, sign * omega_kappa)
            distance = abs(s - pole)
            if distance < best[0]:
                best = (distance, pole)
    return best


def log_beta(omega_kappa: float, s: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    s = complex(s)
    y = float(omega_kappa)
    distance, pole = beta_pole_distance(y, s)
    if distance < options.pole_exclusion:
        raise PoleProximity(s, pole)
    return (
        math.log(0.5)
        + log_gamma((s + 1j * y + 1.0) / 2.0, options)
        + log_gamma((s - 1j * y + 1.0) / 2.0, options)
    )


def beta(omega_kappa: float, s: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """beta_kappa(s) = Gamma((s + i y + 1)/2) Gamma((s - i y + 1)/2) / 2 with y = omega kappa."""
    return cmath.exp(log_beta(omega_kappa, s, options))


def beta_ratio(omega_kappa: float, s: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """beta_kappa(s) / beta_kappa(1 - s); vanishes where beta_kappa(1 - s) has poles."""
    s = complex(s)
    y = float(omega_kappa)
    w = 1.0 - s
    if beta_pole_distance(y, w)[0] >= 0.5:
        return cmath.exp(log_beta(y, s, options) - log_beta(y, w, options))
    reciprocal = 2.0 * rgamma((w + 1j * y + 1.0) / 2.0) * rgamma((w - 1j * y + 1.0) / 2.0)
    return beta(y, s, options) * reciprocal


def gamma_quotient(s: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Gamma(1/2 - s)/Gamma(s - 1/2) in its pole-free form -Gamma(3/2 - s)/Gamma(s + 1/2)."""
    s = complex(s)
    n = round(-(s.real + 0.5))
    if n >= 0 and abs(s + 0.5 + n) < 0.5:
        # zeros of 1/Gamma(s + 1/2)
        return -gamma(1.5 - s, options) * rgamma(s + 0.5)
    return -cmath.exp(log_gamma(1.5 - s, options) - log_gamma(s + 0.5, options))


def _bracket_power(mode: ModeIndex, exponent: complex) -> complex:
    # <k> is a real number >= 1, so the power is unambiguous
    return cmath.exp(exponent * math.log(mode.bracket))


def v0(
    omega_kappa: float, s: complex, r: float, options: EvalOptions = DEFAULT_OPTIONS
) -> complex:
    """Modal solution tanh(r) cosh(r)^-s F((s+iy+1)/2, (s-iy+1)/2; 3/2; tanh^2 r).

    Vanishes at the central geodesic r = 0 and is symmetric under s -> 1 - s.
    """
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    if r == 0:
        return 0j
    s = complex(s)
    y = float(omega_kappa)
    t = math.tanh(r)
    log_cosh = r + math.log1p(math.exp(-2.0 * r)) - math.log(2.0)
    hypergeometric = regularized_2f1(
        (s + 1j * y + 1.0) / 2.0, (s - 1j * y + 1.0) / 2.0, 1.5, t * t, options
    )
    return t * cmath.exp(-s * log_cosh) * hypergeometric


def poisson_coeff(
    mode: ModeIndex, s: complex, r: float, options: EvalOptions = DEFAULT_OPTIONS
) -> complex:
    """Fourier coefficient beta_kappa(s) v0_kappa(s; r) / Gamma(s + 1/2) of the Poisson operator."""
    if r == 0:
        return 0j
    y = mode.omega_kappa
    return beta(y, s, options) * v0(y, s, r, options) * rgamma(complex(s) + 0.5)


def poisson_leading_coeffs(
    mode: ModeIndex, s: complex, options: EvalOptions = DEFAULT_OPTIONS
) -> Tuple[complex, complex]:
    """Coefficients (a0, b0) of rho^(1-s) and rho^s in (2s - 1) poisson_coeff as r -> inf.

    Read off from the z -> 1 - z connection formula of the hypergeometric factor.
    """
    s = complex(s)
    y = mode.omega_kappa
    a = (s + 1j * y + 1.0) / 2.0
    b = (s - 1j * y + 1.0) / 2.0
    scale = (2.0 * s - 1.0) * beta(y, s, options) * rgamma(s + 0.5)
    a0 = scale * gamma(s - 0.5, options) * rgamma(a) * rgamma(b)
    b0 = scale * gamma(0.5 - s, options) * rgamma(1.5 - a) * rgamma(1.5 - b)
    return a0, b0


def smatrix_coeff(mode: ModeIndex, s: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Fourier coefficient S_k^j(s) = Gamma(1/2-s) beta(s) / (Gamma(s-1/2) beta(1-s)).

    `options.beta_perturbation` scales the numerator beta only.
    """
    s = complex(s)
    value = gamma_quotient(s, options) * beta_ratio(mode.omega_kappa, s, options)
    if options.beta_perturbation:
        value *= 1.0 + options.beta_perturbation
    return value


def reduced_smatrix_coeff(
    mode: ModeIndex, s: complex, options: EvalOptions = DEFAULT_OPTIONS
) -> complex:
    """<k>^(1-2s) (s - 1/2) beta(s)/beta(1-s); its only poles are the mode's resonances."""
    s = complex(s)
    ratio = beta_ratio(mode.omega_kappa, s, options)
    return _bracket_power(mode, 1.0 - 2.0 * s) * (s - 0.5) * ratio


def normalized_smatrix_coeff(
    mode: ModeIndex, s: complex, options: EvalOptions = DEFAULT_OPTIONS
) -> complex:
    """-<k>^(1-2s) beta(s)/beta(1-s): unitary on Re s = 1/2 and equal to -1 at s = 1/2."""
    s = complex(s)
    return -_bracket_power(mode, 1.0 - 2.0 * s) * beta_ratio(mode.omega_kappa, s, options)


def symbol_leading(mode: ModeIndex, s: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Leading symbol 2^(1-2s) Gamma(1/2-s)/Gamma(s-1/2) |omega kappa|^(2s-1)."""
    if mode.kappa == 0:
        raise ZeroKappa(f"mode {mode.label()} has kappa = 0")
    s = complex(s)
    y = abs(mode.omega_kappa)
    return (
        cmath.exp((1.0 - 2.0 * s) * math.log(2.0))
        * gamma_quotient(s, options)
        * cmath.exp((2.0 * s - 1.0) * math.log(y))
    )


def _first_derivative(f: RadialFunction, r: float, h: float) -> complex:
    return (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) / (12 * h)


def _second_derivative(f: RadialFunction, r: float, h: float) -> complex:
    return (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) - f(r - 2 * h)) / (12 * h * h)


def mode_ode_residual(
    mode: ModeIndex, s: complex, f: RadialFunction, r: float, h: float = 1e-3
) -> complex:
    """Residual of (-d_r^2 - tanh r d_r + (omega kappa)^2/cosh^2 r - s(1 - s)) f at r.

    Derivatives use five-point central stencils, so f is sampled on [r - 2h, r + 2h].
    """
    if not 2 * h < r:
        raise ValueError(f"need 0 < 2h < r, got r={r}, h={h}")
    s = complex(s)
    y = mode.omega_kappa
    fr = f(r)
    return (
        -_second_derivative(f, r, h)
        - math.tanh(r) * _first_derivative(f, r, h)
        + (y / math.cosh(r)) ** 2 * fr
        - s * (1.0 - s) * fr
    )


##################
### d_k bounds ###
##################


def _strip_distance(s: complex, imag_points: np.ndarray) -> float:
    """Distance from s to (1 - 2 N_0) + i imag_points."""
    centre = max(0, round((1.0 - s.real) / 2.0))
    n = np.arange(max(0, centre - 2), centre + 3)
    real_points = 1.0 - 2.0 * n
    grid = real_points[:, None] + 1j * np.asarray(imag_points)[None, :]
    return float(np.min(np.abs(grid - s)))


def _index_window(s: complex, omega: float) -> np.ndarray:
    reach = math.ceil(abs(s.imag) / omega) + 2
    return np.arange(-reach - 1, reach + 2)


def singular_set_distance(s: complex, omega: float, theta: Phase) -> float:
    """Distance from s to R_theta (R_0 excludes the real axis)."""
    s = complex(s)
    j = _index_window(s, omega)
    if theta == 0:
        return _strip_distance(s, omega * j[j != 0])
    shifts = float(theta) + j
    return _strip_distance(s, np.concatenate([omega * shifts, -omega * shifts]))


def dk_bound(
    k: int, s: complex, f: FunnelTwist, options: EvalOptions = DEFAULT_OPTIONS
) -> float:
    """d_k(s) = d~_{k,0}(s) prod_theta d_{k,theta}(s) over the distinct phases of f."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    s = complex(s)
    factors: List[float] = []

    if k <= f.multiplicity(0):
        distance = _strip_distance(s, np.zeros(1))
        if distance < options.pole_exclusion:
            raise OnSingularSet(f"{s} lies on the real lattice 1 - 2N_0")
        factors.append(distance**-2)

    for theta in f.distinct_phases():
        m_theta = f.multiplicity(theta)
        cutoff = 2 * m_theta if is_symmetric_phase(theta) else m_theta
        if k > cutoff:
            continue
        distance = singular_set_distance(s, f.omega, theta)
        if distance < options.pole_exclusion:
            raise OnSingularSet(f"{s} lies on the singular set of phase {theta}")
        factors.append(1.0 / distance)

    logging.debug("dk_bound(k=%d, s=%s): %d active factors", k, s, len(factors))
    return float(np.prod(factors)) if factors else 1.0
