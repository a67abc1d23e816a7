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

"""Fourier modes of the resolvent and Poisson operator on the parabolic cylinder."""

import cmath
import math
from typing import Callable

import numpy as np

from tscatter.ends import CuspTwist, cusp_projection
from tscatter.errors import HalfPole
from tscatter.specfun import DEFAULT_OPTIONS, EvalOptions, bessel_i, bessel_k

HeightFunction = Callable[[float], complex]


def cusp_kappa(c: CuspTwist, j: int, k: int) -> float:
    """Frequency 2 pi (k + theta_j) of the cusp mode (j, k)."""
    return 2.0 * math.pi * float(k + c.phases[j])


def _check_half(s: complex, options: EvalOptions) -> None:
    if abs(s - 0.5) < options.pole_exclusion:
        raise HalfPole(s, 0.5 + 0j, f"the zero cusp mode is singular at s = 1/2, got {s}")


def _power(y: float, exponent: complex) -> complex:
    return cmath.exp(exponent * math.log(y))


def u_kappa(
    kappa: float,
    s: complex,
    y: float,
    yprime: float,
    options: EvalOptions = DEFAULT_OPTIONS,
) -> complex:
    """Modal resolvent kernel of the cusp, symmetric in (y, yprime)."""
    if not (y > 0 and yprime > 0):
        raise ValueError(f"heights must be positive, got {y}, {yprime}")
    s = complex(s)
    lower, upper = min(y, yprime), max(y, yprime)

    if kappa == 0:
        _check_half(s, options)
        return _power(lower, s) * _power(upper, 1.0 - s) / (2.0 * s - 1.0)

    nu = s - 0.5
    a = abs(kappa)
    return (
        math.sqrt(y * yprime)
        * bessel_i(nu, a * lower, options)
        * bessel_k(nu, a * upper, options)
    )


def cusp_poisson(s: complex, y: float, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Scalar factor y^s/(2s - 1) of the cusp Poisson kernel."""
    if not y > 0:
        raise ValueError(f"height must be positive, got {y}")
    s = complex(s)
    _check_half(s, options)
    return _power(y, s) / (2.0 * s - 1.0)


def cusp_poisson_vector(
    c: CuspTwist, s: complex, y: float, options: EvalOptions = DEFAULT_OPTIONS
) -> np.ndarray:
    """Poisson kernel restricted to the invariant subspace of the cusp holonomy."""
    return cusp_projection(c) * cusp_poisson(s, y, options)


def kernel_jump(
    kappa: float,
    s: complex,
    ystar: float,
    h: float = 1e-4,
    options: EvalOptions = DEFAULT_OPTIONS,
) -> complex:
    """Jump of d/dy u_kappa(y, ystar) across y = ystar from one-sided differences."""
    if not 2 * h < ystar:
        raise ValueError(f"need 2h < ystar, got ystar={ystar}, h={h}")

    def u(y: float) -> complex:
        return u_kappa(kappa, s, y, ystar, options)

    centre = u(ystar)
    above = (-3.0 * centre + 4.0 * u(ystar + h) - u(ystar + 2 * h)) / (2 * h)
    below = (3.0 * centre - 4.0 * u(ystar - h) + u(ystar - 2 * h)) / (2 * h)
    return above - below


def cusp_mode_ode_residual(
    kappa: float, s: complex, f: HeightFunction, y: float, h: float = 1e-4
) -> complex:
    """Residual of (-y^2 (d_y^2 - kappa^2) - s(1 - s)) f at the height y."""
    if not 2 * h < y:
        raise ValueError(f"need 0 < 2h < y, got y={y}, h={h}")
    s = complex(s)
    fy = f(y)
    second = (-f(y + 2 * h) + 16 * f(y + h) - 30 * fy + 16 * f(y - h) - f(y - 2 * h)) / (
        12 * h * h
    )
    return -(y**2) * (second - kappa**2 * fy) - s * (1.0 - s) * fy
