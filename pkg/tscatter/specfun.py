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

"""Complex special functions used by the model-end formulas.

Everything here is a pure function of its arguments and an immutable
`EvalOptions`. Series are summed with `CompensatedSum` in ascending index
order so that results are reproducible bit-for-bit.
"""

import cmath
import dataclasses
import math
from dataclasses import dataclass
from typing import Tuple

from absl import logging

from tscatter.errors import ConfigError, NearIntegerOrder, NonConvergence, PoleProximity


@dataclass(frozen=True)
class EvalOptions:
    """Numerical tolerances shared by every operation.

    Args:
    ----
        rel_tol (float): relative truncation target of every series.
        max_terms (int): hard cap on series terms and quadrature nodes.
        pole_exclusion (float): minimum distance to a known pole before refusing.
        integer_order_limit (bool): use the two-point limit for Bessel K near
            integer order instead of raising `NearIntegerOrder`.
        bessel_limit_eps (float): half-width of that two-point limit.
        beta_perturbation (float): mutation hook; scales the numerator
            beta_kappa(s) of the funnel scattering coefficient by (1 + value).

    """

    rel_tol: float = 1e-12
    max_terms: int = 20000
    pole_exclusion: float = 1e-6
    integer_order_limit: bool = True
    bessel_limit_eps: float = 1e-5
    beta_perturbation: float = 0.0

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ConfigError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ConfigError(f"max_terms must be a positive integer, got {self.max_terms}")
        object.__setattr__(self, "max_terms", int(self.max_terms))
        if not self.pole_exclusion > 0:
            raise ConfigError(f"pole_exclusion must be positive, got {self.pole_exclusion}")
        if not self.bessel_limit_eps > 0:
            raise ConfigError(f"bessel_limit_eps must be positive, got {self.bessel_limit_eps}")

    def replace(self, **changes: object) -> "EvalOptions":
        return dataclasses.replace(self, **changes)  # type: ignore


DEFAULT_OPTIONS = EvalOptions()


class CompensatedSum:
    """Kahan summation of complex terms."""

    def __init__(self, start: complex = 0j):
        self._sum = complex(start)
        self._carry = 0j

    def add(self, term: complex) -> complex:
        y = term - self._carry
        t = self._sum + y
        self._carry = (t - self._sum) - y
        self._sum = t
        return self._sum

    @property
    def value(self) -> complex:
        return self._sum


#############
### Gamma ###
#############

_LANCZOS_G = 7
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
_TWO_PI = 2.0 * math.pi


def _nearest_nonpositive_integer(z: complex) -> Tuple[int, float]:
    n = max(0, round(-z.real))
    return -n, abs(z + n)


def _check_gamma_pole(z: complex, options: EvalOptions) -> None:
    pole, distance = _nearest_nonpositive_integer(z)
    if distance < options.pole_exclusion:
        raise PoleProximity(z, complex(pole))


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _log_gamma_lanczos(z: complex) -> complex:
    """Principal log Gamma for Re z >= 1/2."""
    w = z - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    value = _HALF_LOG_TWO_PI + (w + 0.5) * cmath.log(t) - t + cmath.log(acc)

    # Stirling fixes the sheet; its error is far below pi on Re z >= 1/2.
    anchor = (z - 0.5) * cmath.log(z) - z + _HALF_LOG_TWO_PI
    turns = round((anchor.imag - value.imag) / _TWO_PI)
    return value + 1j * _TWO_PI * turns


def _log_gamma_reflected(z: complex) -> complex:
    """Principal log Gamma for Re z < 1/2, upper limit on the cut."""
    if z.imag < 0.0:
        return _log_gamma_reflected(z.conjugate()).conjugate()
    # log sin(pi z) on the upper half-plane, continuous in z
    q = cmath.exp(2j * math.pi * z)
    log_sin = math.log(0.5) + 0.5j * math.pi - 1j * math.pi * z + cmath.log(1.0 - q)
    return _LOG_PI - log_sin - _log_gamma_lanczos(1.0 - z)


def log_gamma(z: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Principal branch of log Gamma, continuous off (-inf, 0]."""
    z = complex(z)
    _check_gamma_pole(z, options)
    if z.real >= 0.5:
        return _log_gamma_lanczos(z)
    return _log_gamma_reflected(z)


def gamma(z: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    return cmath.exp(log_gamma(z, options))


def rgamma(z: complex) -> complex:
    """Reciprocal Gamma function, entire, exactly zero on the non-positive integers."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        return 0j
    if z.real >= 0.5:
        return cmath.exp(-_log_gamma_lanczos(z))
    _, distance = _nearest_nonpositive_integer(z)
    if distance >= 0.5:
        return cmath.exp(-_log_gamma_reflected(z))
    return cmath.sin(math.pi * z) / math.pi * cmath.exp(_log_gamma_lanczos(1.0 - z))


_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
)
_POLYGAMMA_ASYMPTOTIC_RE = 15.0


def _polygamma_asymptotic(n: int, w: complex) -> complex:
    acc = CompensatedSum()
    if n == 0:
        acc.add(cmath.log(w))
        acc.add(-0.5 / w)
        for k, b2k in enumerate(_BERNOULLI_EVEN, start=1):
            acc.add(-b2k / (2 * k * w ** (2 * k)))
        return acc.value

    acc.add(math.factorial(n - 1) / w**n)
    acc.add(math.factorial(n) / (2.0 * w ** (n + 1)))
    for k, b2k in enumerate(_BERNOULLI_EVEN, start=1):
        coeff = b2k * math.factorial(2 * k + n - 1) / math.factorial(2 * k)
        acc.add(coeff / w ** (2 * k + n))
    return (-1) ** (n + 1) * acc.value


def polygamma(n: int, z: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Polygamma function psi^(n)(z) for n = 0..3.

    The argument is shifted by the recurrence until Re z >= 15 and the
    asymptotic series is applied there.
    """
    if n not in (0, 1, 2, 3):
        raise ValueError(f"polygamma order must be in 0..3, got {n}")
    z = complex(z)
    _check_gamma_pole(z, options)

    shift = max(0, math.ceil(_POLYGAMMA_ASYMPTOTIC_RE - z.real))
    if shift > options.max_terms:
        raise NonConvergence(f"polygamma({n}, {z}) needs {shift} recurrence steps")

    acc = CompensatedSum()
    for j in range(shift):
        acc.add(1.0 / (z + j) ** (n + 1))
    sign = (-1) ** n * math.factorial(n)
    return _polygamma_asymptotic(n, z + shift) - sign * acc.value


######################
### Hypergeometric ###
######################

_TRANSFORM_THRESHOLD = 0.75
_TRANSFORM_EXCLUSION = 1e-3


def _hypergeometric_series(
    a: complex,
    b: complex,
    c: complex,
    z: complex,
    first_term: complex,
    first_index: int,
    options: EvalOptions,
) -> complex:
    """Sum sum_{n >= first_index} t_n with t_{n+1}/t_n = (a+n)(b+n)z/((c+n)(n+1))."""
    acc = CompensatedSum()
    term = first_term
    n = first_index
    while n - first_index < options.max_terms:
        acc.add(term)
        if term == 0 or (a + n) == 0 or (b + n) == 0:
            return acc.value
        ratio = (a + n) * (b + n) * z / ((c + n) * (n + 1))
        term = term * ratio
        n += 1
        if abs(term) <= options.rel_tol * abs(acc.value) and abs(ratio) < 1.0:
            acc.add(term)
            return acc.value
    raise NonConvergence(
        f"2F1({a}, {b}; {c}; {z}) did not converge in {options.max_terms} terms"
    )


def _regularized_series(
    a: complex, b: complex, c: complex, z: complex, options: EvalOptions
) -> complex:
    if not _is_nonpositive_integer(c):
        return _hypergeometric_series(a, b, c, z, rgamma(c), 0, options)

    # c = -m: the first m + 1 terms vanish; start at n = m + 1 where Gamma(c + n) = 1.
    first_index = int(-c.real) + 1
    term = complex(1.0)
    for i in range(first_index):
        term *= (a + i) * (b + i) * z / (i + 1)
    return _hypergeometric_series(a, b, c, z, term, first_index, options)


def _regularized_one_minus_z(
    a: complex, b: complex, c: complex, z: complex, options: EvalOptions
) -> complex:
    d = c - a - b
    w = 1.0 - z
    first = gamma(d, options) * rgamma(c - a) * rgamma(c - b)
    first *= _hypergeometric_series(a, b, 1.0 - d, w, 1.0, 0, options)
    second = cmath.exp(d * cmath.log(w)) * gamma(-d, options) * rgamma(a) * rgamma(b)
    second *= _hypergeometric_series(c - a, c - b, 1.0 + d, w, 1.0, 0, options)
    return first + second


def _one_minus_z_applies(a: complex, b: complex, c: complex) -> bool:
    d = c - a - b
    return abs(d - round(d.real)) >= _TRANSFORM_EXCLUSION


def regularized_2f1(
    a: complex, b: complex, c: complex, z: complex, options: EvalOptions = DEFAULT_OPTIONS
) -> complex:
    """Regularized Gauss hypergeometric function F(a, b; c; z) / Gamma(c).

    Entire in c. For |z| > 0.75 close to 1 the z -> 1 - z connection formula is
    summed instead of the defining series, unless c - a - b is within 1e-3 of
    an integer.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if abs(z) >= 1.0:
        raise ValueError(f"regularized_2f1 requires |z| < 1, got {z}")

    if abs(z) > _TRANSFORM_THRESHOLD and abs(1.0 - z) < abs(z):
        if _one_minus_z_applies(a, b, c):
            return _regularized_one_minus_z(a, b, c, z, options)
        logging.debug("2F1(%s, %s; %s; %s): c - a - b near an integer, direct series", a, b, c, z)
    return _regularized_series(a, b, c, z, options)


##############
### Bessel ###
##############

_K_QUADRATURE_X = 2.0
_K_QUADRATURE_STEP = 0.1


def bessel_i(nu: complex, x: float, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Modified Bessel function of the first kind by its ascending series."""
    nu = complex(nu)
    x = float(x)
    if not x > 0:
        raise ValueError(f"bessel_i requires x > 0, got {x}")

    log_half = math.log(0.5 * x)
    quarter_sq = 0.25 * x * x
    # negative integer order: terms with k + nu + 1 <= 0 vanish
    k = int(-nu.real) if _is_nonpositive_integer(nu) else 0
    term = cmath.exp((2 * k + nu) * log_half) * rgamma(k + nu + 1.0) / math.factorial(k)

    acc = CompensatedSum()
    for _ in range(options.max_terms):
        acc.add(term)
        ratio = quarter_sq / ((k + 1) * (k + nu + 1.0))
        term = term * ratio
        k += 1
        if abs(term) <= options.rel_tol * abs(acc.value) and abs(ratio) < 1.0:
            acc.add(term)
            return acc.value
    raise NonConvergence(f"I_{nu}({x}) did not converge in {options.max_terms} terms")


def _bessel_k_reflection(nu: complex, x: float, options: EvalOptions) -> complex:
    numerator = bessel_i(-nu, x, options) - bessel_i(nu, x, options)
    return 0.5 * math.pi * numerator / cmath.sin(math.pi * nu)


def _bessel_k_quadrature(nu: complex, x: float, options: EvalOptions) -> complex:
    """Trapezoidal rule for K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt."""
    h = _K_QUADRATURE_STEP
    acc = CompensatedSum(0.5 * math.exp(-x))
    for j in range(1, options.max_terms):
        t = j * h
        term = math.exp(-x * math.cosh(t)) * cmath.cosh(nu * t)
        acc.add(term)
        if t > 1.0 and abs(term) <= 1e-3 * options.rel_tol * abs(acc.value):
            return h * acc.value
    raise NonConvergence(f"K_{nu}({x}) quadrature did not converge")


def bessel_k(nu: complex, x: float, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Modified Bessel function of the second kind.

    For x <= 2 the reflection formula K = (pi/2)(I_{-nu} - I_nu)/sin(nu pi) is
    used, with a two-point limit across integer orders; beyond that the even
    integral representation in nu is integrated directly.
    """
    nu = complex(nu)
    x = float(x)
    if not x > 0:
        raise ValueError(f"bessel_k requires x > 0, got {x}")
    if x > _K_QUADRATURE_X:
        return _bessel_k_quadrature(nu, x, options)

    eps = options.bessel_limit_eps
    n = round(nu.real)
    if abs(nu - n) >= eps:
        return _bessel_k_reflection(nu, x, options)
    if not options.integer_order_limit:
        raise NearIntegerOrder(f"order {nu} is within {eps} of the integer {n}")

    # linear interpolation between n - eps and n + eps; at nu = n this is the average
    lower = _bessel_k_reflection(n - eps, x, options)
    upper = _bessel_k_reflection(n + eps, x, options)
    weight = (nu - n + eps) / (2.0 * eps)
    return lower + weight * (upper - lower)


##################
### Elementary ###
##################


def e2_factor(w: complex) -> complex:
    """Weierstrass elementary factor E_2(w) = (1 - w) exp(w + w^2/2)."""
    w = complex(w)
    return (1.0 - w) * cmath.exp(w + 0.5 * w * w)


def log_e2(w: complex, options: EvalOptions = DEFAULT_OPTIONS) -> complex:
    """Logarithm of E_2, the principal branch -sum_{n>=3} w^n/n on |w| < 1."""
    w = complex(w)
    if w == 1.0:
        raise PoleProximity(w, 1.0 + 0j, "log E_2 is singular at its zero w = 1")
    if abs(w) > 0.5:
        return cmath.log(1.0 - w) + w + 0.5 * w * w

    acc = CompensatedSum()
    power = w * w
    for n in range(3, options.max_terms):
        power = power * w
        term = -power / n
        acc.add(term)
        if abs(term) <= options.rel_tol * abs(acc.value) or power == 0:
            return acc.value
    raise NonConvergence(f"log E_2({w}) did not converge")


def japanese_bracket(z: complex) -> float:
    return math.hypot(1.0, abs(complex(z)))
