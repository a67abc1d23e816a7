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

"""Verification suite for the model-end identities.

Every check is registered once with `register`, receives a `CheckContext`
and returns `CheckReport`s whose thresholds all live in `THRESHOLDS`.
Random sample grids come from a generator seeded by the suite seed and the
check name, so a report is reproducible regardless of which other checks
run alongside it.
"""

import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from absl import logging

from tscatter.cusp import (
    cusp_kappa,
    cusp_mode_ode_residual,
    cusp_poisson,
    cusp_poisson_vector,
    kernel_jump,
    u_kappa,
)
from tscatter.ends import (
    FunnelTwist,
    ModeIndex,
    ResonanceMultiset,
    SurfaceEnds,
    cusp_projection,
    cusp_resonances,
    funnel_resonances,
    mode_resonances,
    rho_funnel,
)
from tscatter.errors import (
    ConfigError,
    IllConditioned,
    NonConvergence,
    PoleProximity,
    TScatterError,
)
from tscatter.funnel import (
    beta_pole_distance,
    mode_ode_residual,
    normalized_smatrix_coeff,
    poisson_coeff,
    reduced_smatrix_coeff,
    smatrix_coeff,
    symbol_leading,
    v0,
)
from tscatter.gs import (
    Contour,
    MatrixFamily,
    null_multiplicity,
    scalar_winding,
    scattering_pole_multiplicity,
    winding_trace,
)
from tscatter.loggers import BaseLogger, JsonWriter, NullLogger
from tscatter.specfun import (
    DEFAULT_OPTIONS,
    EvalOptions,
    bessel_i,
    bessel_k,
    gamma,
    log_gamma,
    polygamma,
    regularized_2f1,
    rgamma,
)
from tscatter.weierstrass import (
    TruncatedProduct,
    counting_function,
    log_deriv3,
    log_product_eval,
    mode_product,
    product_eval,
)

DEFAULT_SEED = 20240917

THRESHOLDS: Dict[str, float] = {
    "specfun.reflection": 1e-10,
    "specfun.recurrence": 1e-11,
    "specfun.polygamma": 1e-5,
    "specfun.hypergeometric_c": 1e-10,
    "specfun.wronskian": 1e-8,
    "ends.counting": 0.0,
    "ends.monotone": 0.0,
    "ends.conjugation": 0.0,
    "ends.left_half_plane": 0.0,
    "ends.mode_decomposition": 0.0,
    "funnel.functional_equation": 1e-9,
    "funnel.unitarity": 1e-10,
    "funnel.reduced_consistency": 1e-10,
    "funnel.v0_dirichlet": 0.0,
    "funnel.v0_symmetry": 1e-10,
    "funnel.v0_ode": 1e-5,
    "funnel.intertwining": 1e-8,
    "funnel.symbol_decay": 2.0,
    "funnel.normalized_inverse": 1e-9,
    "funnel.normalized_unitarity": 1e-10,
    "funnel.poisson_asymptotics": 1e-3,
    "funnel.symbol_asymptotics": 0.15,
    "funnel.symbol_ratio": 0.05,
    "cusp.kernel_jump": 1e-6,
    "cusp.mode_ode": 1e-6,
    "cusp.k_symmetry": 1e-9,
    "cusp.kernel_symmetry": 0.0,
    "cusp.poisson_limit": 1e-9,
    "cusp.resonances": 0.0,
    "weierstrass.conjugation": 1e-9,
    "weierstrass.truncation": 0.0,
    "weierstrass.growth": 1.0,
    "weierstrass.log_deriv3": 1e-4,
    "gs.exponent_sum": 0.0,
    "gs.multiplicativity": 0.0,
    "gs.gohberg_sigal": 0.0,
    "gs.node_doubling": 0.0,
    "gs.lattice_winding": 0.0,
    "gs.control_windows": 0.0,
    "gs.scattering_pole": 0.0,
    "surface.half_point": 1e-10,
    "surface.factorization_ratio": 1.0,
    "surface.factorization_residual": 1e-4,
}

SUITES = ("full", "quick", "specfun", "ends", "funnel", "cusp", "weierstrass", "gs", "surface")

FACTORIZATION_POINT = 0.2 + 0.7j
FACTORIZATION_TRUNCATIONS = (50, 100, 200, 400)


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    measured: float
    threshold: float
    details: str = ""

    def as_dict(self) -> Dict[str, Any]:
        measured: Any = self.measured if math.isfinite(self.measured) else str(self.measured)
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": measured,
            "threshold": self.threshold,
            "details": self.details,
        }


def make_report(name: str, measured: float, details: str = "") -> CheckReport:
    """Report against the tabulated threshold; NaN never passes."""
    threshold = THRESHOLDS[name]
    measured = float(measured)
    return CheckReport(name, bool(measured <= threshold), measured, threshold, details)


@dataclass(frozen=True)
class CheckContext:
    ends: SurfaceEnds
    options: EvalOptions
    rng: np.random.Generator


CheckFn = Callable[[CheckContext], List[CheckReport]]


@dataclass(frozen=True)
class RegisteredCheck:
    name: str
    fn: CheckFn
    requires: Optional[str]
    suites: Tuple[str, ...]

    def applies_to(self, ends: SurfaceEnds) -> bool:
        if self.requires == "funnel":
            return ends.n_f > 0
        if self.requires == "cusp":
            return ends.n_c > 0
        return True


_REGISTRY: Dict[str, RegisteredCheck] = {}


def register(
    name: str, requires: Optional[str] = None, quick: bool = False
) -> Callable[[CheckFn], CheckFn]:
    """Adds a check to the suite; `requires` is "funnel", "cusp" or None."""
    if requires not in (None, "funnel", "cusp"):
        raise ValueError(f"Check requirement {requires} not recognised.")

    def decorator(fn: CheckFn) -> CheckFn:
        if name in _REGISTRY:
            raise ValueError(f"Check {name} is already registered.")
        suites = ("full", name.split(".")[0]) + (("quick",) if quick else ())
        _REGISTRY[name] = RegisteredCheck(name, fn, requires, suites)
        return fn

    return decorator


def registered_checks() -> List[RegisteredCheck]:
    return list(_REGISTRY.values())


def select_checks(ends: SurfaceEnds, suite: str) -> List[RegisteredCheck]:
    if suite not in SUITES:
        raise ConfigError(f"Suite {suite} not recognised; expected one of {', '.join(SUITES)}.")
    return [c for c in _REGISTRY.values() if suite in c.suites and c.applies_to(ends)]


def _check_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def _run_check(check: RegisteredCheck, ctx: CheckContext) -> List[CheckReport]:
    try:
        return check.fn(ctx)
    except TScatterError as err:
        logging.warning("check %s raised %s: %s", check.name, type(err).__name__, err)
        threshold = THRESHOLDS.get(check.name, 0.0)
        return [CheckReport(check.name, False, math.inf, threshold, f"{type(err).__name__}: {err}")]


def run_suite(
    ends: SurfaceEnds,
    suite: str = "full",
    options: EvalOptions = DEFAULT_OPTIONS,
    seed: int = DEFAULT_SEED,
    logger: Optional[BaseLogger] = None,
    json_writer: Optional[JsonWriter] = None,
    workers: int = 1,
) -> List[CheckReport]:
    """Runs every registered check of `suite` that applies to `ends`, in registration order."""
    checks = select_checks(ends, suite)
    contexts = [CheckContext(ends, options, _check_rng(seed, c.name)) for c in checks]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_check, checks, contexts))
    else:
        results = [_run_check(c, ctx) for c, ctx in zip(checks, contexts)]

    reports = [report for batch in results for report in batch]
    sink = logger if logger is not None else NullLogger()
    for report in reports:
        sink.write({report.name: report.measured}, force=True)
        if json_writer is not None:
            json_writer.write(report.name, report.passed, report.measured, report.threshold)

    passed = sum(r.passed for r in reports)
    if json_writer is not None:
        json_writer.write_summary(passed, len(reports) - passed)
    logging.info("suite %s: %d of %d checks passed", suite, passed, len(reports))
    return reports


################
### Sampling ###
################


def _distinct_modes(ends: SurfaceEnds, ks: Iterable[int]) -> List[ModeIndex]:
    """One mode per distinct phase of every funnel and every k in `ks`."""
    ks = list(ks)
    modes = []
    for i, f in enumerate(ends.funnels):
        seen = set()
        for j, theta in enumerate(f.phases):
            if theta in seen:
                continue
            seen.add(theta)
            modes.extend(ModeIndex(f, j, k, funnel=i) for k in ks)
    return modes


def _half_integer_distance(s: complex) -> float:
    return abs(s - (math.floor(s.real) + 0.5))


def _clear_of_lattices(mode: ModeIndex, s: complex, radius: float) -> bool:
    y = mode.omega_kappa
    return (
        beta_pole_distance(y, s)[0] > radius
        and beta_pole_distance(y, 1.0 - s)[0] > radius
        and _half_integer_distance(s) > radius
    )


def _clear_of(mode: ModeIndex, radius: float = 0.05) -> Callable[[complex], bool]:
    return lambda s: _clear_of_lattices(mode, s, radius)


def _sample(
    rng: np.random.Generator,
    n: int,
    re_range: Tuple[float, float],
    im_range: Tuple[float, float],
    keep: Callable[[complex], bool],
) -> List[complex]:
    """Rejection-sample n points of the box satisfying `keep`."""
    points: List[complex] = []
    for _ in range(1000 * n):
        s = complex(rng.uniform(*re_range), rng.uniform(*im_range))
        if keep(s):
            points.append(s)
            if len(points) == n:
                return points
    raise NonConvergence(f"rejection sampling found only {len(points)} of {n} points")


def _relative(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


#####################
### Public checks ###
#####################


def half_point_check(
    ends: SurfaceEnds, options: EvalOptions = DEFAULT_OPTIONS, max_k: int = 50
) -> CheckReport:
    """S(1/2) = -id on the truncated funnel modes, so P = (S(1/2) + id)/2 vanishes.

    The rank of P is compared with the multiplicity of 1/2 as a funnel resonance.
    """
    if not ends.funnels:
        raise ConfigError("half_point_check needs at least one funnel")
    values = np.array(
        [
            smatrix_coeff(ModeIndex(f, j, k, funnel=i), 0.5, options)
            for i, f in enumerate(ends.funnels)
            for j in range(f.dim)
            for k in range(-max_k, max_k + 1)
        ]
    )
    identity = np.eye(len(values))
    projection = 0.5 * (np.diag(values) + identity)
    deviation = float(np.max(np.abs(values + 1.0)))
    idempotency = float(np.linalg.norm(projection @ projection - projection, 2))
    symmetry = float(np.linalg.norm(projection - projection.conj().T, 2))
    size = float(np.linalg.norm(projection, 2))

    rank = int(np.linalg.matrix_rank(projection, tol=1e-8))
    multiplicity = sum(funnel_resonances(f, 100.0).multiplicity(0.5) for f in ends.funnels)
    measured = max(deviation, idempotency, symmetry, size)
    if rank != multiplicity:
        measured = math.inf
    details = (
        f"{len(values)} modes; max|S(1/2)+1|={deviation:.3g}; "
        f"rank P={rank}; m(1/2)={multiplicity}"
    )
    return make_report("surface.half_point", measured, details)


def poisson_asymptotics_check(
    mode: ModeIndex,
    s: complex,
    r1: float = 4.0,
    r2: float = 5.0,
    options: EvalOptions = DEFAULT_OPTIONS,
) -> CheckReport:
    """Recovers the boundary coefficients (a0, b0) of (2s - 1) E(s; r) from two radii.

    They must approach (1, S(s)).
    """
    if not 3.0 <= r1 < r2:
        raise ConfigError(f"need 3 <= r1 < r2, got r1={r1}, r2={r2}")
    s = complex(s)
    rhos = [rho_funnel(r1), rho_funnel(r2)]
    matrix = np.array([[rho ** (1.0 - s), rho**s] for rho in rhos], dtype=complex)
    condition = float(np.linalg.cond(matrix))
    if not condition <= 1e8:
        raise IllConditioned(f"boundary system at s={s} has condition number {condition:.3g}")

    rhs = np.array([(2.0 * s - 1.0) * poisson_coeff(mode, s, r, options) for r in (r1, r2)])
    a0, b0 = np.linalg.solve(matrix, rhs)
    smatrix = smatrix_coeff(mode, s, options)
    error_a = abs(a0 - 1.0)
    error_b = abs(b0 - smatrix)
    details = f"{mode.label()} s={s}: |a0-1|={error_a:.3g}, |b0-S|={error_b:.3g}"
    return make_report("funnel.poisson_asymptotics", max(error_a, error_b), details)


def _symbol_errors(
    f: FunnelTwist, j: int, s: complex, ks: Iterable[int], options: EvalOptions
) -> np.ndarray:
    errors = []
    for k in ks:
        mode = ModeIndex(f, j, k)
        errors.append(abs(smatrix_coeff(mode, s, options) / symbol_leading(mode, s, options) - 1.0))
    return np.array(errors)


def _symbol_ks(kmin: int, kmax: int) -> np.ndarray:
    return np.unique(np.round(np.geomspace(kmin, kmax, 12)).astype(int))


def symbol_asymptotics_check(
    f: FunnelTwist,
    j: int,
    s: complex,
    kmin: int = 64,
    kmax: int = 512,
    options: EvalOptions = DEFAULT_OPTIONS,
) -> CheckReport:
    """Log-log slope of |S/sigma - 1| against k, which should be -2."""
    if kmin < 16 or kmax <= kmin:
        raise ConfigError(f"need 16 <= kmin < kmax, got {kmin}, {kmax}")
    ks = _symbol_ks(kmin, kmax)
    errors = _symbol_errors(f, j, complex(s), ks, options)
    if np.any(errors == 0):
        return make_report("funnel.symbol_asymptotics", math.inf, "symbol is exact at some k")
    slope = float(np.polyfit(np.log(ks), np.log(errors), 1)[0])
    details = f"j={j} s={s} slope={slope:.4f}"
    return make_report("funnel.symbol_asymptotics", abs(slope + 2.0), details)


def factorization_residual(
    mode: ModeIndex, s: complex, M: int, options: EvalOptions = DEFAULT_OPTIONS
) -> complex:
    """Third log-derivative of beta(s)/beta(1-s) plus the truncated products at s and 1 - s.

    The products run over the poles of beta_kappa with index m <= M; the
    residual decays like M^-2.
    """
    s = complex(s)
    y = mode.omega_kappa
    for point in (s, 1.0 - s):
        distance, pole = beta_pole_distance(y, point)
        if distance <= 0.1:
            raise PoleProximity(point, pole, f"{point} is within 0.1 of the mode lattice")

    def d3_log_beta(w: complex) -> complex:
        return (
            polygamma(2, (w + 1.0 + 1j * y) / 2.0, options)
            + polygamma(2, (w + 1.0 - 1j * y) / 2.0, options)
        ) / 8.0

    product = mode_product(mode, M)
    return (
        d3_log_beta(s)
        + d3_log_beta(1.0 - s)
        + log_deriv3(product, s, options)
        + log_deriv3(product, 1.0 - s, options)
    )


#########################
### Special functions ###
#########################


def _away_from_integers(s: complex) -> bool:
    return abs(s - round(s.real)) > 0.1


@register("specfun.reflection", requires="funnel", quick=True)
def _check_reflection(ctx: CheckContext) -> List[CheckReport]:
    grid = _sample(ctx.rng, 200, (-4.5, 4.5), (-2.0, 2.0), _away_from_integers)
    errors = [
        abs(gamma(z, ctx.options) * gamma(1.0 - z, ctx.options) * np.sin(np.pi * z) / np.pi - 1.0)
        for z in grid
    ]
    return [make_report("specfun.reflection", max(errors), f"{len(grid)} points")]


@register("specfun.recurrence", requires="funnel")
def _check_recurrence(ctx: CheckContext) -> List[CheckReport]:
    grid = _sample(ctx.rng, 200, (-4.5, 4.5), (-2.0, 2.0), _away_from_integers)
    errors = [
        _relative(z * gamma(z, ctx.options), gamma(z + 1.0, ctx.options)) for z in grid
    ]
    return [make_report("specfun.recurrence", max(errors), f"{len(grid)} points")]


def _five_point_derivative(f: Callable[[complex], complex], z: complex, h: float) -> complex:
    return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h)


def _lower_order(n: int, options: EvalOptions) -> Callable[[complex], complex]:
    if n == 0:
        return lambda w: log_gamma(w, options)
    return lambda w: polygamma(n - 1, w, options)


@register("specfun.polygamma", requires="funnel")
def _check_polygamma(ctx: CheckContext) -> List[CheckReport]:
    grid = _sample(ctx.rng, 50, (0.5, 6.0), (-3.0, 3.0), lambda z: True)
    options = ctx.options
    worst = 0.0
    for z in grid:
        for n in range(4):
            lower = _lower_order(n, options)
            value = polygamma(n, z, options)
            estimate = _five_point_derivative(lower, z, 1e-3)
            worst = max(worst, abs(value - estimate) / max(1.0, abs(value)))
    return [make_report("specfun.polygamma", worst, f"{len(grid)} points, orders 0..3")]


@register("specfun.hypergeometric_c", requires="funnel")
def _check_hypergeometric_entire_in_c(ctx: CheckContext) -> List[CheckReport]:
    samples = [
        (0.5 + 0.3j, 0.5 - 0.3j, 0.25),
        (1.2, -0.7 + 0.4j, 0.6),
        (0.3 + 1.0j, 2.0, -0.4 + 0.2j),
    ]
    worst = 0.0
    for a, b, z in samples:
        for m in range(3):
            pochhammer = 1.0 + 0j
            for i in range(m + 1):
                pochhammer *= (a + i) * (b + i)
            expected = pochhammer * z ** (m + 1) * regularized_2f1(
                a + m + 1, b + m + 1, m + 2, z, ctx.options
            )
            worst = max(worst, _relative(regularized_2f1(a, b, -m, z, ctx.options), expected))
    return [make_report("specfun.hypergeometric_c", worst, "c = 0, -1, -2")]


@register("specfun.wronskian", requires="cusp")
def _check_wronskian(ctx: CheckContext) -> List[CheckReport]:
    orders = (0.3, 1.7, 0.5 + 2.0j, -0.4 + 0.6j)
    h = 1e-5
    options = ctx.options
    worst = 0.0
    for nu in orders:
        for x in (0.5, 1.3, 3.0, 8.0, 12.0):
            i_value = bessel_i(nu, x, options)
            k_value = bessel_k(nu, x, options)
            i_prime = (bessel_i(nu, x + h, options) - bessel_i(nu, x - h, options)) / (2 * h)
            k_prime = (bessel_k(nu, x + h, options) - bessel_k(nu, x - h, options)) / (2 * h)
            worst = max(worst, abs(i_value * k_prime - i_prime * k_value + 1.0 / x))
    return [make_report("specfun.wronskian", worst, f"orders {orders}")]


############
### Ends ###
############


def brute_force_count(f: FunnelTwist, radius: float) -> int:
    """Counts lattice points in |s| <= radius by looping over (theta, p, m, k) directly."""
    omega = f.omega
    count = 0
    k_max = int(radius / omega) + 2
    for theta in f.phases:
        for p in (1, -1):
            for m in range(int(radius) + 1):
                for k in range(-k_max, k_max + 1):
                    point = complex(-(1 + 2 * m), p * omega * float(theta + k))
                    if abs(point) <= radius:
                        count += 1
    return count


@register("ends.counting", requires="funnel", quick=True)
def _check_counting(ctx: CheckContext) -> List[CheckReport]:
    mismatches = 0
    for f in ctx.ends.funnels:
        for radius in (1.5, 10.0, 37.3, 100.0):
            mismatches += counting_function(f, radius) != brute_force_count(f, radius)
    return [make_report("ends.counting", mismatches, "radii 1.5, 10, 37.3, 100")]


def _contained(small: ResonanceMultiset, large: ResonanceMultiset) -> bool:
    return small.m0 <= large.m0 and all(large.multiplicity(p) >= m for p, m in small)


@register("ends.monotone", requires="funnel")
def _check_monotone(ctx: CheckContext) -> List[CheckReport]:
    radii = (1.0, 2.5, 6.0, 15.0, 40.0)
    violations = 0
    for f in ctx.ends.funnels:
        sets = [funnel_resonances(f, r) for r in radii]
        violations += sum(not _contained(a, b) for a, b in zip(sets, sets[1:]))
    return [make_report("ends.monotone", violations, f"radii {radii}")]


@register("ends.conjugation", requires="funnel")
def _check_conjugation(ctx: CheckContext) -> List[CheckReport]:
    violations = 0
    for f in ctx.ends.funnels:
        multiset = funnel_resonances(f, 40.0)
        violations += multiset != multiset.conjugate()
    return [make_report("ends.conjugation", violations, "radius 40")]


@register("ends.left_half_plane", requires="funnel")
def _check_left_half_plane(ctx: CheckContext) -> List[CheckReport]:
    violations = 0
    for f in ctx.ends.funnels:
        multiset = funnel_resonances(f, 100.0)
        violations += sum(p.real > -1.0 for p, _ in multiset)
        violations += multiset.multiplicity(0.5) + multiset.m0
    return [make_report("ends.left_half_plane", violations, "radius 100")]


@register("ends.mode_decomposition", requires="funnel")
def _check_mode_decomposition(ctx: CheckContext) -> List[CheckReport]:
    radius = 20.0
    violations = 0
    for f in ctx.ends.funnels:
        k_max = int(radius / f.omega) + 2
        union = ResonanceMultiset()
        for j in range(f.dim):
            for k in range(-k_max, k_max + 1):
                union = union.union(mode_resonances(ModeIndex(f, j, k), int(radius)).within(radius))
        violations += union != funnel_resonances(f, radius)
    return [make_report("ends.mode_decomposition", violations, f"radius {radius}")]


##############
### Funnel ###
##############


@register("funnel.functional_equation", requires="funnel", quick=True)
def _check_functional_equation(ctx: CheckContext) -> List[CheckReport]:
    worst = 0.0
    modes = _distinct_modes(ctx.ends, range(-5, 6))
    for mode in modes:
        grid = _sample(ctx.rng, 200, (-3.0, 4.0), (-5.0, 5.0), _clear_of(mode))
        for s in grid:
            forward = smatrix_coeff(mode, s, ctx.options)
            product = forward * smatrix_coeff(mode, 1.0 - s, ctx.options)
            worst = max(worst, abs(product - 1.0))
    return [make_report("funnel.functional_equation", worst, f"{len(modes)} modes x 200 points")]


_CRITICAL_T = [0.1 * n for n in range(-50, 51)]


@register("funnel.unitarity", requires="funnel", quick=True)
def _check_unitarity(ctx: CheckContext) -> List[CheckReport]:
    worst = 0.0
    for mode in _distinct_modes(ctx.ends, range(-5, 6)):
        for t in _CRITICAL_T:
            worst = max(worst, abs(abs(smatrix_coeff(mode, 0.5 + 1j * t, ctx.options)) - 1.0))
    return [make_report("funnel.unitarity", worst, "Re s = 1/2, |t| <= 5")]


@register("funnel.reduced_consistency", requires="funnel")
def _check_reduced_consistency(ctx: CheckContext) -> List[CheckReport]:
    worst = 0.0
    for mode in _distinct_modes(ctx.ends, range(-3, 4)):
        grid = _sample(ctx.rng, 40, (-3.0, 4.0), (-5.0, 5.0), _clear_of(mode))
        for s in grid:
            prefactor = gamma(s + 0.5, ctx.options) * rgamma(0.5 - s)
            bracket = np.exp((1.0 - 2.0 * s) * np.log(mode.bracket))
            expected = prefactor * bracket * smatrix_coeff(mode, s, ctx.options)
            worst = max(worst, _relative(reduced_smatrix_coeff(mode, s, ctx.options), expected))
    return [make_report("funnel.reduced_consistency", worst, "40 points per mode")]


_V0_POINTS = (0.4 + 0.2j, 0.3 + 0.5j, -0.2 + 0.8j)
_V0_RADII = (0.5, 1.0, 2.0)


@register("funnel.v0", requires="funnel")
def _check_v0(ctx: CheckContext) -> List[CheckReport]:
    # finite differences amplify series truncation by 1/h^2
    options = ctx.options.replace(rel_tol=min(ctx.options.rel_tol, 1e-15))
    dirichlet = 0.0
    symmetry = 0.0
    residual = 0.0
    for mode in _distinct_modes(ctx.ends, (0, 1)):
        y = mode.omega_kappa
        for s in _V0_POINTS:
            dirichlet = max(dirichlet, abs(v0(y, s, 0.0, options)))
            for r in _V0_RADII:
                symmetry = max(symmetry, abs(v0(y, s, r, options) - v0(y, 1.0 - s, r, options)))
                f = lambda x, y=y, s=s: v0(y, s, x, options)
                residual = max(residual, abs(mode_ode_residual(mode, s, f, r, 1e-3)))
    return [
        make_report("funnel.v0_dirichlet", dirichlet, "r = 0"),
        make_report("funnel.v0_symmetry", symmetry, "s <-> 1 - s"),
        make_report("funnel.v0_ode", residual, "h = 1e-3"),
    ]


@register("funnel.intertwining", requires="funnel")
def _check_intertwining(ctx: CheckContext) -> List[CheckReport]:
    worst = 0.0
    points = (0.3 + 0.5j, 0.2 - 0.7j, 0.8 + 0.3j, -0.4 + 1.1j)
    for mode in _distinct_modes(ctx.ends, (-1, 0, 1)):
        for s in points:
            if not _clear_of_lattices(mode, s, 0.05):
                continue
            smatrix = smatrix_coeff(mode, s, ctx.options)
            for r in _V0_RADII:
                lhs = poisson_coeff(mode, 1.0 - s, r, ctx.options) * smatrix
                worst = max(worst, abs(lhs + poisson_coeff(mode, s, r, ctx.options)))
    return [make_report("funnel.intertwining", worst, "E(1-s) S(s) = -E(s)")]


@register("funnel.symbol_decay", requires="funnel")
def _check_symbol_decay(ctx: CheckContext) -> List[CheckReport]:
    s = -0.3 + 0.4j
    ks = _symbol_ks(16, 512)
    worst = 1.0
    for mode in _distinct_modes(ctx.ends, (0,)):
        scaled = [
            abs(smatrix_coeff(ModeIndex(mode.twist, mode.j, k), s, ctx.options))
            * k ** (1.0 - 2.0 * s.real)
            for k in ks
        ]
        worst = max(worst, max(scaled) / min(scaled))
    return [make_report("funnel.symbol_decay", worst, f"s={s}, k in [16, 512]")]


@register("funnel.normalized", requires="funnel")
def _check_normalized(ctx: CheckContext) -> List[CheckReport]:
    inverse = 0.0
    unitarity = 0.0
    for mode in _distinct_modes(ctx.ends, range(-3, 4)):
        grid = _sample(ctx.rng, 40, (-3.0, 4.0), (-5.0, 5.0), _clear_of(mode))
        for s in grid:
            product = normalized_smatrix_coeff(mode, s, ctx.options) * normalized_smatrix_coeff(
                mode, 1.0 - s, ctx.options
            )
            inverse = max(inverse, abs(product - 1.0))
        for t in _CRITICAL_T:
            value = normalized_smatrix_coeff(mode, 0.5 + 1j * t, ctx.options)
            unitarity = max(unitarity, abs(abs(value) - 1.0))
    return [
        make_report("funnel.normalized_inverse", inverse, "S~(s) S~(1-s) = 1"),
        make_report("funnel.normalized_unitarity", unitarity, "Re s = 1/2"),
    ]


@register("funnel.poisson_asymptotics", requires="funnel")
def _check_poisson_asymptotics(ctx: CheckContext) -> List[CheckReport]:
    reports = [
        poisson_asymptotics_check(mode, 0.3, 4.0, 5.0, ctx.options)
        for mode in _distinct_modes(ctx.ends, (0,))
    ]
    worst = max(reports, key=lambda r: r.measured)
    return [make_report("funnel.poisson_asymptotics", worst.measured, worst.details)]


@register("funnel.symbol", requires="funnel")
def _check_symbol(ctx: CheckContext) -> List[CheckReport]:
    s = 0.25 + 0.5j
    slope = 0.0
    ratio = 0.0
    for mode in _distinct_modes(ctx.ends, (0,)):
        report = symbol_asymptotics_check(mode.twist, mode.j, s, 64, 512, ctx.options)
        slope = max(slope, report.measured)
        ratio = max(ratio, float(_symbol_errors(mode.twist, mode.j, s, [512], ctx.options)[0]))
    return [
        make_report("funnel.symbol_asymptotics", slope, "|slope + 2| over k in [64, 512]"),
        make_report("funnel.symbol_ratio", ratio, "|S/sigma - 1| at k = 512"),
    ]


############
### Cusp ###
############


def _cusp_kappas(ends: SurfaceEnds) -> List[float]:
    kappas = [2.0 * math.pi, 4.0 * math.pi * 0.3]
    for c in ends.cusps:
        for j in range(len(c.phases)):
            for k in (0, 1):
                kappa = cusp_kappa(c, j, k)
                if kappa != 0 and kappa not in kappas:
                    kappas.append(kappa)
    return kappas


@register("cusp.kernel_jump", requires="cusp", quick=True)
def _check_kernel_jump(ctx: CheckContext) -> List[CheckReport]:
    worst = 0.0
    for ystar in (0.5, 1.0, 2.0):
        worst = max(worst, abs(kernel_jump(0.0, 2.0, ystar, 2e-5, ctx.options) + 1.0))
        for kappa in _cusp_kappas(ctx.ends):
            worst = max(worst, abs(kernel_jump(kappa, 0.7, ystar, 2e-5, ctx.options) + 1.0))
    return [make_report("cusp.kernel_jump", worst, "y* in 0.5, 1, 2")]


@register("cusp.mode_ode", requires="cusp")
def _check_cusp_mode_ode(ctx: CheckContext) -> List[CheckReport]:
    s = 0.7 + 0.3j
    options = ctx.options.replace(rel_tol=min(ctx.options.rel_tol, 1e-15))
    worst = 0.0
    for kappa in (0.0, 2.0 * math.pi, 4.0 * math.pi * 0.3):
        for y, yprime in ((0.5, 1.5), (1.0, 2.0), (0.8, 3.0)):
            f = lambda x, kappa=kappa, yprime=yprime: u_kappa(kappa, s, x, yprime, options)
            worst = max(worst, abs(cusp_mode_ode_residual(kappa, s, f, y, 1e-3)))
    for y in (0.5, 1.0, 2.0):
        worst = max(worst, abs(cusp_mode_ode_residual(0.0, s, lambda x: x**s, y, 1e-3)))
        worst = max(worst, abs(cusp_mode_ode_residual(0.0, s, lambda x: x ** (1.0 - s), y, 1e-3)))
    return [make_report("cusp.mode_ode", worst, f"s={s}")]


@register("cusp.k_symmetry", requires="cusp")
def _check_k_symmetry(ctx: CheckContext) -> List[CheckReport]:
    worst = 0.0
    for nu in (0.2, 0.3 + 0.4j, 1.5, 2.7 - 0.5j):
        for x in (0.5, 1.5, 3.0, 9.0):
            worst = max(worst, abs(bessel_k(nu, x, ctx.options) - bessel_k(-nu, x, ctx.options)))
    return [make_report("cusp.k_symmetry", worst, "K_nu = K_-nu")]


@register("cusp.kernel_symmetry", requires="cusp")
def _check_kernel_symmetry(ctx: CheckContext) -> List[CheckReport]:
    mismatches = 0
    for kappa in [0.0] + _cusp_kappas(ctx.ends):
        for s in (0.7 + 0.4j, 2.0, -0.3 + 1.2j):
            for y, yprime in ((0.5, 1.2), (1.0, 3.0), (2.5, 0.7)):
                forward = u_kappa(kappa, s, y, yprime, ctx.options)
                mismatches += forward != u_kappa(kappa, s, yprime, y, ctx.options)
    return [make_report("cusp.kernel_symmetry", mismatches, "exact equality")]


@register("cusp.poisson_limit", requires="cusp")
def _check_poisson_limit(ctx: CheckContext) -> List[CheckReport]:
    yprime = 1e6
    worst = 0.0
    for s in (2.0, 0.7 + 0.3j, -0.4):
        for y in (0.5, 1.0, 3.0):
            limit = (1.0 / yprime) ** (1.0 - s) * u_kappa(0.0, s, y, yprime, ctx.options)
            worst = max(worst, _relative(limit, cusp_poisson(s, y, ctx.options)))
    return [make_report("cusp.poisson_limit", worst, f"y' = {yprime:g}")]


@register("cusp.resonances", requires="cusp")
def _check_cusp_resonances(ctx: CheckContext) -> List[CheckReport]:
    mismatches = 0
    for c in ctx.ends.cusps:
        multiplicity = cusp_resonances(c).multiplicity(0.5)
        rank = int(np.count_nonzero(cusp_poisson_vector(c, 2.0, 1.0, ctx.options)))
        mismatches += multiplicity != c.n_c
        mismatches += int(np.sum(cusp_projection(c))) != c.n_c
        mismatches += rank != c.n_c
    return [make_report("cusp.resonances", mismatches, "m(1/2) = dim E_1")]


###################
### Weierstrass ###
###################


@register("weierstrass.conjugation", requires="funnel")
def _check_product_conjugation(ctx: CheckContext) -> List[CheckReport]:
    worst = 0.0
    for f in ctx.ends.funnels:
        product = TruncatedProduct.for_funnel(f, 10.0)
        for s in (0.3 + 0.4j, -2.0 + 1.3j, 1.7 - 2.2j):
            value = product_eval(product, s, ctx.options)
            mirrored = product_eval(product, s.conjugate(), ctx.options)
            worst = max(worst, _relative(mirrored, value.conjugate()))
    return [make_report("weierstrass.conjugation", worst, "radius 10")]


@register("weierstrass.truncation", requires="funnel")
def _check_truncation(ctx: CheckContext) -> List[CheckReport]:
    s = 0.3 + 0.4j
    radii = (25.0, 50.0, 100.0, 200.0)
    violations = 0
    details = []
    for f in ctx.ends.funnels:
        logs = [log_product_eval(TruncatedProduct.for_funnel(f, r), s, ctx.options) for r in radii]
        steps = [abs(b - a) for a, b in zip(logs, logs[1:])]
        violations += sum(later >= earlier for earlier, later in zip(steps, steps[1:]))
        details.append(", ".join(f"{d:.3g}" for d in steps))
    return [make_report("weierstrass.truncation", violations, "; ".join(details))]


@register("weierstrass.growth", requires="funnel")
def _check_growth(ctx: CheckContext) -> List[CheckReport]:
    scale = sum(math.pi * f.dim / f.omega for f in ctx.ends.funnels)
    worst = 0.0
    for r in (10.0, 20.0, 40.0, 60.0, 80.0, 100.0):
        total = sum(counting_function(f, r) for f in ctx.ends.funnels)
        worst = max(worst, total / r**2 / scale)
    return [make_report("weierstrass.growth", worst, "N(r) / (pi dim r^2 / omega)")]


@register("weierstrass.log_deriv3", requires="funnel")
def _check_log_deriv3(ctx: CheckContext) -> List[CheckReport]:
    h = 1e-3
    worst = 0.0
    for f in ctx.ends.funnels:
        product = TruncatedProduct.for_funnel(f, 10.0)
        for s in (0.3 + 0.2j, -0.2 - 0.4j):

            def log_p(w: complex, product: TruncatedProduct = product) -> complex:
                return log_product_eval(product, w, ctx.options)

            estimate = (
                log_p(s + 2 * h) - 2 * log_p(s + h) + 2 * log_p(s - h) - log_p(s - 2 * h)
            ) / (2 * h**3)
            worst = max(worst, _relative(estimate, log_deriv3(product, s, ctx.options)))
    return [make_report("weierstrass.log_deriv3", worst, f"h = {h}")]


##########
### GS ###
##########


def _random_holomorphic_unit(rng: np.random.Generator, center: complex, dim: int) -> MatrixFamily:
    """I + A + (lambda - center) B with |A|, |B| <= 0.3, invertible on |lambda - center| <= 1."""
    def draw() -> np.ndarray:
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return 0.3 * m / np.linalg.norm(m, 2)

    a, b = draw(), draw()
    identity = np.eye(dim)
    return MatrixFamily(dim, lambda lam: identity + a + (lam - center) * b)


@register("gs.constructed", quick=True)
def _check_constructed_families(ctx: CheckContext) -> List[CheckReport]:
    center = 0.3 - 0.2j
    contour = Contour(center, 0.5)
    exponent_sum = 0
    multiplicativity = 0
    gohberg_sigal = 0
    node_doubling = 0
    families = []
    for _ in range(5):
        exponents = [int(e) for e in ctx.rng.integers(-3, 4, size=3)]
        family = (
            _random_holomorphic_unit(ctx.rng, center, 3)
            @ MatrixFamily.diagonal(center, exponents)
            @ _random_holomorphic_unit(ctx.rng, center, 3)
        )
        winding = winding_trace(family, contour)
        exponent_sum += winding != sum(exponents)
        nulls = null_multiplicity(exponents) - null_multiplicity([-e for e in exponents])
        gohberg_sigal += winding != nulls
        gohberg_sigal += winding_trace(family.inverse(), contour) != -winding
        node_doubling += winding_trace(family, contour.refined()) != winding
        families.append((family, winding))

    for (first, w1), (second, w2) in zip(families, families[1:]):
        multiplicativity += winding_trace(first @ second, contour) != w1 + w2

    return [
        make_report("gs.exponent_sum", exponent_sum, "5 random 3x3 families"),
        make_report("gs.multiplicativity", multiplicativity, "consecutive products"),
        make_report("gs.gohberg_sigal", gohberg_sigal, "N(B) - N(B^-1) = M(B)"),
        make_report("gs.node_doubling", node_doubling, "256 -> 512 nodes"),
    ]


def _reduced(mode: ModeIndex, options: EvalOptions) -> Callable[[complex], complex]:
    return lambda s: reduced_smatrix_coeff(mode, s, options)


def _mode_singularities(mode: ModeIndex, reach: float) -> List[complex]:
    poles = [p for p, _ in mode_resonances(mode, int(reach / 2) + 2)]
    return poles + [1.0 - p for p in poles] + [0.5 + 0j]


def _isolation_radius(point: complex, singular: Sequence[complex]) -> float:
    others = [abs(q - point) for q in singular if abs(q - point) > 1e-12]
    return min(0.2, 0.4 * min(others, default=1.0))


@register("gs.lattice_winding", requires="funnel")
def _check_lattice_winding(ctx: CheckContext) -> List[CheckReport]:
    mismatches = 0
    total = 0
    for mode in _distinct_modes(ctx.ends, range(-2, 3)):
        singular = _mode_singularities(mode, 8.0)
        for point, mult in mode_resonances(mode, 3).within(6.0):
            contour = Contour(point, _isolation_radius(point, singular))
            winding = scalar_winding(_reduced(mode, ctx.options), contour)
            mismatches += winding != -mult
            total += 1
    return [make_report("gs.lattice_winding", mismatches, f"{total} lattice points with |s| < 6")]


@register("gs.control_windows", requires="funnel")
def _check_control_windows(ctx: CheckContext) -> List[CheckReport]:
    modes = _distinct_modes(ctx.ends, range(-2, 3))
    singular = [q for mode in modes for q in _mode_singularities(mode, 8.0)]
    centers = _sample(
        ctx.rng, 20, (-6.0, 1.0), (-3.0, 3.0), lambda s: min(abs(q - s) for q in singular) > 0.3
    )
    mismatches = 0
    for center in centers:
        contour = Contour(center, 0.2)
        for mode in modes:
            winding = scalar_winding(_reduced(mode, ctx.options), contour)
            mismatches += winding != 0
    details = f"{len(centers)} windows x {len(modes)} modes"
    return [make_report("gs.control_windows", mismatches, details)]


@register("gs.scattering_pole", requires="funnel")
def _check_scattering_pole(ctx: CheckContext) -> List[CheckReport]:
    mismatches = 0
    for mode in _distinct_modes(ctx.ends, range(-1, 2)):
        singular = _mode_singularities(mode, 6.0)
        mismatches += scattering_pole_multiplicity(mode, 0.5, Contour(0.5, 0.2), ctx.options) != 0
        for point, mult in mode_resonances(mode, 1).within(4.0):
            contour = Contour(point, _isolation_radius(point, singular))
            mismatches += scattering_pole_multiplicity(mode, point, contour, ctx.options) != mult
    details = "nu(1/2) = 0 and nu = m at lattice points"
    return [make_report("gs.scattering_pole", mismatches, details)]


##########################
### Surface identities ###
##########################


@register("surface.half_point", requires="funnel", quick=True)
def _check_half_point(ctx: CheckContext) -> List[CheckReport]:
    return [half_point_check(ctx.ends, ctx.options)]


@register("surface.factorization", requires="funnel")
def _check_factorization(ctx: CheckContext) -> List[CheckReport]:
    worst_ratio = 0.0
    worst_residual = 0.0
    details = []
    for mode in _distinct_modes(ctx.ends, (0,)):
        residuals = [
            abs(factorization_residual(mode, FACTORIZATION_POINT, M, ctx.options))
            for M in FACTORIZATION_TRUNCATIONS
        ]
        ratios = [a / b for a, b in zip(residuals, residuals[1:])]
        worst_ratio = max(worst_ratio, max(abs(r - 4.0) for r in ratios))
        worst_residual = max(worst_residual, residuals[-1])
        details.append(f"{mode.label()}: ratios " + ", ".join(f"{r:.3f}" for r in ratios))
    return [
        make_report("surface.factorization_ratio", worst_ratio, "; ".join(details)),
        make_report(
            "surface.factorization_residual",
            worst_residual,
            f"M = {FACTORIZATION_TRUNCATIONS[-1]}",
        ),
    ]
