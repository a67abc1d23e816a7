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

"""Argument-principle calculus for finite meromorphic matrix families.

Contour integrals are evaluated with the trapezoidal rule on equispaced
nodes of a circle. Derivatives along the contour come from the periodic
spectral differentiation matrix applied to the node samples, so each
family is evaluated exactly once per node.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import chex
import numpy as np
from absl import logging

from tscatter.ends import ModeIndex, mode_resonances
from tscatter.errors import ConfigError, NotInteger, PhaseJump, SingularOnContour
from tscatter.funnel import normalized_smatrix_coeff
from tscatter.specfun import DEFAULT_OPTIONS, EvalOptions

INTEGER_TOL = 0.01
CONTOUR_GUARD = 1e-3
MAX_CONDITION = 1e12

ScalarFunction = Callable[[complex], complex]


@dataclass(frozen=True)
class Contour:
    """The circle center + radius e^(2 pi i t), t in [0, 1), sampled at `nodes` points."""

    center: complex
    radius: float
    nodes: int = 256

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ConfigError(f"contour radius must be positive, got {self.radius}")
        if self.nodes < 16 or self.nodes % 2:
            raise ConfigError(
                f"contour needs an even number of at least 16 nodes, got {self.nodes}"
            )
        object.__setattr__(self, "center", complex(self.center))

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.nodes) / self.nodes

    def points(self) -> np.ndarray:
        return self.center + self.radius * np.exp(1j * self.angles())

    def encloses(self, point: complex) -> bool:
        return abs(complex(point) - self.center) < self.radius

    def clearance(self, points: Iterable[complex]) -> float:
        """Smallest distance from the circle to any of `points`."""
        distances = (abs(abs(complex(p) - self.center) - self.radius) for p in points)
        return min(distances, default=math.inf)

    def refined(self) -> "Contour":
        return Contour(self.center, self.radius, 2 * self.nodes)


class MatrixFamily:
    """A square matrix-valued function of one complex variable.

    Args:
    ----
        dimension (int): size of the square matrices.
        evaluate (Callable): maps lambda to a dimension x dimension array.

    """

    def __init__(self, dimension: int, evaluate: Callable[[complex], chex.Array]):
        if dimension < 1:
            raise ConfigError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self._evaluate = evaluate

    def __call__(self, lam: complex) -> np.ndarray:
        value = np.asarray(self._evaluate(complex(lam)), dtype=complex)
        value = value.reshape(self.dimension, self.dimension)
        if not np.all(np.isfinite(value)):
            raise SingularOnContour(f"family is not finite at {lam}")
        return value

    @classmethod
    def scalar(cls, f: ScalarFunction) -> "MatrixFamily":
        return cls(1, lambda lam: np.array([[f(lam)]], dtype=complex))

    @classmethod
    def diagonal(cls, center: complex, exponents: Sequence[int]) -> "MatrixFamily":
        """diag((lambda - center)^e_j)."""
        powers = np.asarray(exponents)
        return cls(len(powers), lambda lam: np.diag((lam - center) ** powers.astype(complex)))

    def __matmul__(self, other: "MatrixFamily") -> "MatrixFamily":
        if other.dimension != self.dimension:
            raise ConfigError("cannot multiply families of different dimensions")
        return MatrixFamily(self.dimension, lambda lam: self(lam) @ other(lam))

    def inverse(self) -> "MatrixFamily":
        return MatrixFamily(self.dimension, lambda lam: np.linalg.inv(self(lam)))


@lru_cache(maxsize=16)
def spectral_differentiation_matrix(n: int) -> np.ndarray:
    """Derivative in the angle of periodic samples on n equispaced nodes (n even)."""
    h = 2.0 * np.pi / n
    m = np.arange(1, n)
    column = np.zeros(n)
    column[1:] = 0.5 * (-1.0) ** m / np.tan(m * h / 2.0)
    index = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return column[index]


def _nearest_integer(value: complex, what: str) -> int:
    nearest = round(value.real)
    if abs(value - nearest) > INTEGER_TOL:
        raise NotInteger(f"{what} = {value} is not within {INTEGER_TOL} of an integer")
    return int(nearest)


def winding_trace(B: MatrixFamily, c: Contour) -> int:
    """(1/2 pi i) Tr of the contour integral of B^-1 B'."""
    samples = np.stack([B(lam) for lam in c.points()])
    derivative = np.einsum("jk,kab->jab", spectral_differentiation_matrix(c.nodes), samples)

    total = 0j
    for lam, b, db in zip(c.points(), samples, derivative):
        try:
            if np.linalg.cond(b) > MAX_CONDITION:
                raise np.linalg.LinAlgError("ill-conditioned")
            total += np.trace(np.linalg.solve(b, db))
        except np.linalg.LinAlgError as err:
            raise SingularOnContour(f"family is not invertible at {lam}") from err

    # d lambda = i (lambda - center) d theta; the trapezoid weight is 2 pi / nodes
    value = total / (1j * c.nodes)
    logging.debug("winding_trace around %s: %s", c.center, value)
    return _nearest_integer(value, "winding trace")


def null_multiplicity(exponents: Sequence[int]) -> int:
    """Null multiplicity of a family with local diagonal exponents: the sum of the positive ones."""
    return int(sum(e for e in exponents if e > 0))


def scalar_winding(f: ScalarFunction, c: Contour) -> int:
    """Winding number of f around 0 along c, from accumulated phase increments."""
    values = np.array([complex(f(lam)) for lam in c.points()])
    if not np.all(np.isfinite(values)) or np.any(values == 0):
        raise SingularOnContour(f"function vanishes or blows up on the contour around {c.center}")

    steps = np.angle(np.roll(values, -1) / values)
    worst = float(np.max(np.abs(steps)))
    if worst > np.pi / 2:
        raise PhaseJump(
            f"phase step {worst:.3f} exceeds pi/2; refine the contour ({c.nodes} nodes)"
        )
    return _nearest_integer(complex(np.sum(steps) / (2.0 * np.pi)), "winding number")


def guard_mode_contour(mode: ModeIndex, c: Contour) -> None:
    """Refuses a contour passing within CONTOUR_GUARD of a mode lattice point or its reflection."""
    reach = abs(c.center) + c.radius + 2.0
    poles = [p for p, _ in mode_resonances(mode, int(reach / 2) + 1)]
    zeros = [1.0 - p for p in poles]
    if c.clearance(poles + zeros) < CONTOUR_GUARD:
        raise SingularOnContour(
            f"contour around {c.center} passes within {CONTOUR_GUARD} of a lattice point"
        )


def scattering_pole_multiplicity(
    mode: ModeIndex, s0: complex, c: Contour, options: EvalOptions = DEFAULT_OPTIONS
) -> int:
    """Scattering-pole multiplicity of the mode coefficient at s0: minus its winding number."""
    s0 = complex(s0)
    if s0.real > 1:
        raise ConfigError(f"scattering pole multiplicity needs Re s0 <= 1, got {s0}")
    if not c.encloses(s0):
        raise ConfigError(f"contour around {c.center} does not enclose {s0}")

    guard_mode_contour(mode, c)
    return -scalar_winding(lambda s: normalized_smatrix_coeff(mode, s, options), c)
