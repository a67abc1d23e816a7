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

"""Model ends, their twists and the exact resonance multisets."""

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np
from absl import logging

from tscatter.errors import ConfigError
from tscatter.specfun import japanese_bracket

Phase = Union[Fraction, float]

MERGE_TOL = 1e-12


def as_phase(value: Union[Phase, int]) -> Phase:
    """Normalise a holonomy phase; integers and fractions stay exact."""
    if isinstance(value, bool):
        raise ConfigError(f"phase must be a number, got {value!r}")
    if isinstance(value, (int, Fraction)):
        phase: Phase = Fraction(value)
    elif isinstance(value, float):
        phase = value
    else:
        raise ConfigError(f"phase must be a number, got {value!r}")
    if not 0 <= phase < 1:
        raise ConfigError(f"phase must lie in [0, 1), got {value}")
    return phase


def is_symmetric_phase(theta: Phase) -> bool:
    """Phases whose p = +1 and p = -1 branches coincide."""
    return theta == 0 or theta == Fraction(1, 2)


def _distinct(phases: Iterable[Phase]) -> List[Phase]:
    return list(dict.fromkeys(phases))


@dataclass(frozen=True)
class FunnelTwist:
    """A funnel end of central geodesic length `length` and holonomy phases."""

    length: float
    phases: Tuple[Phase, ...]

    def __post_init__(self) -> None:
        if not (isinstance(self.length, (int, float)) and math.isfinite(self.length)):
            raise ConfigError(f"funnel length must be a finite number, got {self.length!r}")
        if self.length <= 0:
            raise ConfigError(f"funnel length must be positive, got {self.length}")
        if len(self.phases) == 0:
            raise ConfigError("a funnel needs at least one phase")
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "phases", tuple(as_phase(p) for p in self.phases))

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.length

    @property
    def dim(self) -> int:
        return len(self.phases)

    def multiplicity(self, theta: Phase) -> int:
        """m_theta, the number of times `theta` occurs among the phases."""
        return sum(1 for p in self.phases if p == theta)

    def distinct_phases(self) -> List[Phase]:
        return _distinct(self.phases)


@dataclass(frozen=True)
class CuspTwist:
    phases: Tuple[Phase, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "phases", tuple(as_phase(p) for p in self.phases))

    @property
    def n_c(self) -> int:
        """Dimension of the invariant subspace of the parabolic holonomy."""
        return sum(1 for p in self.phases if p == 0)


@dataclass(frozen=True)
class SurfaceEnds:
    funnels: Tuple[FunnelTwist, ...] = ()
    cusps: Tuple[CuspTwist, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "funnels", tuple(self.funnels))
        object.__setattr__(self, "cusps", tuple(self.cusps))
        if not self.funnels and not self.cusps:
            raise ConfigError("a surface needs at least one end")

    @property
    def n_f(self) -> int:
        return len(self.funnels)

    @property
    def n_c(self) -> int:
        return len(self.cusps)

    def mode(self, funnel: int, j: int, k: int) -> "ModeIndex":
        if not 0 <= funnel < self.n_f:
            raise ConfigError(f"funnel index {funnel} out of range for {self.n_f} funnels")
        return ModeIndex(self.funnels[funnel], j, k, funnel=funnel)


@dataclass(frozen=True)
class ModeIndex:
    """Fourier mode k of the eigenvector j of a funnel's holonomy.

    Args:
    ----
        twist: the funnel the mode belongs to.
        j: eigenbasis index, below `twist.dim`.
        k: integer Fourier index.
        funnel: position of the funnel in its `SurfaceEnds`, for labelling.

    """

    twist: FunnelTwist
    j: int
    k: int
    funnel: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.j < self.twist.dim:
            raise ConfigError(f"eigenbasis index {self.j} out of range for dim {self.twist.dim}")
        if int(self.k) != self.k:
            raise ConfigError(f"Fourier index must be an integer, got {self.k}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def theta(self) -> Phase:
        return self.twist.phases[self.j]

    @property
    def kappa(self) -> float:
        return float(self.k + self.theta)

    @property
    def omega(self) -> float:
        return self.twist.omega

    @property
    def omega_kappa(self) -> float:
        return self.twist.omega * self.kappa

    @property
    def bracket(self) -> float:
        """<k> of the integer Fourier index."""
        return japanese_bracket(self.k)

    def label(self) -> str:
        return f"funnel{self.funnel}/j{self.j}/k{self.k}"


class ResonanceMultiset:
    """Finite multiset of complex points; the mass at 0 is held in `m0`.

    Entries are kept merged (no two points within `MERGE_TOL`) and ordered by
    (|s|, Re, Im).
    """

    def __init__(self, entries: Iterable[Tuple[complex, int]] = (), m0: int = 0):
        if m0 < 0:
            raise ValueError(f"m0 must be non-negative, got {m0}")
        merged = _merge(entries)
        self.m0 = int(m0) + merged.pop(0j, 0)
        self.entries: Tuple[Tuple[complex, int], ...] = tuple(
            sorted(merged.items(), key=lambda e: _order_key(e[0]))
        )

    def __iter__(self) -> Iterator[Tuple[complex, int]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResonanceMultiset):
            return NotImplemented
        return self.m0 == other.m0 and self.entries == other.entries

    def __repr__(self) -> str:
        body = ", ".join(f"{p}: {m}" for p, m in self.entries)
        return f"ResonanceMultiset({{{body}}}, m0={self.m0})"

    def as_dict(self) -> Dict[complex, int]:
        points = dict(self.entries)
        if self.m0:
            points[0j] = self.m0
        return points

    def total(self) -> int:
        return self.m0 + sum(m for _, m in self.entries)

    def multiplicity(self, point: complex, tol: float = MERGE_TOL) -> int:
        point = complex(point)
        if abs(point) <= tol:
            return self.m0
        return sum(m for p, m in self.entries if abs(p - point) <= tol)

    def within(self, radius: float) -> "ResonanceMultiset":
        return ResonanceMultiset(((p, m) for p, m in self.entries if abs(p) <= radius), self.m0)

    def union(self, other: "ResonanceMultiset") -> "ResonanceMultiset":
        return ResonanceMultiset(self.entries + other.entries, self.m0 + other.m0)

    def conjugate(self) -> "ResonanceMultiset":
        return ResonanceMultiset(((p.conjugate(), m) for p, m in self.entries), self.m0)

    def max_modulus(self) -> float:
        return max((abs(p) for p, _ in self.entries), default=0.0)

    def nearest_distance(self, s: complex) -> float:
        """Distance from s to the support, inf for an empty multiset."""
        distances = [abs(p - s) for p, _ in self.entries]
        if self.m0:
            distances.append(abs(s))
        return min(distances, default=math.inf)


def _clean(point: complex) -> complex:
    # drop signed zeros so that output is stable
    return complex(point.real + 0.0, point.imag + 0.0)


def _order_key(point: complex) -> Tuple[float, float, float]:
    return (abs(point), point.real, point.imag)


def _merge(entries: Iterable[Tuple[complex, int]]) -> Dict[complex, int]:
    exact: Counter = Counter()
    for point, mult in entries:
        if mult < 1 or int(mult) != mult:
            raise ValueError(f"multiplicity must be a positive integer, got {mult}")
        exact[_clean(complex(point))] += int(mult)

    merged: Dict[complex, int] = {}
    previous: Optional[complex] = None
    for point in sorted(exact, key=lambda p: (p.real, p.imag)):
        if previous is not None and abs(point - previous) <= MERGE_TOL:
            merged[previous] += exact[point]
            continue
        if abs(point) <= MERGE_TOL:
            point = 0j
        merged[point] = merged.get(point, 0) + exact[point]
        previous = point
    return merged


def lattice_point(omega: float, theta: Phase, p: int, m: int, j: int) -> complex:
    """The point -(1 + 2m) + i p omega (theta + j) of a funnel lattice."""
    return complex(-(1 + 2 * m), p * omega * float(theta + j))


def funnel_resonances(f: FunnelTwist, radius: float) -> ResonanceMultiset:
    """All funnel resonances in the closed disk |s| <= radius, with multiplicity.

    The two branches p = +1 and p = -1 are united as multisets, so for the
    phases 0 and 1/2 the coincident points carry twice the phase multiplicity.
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")

    exact: Counter = Counter()
    omega = f.omega
    for theta in f.distinct_phases():
        m_theta = f.multiplicity(theta)
        m = 0
        while 1 + 2 * m <= radius:
            reach = math.sqrt(max(radius**2 - (1 + 2 * m) ** 2, 0.0)) / omega
            for p in (1, -1):
                for j in range(math.floor(-reach - theta) - 1, math.ceil(reach - theta) + 2):
                    point = lattice_point(omega, theta, p, m, j)
                    if abs(point) <= radius:
                        exact[point] += m_theta
            m += 1

    multiset = ResonanceMultiset(exact.items())
    logging.debug("funnel_resonances(%s, %s): %d points", f, radius, multiset.total())
    return multiset


def mode_resonances(mode: ModeIndex, max_index: int) -> ResonanceMultiset:
    """Poles of beta_kappa: -(1 + 2m) +- i omega kappa for 0 <= m <= max_index."""
    if max_index < 0:
        raise ValueError(f"max_index must be non-negative, got {max_index}")
    y = mode.omega_kappa
    entries = []
    for m in range(max_index + 1):
        entries.append((complex(-(1 + 2 * m), y), 1))
        entries.append((complex(-(1 + 2 * m), -y), 1))
    return ResonanceMultiset(entries)


def cusp_resonances(c: CuspTwist) -> ResonanceMultiset:
    if c.n_c == 0:
        return ResonanceMultiset()
    return ResonanceMultiset([(0.5 + 0j, c.n_c)])


def cusp_projection(c: CuspTwist) -> np.ndarray:
    """Diagonal 0/1 mask of the projection onto the invariant subspace."""
    return np.array([1.0 if p == 0 else 0.0 for p in c.phases])


def surface_resonances(ends: SurfaceEnds, radius: float) -> ResonanceMultiset:
    total = ResonanceMultiset()
    for f in ends.funnels:
        total = total.union(funnel_resonances(f, radius))
    for c in ends.cusps:
        total = total.union(cusp_resonances(c).within(radius))
    return total


def rho_funnel(r: float) -> float:
    """Boundary defining function 1/cosh r of the funnel."""
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    if r > 710.0:
        return 2.0 * math.exp(-r)
    return 1.0 / math.cosh(r)
