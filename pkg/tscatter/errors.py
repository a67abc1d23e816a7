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

"""Exception hierarchy shared by every tscatter module."""

from typing import Optional


class TScatterError(Exception):
    """Base class for all tscatter errors."""


class ConfigError(TScatterError, ValueError):
    """Invalid configuration or command-line input."""


class PoleProximity(TScatterError, ValueError):
    """The evaluation point lies within the exclusion radius of a known pole.

    Args:
    ----
        point: the offending evaluation point.
        pole: the nearest known pole, if one was located.
        message: optional override of the default message.

    """

    def __init__(
        self, point: complex, pole: Optional[complex] = None, message: Optional[str] = None
    ):
        self.point = point
        self.pole = pole
        if message is None:
            message = f"{point} is too close to the pole {pole}"
        super().__init__(message)


class HalfPole(PoleProximity):
    """The zero-mode cusp kernel was requested at s = 1/2."""


class ZeroKappa(TScatterError, ValueError):
    """The leading symbol is undefined for the zero frequency."""


class OnSingularSet(TScatterError, ValueError):
    """A d_k bound was requested on one of its singular lattices."""


class NearIntegerOrder(TScatterError, ValueError):
    """Bessel K of near-integer order with the limit branch disabled."""


class NumericalError(TScatterError, ArithmeticError):
    """Base class for numerical failures (CLI exit status 3)."""


class NonConvergence(NumericalError):
    """A series or quadrature did not reach the requested tolerance."""


class NotInteger(NumericalError):
    """A winding integral was not within tolerance of an integer."""


class SingularOnContour(NumericalError):
    """A matrix family could not be inverted at a contour node."""


class PhaseJump(NumericalError):
    """Consecutive contour samples differ in phase by more than pi/2."""


class IllConditioned(NumericalError):
    """A linear system is too ill-conditioned to solve reliably."""
