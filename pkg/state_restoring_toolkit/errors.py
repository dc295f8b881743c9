# Copyright 2026 The State Restoring Toolkit Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Exceptions raised by the State Restoring Toolkit."""

from typing import Any, Optional


class InvalidChainSpecError(ValueError):
  """A chain description violates the geometry or coupling constraints."""


class UnsupportedSectorError(ValueError):
  """An excitation sector above two excitations was requested."""


class NonHermitianError(ValueError):
  """An operator expected to be Hermitian is not."""


class DegenerateWindowError(ValueError):
  """A time window is empty or reversed."""


class InvalidStateError(ValueError):
  """A density matrix is not Hermitian, unit-trace and positive."""


class OracleSizeError(ValueError):
  """A full-space computation was requested for a chain that is too long."""


class ConvergenceError(RuntimeError):
  """A search did not converge.

  Attributes:
    best: The best point found before giving up.
  """
  def __init__(self, message: str, best: Optional[Any] = None):
    super().__init__(message)
    self.best = best


class InfeasibleError(RuntimeError):
  """No restart reached the feasibility threshold.

  Attributes:
    best: The best infeasible candidate, with its residuals.
  """
  def __init__(self, message: str, best: Optional[Any] = None):
    super().__init__(message)
    self.best = best
