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
"""Two-qubit density matrices and the receiver state.

Two-qubit matrices are indexed by (n1 n2; m1 m2) in the basis order 00, 01,
10, 11. The sender occupies chain nodes 1 and 2 and the receiver nodes N-1 and
N, so a sender index a sits in the two most significant bits of a chain
pattern and a receiver index r in the two least significant ones.
"""

import dataclasses
import logging
from typing import Any, Dict, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from state_restoring_toolkit import chain, errors
from state_restoring_toolkit.base_record import (
    BaseRecord, from_jsonable_complex, to_jsonable
)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
COHERENCE_ORDERS = (-2, -1, 0, 1, 2)

_EXCITATIONS = np.array([0, 1, 1, 2])
# Element (n; m) belongs to coherence order (m1 + m2) - (n1 + n2).
ORDER_OF_ELEMENT = _EXCITATIONS[None, :] - _EXCITATIONS[:, None]

ArrayLike = Union[np.ndarray, Sequence[Sequence[complex]]]


def _as_matrix(value: Any) -> np.ndarray:
  matrix = np.asarray(getattr(value, 'matrix', value), dtype=complex)
  if matrix.shape != (4, 4):
    raise errors.InvalidStateError(
        f'A two-qubit matrix must be 4 x 4, got shape {matrix.shape}.'
    )
  return matrix


def state_violations(matrix: np.ndarray) -> Dict[str, float]:
  """Returns the Hermiticity, trace and positivity defects of a matrix."""
  hermiticity = float(np.max(np.abs(matrix - matrix.conj().T)))
  trace = abs(complex(np.trace(matrix)) - 1.0)
  hermitian_part = 0.5 * (matrix + matrix.conj().T)
  min_eigenvalue = float(np.linalg.eigvalsh(hermitian_part)[0])
  return {
      'hermiticity': hermiticity,
      'trace': trace,
      'min_eigenvalue': min_eigenvalue,
  }


@dataclasses.dataclass(frozen=True, eq=False)
class TwoQubitState(BaseRecord):
  """A valid two-qubit density matrix.

  Attributes:
    matrix: 4 x 4 complex, Hermitian, unit trace and positive semidefinite.
  """
  matrix: np.ndarray

  _schema_name = 'density_matrix'

  def __post_init__(self):
    matrix = _as_matrix(self.matrix)
    violations = state_violations(matrix)
    if violations['hermiticity'] > HERMITICITY_TOL:
      raise errors.InvalidStateError(
          'Density matrix is not Hermitian: max |rho - rho^+| = '
          f'{violations["hermiticity"]:.3e}.'
      )
    if violations['trace'] > TRACE_TOL:
      raise errors.InvalidStateError(
          f'Density matrix trace is {complex(np.trace(matrix))}, not 1.'
      )
    if violations['min_eigenvalue'] < PSD_TOL:
      raise errors.InvalidStateError(
          'Density matrix has a negative eigenvalue '
          f'{violations["min_eigenvalue"]:.3e}.'
      )
    object.__setattr__(self, 'matrix', matrix)

  def __getitem__(self, index) -> complex:
    return self.matrix[index]

  def to_dict(self) -> Dict[str, Any]:
    return to_jsonable(self.matrix)

  @classmethod
  def _from_dict(cls, json_dict: Dict[str, Any]) -> 'TwoQubitState':
    return cls(from_jsonable_complex({
        're': json_dict['re'],
        'im': json_dict['im']
    }))


def load_state(path) -> TwoQubitState:
  """Loads a density matrix saved as {"re": 4x4, "im": 4x4} JSON."""
  return TwoQubitState.load(path)


def pure_state(amplitudes: Sequence[complex]) -> TwoQubitState:
  """Returns |psi><psi| for a normalized copy of four amplitudes."""
  psi = np.asarray(amplitudes, dtype=complex)
  psi = psi / np.linalg.norm(psi)
  return TwoQubitState(np.outer(psi, psi.conj()))


def random_state(
    rng: np.random.Generator, rank: Optional[int] = None
) -> TwoQubitState:
  """Draws a density matrix from the Ginibre ensemble of the given rank."""
  rank = 4 if rank is None else rank
  if not 1 <= rank <= 4:
    raise ValueError(f'rank must be in 1..4, got {rank}.')
  ginibre = (
      rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
  )
  rho = ginibre @ ginibre.conj().T
  rho = 0.5 * (rho + rho.conj().T)
  return TwoQubitState(rho / np.trace(rho).real)


@dataclasses.dataclass(frozen=True, eq=False)
class MQDecomposition:
  """Split of a 4 x 4 matrix into its multiple-quantum coherence orders.

  Attributes:
    components: Maps each order k in -2..2 to the matrix holding only the
      elements of that order.
  """
  components: Dict[int, np.ndarray]

  def __getitem__(self, order: int) -> np.ndarray:
    return self.components[order]

  def recompose(self) -> np.ndarray:
    return sum(self.components[k] for k in COHERENCE_ORDERS)

  def intensity(self, order: int) -> float:
    """Returns the sum of squared magnitudes of the order's elements."""
    return float(np.sum(np.abs(self.components[order])**2))


def mq_decompose(rho: Union[TwoQubitState, ArrayLike]) -> MQDecomposition:
  """Splits a two-qubit matrix into coherence orders -2..2."""
  matrix = _as_matrix(rho)
  return MQDecomposition({
      k: np.where(ORDER_OF_ELEMENT == k, matrix, 0)
      for k in COHERENCE_ORDERS
  })


def coherence_intensity(rho: Union[TwoQubitState, ArrayLike], k: int) -> float:
  """Returns the intensity of the k-th order coherence of a matrix."""
  if k not in COHERENCE_ORDERS:
    raise ValueError(f'Coherence order must be in -2..2, got {k}.')
  return mq_decompose(rho).intensity(k)


def sender_pattern(n_nodes: int, index: int) -> int:
  """Returns the chain pattern |n1 n2 0...0> of sender basis index 2*n1+n2."""
  return index << (n_nodes - 2)


@dataclasses.dataclass(frozen=True)
class SectorState:
  """A chain density matrix stored as its nonzero (bra, ket) elements.

  Attributes:
    n_nodes: The chain length N.
    elements: Maps (row pattern, column pattern) to the matrix element.
  """
  n_nodes: int
  elements: Dict[Tuple[int, int], complex]

  def trace(self) -> complex:
    return sum(v for (p, q), v in self.elements.items() if p == q)

  def patterns(self) -> Tuple[int, ...]:
    """Returns the populated patterns in ascending order."""
    return tuple(sorted({p for pair in self.elements for p in pair}))


def assemble_initial_state(
    rho_s: TwoQubitState, n_nodes: int
) -> SectorState:
  """Attaches the sender state to a chain whose other nodes are in |0>.

  Args:
    rho_s: The sender density matrix.
    n_nodes: The chain length N.

  Returns:
    rho_S (x) |0...0><0...0| as its nonzero elements over the patterns
    |n1 n2 0...0>.
  """
  matrix = _as_matrix(rho_s)
  elements = {}
  for a in range(4):
    for b in range(4):
      if matrix[a, b] != 0:
        elements[(
            sender_pattern(n_nodes, a), sender_pattern(n_nodes, b)
        )] = complex(matrix[a, b])
  return SectorState(n_nodes=n_nodes, elements=elements)


class EvolutionProvider(Protocol):
  """Anything that can evolve a sector basis state.

  `column(t, ket)` returns W|ket> expressed in `bases[k]`, where k is the
  number of excitations of `ket`. The bare propagator and the propagator
  followed by the receiver unitary both implement it.
  """
  bases: Tuple[chain.SectorBasis, ...]

  def column(self, t: float, ket: int) -> np.ndarray:
    ...


def _receiver_amplitudes(
    provider: EvolutionProvider, t: float, n_nodes: int
) -> np.ndarray:
  """Returns psi[a, J, r] = <J r| W |a 0...0> for all sender indices a.

  J runs over the traced-out patterns of nodes 1..N-2 reachable from the
  sender sectors, in ascending order.
  """
  states = [
      np.asarray(provider.bases[k].states, dtype=np.int64)
      for k in range(chain.MAX_EXCITATIONS + 1)
  ]
  traced = np.unique(np.concatenate([s >> 2 for s in states]))
  psi = np.zeros((4, len(traced), 4), dtype=complex)
  for a in range(4):
    k = int(_EXCITATIONS[a])
    column = provider.column(t, sender_pattern(n_nodes, a))
    rows = np.searchsorted(traced, states[k] >> 2)
    psi[a, rows, states[k] & 3] = column
  return psi


def receiver_map(
    matrix: ArrayLike, provider: EvolutionProvider, t: float
) -> np.ndarray:
  """Applies rho_S -> Tr_{1..N-2}(W (rho_S (x) |0><0|) W^+) to any 4 x 4 matrix.

  The map is linear, so it may be applied to single coherence components or
  other matrices that are not states.
  """
  n_nodes = provider.bases[0].n_nodes
  psi = _receiver_amplitudes(provider, t, n_nodes)
  return np.einsum(
      'ab,ajr,bjs->rs', _as_matrix(matrix), psi, psi.conj(), optimize=True
  )


def evolve_to_receiver(
    initial: SectorState, provider: EvolutionProvider, t: float
) -> np.ndarray:
  """Evolves an assembled chain state and traces out nodes 1..N-2.

  Args:
    initial: The chain state at time zero, populated on sender patterns only.
    provider: The total evolution W.
    t: The registration time.

  Returns:
    The 4 x 4 receiver matrix Tr_{1..N-2}(W rho W^+).

  Raises:
    ValueError: If `initial` populates a pattern outside the sender nodes or
      belongs to a chain of another length.
  """
  n_nodes = provider.bases[0].n_nodes
  if initial.n_nodes != n_nodes:
    raise ValueError(
        f'State of a {initial.n_nodes}-node chain given to a {n_nodes}-node '
        'evolution.'
    )
  position = {sender_pattern(n_nodes, a): a for a in range(4)}
  outside = set(initial.patterns()) - set(position)
  if outside:
    raise ValueError(
        'Initial state populates non-sender patterns '
        f'{sorted(chain.pattern_string(p, n_nodes) for p in outside)}.'
    )
  psi = _receiver_amplitudes(provider, t, n_nodes)
  rho_r = np.zeros((4, 4), dtype=complex)
  for (p, q), value in initial.elements.items():
    rho_r += value * np.einsum(
        'jr,js->rs', psi[position[p]], psi[position[q]].conj()
    )
  return rho_r


def receiver_state(
    rho_s: TwoQubitState, provider: EvolutionProvider, t: float
) -> TwoQubitState:
  """Computes the state of the receiver nodes N-1 and N at time t.

  Args:
    rho_s: The sender state at time zero.
    provider: The total evolution W; a dynamics.Propagator for bare transfer
      or a restorer.TotalEvolution to include the receiver unitary.
    t: The registration time.

  Returns:
    The receiver density matrix.

  Raises:
    InvalidStateError: If `rho_s` is not a valid density matrix.
  """
  if not isinstance(rho_s, TwoQubitState):
    rho_s = TwoQubitState(np.asarray(rho_s, dtype=complex))
  initial = assemble_initial_state(rho_s, provider.bases[0].n_nodes)
  rho_r = evolve_to_receiver(initial, provider, t)
  logging.debug('Receiver state trace %.15f.', np.trace(rho_r).real)
  return TwoQubitState(0.5 * (rho_r + rho_r.conj().T))
