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
"""Structural restoring with a unitary on the four-qubit extended receiver.

The last four chain nodes form the extended receiver. A unitary V0 acting on
them and commuting with the total z-projection of spin is built as a product
of 42 two-level rotations. Applied after the chain evolution, W = (I (x) V0)
exp(-iHt), it can make every non-diagonal receiver element proportional to the
corresponding sender element; the proportionality constants are the scale
factors and the conditions for proportionality are the constraint residuals.
"""

import dataclasses
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from state_restoring_toolkit import chain, dynamics, errors, qstate
from state_restoring_toolkit.base_record import BaseRecord

ER_QUBITS = 4
ER_DIMENSION = 2**ER_QUBITS
UNITARITY_TOL = 1e-12

# 1-based generator index -> pattern of nodes N-3..N (node N-3 most
# significant). Only patterns with at most two excitations are indexed.
INDEX_TABLE: Dict[int, int] = {
    1: 0b0000,
    2: 0b0001,
    3: 0b0010,
    4: 0b0011,
    5: 0b0100,
    6: 0b0101,
    7: 0b0110,
    8: 0b1000,
    9: 0b1001,
    10: 0b1010,
    11: 0b1100,
}

# Off-diagonal pairs inside the one- and two-excitation blocks.
GENERATOR_PAIRS: Tuple[Tuple[int, int], ...] = (
    (2, 3), (2, 5), (2, 8), (3, 5), (3, 8), (4, 6), (4, 7), (4, 9), (4, 10),
    (4, 11), (5, 8), (6, 7), (6, 9), (6, 10), (6, 11), (7, 9), (7, 10),
    (7, 11), (9, 10), (9, 11), (10, 11)
)

# Every PhiParams vector lists, for each pair in ascending order, the family 2
# angle followed by the family 1 angle.
PARAMETER_LABELS: Tuple[Tuple[int, int, int], ...] = tuple(
    (family, i, j) for i, j in GENERATOR_PAIRS for family in (2, 1)
)
N_PARAMETERS = len(PARAMETER_LABELS)

ORDERING_CONVENTION = (
    'V0 = prod over pairs (i,j) descending from left to right of '
    'exp(i phi2_ij gamma2_ij) exp(i phi1_ij gamma1_ij); the smallest pair '
    'acts first'
)
SIGN_CONVENTION = 'gamma2_ij[i,j] = -i, gamma2_ij[j,i] = +i'

# Pairs whose angles reach the elements of V0 entering the diagonal
# restoring subsystem; two families each.
DIAGONAL_SYSTEM_PAIRS = ((2, 3), (2, 5), (2, 8), (3, 5), (3, 8))

TABLE_COLUMNS = (
    'L0_flip', 'L1_00_01', 'L1_00_10', 'L1_01_11', 'L1_10_11', 'L2'
)


def generator_pair_count(er_qubits: int = ER_QUBITS) -> int:
  """Counts off-diagonal pairs in the one- and two-excitation blocks.

  Each pair carries two real angles, so the unitary on an m-qubit extended
  receiver has twice this many parameters available for restoring.
  """
  if er_qubits < 2:
    raise ValueError(
        f'An extended receiver has at least 2 qubits, got {er_qubits}.'
    )
  return math.comb(er_qubits, 2) + math.comb(math.comb(er_qubits, 2), 2)


@dataclasses.dataclass(frozen=True, eq=False)
class GeneratorBasis:
  """The 42 Hermitian generators of the receiver unitary.

  Attributes:
    labels: (family, i, j) of every generator, in PhiParams order.
    generators: 16 x 16 Hermitian matrices, one per label.
    index_table: 1-based index -> four-bit pattern.
  """
  labels: Tuple[Tuple[int, int, int], ...]
  generators: Tuple[np.ndarray, ...]
  index_table: Dict[int, int]

  def __len__(self) -> int:
    return len(self.generators)

  def generator(self, family: int, i: int, j: int) -> np.ndarray:
    return self.generators[self.labels.index((family, i, j))]


def build_generators() -> GeneratorBasis:
  """Builds the off-diagonal generators that conserve the excitation number."""
  generators = []
  for family, i, j in PARAMETER_LABELS:
    row, col = INDEX_TABLE[i], INDEX_TABLE[j]
    gamma = np.zeros((ER_DIMENSION, ER_DIMENSION), dtype=complex)
    if family == 1:
      gamma[row, col] = gamma[col, row] = 1.0
    else:
      gamma[row, col] = -1j
      gamma[col, row] = 1j
    generators.append(gamma)
  return GeneratorBasis(
      labels=PARAMETER_LABELS,
      generators=tuple(generators),
      index_table=dict(INDEX_TABLE),
  )


def total_iz(er_qubits: int = ER_QUBITS) -> np.ndarray:
  """Returns the extended-receiver excitation-number operator."""
  excitations = [chain.excitation_count(p) for p in range(2**er_qubits)]
  return np.diag(np.asarray(excitations, dtype=float))


@dataclasses.dataclass(frozen=True)
class PhiParams(BaseRecord):
  """The 42 rotation angles, in radians.

  Attributes:
    values: Angles ordered as PARAMETER_LABELS.
  """
  values: Tuple[float, ...]

  _schema_name = 'phi_params'

  def __post_init__(self):
    values = tuple(float(v) for v in np.asarray(self.values).ravel())
    if len(values) != N_PARAMETERS:
      raise ValueError(
          f'Expected {N_PARAMETERS} angles, got {len(values)}.'
      )
    if not all(math.isfinite(v) for v in values):
      raise ValueError('All angles must be finite.')
    object.__setattr__(self, 'values', values)

  @classmethod
  def zeros(cls) -> 'PhiParams':
    return cls((0.0, ) * N_PARAMETERS)

  @classmethod
  def uniform(cls, rng: np.random.Generator) -> 'PhiParams':
    """Draws every angle uniformly from [0, 2 pi)."""
    return cls(tuple(rng.uniform(0.0, 2 * np.pi, N_PARAMETERS)))

  @classmethod
  def from_mapping(
      cls, angles: Dict[Tuple[int, int, int], float]
  ) -> 'PhiParams':
    """Builds angles from {(family, i, j): value}; missing ones are zero."""
    unknown = set(angles) - set(PARAMETER_LABELS)
    if unknown:
      raise ValueError(f'Unknown generator labels: {sorted(unknown)}.')
    return cls(tuple(angles.get(label, 0.0) for label in PARAMETER_LABELS))

  def as_array(self) -> np.ndarray:
    return np.asarray(self.values)

  def get(self, family: int, i: int, j: int) -> float:
    return self.values[PARAMETER_LABELS.index((family, i, j))]

  def to_dict(self) -> List[Dict[str, Any]]:  # pytype: disable=signature-mismatch
    return [
        dict(family=family, i=i, j=j, value=value)
        for (family, i, j), value in zip(PARAMETER_LABELS, self.values)
    ]

  @classmethod
  def _from_dict(cls, json_list: List[Dict[str, Any]]) -> 'PhiParams':
    angles = {}
    for record in json_list:
      label = (record['family'], record['i'], record['j'])
      if label in angles:
        raise ValueError(f'Duplicate angle for generator {label}.')
      angles[label] = record['value']
    if len(angles) != N_PARAMETERS:
      raise ValueError(f'Expected {N_PARAMETERS} distinct angles.')
    return cls.from_mapping(angles)


def load_phi(path) -> PhiParams:
  """Loads angles saved as a JSON array of {family, i, j, value}."""
  return PhiParams.load(path)


@dataclasses.dataclass(frozen=True, eq=False)
class ReceiverUnitary:
  """The unitary V0 on nodes N-3..N.

  Attributes:
    matrix: 16 x 16 complex matrix over the four-bit patterns.
    phi: The angles it was built from, if any.
  """
  matrix: np.ndarray
  phi: Optional[PhiParams] = None

  def unitarity_error(self) -> float:
    gram = self.matrix @ self.matrix.conj().T
    return float(np.max(np.abs(gram - np.eye(ER_DIMENSION))))

  def iz_commutator_error(self) -> float:
    iz = total_iz()
    return float(np.max(np.abs(self.matrix @ iz - iz @ self.matrix)))


def _rotation(family: int, phi: float) -> np.ndarray:
  """Returns exp(i phi gamma) restricted to the two levels of a pair."""
  c, s = math.cos(phi), math.sin(phi)
  if family == 1:
    return np.array([[c, 1j * s], [1j * s, c]])
  return np.array([[c, s], [-s, c]], dtype=complex)


def build_v0(phi: PhiParams) -> ReceiverUnitary:
  """Multiplies the 42 two-level rotations into V0.

  The rotations are applied as row operations on the identity, the smallest
  pair first and, within a pair, family 1 before family 2.

  Args:
    phi: The rotation angles.

  Returns:
    The receiver unitary.
  """
  matrix = np.eye(ER_DIMENSION, dtype=complex)
  values = dict(zip(PARAMETER_LABELS, phi.values))
  for i, j in GENERATOR_PAIRS:
    rows = [INDEX_TABLE[i], INDEX_TABLE[j]]
    for family in (1, 2):
      matrix[rows] = _rotation(family, values[(family, i, j)]) @ matrix[rows]
  return ReceiverUnitary(matrix=matrix, phi=phi)


@dataclasses.dataclass(frozen=True, eq=False)
class _ReceiverLayout:
  """Groups sector states by their first N-4 nodes."""
  groups: np.ndarray
  rows: np.ndarray
  low: np.ndarray


def _receiver_layout(states: Sequence[int]) -> _ReceiverLayout:
  states = np.asarray(states, dtype=np.int64)
  groups, rows = np.unique(states >> ER_QUBITS, return_inverse=True)
  return _ReceiverLayout(
      groups=groups, rows=rows, low=states & (ER_DIMENSION - 1)
  )


def apply_receiver_unitary(
    vector: np.ndarray, layout: _ReceiverLayout, v0: np.ndarray
) -> np.ndarray:
  """Applies I (x) V0 to a vector over the states of a layout.

  The states must be closed under V0, i.e. hold every pattern of each group
  with the group's excitation count.
  """
  dense = np.zeros((len(layout.groups), ER_DIMENSION), dtype=complex)
  dense[layout.rows, layout.low] = vector
  return (dense @ v0.T)[layout.rows, layout.low]


class TotalEvolution:
  """W = (I (x) V0) exp(-iHt), evaluated column by column.

  Implements the evolution-provider interface of qstate.receiver_state.
  """

  def __init__(self, prop: dynamics.Propagator, v0: ReceiverUnitary):
    self.prop = prop
    self.v0 = v0
    self.bases = prop.bases
    self._layouts = [_receiver_layout(basis.states) for basis in prop.bases]

  def column(self, t: float, ket: int) -> np.ndarray:
    k = chain.excitation_count(ket)
    return apply_receiver_unitary(
        self.prop.column(t, ket), self._layouts[k], self.v0.matrix
    )


def w_element(
    prop: dynamics.Propagator, v0: ReceiverUnitary, t: float, bra: int,
    ket: int
) -> dynamics.Amplitude:
  """Returns <bra| (I (x) V0) exp(-iHt) |ket>.

  Raises:
    UnsupportedSectorError: If either pattern has more than two excitations.
  """
  k_bra = chain.excitation_count(bra)
  k_ket = chain.excitation_count(ket)
  for k in (k_bra, k_ket):
    if k > prop.max_excitations:
      raise errors.UnsupportedSectorError(
          f'Pattern with {k} excitations is outside the supported sectors.'
      )
  if k_bra != k_ket:
    return dynamics.Amplitude(0j, structurally_zero=True)
  column = TotalEvolution(prop, v0).column(t, ket)
  return dynamics.Amplitude(complex(column[prop.bases[k_ket].index_of[bra]]))


@dataclasses.dataclass(frozen=True, eq=False)
class SenderColumns:
  """Bare evolution of the three excited sender states at a fixed time.

  Restoring quantities only depend on W|010...0>, W|100...0> and W|110...0>,
  and of the last one only on patterns with at most one excitation outside
  the extended receiver. Keeping exp(-iHt) applied to these fixed lets V0
  vary cheaply.

  Attributes:
    n_nodes: The chain length N.
    t: The registration time.
    columns: Columns for sender indices 1 and 2 over the one-excitation
      basis, and for sender index 3 over `pair_states`.
    pair_states: The retained two-excitation patterns.
  """
  n_nodes: int
  t: float
  columns: Tuple[np.ndarray, np.ndarray, np.ndarray]
  pair_states: Tuple[int, ...]
  layouts: Tuple[_ReceiverLayout, _ReceiverLayout] = dataclasses.field(
      repr=False
  )
  pair_index: Dict[int, int] = dataclasses.field(repr=False)

  @classmethod
  def from_propagator(
      cls, prop: dynamics.Propagator, t: float
  ) -> 'SenderColumns':
    n = prop.n_nodes
    pair_basis = prop.bases[2]
    keep = [
        i for i, state in enumerate(pair_basis.states)
        if chain.excitation_count(state >> ER_QUBITS) <= 1
    ]
    pair_states = tuple(pair_basis.states[i] for i in keep)
    c01, c10, c11 = (
        prop.column(t, qstate.sender_pattern(n, a)) for a in (1, 2, 3)
    )
    return cls(
        n_nodes=n,
        t=float(t),
        columns=(c01, c10, c11[keep]),
        pair_states=pair_states,
        layouts=(
            _receiver_layout(prop.bases[1].states),
            _receiver_layout(pair_states),
        ),
        pair_index={s: i for i, s in enumerate(pair_states)},
    )

  def with_receiver_unitary(self, v0: ReceiverUnitary) -> 'RestoringColumns':
    c01, c10, c11 = self.columns
    layout1, layout2 = self.layouts
    return RestoringColumns(
        n_nodes=self.n_nodes,
        c01=apply_receiver_unitary(c01, layout1, v0.matrix),
        c10=apply_receiver_unitary(c10, layout1, v0.matrix),
        c11=apply_receiver_unitary(c11, layout2, v0.matrix),
        pair_index=self.pair_index,
    )


@dataclasses.dataclass(frozen=True, eq=False)
class RestoringColumns:
  """W|010...0>, W|100...0> and W|110...0>, with element accessors.

  Receiver labels n are 1 for 01 (node N excited) and 2 for 10 (node N-1
  excited). One-excitation columns are indexed by node, so entry p is the
  amplitude on node p + 1.
  """
  n_nodes: int
  c01: np.ndarray
  c10: np.ndarray
  c11: np.ndarray
  pair_index: Dict[int, int] = dataclasses.field(repr=False)

  def sender(self, n: int) -> np.ndarray:
    return self.c01 if n == 1 else self.c10

  def receiver_node(self, n: int) -> int:
    return self.n_nodes if n == 1 else self.n_nodes - 1

  def direct(self, n: int) -> complex:
    """W_{0 n; n 0}: sender state n arriving as receiver state n."""
    return complex(self.sender(n)[self.receiver_node(n) - 1])

  def swapped(self, n: int) -> complex:
    """W_{0 n; n' 0} with n' the other one-excitation state."""
    return complex(self.sender(3 - n)[self.receiver_node(n) - 1])

  def pair_arrival(self) -> complex:
    """W_{0 11; 11 0}."""
    pattern = chain.pattern_from_nodes(
        self.n_nodes, (self.n_nodes - 1, self.n_nodes)
    )
    return complex(self.c11[self.pair_index[pattern]])

  def traced_single(self, m: int) -> np.ndarray:
    """W_{J 00; m 0} for the N-2 single-excitation patterns J."""
    return self.sender(m)[:self.n_nodes - 2]

  def traced_pair(self, n: int, nodes: Optional[Sequence[int]] = None):
    """W_{J n; 11 0} for single-excitation J on the given traced nodes."""
    nodes = range(1, self.n_nodes - 1) if nodes is None else nodes
    receiver = self.receiver_node(n)
    return np.array([
        self.c11[self.pair_index[chain.pattern_from_nodes(
            self.n_nodes, (node, receiver)
        )]] for node in nodes
    ])


_ONE_EXCITATION = (1, 2)


@dataclasses.dataclass
class ConstraintResiduals(BaseRecord):
  """The seven complex conditions for restoring non-diagonal elements.

  Attributes:
    pair_overlaps: sum_J W_{J00; m0} W^+_{110; Jn} for (m, n) in
      (01,01), (01,10), (10,01), (10,10), with |J| = 1.
    swapped: W_{0n; n'0} for n = 01, 10, where n' is the other state.
    flip_overlap: sum_J W_{J01; 110} W^+_{110; J10}, with |J| = 1.
  """
  pair_overlaps: Tuple[complex, complex, complex, complex]
  swapped: Tuple[complex, complex]
  flip_overlap: complex

  def as_array(self) -> np.ndarray:
    return np.array(
        self.pair_overlaps + self.swapped + (self.flip_overlap, ),
        dtype=complex
    )

  def as_real_vector(self) -> np.ndarray:
    """Returns the 14 real and imaginary parts."""
    values = self.as_array()
    return np.concatenate([values.real, values.imag])

  def max_abs(self) -> float:
    return float(np.max(np.abs(self.as_array())))


@dataclasses.dataclass
class ScaleFactors(BaseRecord):
  """The damping factors relating receiver and sender elements.

  Attributes:
    lambda2: Second-order factor for (00;11).
    lambda1: First-order factors for (00;01), (00;10), (01;11), (10;11).
    lambda0_flip: Zero-order factor for (01;10).
    lambda0_diag: Diagonal factors for (01;01), (10;10), (11;11).
    tilde0: Feed from rho_S(11;11) into (01;01) and (10;10).
  """
  lambda2: complex
  lambda1: Tuple[complex, complex, complex, complex]
  lambda0_flip: complex
  lambda0_diag: Tuple[float, float, float]
  tilde0: Tuple[float, float]

  def by_target(self, target: str) -> complex:
    """Returns the factor named by a table column, e.g. 'L1_00_10'."""
    return dict(zip(TABLE_COLUMNS, self.table_values()))[target]

  def table_values(self) -> Tuple[complex, ...]:
    """Returns the non-diagonal factors in table column order."""
    return (self.lambda0_flip, ) + tuple(self.lambda1) + (self.lambda2, )

  def magnitudes(self) -> np.ndarray:
    return np.abs(np.asarray(self.table_values()))


def residuals_from_columns(cols: RestoringColumns) -> ConstraintResiduals:
  """Evaluates the restoring conditions from the three evolved columns."""
  pair_overlaps = tuple(
      complex(np.vdot(cols.traced_pair(n), cols.traced_single(m)))
      for m in _ONE_EXCITATION for n in _ONE_EXCITATION
  )
  return ConstraintResiduals(
      pair_overlaps=pair_overlaps,
      swapped=tuple(cols.swapped(n) for n in _ONE_EXCITATION),
      flip_overlap=complex(np.vdot(cols.traced_pair(2), cols.traced_pair(1))),
  )


def factors_from_columns(cols: RestoringColumns) -> ScaleFactors:
  """Extracts the scale factors from the three evolved columns."""
  d01, d10 = cols.direct(1), cols.direct(2)
  pair = cols.pair_arrival()
  return ScaleFactors(
      lambda2=pair.conjugate(),
      lambda1=(
          d01.conjugate(),
          d10.conjugate(),
          d01 * pair.conjugate(),
          d10 * pair.conjugate(),
      ),
      lambda0_flip=d01 * d10.conjugate(),
      lambda0_diag=(abs(d01)**2, abs(d10)**2, abs(pair)**2),
      tilde0=tuple(
          float(np.sum(np.abs(cols.traced_pair(n))**2))
          for n in _ONE_EXCITATION
      ),
  )


def restoring_columns(
    prop: dynamics.Propagator, v0: ReceiverUnitary, t: float
) -> RestoringColumns:
  return SenderColumns.from_propagator(prop, t).with_receiver_unitary(v0)


def constraint_residuals(
    prop: dynamics.Propagator, v0: ReceiverUnitary, t: float
) -> ConstraintResiduals:
  """Evaluates the seven restoring conditions at time t."""
  return residuals_from_columns(restoring_columns(prop, v0, t))


def scale_factors(
    prop: dynamics.Propagator, v0: ReceiverUnitary, t: float
) -> ScaleFactors:
  """Computes every scale factor at time t."""
  return factors_from_columns(restoring_columns(prop, v0, t))


def complete_restoring_residuals(
    prop: dynamics.Propagator, v0: ReceiverUnitary, t: float
) -> np.ndarray:
  """Evaluates the subsystem that complete diagonal restoring would need.

  Returns:
    2 + 2(N-4) complex values: W_{0n; n'0} for n = 01, 10, then
    W_{J 00 n; 110} for n = 01, 10 and J a single excitation on nodes
    1..N-4. All must vanish for the diagonal to be restored.
  """
  cols = restoring_columns(prop, v0, t)
  outer_nodes = range(1, prop.n_nodes - 3)
  return np.concatenate([
      [cols.swapped(n) for n in _ONE_EXCITATION],
      cols.traced_pair(1, outer_nodes),
      cols.traced_pair(2, outer_nodes),
  ])


@dataclasses.dataclass
class InfeasibilityCounts(BaseRecord):
  """Equation and parameter counts of the diagonal restoring subsystem."""
  n_nodes: int
  complex_equations: int
  real_equations: int
  parameters: int
  solvable: bool


def diagonal_infeasibility_report(n_nodes: int) -> InfeasibilityCounts:
  """Compares the diagonal restoring subsystem with its free parameters.

  Only ten angles reach the elements of V0 that enter the subsystem, while
  it holds 2 + 2(N-4) complex equations; the count exceeds the parameters
  already for N = 6.

  Raises:
    InvalidChainSpecError: If N < 6.
  """
  if n_nodes < chain.MIN_NODES:
    raise errors.InvalidChainSpecError(
        f'A chain needs at least {chain.MIN_NODES} nodes, got {n_nodes}.'
    )
  complex_equations = 2 + 2 * (n_nodes - ER_QUBITS)
  parameters = 2 * len(DIAGONAL_SYSTEM_PAIRS)
  return InfeasibilityCounts(
      n_nodes=n_nodes,
      complex_equations=complex_equations,
      real_equations=2 * complex_equations,
      parameters=parameters,
      solvable=2 * complex_equations <= parameters,
  )


def predicted_receiver_state(
    rho_s: qstate.TwoQubitState,
    factors: ScaleFactors,
    cols: Optional[RestoringColumns] = None,
) -> np.ndarray:
  """Predicts the receiver matrix from the scale factors.

  Without `cols` every element follows the restored relations, which are
  exact once all constraint residuals vanish. With `cols`, the terms
  weighted by the residuals are added back and the prediction is exact for
  any V0.

  Args:
    rho_s: The sender state.
    factors: The scale factors at the registration time.
    cols: Evolved columns supplying the residual-weighted terms.

  Returns:
    The predicted 4 x 4 receiver matrix; element (00;00) follows from the
    unit trace.
  """
  rho = rho_s.matrix
  l1 = factors.lambda1
  d0 = factors.lambda0_diag
  predicted = np.zeros((4, 4), dtype=complex)
  predicted[0, 3] = factors.lambda2 * rho[0, 3]
  predicted[0, 1] = l1[0] * rho[0, 1]
  predicted[0, 2] = l1[1] * rho[0, 2]
  predicted[1, 3] = l1[2] * rho[1, 3]
  predicted[2, 3] = l1[3] * rho[2, 3]
  predicted[1, 2] = factors.lambda0_flip * rho[1, 2]
  predicted[1, 1] = d0[0] * rho[1, 1] + factors.tilde0[0] * rho[3, 3]
  predicted[2, 2] = d0[1] * rho[2, 2] + factors.tilde0[1] * rho[3, 3]
  predicted[3, 3] = d0[2] * rho[3, 3]

  if cols is not None:
    res = residuals_from_columns(cols)
    pair = cols.pair_arrival()
    for n in _ONE_EXCITATION:
      other = 3 - n
      swapped = res.swapped[n - 1]
      predicted[0, n] += swapped.conjugate() * rho[0, other]
      for m in _ONE_EXCITATION:
        predicted[0, n] += res.pair_overlaps[2 * (m - 1) + n - 1] * rho[m, 3]
      predicted[n, 3] += swapped * pair.conjugate() * rho[other, 3]
      direct = cols.direct(n)
      predicted[n, n] += (
          abs(swapped)**2 * rho[other, other] +
          2 * (direct * swapped.conjugate() * rho[n, other]).real
      )
    d01, d10 = cols.direct(1), cols.direct(2)
    s01, s10 = res.swapped
    predicted[1, 2] += (
        d01 * s10.conjugate() * rho[1, 1] + s01 * d10.conjugate() * rho[2, 2] +
        s01 * s10.conjugate() * rho[2, 1] + res.flip_overlap * rho[3, 3]
    )

  predicted[0, 0] = 1.0 - np.trace(predicted[1:, 1:]).real
  upper = np.triu_indices(4, k=1)
  predicted[upper[1], upper[0]] = predicted[upper].conj()
  return predicted


def scale_factor_table_row(factors: ScaleFactors) -> List[Tuple[float, float]]:
  """Returns (magnitude, phase) per factor in table column order."""
  return [(abs(v), float(np.angle(v))) for v in factors.table_values()]


@dataclasses.dataclass
class RestoreReport(BaseRecord):
  """Simulated versus predicted receiver state.

  Attributes:
    t: The registration time.
    simulated: The receiver matrix from the full sector evolution.
    predicted: The prediction of the restored relations.
    discrepancy: |simulated - predicted| elementwise.
    max_discrepancy: Largest non-diagonal discrepancy.
    diagonal_max_discrepancy: Largest diagonal discrepancy.
    normalization_defect: |1 - trace| of the simulated matrix.
    model_error: Largest |simulated - prediction with residual terms|; it
      checks the factor formulas themselves and is at rounding level.
    residual_max: Largest constraint residual magnitude.
    factors: The scale factors used in the prediction.
  """
  t: float
  simulated: np.ndarray
  predicted: np.ndarray
  discrepancy: np.ndarray
  max_discrepancy: float
  diagonal_max_discrepancy: float
  normalization_defect: float
  model_error: float
  residual_max: float
  factors: ScaleFactors


def verify_restoring(
    rho_s: qstate.TwoQubitState,
    prop: dynamics.Propagator,
    v0: ReceiverUnitary,
    t: float,
) -> RestoreReport:
  """Checks how well V0 restores the receiver state of a given sender state.

  Args:
    rho_s: The sender state.
    prop: The chain propagator.
    v0: The receiver unitary.
    t: The registration time.

  Returns:
    The comparison report.
  """
  simulated = qstate.receiver_state(rho_s, TotalEvolution(prop, v0), t).matrix
  cols = restoring_columns(prop, v0, t)
  factors = factors_from_columns(cols)
  predicted = predicted_receiver_state(rho_s, factors)
  corrected = predicted_receiver_state(rho_s, factors, cols)
  discrepancy = np.abs(simulated - predicted)
  off_diagonal = ~np.eye(4, dtype=bool)
  report = RestoreReport(
      t=float(t),
      simulated=simulated,
      predicted=predicted,
      discrepancy=discrepancy,
      max_discrepancy=float(np.max(discrepancy[off_diagonal])),
      diagonal_max_discrepancy=float(np.max(np.diag(discrepancy))),
      normalization_defect=abs(1.0 - np.trace(simulated).real),
      model_error=float(np.max(np.abs(simulated - corrected))),
      residual_max=residuals_from_columns(cols).max_abs(),
      factors=factors,
  )
  logging.info(
      'Restoring check at t=%.4f: max discrepancy %.3e, residual max %.3e.',
      report.t, report.max_discrepancy, report.residual_max
  )
  return report
