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
"""Communication line couplings, excitation-sector bases and Hamiltonians.

The XX Hamiltonian H = sum_{i<j} D_ij (I_ix I_jx + I_iy I_jy) conserves the
total z-projection of spin, so it is block diagonal in the number of
excitations. Only the sectors with 0, 1 and 2 excitations are ever populated
by a two-qubit sender attached to a chain in its ground state, and this module
builds exactly those blocks.

Basis states are N-bit patterns stored as integers with node 1 as the most
significant bit, matching kets written |n_1 n_2 ... n_N>.
"""

import dataclasses
import enum
import itertools
import logging
import math
from typing import Dict, List, Tuple

import numpy as np

from state_restoring_toolkit import errors
from state_restoring_toolkit.base_record import BaseRecord
from state_restoring_toolkit.utils import io_utils

MIN_NODES = 6
MAX_EXCITATIONS = 2
MAX_FULL_SPACE_NODES = 10


class CouplingModel(enum.Enum):
  """Which node pairs interact."""
  NEAREST_NEIGHBOR = 'NearestNeighbor'
  FULL_DIPOLE = 'FullDipole'


# Only all-pair couplings give the published homogeneous 42-node optimum.
DEFAULT_COUPLING_MODEL = CouplingModel.FULL_DIPOLE


@dataclasses.dataclass(frozen=True)
class ChainSpec(BaseRecord):
  """Geometry and coupling description of the communication line.

  Energies are measured in units of `base_coupling` and times in units of its
  inverse. The two boundary coupling pairs are mirrored at both chain ends.

  Attributes:
    n_nodes: The number of nodes N; at least 2 sender nodes plus 4 extended
      receiver nodes.
    base_coupling: The bulk nearest-neighbor coupling.
    boundary_ratio_1: D_12 / base_coupling, also used for D_{N-1,N}.
    boundary_ratio_2: D_23 / base_coupling, also used for D_{N-2,N-1}.
    coupling_model: Nearest-neighbor only, or all-pair dipole couplings.
  """
  n_nodes: int
  base_coupling: float = 1.0
  boundary_ratio_1: float = 1.0
  boundary_ratio_2: float = 1.0
  coupling_model: CouplingModel = DEFAULT_COUPLING_MODEL

  _schema_name = 'chain_spec'

  def __post_init__(self):
    if not isinstance(self.n_nodes, (int, np.integer)):
      raise errors.InvalidChainSpecError(
          f'n_nodes must be an integer, got {self.n_nodes!r}.'
      )
    if self.n_nodes < MIN_NODES:
      raise errors.InvalidChainSpecError(
          f'A chain needs at least {MIN_NODES} nodes (2 sender + 4 extended '
          f'receiver), got {self.n_nodes}.'
      )
    for name in ('base_coupling', 'boundary_ratio_1', 'boundary_ratio_2'):
      value = getattr(self, name)
      if not np.isfinite(value) or value <= 0:
        raise errors.InvalidChainSpecError(
            f'{name} must be strictly positive, got {value!r}.'
        )
    if not isinstance(self.coupling_model, CouplingModel):
      object.__setattr__(
          self, 'coupling_model', CouplingModel(self.coupling_model)
      )

  @property
  def ratios(self) -> Tuple[float, float]:
    return (self.boundary_ratio_1, self.boundary_ratio_2)

  def with_ratios(self, ratio_1: float, ratio_2: float) -> 'ChainSpec':
    """Returns a copy of this spec with new boundary ratios."""
    return dataclasses.replace(
        self, boundary_ratio_1=float(ratio_1), boundary_ratio_2=float(ratio_2)
    )

  def nearest_neighbor_profile(self) -> np.ndarray:
    """Returns the N-1 couplings delta_k = D_{k,k+1}."""
    delta = np.full(self.n_nodes - 1, float(self.base_coupling))
    delta[0] = delta[-1] = self.base_coupling * self.boundary_ratio_1
    delta[1] = delta[-2] = self.base_coupling * self.boundary_ratio_2
    return delta


def load_chain_spec(path) -> ChainSpec:
  """Loads a ChainSpec from a JSON config file."""
  return ChainSpec.load(path)


@dataclasses.dataclass(frozen=True, eq=False)
class CouplingMatrix:
  """Symmetric coupling constants D_ij in units of the base coupling.

  Attributes:
    entries: N x N real symmetric matrix with zero diagonal.
    spec: The chain spec the matrix was built from.
  """
  entries: np.ndarray
  spec: ChainSpec

  @property
  def n_nodes(self) -> int:
    return self.entries.shape[0]

  def to_csv(self) -> str:
    """Returns the nonzero couplings as 'i,j,coupling' rows (1-based, i<j)."""
    rows = []
    for i, j in zip(*np.triu_indices(self.n_nodes, k=1)):
      if self.entries[i, j]:
        rows.append((i + 1, j + 1, repr(float(self.entries[i, j]))))
    return io_utils.to_csv(('i', 'j', 'coupling'), rows)


def build_couplings(spec: ChainSpec) -> CouplingMatrix:
  """Builds the coupling matrix of a chain.

  Under the dipole model, node positions are reconstructed from the
  nearest-neighbor couplings through r_{k,k+1} = (delta / delta_k)^(1/3), so
  that every D_ij = delta / r_ij^3 follows from the same geometry.

  Args:
    spec: The chain description.

  Returns:
    The coupling matrix.
  """
  n = spec.n_nodes
  profile = spec.nearest_neighbor_profile()
  entries = np.zeros((n, n))
  if spec.coupling_model is CouplingModel.NEAREST_NEIGHBOR:
    idx = np.arange(n - 1)
    entries[idx, idx + 1] = profile
  else:
    spacing = np.cbrt(spec.base_coupling / profile)
    positions = np.concatenate(([0.0], np.cumsum(spacing)))
    distances = np.abs(positions[:, None] - positions[None, :])
    np.fill_diagonal(distances, np.inf)
    entries = np.triu(spec.base_coupling / distances**3, k=1)
  entries = entries + entries.T
  logging.debug(
      'Built %s couplings for N=%d with ratios %s.', spec.coupling_model.value,
      n, spec.ratios
  )
  return CouplingMatrix(entries=entries, spec=spec)


def node_bit(n_nodes: int, node: int) -> int:
  """Returns the bit of a 1-based node; node 1 is the most significant."""
  return 1 << (n_nodes - node)


def excitation_count(pattern: int) -> int:
  return bin(pattern).count('1')


def pattern_from_nodes(n_nodes: int, nodes) -> int:
  """Returns the pattern with the given 1-based nodes excited."""
  pattern = 0
  for node in nodes:
    pattern |= node_bit(n_nodes, node)
  return pattern


def pattern_string(pattern: int, n_nodes: int) -> str:
  """Formats a pattern as its ket label, e.g. '110000'."""
  return format(pattern, f'0{n_nodes}b')


def parse_pattern(text: str) -> Tuple[int, int]:
  """Parses a ket label into (pattern, n_nodes)."""
  if not text or set(text) - {'0', '1'}:
    raise ValueError(f'Not a bit pattern: {text!r}.')
  return int(text, 2), len(text)


@dataclasses.dataclass(frozen=True)
class SectorBasis:
  """Basis of the sector with a fixed number of excitations.

  States are ordered lexicographically on the tuple of excited nodes, so for
  one excitation the order is 100...0, 010...0, ..., 000...1.

  Attributes:
    n_nodes: The number of chain nodes.
    excitations: The number of excitations k.
    states: The patterns of the sector, in basis order.
    index_of: Maps each pattern to its position in `states`.
  """
  n_nodes: int
  excitations: int
  states: Tuple[int, ...]
  index_of: Dict[int, int] = dataclasses.field(compare=False, repr=False)

  @property
  def dimension(self) -> int:
    return len(self.states)


def sector_basis(n_nodes: int, k: int) -> SectorBasis:
  """Builds the basis of the k-excitation sector of an N-node chain.

  Raises:
    UnsupportedSectorError: If k is negative or above two.
    InvalidChainSpecError: If the chain is shorter than six nodes.
  """
  if k < 0 or k > MAX_EXCITATIONS:
    raise errors.UnsupportedSectorError(
        f'Only sectors with 0..{MAX_EXCITATIONS} excitations are supported; '
        f'the dynamics never leaves the two-excitation subspace. Got k={k}.'
    )
  if n_nodes < MIN_NODES:
    raise errors.InvalidChainSpecError(
        f'A chain needs at least {MIN_NODES} nodes, got {n_nodes}.'
    )
  states = tuple(
      pattern_from_nodes(n_nodes, nodes)
      for nodes in itertools.combinations(range(1, n_nodes + 1), k)
  )
  assert len(states) == math.comb(n_nodes, k)
  return SectorBasis(
      n_nodes=n_nodes,
      excitations=k,
      states=states,
      index_of={state: i for i, state in enumerate(states)},
  )


@dataclasses.dataclass(frozen=True, eq=False)
class SectorOperator:
  """An operator restricted to one excitation sector.

  Attributes:
    basis: The sector basis.
    matrix: Complex square matrix of size `basis.dimension`.
  """
  basis: SectorBasis
  matrix: np.ndarray

  def hermiticity_error(self) -> float:
    """Returns max |A - A^dagger|."""
    if not self.matrix.size:
      return 0.0
    return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


def build_sector_hamiltonian(
    couplings: CouplingMatrix, basis: SectorBasis
) -> SectorOperator:
  """Builds the XX Hamiltonian restricted to one excitation sector.

  The only nonzero elements are flip-flop hops: <q|H|p> = D_ij / 2 when q is p
  with one excitation moved from node i to node j.

  Args:
    couplings: The coupling matrix.
    basis: The sector basis; must describe a chain of the same length.

  Returns:
    A Hermitian sector operator with zero diagonal.

  Raises:
    ValueError: If the basis and the couplings disagree on N.
  """
  n = couplings.n_nodes
  if basis.n_nodes != n:
    raise ValueError(
        f'Basis is for {basis.n_nodes} nodes but the coupling matrix is '
        f'{n} x {n}.'
    )
  matrix = np.zeros((basis.dimension, basis.dimension), dtype=complex)
  bits = [node_bit(n, node) for node in range(1, n + 1)]
  for col, pattern in enumerate(basis.states):
    occupied = [i for i in range(n) if pattern & bits[i]]
    empty = [j for j in range(n) if not pattern & bits[j]]
    for i in occupied:
      for j in empty:
        coupling = couplings.entries[i, j]
        if coupling:
          hopped = pattern ^ bits[i] ^ bits[j]
          matrix[basis.index_of[hopped], col] += 0.5 * coupling
  return SectorOperator(basis=basis, matrix=matrix)


def build_sector_hamiltonians(
    couplings: CouplingMatrix,
    max_excitations: int = MAX_EXCITATIONS) -> List[SectorOperator]:
  """Builds the Hamiltonian blocks for sectors 0..max_excitations."""
  return [
      build_sector_hamiltonian(couplings, sector_basis(couplings.n_nodes, k))
      for k in range(max_excitations + 1)
  ]


def _single_spin_operator(n_nodes: int, node: int, op: np.ndarray):
  return np.kron(
      np.kron(np.eye(2**(node - 1)), op), np.eye(2**(n_nodes - node))
  )


def full_space_hamiltonian(couplings: CouplingMatrix) -> np.ndarray:
  """Builds the 2^N x 2^N XX Hamiltonian from spin operators.

  Node 1 is the leftmost tensor factor and basis index bit value 1 marks an
  excitation, so full-space indices coincide with sector patterns.

  Raises:
    OracleSizeError: If N exceeds the memory guard.
  """
  n = couplings.n_nodes
  if n > MAX_FULL_SPACE_NODES:
    raise errors.OracleSizeError(
        f'Full-space Hamiltonians are limited to {MAX_FULL_SPACE_NODES} '
        f'nodes, got {n}.'
    )
  spin_x = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
  spin_y = np.array([[0, -0.5j], [0.5j, 0]], dtype=complex)
  ix = [_single_spin_operator(n, node, spin_x) for node in range(1, n + 1)]
  iy = [_single_spin_operator(n, node, spin_y) for node in range(1, n + 1)]
  hamiltonian = np.zeros((2**n, 2**n), dtype=complex)
  for i, j in zip(*np.triu_indices(n, k=1)):
    coupling = couplings.entries[i, j]
    if coupling:
      hamiltonian += coupling * (ix[i] @ ix[j] + iy[i] @ iy[j])
  return hamiltonian


def full_space_total_iz(n_nodes: int) -> np.ndarray:
  """Returns the diagonal of the excitation-number operator on 2^N states."""
  return np.array([excitation_count(p) for p in range(2**n_nodes)], float)
