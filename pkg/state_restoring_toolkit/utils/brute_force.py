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
"""Full 2^N state-vector evolution, used to check the sector computations."""

from typing import Optional

import numpy as np
import scipy.linalg

from state_restoring_toolkit import chain, errors, qstate


def brute_force_receiver_state(
    rho_s: qstate.TwoQubitState,
    spec: chain.ChainSpec,
    t: float,
    v0: Optional[np.ndarray] = None,
) -> qstate.TwoQubitState:
  """Evolves the whole chain density matrix and traces out nodes 1..N-2.

  Args:
    rho_s: The sender state.
    spec: The chain; at most ten nodes.
    t: The registration time.
    v0: Optional 16 x 16 unitary (or object with a `matrix`) applied to the
      last four nodes after the evolution.

  Returns:
    The receiver state.

  Raises:
    OracleSizeError: If the chain has more than ten nodes.
  """
  n = spec.n_nodes
  if n > chain.MAX_FULL_SPACE_NODES:
    raise errors.OracleSizeError(
        f'The full-space oracle is limited to {chain.MAX_FULL_SPACE_NODES} '
        f'nodes, got {n}.'
    )
  hamiltonian = chain.full_space_hamiltonian(chain.build_couplings(spec))
  evolution = scipy.linalg.expm(-1j * t * hamiltonian)
  if v0 is not None:
    v0 = np.asarray(getattr(v0, 'matrix', v0), dtype=complex)
    evolution = np.kron(np.eye(2**(n - 4)), v0) @ evolution

  ground = np.zeros((2**(n - 2), 2**(n - 2)))
  ground[0, 0] = 1.0
  rho = evolution @ np.kron(rho_s.matrix, ground) @ evolution.conj().T
  blocks = rho.reshape(2**(n - 2), 4, 2**(n - 2), 4)
  rho_r = np.einsum('jajb->ab', blocks)
  return qstate.TwoQubitState(0.5 * (rho_r + rho_r.conj().T))
