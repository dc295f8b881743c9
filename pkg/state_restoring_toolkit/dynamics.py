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
"""Sector propagators and transfer optimization.

Each excitation-sector Hamiltonian is diagonalized once; the propagator
U(t) = exp(-iHt) at any time is then reassembled from the spectrum. The
quantity driving the choice of registration time is the two-excitation
transfer probability |<0...011| U(t) |110...0>|^2.
"""

import dataclasses
import logging
import math
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.optimize

from state_restoring_toolkit import chain, errors
from state_restoring_toolkit.base_record import BaseRecord

HERMITICITY_TOL = 1e-10
DEFAULT_GRID_STEP = 0.01
# Boundary searches evaluate the time scan many times; the refinement step
# recovers the accuracy lost on the coarser grid.
BOUNDARY_SEARCH_GRID_STEP = 0.05
RATIO_BOUNDS = (1e-3, 1.5)
RATIO_GRID = (0.3, 0.6, 0.9, 1.2, 1.5)
_SCAN_CHUNK = 4096

TimeWindow = Tuple[float, float]


class Amplitude(NamedTuple):
  """A propagator matrix element.

  Attributes:
    value: The complex amplitude.
    structurally_zero: True when bra and ket lie in different excitation
      sectors, so the amplitude vanishes by excitation conservation.
  """
  value: complex
  structurally_zero: bool = False

  def __complex__(self) -> complex:
    return complex(self.value)

  def __abs__(self) -> float:
    return abs(self.value)


@dataclasses.dataclass(frozen=True, eq=False)
class Propagator:
  """Spectral decomposition of the sector Hamiltonians.

  Attributes:
    bases: The sector bases, indexed by excitation number.
    eigenvalues: Real eigenvalues per sector.
    eigenvectors: Unitary eigenvector matrices per sector (columns).
    spec: The chain spec the Hamiltonians were built from, if known.
  """
  bases: Tuple[chain.SectorBasis, ...]
  eigenvalues: Tuple[np.ndarray, ...]
  eigenvectors: Tuple[np.ndarray, ...]
  spec: Optional[chain.ChainSpec] = None

  @property
  def n_nodes(self) -> int:
    return self.bases[0].n_nodes

  @property
  def max_excitations(self) -> int:
    return len(self.bases) - 1

  def _check_sector(self, k: int):
    if k < 0 or k > self.max_excitations:
      raise errors.UnsupportedSectorError(
          f'Sector {k} is not part of this propagator (0..'
          f'{self.max_excitations}).'
      )

  def hamiltonian(self, k: int) -> np.ndarray:
    """Reassembles the sector Hamiltonian from its spectrum."""
    self._check_sector(k)
    vecs = self.eigenvectors[k]
    return (vecs * self.eigenvalues[k]) @ vecs.conj().T

  def evolution(self, k: int, t: float) -> np.ndarray:
    """Returns the sector block of exp(-iHt)."""
    self._check_sector(k)
    vecs = self.eigenvectors[k]
    return (vecs * np.exp(-1j * self.eigenvalues[k] * t)) @ vecs.conj().T

  def column(self, t: float, ket: int) -> np.ndarray:
    """Returns exp(-iHt)|ket> in the basis of the ket's sector."""
    k = chain.excitation_count(ket)
    self._check_sector(k)
    vecs = self.eigenvectors[k]
    row = vecs[self.bases[k].index_of[ket]].conj()
    return vecs @ (np.exp(-1j * self.eigenvalues[k] * t) * row)


def eigendecompose(
    hamiltonians: Sequence[chain.SectorOperator],
    spec: Optional[chain.ChainSpec] = None,
) -> Propagator:
  """Diagonalizes sector Hamiltonians.

  Args:
    hamiltonians: Hermitian sector operators ordered by excitation number,
      starting from the ground sector.
    spec: Optional provenance recorded in the propagator.

  Returns:
    The propagator.

  Raises:
    NonHermitianError: If an operator deviates from its adjoint by more than
      1e-10.
  """
  eigenvalues = []
  eigenvectors = []
  for k, operator in enumerate(hamiltonians):
    if operator.basis.excitations != k:
      raise ValueError(
          f'Hamiltonian {k} is for the {operator.basis.excitations}-'
          'excitation sector; sectors must be ordered from 0.'
      )
    error = operator.hermiticity_error()
    if error > HERMITICITY_TOL:
      raise errors.NonHermitianError(
          f'Sector {k} Hamiltonian is not Hermitian: max |H - H^+| = '
          f'{error:.3e}.'
      )
    values, vectors = scipy.linalg.eigh(operator.matrix)
    eigenvalues.append(values)
    eigenvectors.append(vectors)
  logging.debug(
      'Diagonalized sectors of sizes %s.', [len(v) for v in eigenvalues]
  )
  return Propagator(
      bases=tuple(op.basis for op in hamiltonians),
      eigenvalues=tuple(eigenvalues),
      eigenvectors=tuple(eigenvectors),
      spec=spec,
  )


def build_propagator(spec: chain.ChainSpec) -> Propagator:
  """Builds couplings and sector Hamiltonians and diagonalizes them."""
  couplings = chain.build_couplings(spec)
  return eigendecompose(chain.build_sector_hamiltonians(couplings), spec)


def propagator_element(
    prop: Propagator, t: float, bra: int, ket: int
) -> Amplitude:
  """Returns <bra| exp(-iHt) |ket>.

  Amplitudes between different excitation sectors are exactly zero and are
  flagged as structural zeros.

  Raises:
    UnsupportedSectorError: If either pattern has more than two excitations.
  """
  k_bra = chain.excitation_count(bra)
  k_ket = chain.excitation_count(ket)
  for k in (k_bra, k_ket):
    prop._check_sector(k)  # pylint: disable=protected-access
  if k_bra != k_ket:
    return Amplitude(0j, structurally_zero=True)
  basis = prop.bases[k_ket]
  vecs = prop.eigenvectors[k_ket]
  left = vecs[basis.index_of[bra]]
  right = vecs[basis.index_of[ket]].conj()
  value = np.sum(left * np.exp(-1j * prop.eigenvalues[k_ket] * t) * right)
  return Amplitude(complex(value))


def transfer_patterns(n_nodes: int) -> Tuple[int, int]:
  """Returns (bra, ket) = (|0...011>, |110...0>)."""
  return (
      chain.pattern_from_nodes(n_nodes, (n_nodes - 1, n_nodes)),
      chain.pattern_from_nodes(n_nodes, (1, 2)),
  )


def _transfer_weights(prop: Propagator) -> Tuple[np.ndarray, np.ndarray]:
  if prop.max_excitations < 2:
    raise errors.UnsupportedSectorError(
        'Transfer probability needs the two-excitation sector.'
    )
  bra, ket = transfer_patterns(prop.n_nodes)
  basis = prop.bases[2]
  vecs = prop.eigenvectors[2]
  weights = vecs[basis.index_of[bra]] * vecs[basis.index_of[ket]].conj()
  return weights, prop.eigenvalues[2]


def scan_transfer_probability(
    prop: Propagator, times: Union[Sequence[float], np.ndarray]
) -> np.ndarray:
  """Evaluates the transfer probability at many times at once."""
  weights, energies = _transfer_weights(prop)
  times = np.atleast_1d(np.asarray(times, dtype=float))
  out = np.empty(times.shape)
  for start in range(0, len(times), _SCAN_CHUNK):
    chunk = times[start:start + _SCAN_CHUNK]
    amplitudes = np.exp(-1j * np.outer(chunk, energies)) @ weights
    out[start:start + _SCAN_CHUNK] = np.abs(amplitudes)**2
  return out


def transfer_probability(prop: Propagator, t: float) -> float:
  """Returns |<0...011| exp(-iHt) |110...0>|^2."""
  return float(scan_transfer_probability(prop, [t])[0])


@dataclasses.dataclass
class TransferOptimum(BaseRecord):
  """Maximum of the transfer probability.

  Attributes:
    t_max: The maximizing registration time, in units of 1/delta.
    value: The transfer probability at t_max.
    ratios: The boundary ratios (delta_1/delta, delta_2/delta) when they were
      optimized too.
  """
  t_max: float
  value: float
  ratios: Optional[Tuple[float, float]] = None


def default_window(n_nodes: int, base_coupling: float = 1.0) -> TimeWindow:
  """Returns [0, 3N/delta]; ballistic transfer time grows linearly in N."""
  return (0.0, 3.0 * n_nodes / base_coupling)


def _check_window(t_window: TimeWindow) -> TimeWindow:
  lo, hi = (float(t) for t in t_window)
  if not (math.isfinite(lo) and math.isfinite(hi)) or lo < 0 or hi <= lo:
    raise errors.DegenerateWindowError(
        f'Time window must satisfy 0 <= start < end, got [{lo}, {hi}].'
    )
  return lo, hi


def time_grid(t_window: TimeWindow, grid_step: float) -> np.ndarray:
  """Returns a uniform grid covering the window with spacing <= grid_step."""
  lo, hi = _check_window(t_window)
  if grid_step <= 0:
    raise ValueError(f'grid_step must be positive, got {grid_step}.')
  n_intervals = max(int(math.ceil((hi - lo) / grid_step)), 1)
  return np.linspace(lo, hi, n_intervals + 1)


def optimize_registration_time(
    prop: Propagator,
    t_window: Optional[TimeWindow] = None,
    grid_step: float = DEFAULT_GRID_STEP,
) -> TransferOptimum:
  """Finds the global maximum of the transfer probability on a window.

  A uniform grid locates the best point; bounded Brent refinement (golden
  section with parabolic steps) then polishes it within one grid step.

  Args:
    prop: The propagator.
    t_window: (start, end) times. Defaults to [0, 3N].
    grid_step: Spacing of the coarse grid.

  Returns:
    The maximizing time and probability.

  Raises:
    DegenerateWindowError: If the window is empty or reversed.
  """
  if t_window is None:
    base = prop.spec.base_coupling if prop.spec else 1.0
    t_window = default_window(prop.n_nodes, base)
  lo, hi = _check_window(t_window)
  grid = time_grid((lo, hi), grid_step)
  values = scan_transfer_probability(prop, grid)
  best = int(np.argmax(values))
  t_best, p_best = float(grid[best]), float(values[best])

  left = max(lo, t_best - grid_step)
  right = min(hi, t_best + grid_step)
  if right > left:
    refined = scipy.optimize.minimize_scalar(
        lambda t: -transfer_probability(prop, t),
        bounds=(left, right),
        method='bounded',
        options={'xatol': 1e-9},
    )
    if -refined.fun > p_best:
      t_best, p_best = float(refined.x), float(-refined.fun)
  logging.debug('Transfer optimum %.6f at t=%.6f.', p_best, t_best)
  return TransferOptimum(t_max=t_best, value=p_best)


def _chain_spec(
    n_nodes: int, model: chain.CouplingModel, ratios, base_coupling: float
) -> chain.ChainSpec:
  return chain.ChainSpec(
      n_nodes=n_nodes,
      base_coupling=base_coupling,
      boundary_ratio_1=float(ratios[0]),
      boundary_ratio_2=float(ratios[1]),
      coupling_model=model,
  )


def _optimum_for_ratios(
    n_nodes: int, model: chain.CouplingModel, ratios, base_coupling: float,
    t_window: TimeWindow, grid_step: float
) -> TransferOptimum:
  spec = _chain_spec(n_nodes, model, ratios, base_coupling)
  optimum = optimize_registration_time(
      build_propagator(spec), t_window, grid_step
  )
  optimum.ratios = (float(ratios[0]), float(ratios[1]))
  return optimum


def _better(a: TransferOptimum, b: Optional[TransferOptimum]) -> bool:
  """Orders optima by value, then by the earlier time."""
  if b is None:
    return True
  return (a.value, -a.t_max) > (b.value, -b.t_max)


def optimize_boundary_couplings(
    n_nodes: int,
    model: chain.CouplingModel = chain.DEFAULT_COUPLING_MODEL,
    t_window: Optional[TimeWindow] = None,
    base_coupling: float = 1.0,
    grid_step: float = BOUNDARY_SEARCH_GRID_STEP,
    n_polish: int = 3,
    n_jobs: int = 1,
) -> TransferOptimum:
  """Jointly maximizes the transfer probability over time and two ratios.

  The 5 x 5 grid of starting ratios is evaluated first; Nelder-Mead then
  polishes the best `n_polish` starts inside (0, 1.5]^2. The mirrored
  boundary pairs are enforced by ChainSpec, so every candidate is symmetric.

  Args:
    n_nodes: The chain length N.
    model: The coupling model.
    t_window: The registration-time window. Defaults to [0, 3N].
    base_coupling: The bulk coupling.
    grid_step: Time-grid spacing of the inner registration-time search.
    n_polish: How many of the best grid starts Nelder-Mead refines.
    n_jobs: Parallel workers for the start grid (requires joblib when > 1).

  Returns:
    The optimum with its ratios.

  Raises:
    ConvergenceError: If no Nelder-Mead run converged; `best` holds the best
      point found.
  """
  if n_nodes < chain.MIN_NODES:
    raise errors.InvalidChainSpecError(
        f'A chain needs at least {chain.MIN_NODES} nodes, got {n_nodes}.'
    )
  t_window = _check_window(t_window or default_window(n_nodes, base_coupling))
  starts = [(r1, r2) for r1 in RATIO_GRID for r2 in RATIO_GRID]
  evaluate = lambda ratios: _optimum_for_ratios(
      n_nodes, model, ratios, base_coupling, t_window, grid_step
  )
  if n_jobs != 1:
    from state_restoring_toolkit import dependencies  # pylint: disable=g-import-not-at-top
    dependencies.ensure_parallel_extra_deps_installed()
    import joblib  # pylint: disable=g-import-not-at-top
    grid_optima = joblib.Parallel(n_jobs=n_jobs)(
        joblib.delayed(_optimum_for_ratios)(
            n_nodes, model, ratios, base_coupling, t_window, grid_step
        ) for ratios in starts
    )
  else:
    grid_optima = [evaluate(ratios) for ratios in starts]
  ranked = sorted(
      range(len(starts)),
      key=lambda i: (-grid_optima[i].value, grid_optima[i].t_max, i)
  )
  best = None
  for i in ranked:
    if _better(grid_optima[i], best):
      best = grid_optima[i]
  logging.info(
      'Best grid start ratios=%s value=%.4f.', best.ratios, best.value
  )

  converged = False
  for i in ranked[:n_polish]:
    result = scipy.optimize.minimize(
        lambda r: -evaluate(r).value,
        np.asarray(starts[i]),
        method='Nelder-Mead',
        bounds=[RATIO_BOUNDS, RATIO_BOUNDS],
        options={
            'xatol': 1e-5,
            'fatol': 1e-10,
            'maxiter': 400,
        },
    )
    converged = converged or bool(result.success)
    candidate = evaluate(result.x)
    logging.info(
        'Nelder-Mead from %s -> ratios=(%.4f, %.4f) value=%.4f t=%.4f.',
        starts[i], candidate.ratios[0], candidate.ratios[1], candidate.value,
        candidate.t_max
    )
    if _better(candidate, best):
      best = candidate
  if not converged:
    raise errors.ConvergenceError(
        'Boundary-coupling search did not converge from any start.', best=best
    )
  # Refine the final time on the fine default grid.
  final = _optimum_for_ratios(
      n_nodes, model, best.ratios, base_coupling, t_window, DEFAULT_GRID_STEP
  )
  return final if _better(final, best) else best


def improvement_factor(
    optimized: TransferOptimum, homogeneous: TransferOptimum
) -> float:
  """Returns the ratio of two transfer maxima."""
  if homogeneous.value <= 0:
    raise ValueError('The reference maximum must be positive.')
  return optimized.value / homogeneous.value


def second_order_intensity(rho_s, prop: Propagator, t: float) -> float:
  """Returns |rho_R(00;11)|^2 = |rho_S(00;11)|^2 * transfer probability.

  Args:
    rho_s: The sender density matrix, as a TwoQubitState or a 4 x 4 array.
    prop: The propagator.
    t: The registration time.
  """
  matrix = np.asarray(getattr(rho_s, 'matrix', rho_s))
  return float(abs(matrix[0, 3])**2 * transfer_probability(prop, t))
