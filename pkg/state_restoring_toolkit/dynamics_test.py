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
"""Tests for state_restoring_toolkit.dynamics."""

from unittest import mock

import numpy as np
import scipy.linalg
import scipy.optimize
from absl.testing import absltest, parameterized
from hypothesis import given, settings
from hypothesis import strategies as st

from state_restoring_toolkit import chain, dynamics, errors


def _propagator(n_nodes=6, model=chain.CouplingModel.NEAREST_NEIGHBOR,
                ratios=(1.0, 1.0)):
  spec = chain.ChainSpec(
      n_nodes=n_nodes,
      boundary_ratio_1=ratios[0],
      boundary_ratio_2=ratios[1],
      coupling_model=model,
  )
  return dynamics.build_propagator(spec)


class EigendecomposeTest(parameterized.TestCase):
  def test_rejects_non_hermitian(self):
    basis = chain.sector_basis(6, 0)
    ground = chain.SectorOperator(basis, np.zeros((1, 1), dtype=complex))
    basis1 = chain.sector_basis(6, 1)
    matrix = np.zeros((6, 6), dtype=complex)
    matrix[0, 1] = 1.0
    with self.assertRaises(errors.NonHermitianError):
      dynamics.eigendecompose(
          [ground, chain.SectorOperator(basis1, matrix)]
      )

  def test_rejects_misordered_sectors(self):
    basis1 = chain.sector_basis(6, 1)
    with self.assertRaises(ValueError):
      dynamics.eigendecompose(
          [chain.SectorOperator(basis1, np.eye(6, dtype=complex))]
      )

  @parameterized.parameters(
      chain.CouplingModel.NEAREST_NEIGHBOR, chain.CouplingModel.FULL_DIPOLE
  )
  def test_reassembles_hamiltonian(self, model):
    spec = chain.ChainSpec(n_nodes=7, coupling_model=model)
    hamiltonians = chain.build_sector_hamiltonians(chain.build_couplings(spec))
    prop = dynamics.eigendecompose(hamiltonians, spec)
    for k, operator in enumerate(hamiltonians):
      np.testing.assert_allclose(
          prop.hamiltonian(k), operator.matrix, atol=1e-12
      )


class PropagatorTest(parameterized.TestCase):
  @parameterized.parameters(0, 1, 2)
  def test_evolution_is_unitary(self, k):
    u = _propagator(8).evolution(k, 3.7)
    np.testing.assert_allclose(
        u @ u.conj().T, np.eye(u.shape[0]), atol=1e-12
    )

  @parameterized.parameters(1, 2)
  def test_evolution_matches_expm(self, k):
    spec = chain.ChainSpec(n_nodes=6, boundary_ratio_1=0.4)
    hamiltonian = chain.build_sector_hamiltonians(
        chain.build_couplings(spec)
    )[k].matrix
    prop = dynamics.build_propagator(spec)
    np.testing.assert_allclose(
        prop.evolution(k, 2.5),
        scipy.linalg.expm(-2.5j * hamiltonian),
        atol=1e-12,
    )

  def test_group_property(self):
    prop = _propagator(7)
    np.testing.assert_allclose(
        prop.evolution(2, 1.3) @ prop.evolution(2, 0.9),
        prop.evolution(2, 2.2),
        atol=1e-12,
    )

  def test_column_matches_evolution(self):
    prop = _propagator(6)
    ket = chain.pattern_from_nodes(6, (1, 2))
    index = prop.bases[2].index_of[ket]
    np.testing.assert_allclose(
        prop.column(4.0, ket), prop.evolution(2, 4.0)[:, index], atol=1e-12
    )


class PropagatorElementTest(absltest.TestCase):
  def test_cross_sector_is_structural_zero(self):
    prop = _propagator(6)
    amplitude = dynamics.propagator_element(
        prop, 1.0, chain.pattern_from_nodes(6, (6, )),
        chain.pattern_from_nodes(6, (1, 2))
    )
    self.assertTrue(amplitude.structurally_zero)
    self.assertEqual(complex(amplitude), 0j)

  def test_three_excitations_unsupported(self):
    prop = _propagator(6)
    pattern = chain.pattern_from_nodes(6, (1, 2, 3))
    with self.assertRaises(errors.UnsupportedSectorError):
      dynamics.propagator_element(prop, 1.0, pattern, pattern)

  def test_identity_at_time_zero(self):
    prop = _propagator(6)
    pattern = chain.pattern_from_nodes(6, (2, 5))
    amplitude = dynamics.propagator_element(prop, 0.0, pattern, pattern)
    self.assertFalse(amplitude.structurally_zero)
    self.assertAlmostEqual(abs(amplitude), 1.0, places=12)

  def test_matches_full_space(self):
    spec = chain.ChainSpec(
        n_nodes=6, boundary_ratio_1=0.5, boundary_ratio_2=0.8,
        coupling_model=chain.CouplingModel.FULL_DIPOLE
    )
    prop = dynamics.build_propagator(spec)
    full = scipy.linalg.expm(
        -1.7j * chain.full_space_hamiltonian(chain.build_couplings(spec))
    )
    bra, ket = dynamics.transfer_patterns(6)
    amplitude = dynamics.propagator_element(prop, 1.7, bra, ket)
    self.assertAlmostEqual(complex(amplitude), full[bra, ket], places=12)


class TransferProbabilityTest(parameterized.TestCase):
  def test_vanishes_at_time_zero(self):
    self.assertAlmostEqual(
        dynamics.transfer_probability(_propagator(8), 0.0), 0.0, places=14
    )

  def test_scan_matches_pointwise(self):
    prop = _propagator(9)
    times = np.linspace(0.0, 20.0, 11)
    scan = dynamics.scan_transfer_probability(prop, times)
    for t, value in zip(times, scan):
      self.assertAlmostEqual(
          dynamics.transfer_probability(prop, t), value, places=12
      )

  @settings(max_examples=25, deadline=None)
  @given(st.floats(min_value=0.0, max_value=200.0))
  def test_is_a_probability(self, t):
    value = dynamics.transfer_probability(_propagator(7), t)
    self.assertGreaterEqual(value, -1e-12)
    self.assertLessEqual(value, 1.0 + 1e-12)

  def test_needs_two_excitation_sector(self):
    spec = chain.ChainSpec(n_nodes=6)
    hamiltonians = chain.build_sector_hamiltonians(
        chain.build_couplings(spec), max_excitations=1
    )
    prop = dynamics.eigendecompose(hamiltonians, spec)
    with self.assertRaises(errors.UnsupportedSectorError):
      dynamics.transfer_probability(prop, 1.0)


class OptimizeRegistrationTimeTest(parameterized.TestCase):
  def test_beats_every_grid_point(self):
    prop = _propagator(10)
    optimum = dynamics.optimize_registration_time(prop, (0.0, 30.0))
    grid = dynamics.time_grid((0.0, 30.0), dynamics.DEFAULT_GRID_STEP)
    scan = dynamics.scan_transfer_probability(prop, grid)
    self.assertGreaterEqual(optimum.value, scan.max() - 1e-15)
    self.assertBetween(optimum.t_max, 0.0, 30.0)
    self.assertAlmostEqual(
        dynamics.transfer_probability(prop, optimum.t_max), optimum.value,
        places=12
    )

  def test_default_window(self):
    prop = _propagator(8)
    optimum = dynamics.optimize_registration_time(prop)
    self.assertBetween(optimum.t_max, 0.0, 24.0)

  @parameterized.named_parameters(
      ('reversed', (5.0, 1.0)),
      ('empty', (2.0, 2.0)),
      ('negative', (-1.0, 4.0)),
      ('infinite', (0.0, float('inf'))),
  )
  def test_degenerate_window(self, window):
    with self.assertRaises(errors.DegenerateWindowError):
      dynamics.optimize_registration_time(_propagator(6), window)

  def test_json_round_trip(self):
    optimum = dynamics.TransferOptimum(
        t_max=58.9826, value=0.4372, ratios=(0.3005, 0.5311)
    )
    self.assertEqual(
        dynamics.TransferOptimum.from_json(optimum.to_json()), optimum
    )


class OptimizeBoundaryCouplingsTest(absltest.TestCase):
  def test_not_worse_than_grid_starts(self):
    window = (0.0, 15.0)
    optimum = dynamics.optimize_boundary_couplings(6, t_window=window)
    for r1 in dynamics.RATIO_GRID:
      for r2 in dynamics.RATIO_GRID:
        spec = chain.ChainSpec(
            n_nodes=6, boundary_ratio_1=r1, boundary_ratio_2=r2
        )
        start = dynamics.optimize_registration_time(
            dynamics.build_propagator(spec), window,
            dynamics.BOUNDARY_SEARCH_GRID_STEP
        )
        self.assertGreaterEqual(optimum.value, start.value - 1e-12)
    for ratio in optimum.ratios:
      self.assertBetween(ratio, 0.0, 1.5)
    self.assertBetween(optimum.t_max, 0.0, 15.0)

  def test_rejects_short_chain(self):
    with self.assertRaises(errors.InvalidChainSpecError):
      dynamics.optimize_boundary_couplings(5)

  def test_raises_with_best_point_when_not_converged(self):
    stalled = scipy.optimize.OptimizeResult(
        x=np.array([0.9, 0.9]), fun=0.0, success=False
    )
    with mock.patch.object(
        dynamics.scipy.optimize, 'minimize', return_value=stalled
    ):
      with self.assertRaises(errors.ConvergenceError) as raised:
        dynamics.optimize_boundary_couplings(6, t_window=(0.0, 10.0))
    self.assertIsInstance(raised.exception.best, dynamics.TransferOptimum)
    self.assertIsNotNone(raised.exception.best.ratios)


class ImprovementFactorTest(absltest.TestCase):
  def test_ratio(self):
    self.assertAlmostEqual(
        dynamics.improvement_factor(
            dynamics.TransferOptimum(59.0, 0.4372),
            dynamics.TransferOptimum(46.0, 0.0151)
        ), 0.4372 / 0.0151
    )

  def test_zero_reference(self):
    with self.assertRaises(ValueError):
      dynamics.improvement_factor(
          dynamics.TransferOptimum(1.0, 0.1), dynamics.TransferOptimum(1.0, 0.0)
      )


if __name__ == '__main__':
  absltest.main()
