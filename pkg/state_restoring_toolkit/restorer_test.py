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
"""Tests for state_restoring_toolkit.restorer."""

import math
import os

import numpy as np
import scipy.linalg
from absl import flags
from absl.testing import absltest, parameterized
from hypothesis import given, settings
from hypothesis import strategies as st

from state_restoring_toolkit import chain, dynamics, errors, qstate, restorer
from state_restoring_toolkit.utils import brute_force

_SEEDS = st.integers(min_value=0, max_value=2**32 - 1)
_SPEC = chain.ChainSpec(n_nodes=6, boundary_ratio_1=0.5, boundary_ratio_2=0.8)


def _random_v0(seed):
  return restorer.build_v0(
      restorer.PhiParams.uniform(np.random.default_rng(seed))
  )


def _excitations(pattern):
  return chain.excitation_count(pattern)


class GeneratorBasisTest(parameterized.TestCase):
  def test_count_and_pairs(self):
    basis = restorer.build_generators()
    self.assertLen(basis, 42)
    self.assertLen(restorer.GENERATOR_PAIRS, 21)
    self.assertEqual(restorer.generator_pair_count(4), 21)
    self.assertEqual(restorer.generator_pair_count(3), 6)

  def test_first_pair_connects_single_excitations(self):
    gamma = restorer.build_generators().generator(1, 2, 3)
    self.assertEqual(gamma[0b0001, 0b0010], 1)
    self.assertEqual(gamma[0b0010, 0b0001], 1)
    self.assertEqual(np.count_nonzero(gamma), 2)

  def test_second_family_sign(self):
    gamma = restorer.build_generators().generator(2, 4, 6)
    self.assertEqual(gamma[0b0011, 0b0101], -1j)
    self.assertEqual(gamma[0b0101, 0b0011], 1j)

  def test_generators_conserve_excitations(self):
    iz = restorer.total_iz()
    for gamma in restorer.build_generators().generators:
      np.testing.assert_array_equal(gamma, gamma.conj().T)
      np.testing.assert_array_equal(gamma @ iz - iz @ gamma, 0)
      for pattern in range(16):
        if pattern == 0 or _excitations(pattern) >= 3:
          self.assertFalse(np.any(gamma[pattern]))
          self.assertFalse(np.any(gamma[:, pattern]))

  def test_pair_count_rejects_tiny_receiver(self):
    with self.assertRaises(ValueError):
      restorer.generator_pair_count(1)


class PhiParamsTest(absltest.TestCase):
  def test_rejects_wrong_length(self):
    with self.assertRaises(ValueError):
      restorer.PhiParams((0.0, ) * 41)

  def test_rejects_non_finite(self):
    with self.assertRaises(ValueError):
      restorer.PhiParams((float('nan'), ) + (0.0, ) * 41)

  def test_from_mapping(self):
    phi = restorer.PhiParams.from_mapping({(1, 4, 6): -0.0758})
    self.assertEqual(phi.get(1, 4, 6), -0.0758)
    self.assertEqual(phi.get(2, 4, 6), 0.0)
    with self.assertRaises(ValueError):
      restorer.PhiParams.from_mapping({(1, 1, 2): 0.1})

  def test_save_and_load(self):
    phi = restorer.PhiParams.uniform(np.random.default_rng(0))
    path = os.path.join(self.create_tempdir().full_path, 'phi.json')
    phi.save(path)
    self.assertEqual(restorer.load_phi(path), phi)
    self.assertLen(phi.to_dict(), 42)


class BuildV0Test(parameterized.TestCase):
  def test_zero_angles_give_identity(self):
    v0 = restorer.build_v0(restorer.PhiParams.zeros())
    np.testing.assert_array_equal(v0.matrix, np.eye(16))

  def test_single_rotation(self):
    theta = 0.7
    v0 = restorer.build_v0(restorer.PhiParams.from_mapping({(1, 2, 3): theta}))
    expected = np.eye(16, dtype=complex)
    expected[1, 1] = expected[2, 2] = math.cos(theta)
    expected[1, 2] = expected[2, 1] = 1j * math.sin(theta)
    np.testing.assert_allclose(v0.matrix, expected, atol=1e-14)

  @parameterized.parameters((1, 4, 11), (2, 4, 11), (2, 2, 8))
  def test_single_rotation_matches_expm(self, family, i, j):
    theta = 1.3
    v0 = restorer.build_v0(
        restorer.PhiParams.from_mapping({(family, i, j): theta})
    )
    gamma = restorer.build_generators().generator(family, i, j)
    np.testing.assert_allclose(
        v0.matrix, scipy.linalg.expm(1j * theta * gamma), atol=1e-14
    )

  def test_product_order(self):
    phi = restorer.PhiParams.uniform(np.random.default_rng(9))
    basis = restorer.build_generators()
    expected = np.eye(16, dtype=complex)
    for i, j in restorer.GENERATOR_PAIRS:
      expected = (
          scipy.linalg.expm(1j * phi.get(2, i, j) * basis.generator(2, i, j))
          @ scipy.linalg.expm(1j * phi.get(1, i, j) * basis.generator(1, i, j))
          @ expected
      )
    np.testing.assert_allclose(
        restorer.build_v0(phi).matrix, expected, atol=1e-12
    )

  @settings(max_examples=100, deadline=None)
  @given(_SEEDS)
  def test_unitary_and_conserves_excitations(self, seed):
    v0 = _random_v0(seed)
    self.assertLessEqual(v0.unitarity_error(), 1e-12)
    self.assertLessEqual(v0.iz_commutator_error(), 1e-12)
    for pattern in range(16):
      if pattern == 0 or _excitations(pattern) >= 3:
        expected = np.zeros(16)
        expected[pattern] = 1.0
        np.testing.assert_array_equal(v0.matrix[pattern], expected)
        np.testing.assert_array_equal(v0.matrix[:, pattern], expected)


class TotalEvolutionTest(parameterized.TestCase):
  def setUp(self):
    super().setUp()
    self.prop = dynamics.build_propagator(_SPEC)

  def test_ground_state_amplitude_is_one(self):
    amplitude = restorer.w_element(self.prop, _random_v0(1), 12.0, 0, 0)
    self.assertAlmostEqual(complex(amplitude), 1.0, places=14)

  def test_zero_angles_reduce_to_propagator(self):
    v0 = restorer.build_v0(restorer.PhiParams.zeros())
    bra, ket = dynamics.transfer_patterns(6)
    self.assertAlmostEqual(
        complex(restorer.w_element(self.prop, v0, 3.1, bra, ket)),
        complex(dynamics.propagator_element(self.prop, 3.1, bra, ket)),
        places=14,
    )

  def test_cross_sector_is_structural_zero(self):
    amplitude = restorer.w_element(
        self.prop, _random_v0(2), 1.0, 0b000011, 0b100000
    )
    self.assertTrue(amplitude.structurally_zero)

  def test_rejects_three_excitations(self):
    with self.assertRaises(errors.UnsupportedSectorError):
      restorer.w_element(self.prop, _random_v0(2), 1.0, 0b000111, 0b111000)

  def test_matches_full_matrix_product(self):
    rng = np.random.default_rng(77)
    v0 = _random_v0(77)
    t = 2.9
    full = np.kron(np.eye(4), v0.matrix) @ scipy.linalg.expm(
        -1j * t * chain.full_space_hamiltonian(chain.build_couplings(_SPEC))
    )
    for k in (1, 2):
      states = self.prop.bases[k].states
      for _ in range(10):
        bra, ket = rng.choice(states, size=2)
        self.assertAlmostEqual(
            complex(restorer.w_element(self.prop, v0, t, int(bra), int(ket))),
            full[bra, ket],
            places=10,
        )

  def test_receiver_state_matches_full_space_oracle(self):
    rng = np.random.default_rng(5)
    for seed in range(20):
      rho = qstate.random_state(rng)
      t = rng.uniform(0.0, 15.0)
      v0 = _random_v0(seed)
      np.testing.assert_allclose(
          qstate.receiver_state(
              rho, restorer.TotalEvolution(self.prop, v0), t
          ).matrix,
          brute_force.brute_force_receiver_state(rho, _SPEC, t, v0).matrix,
          atol=1e-10,
      )

  @parameterized.parameters(-2, -1, 0, 1, 2)
  def test_coherence_orders_do_not_mix(self, k):
    rng = np.random.default_rng(10 + k)
    for seed in range(10):
      evolution = restorer.TotalEvolution(self.prop, _random_v0(seed))
      component = qstate.mq_decompose(qstate.random_state(rng))[k]
      output = qstate.receiver_map(component, evolution, rng.uniform(0, 20))
      leakage = np.where(qstate.ORDER_OF_ELEMENT == k, 0, output)
      self.assertLessEqual(np.max(np.abs(leakage)), 1e-12)


class ScaleFactorsTest(parameterized.TestCase):
  def setUp(self):
    super().setUp()
    self.prop = dynamics.build_propagator(
        chain.ChainSpec(n_nodes=8, boundary_ratio_1=0.4, boundary_ratio_2=0.6)
    )

  def test_swapped_residual_without_receiver_unitary(self):
    v0 = restorer.build_v0(restorer.PhiParams.zeros())
    residuals = restorer.constraint_residuals(self.prop, v0, 5.0)
    expected = dynamics.propagator_element(
        self.prop, 5.0, chain.pattern_from_nodes(8, (8, )),
        chain.pattern_from_nodes(8, (1, ))
    )
    self.assertAlmostEqual(residuals.swapped[0], complex(expected), places=14)
    self.assertGreater(abs(residuals.swapped[0]), 1e-6)

  def test_no_transfer_at_time_zero(self):
    v0 = restorer.build_v0(restorer.PhiParams.zeros())
    factors = restorer.scale_factors(self.prop, v0, 0.0)
    np.testing.assert_allclose(factors.magnitudes(), 0.0, atol=1e-13)

  @settings(max_examples=30, deadline=None)
  @given(_SEEDS, st.floats(min_value=0.0, max_value=40.0))
  def test_bounds_and_consistency(self, seed, t):
    v0 = _random_v0(seed)
    factors = restorer.scale_factors(self.prop, v0, t)
    residuals = restorer.constraint_residuals(self.prop, v0, t)
    self.assertLessEqual(np.max(factors.magnitudes()), 1.0 + 1e-12)
    self.assertLessEqual(max(factors.lambda0_diag), 1.0 + 1e-12)
    self.assertLessEqual(max(factors.tilde0), 1.0 + 1e-12)
    self.assertGreaterEqual(min(factors.tilde0), 0.0)
    self.assertLessEqual(residuals.max_abs(), 1.0 + 1e-12)
    self.assertAlmostEqual(
        abs(factors.lambda0_flip)**2,
        factors.lambda0_diag[0] * factors.lambda0_diag[1],
        places=12,
    )

  def test_second_order_factor_matches_simulation(self):
    rho = np.diag([0.5, 0, 0, 0.5]).astype(complex)
    rho[0, 3] = 0.3 - 0.2j
    rho[3, 0] = 0.3 + 0.2j
    sender = qstate.TwoQubitState(rho)
    for seed in range(5):
      v0 = _random_v0(seed)
      evolution = restorer.TotalEvolution(self.prop, v0)
      receiver = qstate.receiver_state(sender, evolution, 6.5)
      factors = restorer.scale_factors(self.prop, v0, 6.5)
      self.assertAlmostEqual(
          receiver[0, 3] / sender[0, 3], factors.lambda2, places=10
      )

  def test_table_row(self):
    factors = restorer.scale_factors(self.prop, _random_v0(3), 9.0)
    row = restorer.scale_factor_table_row(factors)
    self.assertLen(row, 6)
    np.testing.assert_allclose([m for m, _ in row], factors.magnitudes())
    self.assertEqual(factors.by_target('L2'), factors.lambda2)

  def test_json_round_trip(self):
    factors = restorer.scale_factors(self.prop, _random_v0(4), 9.0)
    self.assertEqual(
        restorer.ScaleFactors.from_json(factors.to_json()), factors
    )


class VerifyRestoringTest(absltest.TestCase):
  def setUp(self):
    super().setUp()
    self.prop = dynamics.build_propagator(
        chain.ChainSpec(n_nodes=7, boundary_ratio_1=0.7)
    )

  def test_ground_state_has_no_discrepancy(self):
    report = restorer.verify_restoring(
        qstate.pure_state([1, 0, 0, 0]), self.prop, _random_v0(0), 4.0
    )
    self.assertLessEqual(report.max_discrepancy, 1e-14)
    self.assertLessEqual(report.diagonal_max_discrepancy, 1e-14)

  def test_residual_terms_make_prediction_exact(self):
    rng = np.random.default_rng(21)
    for seed in range(10):
      report = restorer.verify_restoring(
          qstate.random_state(rng), self.prop, _random_v0(seed),
          rng.uniform(0, 20)
      )
      self.assertLessEqual(report.model_error, 1e-10)
      self.assertLessEqual(report.normalization_defect, 1e-12)

  def test_report_serializes(self):
    report = restorer.verify_restoring(
        qstate.random_state(np.random.default_rng(1)), self.prop,
        _random_v0(1), 2.0
    )
    self.assertIn('max_discrepancy', report.to_dict())
    self.assertIn('re', report.to_dict()['simulated'])


class DiagonalRestoringTest(parameterized.TestCase):
  @parameterized.parameters((6, 6), (7, 8), (42, 78))
  def test_equation_counts(self, n_nodes, complex_equations):
    counts = restorer.diagonal_infeasibility_report(n_nodes)
    self.assertEqual(counts.complex_equations, complex_equations)
    self.assertEqual(counts.real_equations, 2 * complex_equations)
    self.assertEqual(counts.parameters, 10)
    self.assertFalse(counts.solvable)

  def test_rejects_short_chain(self):
    with self.assertRaises(errors.InvalidChainSpecError):
      restorer.diagonal_infeasibility_report(5)

  def test_complete_residuals(self):
    prop = dynamics.build_propagator(chain.ChainSpec(n_nodes=9))
    v0 = _random_v0(6)
    values = restorer.complete_restoring_residuals(prop, v0, 7.0)
    self.assertLen(values, 2 + 2 * (9 - 4))
    residuals = restorer.constraint_residuals(prop, v0, 7.0)
    np.testing.assert_allclose(values[:2], residuals.swapped, atol=1e-15)


if __name__ == '__main__':
  absltest.main()
else:
  # Manually pass and parse flags to prevent UnparsedFlagAccessError when using
  # pytest or unittest as a runner.
  flags.FLAGS(['--test_tmpdir'])
