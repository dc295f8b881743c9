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
"""Tests for state_restoring_toolkit.utils.json_utils."""

import jsonschema
from absl.testing import absltest, parameterized

from state_restoring_toolkit.utils import json_utils

_IDENTITY_RE = [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]]
_ZEROS = [[0.0] * 4 for _ in range(4)]


class JsonUtilsTest(parameterized.TestCase):
  def test_validate_chain_spec(self):
    json_utils.validate_json_schema(
        {
            'n_nodes': 42,
            'base_coupling': 1.0,
            'boundary_ratio_1': 0.3005,
            'boundary_ratio_2': 0.5311,
            'coupling_model': 'NearestNeighbor',
        }, 'chain_spec'
    )

  @parameterized.named_parameters(
      ('too_short', {
          'n_nodes': 5
      }),
      ('non_positive_ratio', {
          'n_nodes': 8,
          'boundary_ratio_1': 0.0
      }),
      ('unknown_model', {
          'n_nodes': 8,
          'coupling_model': 'Ising'
      }),
      ('unknown_key', {
          'n_nodes': 8,
          'magnetic_field': 1.0
      }),
  )
  def test_invalid_chain_spec(self, json_dict):
    with self.assertRaises(jsonschema.ValidationError):
      json_utils.validate_json_schema(json_dict, 'chain_spec')

  def test_validate_density_matrix(self):
    json_utils.validate_json_schema({
        're': _IDENTITY_RE,
        'im': _ZEROS
    }, 'density_matrix')

  def test_invalid_density_matrix_shape(self):
    with self.assertRaises(jsonschema.ValidationError):
      json_utils.validate_json_schema({
          're': _IDENTITY_RE[:3],
          'im': _ZEROS
      }, 'density_matrix')

  def test_phi_params_requires_42_records(self):
    records = [{'family': 1, 'i': 2, 'j': 3, 'value': 0.0}] * 41
    with self.assertRaises(jsonschema.ValidationError):
      json_utils.validate_json_schema(records, 'phi_params')

  def test_unknown_schema_name(self):
    with self.assertRaises(ValueError):
      json_utils.validate_json_schema({}, 'spin_lattice')

  def test_unknown_schema_version(self):
    with self.assertRaises(ValueError):
      json_utils.validate_json_schema({
          'n_nodes': 8,
          'schema_version': '9.9.9'
      }, 'chain_spec')

  def test_get_latest_schema_version(self):
    self.assertEqual(json_utils.get_latest_schema_version(), '0.0.1')


if __name__ == '__main__':
  absltest.main()
