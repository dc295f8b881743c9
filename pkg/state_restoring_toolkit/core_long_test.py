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
"""Long-running end-to-end check of the published receiver angles."""

import json
import os
from unittest import mock

from absl import flags
from absl.testing import absltest

from state_restoring_toolkit import core, dynamics, optimizer
from state_restoring_toolkit.utils import io_utils


class VerifyPublishedTest(absltest.TestCase):
  def test_published_angles(self):
    output_dir = self.create_tempdir().full_path
    toolkit = core.RestoringToolkit(output_dir)
    check = toolkit.verify_published(n_states=3)
    self.assertTrue(check.passed)
    self.assertLessEqual(check.residual_max, core.PUBLISHED_RESIDUAL_TOL)
    self.assertLessEqual(check.model_error, 1e-10)
    self.assertAlmostEqual(check.transfer.value, 0.4372, delta=5e-4)
    self.assertLessEqual(check.transfer_deviation, core.PUBLISHED_TRANSFER_TOL)
    self.assertLessEqual(check.t_max_deviation, core.PUBLISHED_TIME_TOL)
    content = json.loads(
        io_utils.read_file(os.path.join(output_dir, 'verify_published.json'))
    )
    self.assertTrue(content['result']['passed'])
    self.assertEqual(content['metadata']['t'], 58.9826)
    self.assertIn('Published angles', toolkit.export_report('md'))

  def test_wrong_transfer_optimum_fails(self):
    toolkit = core.RestoringToolkit(self.create_tempdir().full_path)
    reference = {
        'optimized': dynamics.TransferOptimum(t_max=54.0372, value=0.5380)
    }
    with mock.patch.object(
        optimizer, 'published_transfer', return_value=reference
    ):
      check = toolkit.verify_published(n_states=1)
    self.assertLessEqual(check.residual_max, core.PUBLISHED_RESIDUAL_TOL)
    self.assertFalse(check.passed)


if __name__ == '__main__':
  absltest.main()
else:
  # Manually pass and parse flags to prevent UnparsedFlagAccessError when using
  # pytest or unittest as a runner.
  flags.FLAGS(['--test_tmpdir'])
