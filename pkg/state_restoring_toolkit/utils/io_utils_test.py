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
"""Tests for state_restoring_toolkit.utils.io_utils."""

import os
import tempfile

from absl.testing import absltest

from state_restoring_toolkit.utils import io_utils


class IoUtilsTest(absltest.TestCase):
  def test_suffix(self):
    self.assertEqual('.json', io_utils.suffix('test.json'))
    self.assertEqual('.gz', io_utils.suffix('test.json.gz'))
    self.assertEqual('', io_utils.suffix('test'))
    self.assertEqual('', io_utils.suffix('.json'))

  def test_write_and_read_file(self):
    with tempfile.TemporaryDirectory() as test_dir:
      path = os.path.join(test_dir, 'nested', 'test.txt')
      content = 'This is a sentence.'
      io_utils.write_file(path, content)
      read_content = io_utils.read_file(path)
      self.assertEqual(content, read_content)

  def test_read_missing_file_raises(self):
    with self.assertRaises(FileNotFoundError):
      io_utils.read_file('/nonexistent/dir/missing.json')

  def test_write_and_read_json(self):
    with tempfile.TemporaryDirectory() as test_dir:
      path = os.path.join(test_dir, 'result.json')
      io_utils.write_json_file(path, {'t_max': 46.0245, 'ratios': [1, 1]})
      self.assertEqual(
          io_utils.read_json_file(path), {
              't_max': 46.0245,
              'ratios': [1, 1]
          }
      )

  def test_to_csv(self):
    text = io_utils.to_csv(['t', 'probability'], [(0.0, 0.0), (0.5, 0.25)])
    self.assertEqual(text, 't,probability\n0.0,0.0\n0.5,0.25\n')


if __name__ == '__main__':
  absltest.main()
