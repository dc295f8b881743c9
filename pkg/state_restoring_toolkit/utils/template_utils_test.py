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
"""Tests for state_restoring_toolkit.utils.template_utils."""

import os
import tempfile

from absl.testing import absltest, parameterized

from state_restoring_toolkit.utils import io_utils, template_utils


class TemplateUtilsTest(parameterized.TestCase):
  def test_render(self):
    with tempfile.TemporaryDirectory() as test_dir:
      template_path = os.path.join(test_dir, 'report.txt.jinja')
      io_utils.write_file(template_path, 'N = {{ n_nodes }}, t = {{ t }}')
      output_path = os.path.join(test_dir, 'report.txt')
      content = template_utils.render(
          template_path=template_path, output_path=output_path,
          template_variables={'n_nodes': 42, 't': 58.9826}
      )
      self.assertEqual(content, io_utils.read_file(output_path))
      self.assertEqual(content, 'N = 42, t = 58.9826')

  def test_render_without_output(self):
    with tempfile.TemporaryDirectory() as test_dir:
      template_path = os.path.join(test_dir, 'escape.html.jinja')
      io_utils.write_file(template_path, '{{ label }}')
      content = template_utils.render(
          template_path, template_variables={'label': '<b>'}
      )
      self.assertEqual(content, '&lt;b&gt;')
      self.assertEqual(os.listdir(test_dir), ['escape.html.jinja'])

  def test_render_number_filters(self):
    with tempfile.TemporaryDirectory() as test_dir:
      template_path = os.path.join(test_dir, 'numbers.md.jinja')
      io_utils.write_file(
          template_path, '{{ p | fixed }} {{ r | sci }} {{ r | sci(1) }}'
      )
      content = template_utils.render(
          template_path, template_variables={'p': 0.43718, 'r': 2.5e-11}
      )
      self.assertEqual(content, '0.4372 2.500e-11 2.5e-11')

  @parameterized.parameters('md', 'html')
  def test_default_template_exists(self, output_format):
    self.assertTrue(template_utils.default_template(output_format).is_file())
    self.assertTrue(
        str(template_utils.default_template(output_format)).endswith(
            template_utils.template_file(output_format)
        )
    )

  def test_unknown_format(self):
    with self.assertRaisesRegex(ValueError, 'Unsupported report format'):
      template_utils.default_template('pdf')


if __name__ == '__main__':
  absltest.main()
