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
"""Utilities for rendering restoring reports.

Reports are Jinja templates fed with the JSON form of the toolkit results.
Two filters keep number formatting out of the templates: `fixed` for
probabilities, factors and times, `sci` for residuals and discrepancies.
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

try:
  from importlib.resources import files
except ImportError:
  from importlib_resources import files

import jinja2

from state_restoring_toolkit.utils import io_utils

REPORT_FORMATS = ('html', 'md')


def fixed(value: float, digits: int = 4) -> str:
  return f'{float(value):.{digits}f}'


def sci(value: float, digits: int = 3) -> str:
  return f'{float(value):.{digits}e}'


REPORT_FILTERS = {'fixed': fixed, 'sci': sci}


def check_report_format(output_format: str) -> None:
  """Raises ValueError unless `output_format` is one of REPORT_FORMATS."""
  if output_format not in REPORT_FORMATS:
    raise ValueError(
        f'Unsupported report format {output_format!r}; expected one of '
        f'{sorted(REPORT_FORMATS)}.'
    )


def template_file(output_format: str) -> str:
  """Returns the default template path relative to the template directory."""
  check_report_format(output_format)
  return os.path.join(
      output_format, f'default_template.{output_format}.jinja'
  )


def default_template(output_format: str) -> Path:
  """Returns the packaged default template of a report format."""
  check_report_format(output_format)
  return files('state_restoring_toolkit').joinpath(
      'template', output_format, f'default_template.{output_format}.jinja'
  )


def render(
    template_path: Union[Path, str],
    output_path: Optional[Union[Path, str]] = None,
    template_variables: Optional[Dict[str, Any]] = None,
) -> str:
  """Renders a report template and returns the content as a string.

  Args:
    template_path: The path to a Jinja template file. The `fixed` and `sci`
      filters are available to it.
    output_path: The path to write the rendered report to. If not provided,
      the report is not written. An existing file is overwritten.
    template_variables: The toolkit results and metadata, as JSON types.
  """
  template_variables = template_variables or {}
  template_dir = os.path.dirname(template_path)
  template_name = os.path.basename(template_path)
  jinja_env = jinja2.Environment(
      loader=jinja2.FileSystemLoader(template_dir),
      autoescape=True,
      auto_reload=True,
      cache_size=0,
  )
  jinja_env.filters.update(REPORT_FILTERS)

  template = jinja_env.get_template(template_name)
  content = template.render(template_variables)
  if output_path:
    io_utils.write_file(output_path, content)

  return content
