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
"""Package dependencies for state-restoring-toolkit."""

import importlib.util
from typing import Dict, List

_VERSIONS = {
    'absl': 'absl-py>=1.0,<3',
    'attrs': 'attrs>=21.3.0',
    'hypothesis': 'hypothesis>=6.0',
    'importlib_resources': 'importlib-resources>=1.3.0; python_version<"3.9"',
    'isort': 'isort',
    'jinja2': 'jinja2>=3.1,<3.2',
    'joblib': 'joblib>=1.1',
    'jsonschema': 'jsonschema>=3.2.0,<5',
    'matplotlib': 'matplotlib>=3.2.0,<4',
    'numpy': 'numpy>=1.21,<3',
    'pre-commit': 'pre-commit',
    'pylint': 'pylint',
    'pytest': 'pytest',
    'scipy': 'scipy>=1.7,<2',
    'yapf': 'yapf',
}

_REQUIRED_DEPS = [
    'absl',  # command line flags and app runner
    'attrs',  # plot data containers
    'importlib_resources',  # reading resource files, e.g. report templates
    'jinja2',  # rendering restoring reports
    'jsonschema',  # validating config and result files
    'matplotlib',  # plotting
    'numpy',  # linear algebra
    'scipy',  # eigensolvers, matrix exponentials and optimizers
]

_PARALLEL_EXTRA_DEPS = [
    # Required for running optimizer restarts on several processes.
    'joblib',
]

_TEST_EXTRA_DEPS = [
    'hypothesis', 'isort', 'pre-commit', 'pylint', 'pytest', 'yapf'
]

PARALLEL_EXTRA_IMPORT_ERROR_MSG = """
This functionality requires `parallel` extra dependencies but they were not
found in your environment. You can install them with:
```
pip install state-restoring-toolkit[parallel]
```
"""


def _make_deps_list(package_names: List[str]) -> List[str]:
  """Returns a list of dependencies with their constraints.

  Raises: ValueError if a `package_name` is not in the list of known
    dependencies.
  """
  deps = []
  for package_name in package_names:
    if package_name not in _VERSIONS:
      raise ValueError(
          f'Package {package_name} is not in the list of known dependencies: '
          f'{_VERSIONS.keys()}'
      )
    deps.append(_VERSIONS[package_name])
  return deps


def make_required_install_packages() -> List[str]:
  """Returns the list of required packages."""
  return _make_deps_list(_REQUIRED_DEPS)


def make_extra_packages_parallel() -> List[str]:
  """Returns the list of packages needed for parallel restarts."""
  return _make_deps_list(_PARALLEL_EXTRA_DEPS)


def has_parallel_extra_deps() -> bool:
  """Returns True if all parallel extra dependencies are installed."""
  return all(importlib.util.find_spec(name) for name in _PARALLEL_EXTRA_DEPS)


def ensure_parallel_extra_deps_installed():
  """Raises ImportError if parallel extra dependencies are not installed."""
  if not has_parallel_extra_deps():
    raise ImportError(PARALLEL_EXTRA_IMPORT_ERROR_MSG)


def make_extra_packages_test() -> List[str]:
  """Returns the list of packages needed for running tests."""
  return _make_deps_list(_TEST_EXTRA_DEPS)


def make_extra_packages_all() -> List[str]:
  """Returns the list of all optional packages."""
  return [
      *make_extra_packages_parallel(),
      *make_extra_packages_test(),
  ]


def make_required_extra_packages() -> Dict[str, List[str]]:
  """Returns the dict of required extra packages."""
  return {
      'parallel': make_extra_packages_parallel(),
      'test': make_extra_packages_test(),
      'all': make_extra_packages_all(),
  }
