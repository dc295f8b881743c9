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
"""Util functions for the toolkit's JSON schemas."""

import json
import os
import pkgutil
from typing import Any, Dict, Optional, Union

import jsonschema

_SCHEMA_NAMES = frozenset((
    'chain_spec',
    'density_matrix',
    'optimization_task',
    'phi_params',
))
_SCHEMA_VERSIONS = frozenset(('0.0.1', ))
_LATEST_SCHEMA_VERSION = '0.0.1'

SCHEMA_VERSION_STRING = 'schema_version'


def _find_json_schema(
    schema_name: str, schema_version: Optional[str] = None
) -> Dict[str, Any]:
  """Returns a bundled JSON schema in dictionary format.

  Args:
    schema_name: The name of the schema, e.g. 'chain_spec'.
    schema_version: The version of the schema to fetch. By default, use the
      latest version.

  Returns:
    JSON schema as a dictionary.

  Raises:
    ValueError: If `schema_name` or `schema_version` does not correspond to a
    bundled schema.
  """
  if schema_name not in _SCHEMA_NAMES:
    raise ValueError(
        f'Unknown schema {schema_name!r}. Known schemas: '
        f'{", ".join(sorted(_SCHEMA_NAMES))}'
    )
  if not schema_version:
    schema_version = _LATEST_SCHEMA_VERSION
  if schema_version not in _SCHEMA_VERSIONS:
    raise ValueError(
        'Cannot find schema version that matches the version of the given '
        'file. Found Versions: {}. Given Version: {}'.format(
            ', '.join(sorted(_SCHEMA_VERSIONS)), schema_version
        )
    )

  schema_file = os.path.join(
      'schema', 'v' + schema_version, f'{schema_name}.schema.json'
  )
  json_file = pkgutil.get_data('state_restoring_toolkit', schema_file)
  return json.loads(json_file)


def validate_json_schema(
    json_value: Union[Dict[str, Any], list],
    schema_name: str,
    schema_version: Optional[str] = None,
) -> Dict[str, Any]:
  """Validates a JSON value against one of the bundled schemas.

  If schema_version is not provided, the `schema_version` key of the value is
  used, falling back to the latest schema version.

  Args:
    json_value: A dictionary (or, for angle lists, a list) to validate.
    schema_name: The name of the schema, e.g. 'chain_spec'.
    schema_version: The version of the schema. Optional field; if omitted,
      defers to the value's own version or the latest schema version.

  Returns:
    The schema used for validation.

  Raises:
    ValueError: If the schema cannot be found.
    ValidationError: If `json_value` does not follow the schema.
  """
  if not schema_version and isinstance(json_value, dict):
    schema_version = json_value.get(SCHEMA_VERSION_STRING)
  schema = _find_json_schema(schema_name, schema_version)
  jsonschema.validate(json_value, schema)
  return schema


def get_latest_schema_version() -> str:
  """Returns the most recent schema version."""
  return _LATEST_SCHEMA_VERSION
