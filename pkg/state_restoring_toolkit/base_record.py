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
"""BaseRecord.

This class serves as a basic shared API between all serializable data classes
of the toolkit (chain specs, optimization tasks, results and reports).
"""

import abc
import dataclasses
import enum
import json as json_lib
import os
import typing
from pathlib import Path
from typing import Any, ClassVar, Dict, Optional, Type, TypeVar, Union

import numpy as np

from state_restoring_toolkit.utils import io_utils, json_utils

T = TypeVar('T', bound='BaseRecord')

_SUPPORTED_SAVE_FORMATS = ('.json', )


def _ensure_is_supported_save_format(suffix: str):
  """Raises ValueError if a file suffix is not a supported save format."""
  if suffix not in _SUPPORTED_SAVE_FORMATS:
    raise ValueError(
        f'Unsupported file format {repr(suffix)}. Supported formats: '
        f'{", ".join(repr(fmt) for fmt in _SUPPORTED_SAVE_FORMATS)}'
    )


def to_jsonable(value: Any) -> Any:
  """Converts numpy values, complex numbers and enums to JSON types.

  Complex scalars and complex arrays are written as {'re': ..., 'im': ...}.
  """
  if isinstance(value, enum.Enum):
    return value.value
  if isinstance(value, np.ndarray):
    if np.iscomplexobj(value):
      return {'re': value.real.tolist(), 'im': value.imag.tolist()}
    return value.tolist()
  if isinstance(value, (complex, np.complexfloating)):
    return {'re': float(value.real), 'im': float(value.imag)}
  if isinstance(value, np.generic):
    return value.item()
  if isinstance(value, (list, tuple)):
    return [to_jsonable(v) for v in value]
  if isinstance(value, dict):
    return {str(k): to_jsonable(v) for k, v in value.items()}
  return value


def from_jsonable_complex(value: Any) -> Any:
  """Inverse of `to_jsonable` for complex scalars and arrays."""
  if isinstance(value, dict) and set(value) == {'re', 'im'}:
    re, im = value['re'], value['im']
    if isinstance(re, list):
      return np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
    return complex(re, im)
  return value


def _json_dict_factory(items) -> Dict[str, Any]:
  return {k: to_jsonable(v) for k, v in items if not k.startswith('_')}


class BaseRecord(abc.ABC):
  """Serializable record base class.

  All the records of the toolkit are dataclasses inheriting this class. It
  provides `to_dict`, `to_json`, `from_json` and `save`. A child class may set
  `_schema_name` to have its JSON validated against a bundled schema on load,
  and may override `_from_dict` when its fields need special parsing.
  """

  _schema_name: ClassVar[Optional[str]] = None

  def to_dict(self) -> Dict[str, Any]:
    """Converts this record to a dictionary of JSON types."""
    return dataclasses.asdict(self, dict_factory=_json_dict_factory)

  def to_json(self) -> str:
    """Converts this record to json."""
    return json_lib.dumps(self.to_dict(), indent=2)

  @classmethod
  def _from_dict(cls: Type[T], json_dict: Dict[str, Any]) -> T:
    """Builds a record from a dictionary, converting enums and tuples."""
    hints = typing.get_type_hints(cls)
    kwargs = {}
    field_names = {f.name for f in dataclasses.fields(cls)}
    for key, value in json_dict.items():
      if key == json_utils.SCHEMA_VERSION_STRING:
        continue
      if key not in field_names:
        raise ValueError(f'{cls.__name__} has no such field named "{key}".')
      hint = hints[key]
      if typing.get_origin(hint) is Union and value is not None:
        hint = next(a for a in typing.get_args(hint) if a is not type(None))
      origin = typing.get_origin(hint)
      if isinstance(hint, type) and issubclass(hint, enum.Enum):
        value = hint(value)
      elif origin is tuple:
        value = tuple(from_jsonable_complex(v) for v in value)
      else:
        value = from_jsonable_complex(value)
      kwargs[key] = value
    return cls(**kwargs)

  @classmethod
  def from_json(cls: Type[T], json: Union[Dict[str, Any], str]) -> T:
    """Constructs a record from JSON.

    Args:
      json: A JSON object, as a dictionary or a string.

    Raises:
      JSONDecodeError: If `json` is not a valid JSON string.
      ValidationError: If `json` does not follow the record's schema.
      ValueError: If `json` contains a key that is not a record field.
    """
    if isinstance(json, str):
      json = json_lib.loads(json)
    if cls._schema_name:
      json_utils.validate_json_schema(json, cls._schema_name)
    return cls._from_dict(json)

  @classmethod
  def load(cls: Type[T], path: Union[Path, str]) -> T:
    """Loads a record from a JSON file.

    Raises:
      ValueError: If the file suffix is not a supported save format.
      FileNotFoundError: If the file does not exist.
    """
    _ensure_is_supported_save_format(io_utils.suffix(path))
    return cls.from_json(io_utils.read_file(path))

  def save(self, path: Union[Path, str], overwrite: Optional[bool] = False):
    """Saves the record to a JSON file.

    Args:
      path: The path where to save the record. Only '.json' is supported.
      overwrite: Whether to overwrite the file if it already exists.
        Defaults to False.

    Raises:
      ValueError: If the file suffix is not a supported save format or if the
        file already exists and `overwrite` is False.
    """
    _ensure_is_supported_save_format(io_utils.suffix(path))
    if not overwrite and os.path.exists(path):
      raise ValueError(
          f'File {path} already exists. Set `overwrite=True` to overwrite.'
      )
    io_utils.write_file(path, self.to_json())
