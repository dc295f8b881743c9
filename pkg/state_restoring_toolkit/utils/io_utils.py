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
"""Utilities for reading and writing files."""

import csv
import io
import json
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence, Union


def suffix(path: Union[str, Path]) -> str:
  """Returns the suffix (extension) of a path."""
  return os.path.splitext(path)[1]


def write_file(
    path: Union[str, Path], content: Union[str, bytes], mode: str = 'w'
):
  """Writes content to a file, creating any necessary directories.

  Args:
    path: The file path to write to
    content: The content to write.
    mode: The mode to open the file in. Defaults to 'w'.

  Raises:
    ValueError: If an invalid mode is provided.
  """
  directory = os.path.dirname(path)
  if directory:
    os.makedirs(directory, exist_ok=True)
  with open(path, mode) as f:
    f.write(content)


def read_file(path: Union[str, Path], mode: str = 'r') -> Union[str, bytes]:
  """Reads a file and returns its content.

  Args:
    path: The file path to read from.
    mode: The mode to open the file in. Defaults to 'r'.

  Raises:
    FileNotFoundError: If the file does not exist.
    ValueError: If an invalid mode is provided.
  """
  if not os.path.exists(path):
    raise FileNotFoundError(f'File {path} does not exist.')

  with open(path, mode) as f:
    return f.read()


def write_json_file(path: Union[str, Path], json_dict: Dict[str, Any]):
  """Writes a dictionary as indented JSON, creating any directories."""
  write_file(path, json.dumps(json_dict, indent=2))


def read_json_file(path: Union[str, Path]) -> Dict[str, Any]:
  """Reads a JSON file into a dictionary.

  Raises:
    FileNotFoundError: If the file does not exist.
    JSONDecodeError: If the file is not valid JSON.
  """
  return json.loads(read_file(path))


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
  """Formats a header and rows as CSV text."""
  buf = io.StringIO()
  writer = csv.writer(buf, lineterminator='\n')
  writer.writerow(header)
  writer.writerows(rows)
  return buf.getvalue()


def write_csv_file(
    path: Union[str, Path], header: Sequence[str],
    rows: Iterable[Sequence[Any]]
):
  """Writes a header and rows to a CSV file, creating any directories."""
  write_file(path, to_csv(header, rows))
