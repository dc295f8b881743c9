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
"""Utilities for generating report plots."""

import base64
import io
import logging
from typing import Optional, Sequence, Union

import attr
import matplotlib
import matplotlib.pyplot as plt
import numpy as np

from state_restoring_toolkit import dynamics, restorer

_COLOR_PALETTE = {
    'material_cyan_700': '#129EAF',  # default
    'material_indigo_400': '#5C6BC0',  # transfer scan
    'material_purple_500': '#A142F4'  # scale factors
}


@attr.s(auto_attribs=True)
class Graph():
  """Report graph."""

  # Necessary data to draw a graph.
  x: Optional[Sequence[Union[str, int, float]]] = None
  y: Optional[Sequence[Union[str, int, float]]] = None
  xlabel: Optional[str] = None
  ylabel: Optional[str] = None
  title: Optional[str] = None
  name: Optional[str] = None
  color: str = _COLOR_PALETTE['material_cyan_700']
  # Optional vertical marker, e.g. the registration time.
  marker: Optional[float] = None

  # Graph generated from the data above.
  figure: Optional[matplotlib.figure.Figure] = None
  base64str: Optional[str] = None


def draw_line(graph: Graph) -> Optional[Graph]:
  """Draws a line plot of y against x.

  Returns:
    The graph with its figure set, or None if plotting raises TypeError or
    ValueError given the raw data.
  """
  if not graph:
    return None
  try:
    figure, ax = plt.subplots()
    ax.plot(graph.x, graph.y, color=graph.color)
    if graph.marker is not None:
      ax.axvline(graph.marker, color='k', linestyle=':')
    ax.set_title(graph.title)
    if graph.xlabel:
      ax.set_xlabel(graph.xlabel)
    if graph.ylabel:
      ax.set_ylabel(graph.ylabel)
    graph.figure = figure
    graph.base64str = figure_to_base64str(figure)
  except (TypeError, ValueError) as e:
    logging.info('skipping %s for line plot; plot error: %s:', graph.name, e)
    return None
  finally:
    plt.close()
  return graph


def draw_histogram(graph: Graph) -> Optional[Graph]:
  """Draws a horizontal bar chart with the values written next to the bars.

  Returns:
    The graph with its figure set, or None if plotting raises TypeError given
    the raw data.
  """
  if not graph:
    return None
  try:
    figure, ax = plt.subplots()
    ax.barh(graph.y, graph.x, color=graph.color)
    ax.set_title(graph.title)
    if graph.xlabel:
      ax.set_xlabel(graph.xlabel)
    if graph.ylabel:
      ax.set_ylabel(graph.ylabel)
    top = max(graph.x)
    for index, value in enumerate(graph.x):
      # Keep labels of long bars inside the box.
      if value > 0.9 * top:
        ax.text(
            value - (value / 10), index, f'{value:.4f}', va='center',
            color='w'
        )
      else:
        ax.text(value, index, f'{value:.4f}', va='center')
    graph.figure = figure
    graph.base64str = figure_to_base64str(figure)
  except TypeError as e:
    logging.info('skipping %s for histogram; plot error: %s:', graph.name, e)
    return None
  finally:
    plt.close()
  return graph


def figure_to_base64str(fig: matplotlib.figure.Figure) -> str:
  """Converts a Matplotlib figure to a base64 string encoding.

  Args:
    fig: A matplotlib Figure.

  Returns:
    A base64 encoding of the figure.
  """
  buf = io.BytesIO()
  fig.savefig(buf, bbox_inches='tight', format='png')
  return base64.b64encode(buf.getbuffer().tobytes()).decode('ascii')


def transfer_scan_graph(
    prop: dynamics.Propagator,
    t_window: dynamics.TimeWindow,
    grid_step: float = dynamics.DEFAULT_GRID_STEP,
    t_max: Optional[float] = None,
) -> Optional[Graph]:
  """Plots the transfer probability over a time window."""
  times = dynamics.time_grid(t_window, grid_step)
  return draw_line(
      Graph(
          x=times.tolist(),
          y=dynamics.scan_transfer_probability(prop, times).tolist(),
          xlabel='t',
          ylabel='transfer probability',
          title=f'Two-qubit transfer, N = {prop.n_nodes}',
          name='transfer_scan',
          color=_COLOR_PALETTE['material_indigo_400'],
          marker=t_max,
      )
  )


def scale_factor_graph(
    factors: restorer.ScaleFactors, title: Optional[str] = None
) -> Optional[Graph]:
  """Plots the magnitudes of the six non-diagonal scale factors."""
  return draw_histogram(
      Graph(
          x=[float(m) for m in np.asarray(factors.magnitudes())],
          y=list(restorer.TABLE_COLUMNS),
          xlabel='|lambda|',
          title=title or 'Scale factor magnitudes',
          name='scale_factors',
          color=_COLOR_PALETTE['material_purple_500'],
      )
  )
