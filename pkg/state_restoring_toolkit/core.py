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
"""State Restoring Toolkit.

The State Restoring Toolkit writes the artifacts of a state-transfer study to
an output directory: the optimized chain and its transfer scan, optimized
receiver angles, the scale-factor table, restoring checks of given sender
states, and a rendered Markdown or HTML report.
"""

import dataclasses
import logging
import os
import pkgutil
import tempfile
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from state_restoring_toolkit import (
    chain, dynamics, errors, optimizer, qstate, restorer
)
from state_restoring_toolkit.base_record import BaseRecord
from state_restoring_toolkit.utils import graphics, io_utils, template_utils
from state_restoring_toolkit.version import __version__

# Constants about provided UI templates.
_UI_TEMPLATES = (
    'template/html/default_template.html.jinja',
    'template/md/default_template.md.jinja',
)
_TEMPLATE_DIR = 'template'

# Constants about the generated artifacts.
_REPORTS_DIR = 'reports'
_DEFAULT_REPORT_FILE_NAMES = {'html': 'report.html', 'md': 'report.md'}
_CHAIN_OPT_FILE = 'chain_opt.json'
_SCAN_FILE = 'transfer_scan.csv'
_COUPLINGS_FILE = 'couplings.csv'
_PHI_OPT_FILE = 'phi_opt.json'
_PHI_FILE = 'phi.json'
_TABLE_FILE = 'factor_table.csv'
_RESTORE_FILE = 'restore.json'
_VERIFY_FILE = 'verify_published.json'

# Acceptance bounds of the published-angle check.
PUBLISHED_RESIDUAL_TOL = 2e-2
PUBLISHED_MAGNITUDE_TOL = 1e-2
PUBLISHED_TRANSFER_TOL = 1e-3
PUBLISHED_TIME_TOL = 5e-2
_PUBLISHED_WINDOW = (0.0, 100.0)


@dataclasses.dataclass
class RunMetadata(BaseRecord):
  """The metadata block written into every JSON output.

  Attributes:
    chain_spec: The chain the run used.
    t: The registration time.
    seed: The root seed of the random streams, if any.
    ordering_convention: Application order of the receiver rotations.
    sign_convention: Sign of the antisymmetric generators.
    selection_note: How table rows pick among restarts.
    version: The toolkit version.
  """
  chain_spec: Optional[chain.ChainSpec] = None
  t: Optional[float] = None
  seed: Optional[int] = None
  ordering_convention: str = restorer.ORDERING_CONVENTION
  sign_convention: str = restorer.SIGN_CONVENTION
  selection_note: str = optimizer.SELECTION_NOTE
  version: str = __version__


@dataclasses.dataclass
class PublishedCheck(BaseRecord):
  """Outcome of re-evaluating the published angles on the published chain.

  Attributes:
    transfer: The transfer optimum of the published chain.
    transfer_deviation: |transfer value - published value|.
    t_max_deviation: |transfer time - published registration time|.
    t: The registration time the angles were evaluated at.
    residual_max: Largest restoring-condition residual.
    magnitudes: The six factor magnitudes, in table column order.
    published_magnitudes: The published magnitudes of the same row.
    max_magnitude_deviation: Largest |magnitude - published|.
    max_discrepancy: Worst non-diagonal restoring discrepancy over random
      sender states.
    model_error: Worst deviation of the exact factor model over the same
      states.
    passed: Whether the transfer optimum, residuals and magnitudes are within
      the published precision.
  """
  transfer: dynamics.TransferOptimum
  transfer_deviation: float
  t_max_deviation: float
  t: float
  residual_max: float
  magnitudes: Tuple[float, ...]
  published_magnitudes: Tuple[float, ...]
  max_magnitude_deviation: float
  max_discrepancy: float
  model_error: float
  passed: bool


def _resolve_t(prop: dynamics.Propagator, t: Optional[float]) -> float:
  if t is not None:
    return float(t)
  optimum = dynamics.optimize_registration_time(prop)
  logging.info('Using the transfer optimum t=%.4f.', optimum.t_max)
  return optimum.t_max


class RestoringToolkit():
  """RestoringToolkit runs the state-restoring pipeline and keeps its results.

  Every operation writes its outputs under `output_dir`, each JSON output
  carrying a `metadata` block, and remembers its result for
  `export_report`.

  Standard workflow:

  ```python
  import state_restoring_toolkit as srt

  toolkit = srt.RestoringToolkit(output_dir)
  optimum = toolkit.optimize_chain(
      srt.ChainSpec(n_nodes=42), t_window=(0.0, 100.0)
  )
  spec = toolkit.chain_spec
  result = toolkit.optimize_phi(
      srt.OptimizationTask(target='L2', restarts=200), spec, optimum.t_max
  )
  html = toolkit.export_report()
  ```
  """
  def __init__(self, output_dir: Optional[str] = None):
    """Initializes the RestoringToolkit.

    Args:
      output_dir: The path where artifacts are written to. If not provided,
        a temp directory is used.
    """
    self.output_dir = output_dir or tempfile.mkdtemp()
    self._template_dir = os.path.join(self.output_dir, _TEMPLATE_DIR)
    self._reports_dir = os.path.join(self.output_dir, _REPORTS_DIR)
    self.chain_spec: Optional[chain.ChainSpec] = None
    self._metadata = RunMetadata()
    self._results: Dict[str, Any] = {}

  def _path(self, output_file: Optional[str], default: str) -> str:
    return os.path.join(self.output_dir, output_file or default)

  def _update_metadata(
      self,
      spec: chain.ChainSpec,
      t: Optional[float] = None,
      seed: Optional[int] = None,
  ) -> RunMetadata:
    self.chain_spec = spec
    self._metadata = RunMetadata(chain_spec=spec, t=t, seed=seed)
    return self._metadata

  def _write_json(self, path: str, **sections: Any) -> None:
    content = {'metadata': self._metadata.to_dict()}
    for name, value in sections.items():
      content[name] = value.to_dict() if isinstance(value, BaseRecord) else (
          value
      )
    io_utils.write_json_file(path, content)
    logging.info('Wrote %s.', path)

  def optimize_chain(
      self,
      spec: chain.ChainSpec,
      t_window: Optional[dynamics.TimeWindow] = None,
      grid_step: float = dynamics.DEFAULT_GRID_STEP,
      optimize_boundary: bool = True,
      n_jobs: int = 1,
      output_file: Optional[str] = None,
  ) -> dynamics.TransferOptimum:
    """Finds the transfer optimum of a chain, optionally tuning its boundary.

    Writes the optimum as JSON, the coupling matrix as CSV and the
    probability-vs-time scan as CSV.

    Args:
      spec: The chain. Its length, base coupling and coupling model are kept;
        its boundary ratios are used as given unless the boundary is searched.
      t_window: The registration-time window. Defaults to [0, 3N/delta].
      grid_step: Spacing of the time grid and of the written scan.
      optimize_boundary: Whether to search the two boundary ratios.
      n_jobs: Parallel workers for the boundary search.
      output_file: The JSON file name. Defaults to 'chain_opt.json'.

    Returns:
      The transfer optimum; `ratios` is set when the boundary was searched.
    """
    t_window = t_window or dynamics.default_window(
        spec.n_nodes, spec.base_coupling
    )
    if optimize_boundary:
      optimum = dynamics.optimize_boundary_couplings(
          spec.n_nodes,
          spec.coupling_model,
          t_window,
          base_coupling=spec.base_coupling,
          n_jobs=n_jobs,
      )
      spec = spec.with_ratios(*optimum.ratios)
    else:
      optimum = dynamics.optimize_registration_time(
          dynamics.build_propagator(spec), t_window, grid_step
      )
    self._update_metadata(spec, optimum.t_max)
    prop = dynamics.build_propagator(spec)
    times = dynamics.time_grid(t_window, grid_step)
    io_utils.write_csv_file(
        os.path.join(self.output_dir, _SCAN_FILE), ('t', 'probability'),
        zip(times, dynamics.scan_transfer_probability(prop, times))
    )
    io_utils.write_file(
        os.path.join(self.output_dir, _COUPLINGS_FILE),
        chain.build_couplings(spec).to_csv()
    )
    self._write_json(self._path(output_file, _CHAIN_OPT_FILE), result=optimum)
    self._results['transfer'] = optimum
    self._results['scan_graph'] = graphics.transfer_scan_graph(
        prop, t_window, grid_step, t_max=optimum.t_max
    )
    return optimum

  def optimize_phi(
      self,
      task: optimizer.OptimizationTask,
      spec: chain.ChainSpec,
      t: Optional[float] = None,
      n_jobs: int = 1,
      output_file: Optional[str] = None,
  ) -> optimizer.OptimizationResult:
    """Maximizes a scale factor over the receiver angles.

    Writes the result as JSON and the selected angles to 'phi.json', in the
    format `restore` reads.

    Args:
      task: The optimization settings.
      spec: The chain.
      t: The registration time. Defaults to the transfer optimum.
      n_jobs: Parallel workers for the restarts.
      output_file: The JSON file name. Defaults to 'phi_opt.json'.

    Raises:
      InfeasibleError: If no restart is feasible. The best candidate is
        still written, marked infeasible.
    """
    prop = dynamics.build_propagator(spec)
    t = _resolve_t(prop, t)
    self._update_metadata(spec, t, task.seed)
    path = self._path(output_file, _PHI_OPT_FILE)
    try:
      result = optimizer.optimize_phi(task, prop, t, n_jobs=n_jobs)
    except errors.InfeasibleError as e:
      if e.best is not None:
        self._write_json(path, task=task, result=e.best)
      raise
    self._write_json(path, task=task, result=result)
    result.phi.save(os.path.join(self.output_dir, _PHI_FILE), overwrite=True)
    self._results['phi_result'] = result
    self._results['factor_graph'] = graphics.scale_factor_graph(
        result.factors, f'Scale factors, target {task.target.value}'
    )
    return result

  def reproduce_factor_table(
      self,
      spec: chain.ChainSpec,
      t: Optional[float] = None,
      seed: int = 0,
      restarts: int = 1000,
      n_jobs: int = 1,
      output_file: Optional[str] = None,
  ) -> optimizer.ScaleFactorTable:
    """Runs the seven table rows and writes them as CSV plus a JSON twin.

    The JSON file holds every row result next to the published table.
    """
    prop = dynamics.build_propagator(spec)
    t = _resolve_t(prop, t)
    self._update_metadata(spec, t, seed)
    table = optimizer.reproduce_factor_table(prop, t, seed, restarts, n_jobs)
    path = self._path(output_file, _TABLE_FILE)
    io_utils.write_file(path, table.to_csv())
    self._write_json(
        os.path.splitext(path)[0] + '.json',
        table=table,
        published_table=optimizer.published_table(),
    )
    self._results['table'] = table
    return table

  def restore(
      self,
      phi: Union[restorer.PhiParams, str],
      rho_s: Union[qstate.TwoQubitState, str],
      spec: chain.ChainSpec,
      t: Optional[float] = None,
      output_file: Optional[str] = None,
  ) -> restorer.RestoreReport:
    """Compares the simulated receiver state with the restored prediction.

    Args:
      phi: The receiver angles, or the path to their JSON file.
      rho_s: The sender state, or the path to its JSON file.
      spec: The chain.
      t: The registration time. Defaults to the transfer optimum.
      output_file: The JSON file name. Defaults to 'restore.json'.
    """
    if isinstance(phi, str):
      phi = restorer.load_phi(phi)
    if isinstance(rho_s, str):
      rho_s = qstate.load_state(rho_s)
    prop = dynamics.build_propagator(spec)
    t = _resolve_t(prop, t)
    self._update_metadata(spec, t)
    report = restorer.verify_restoring(rho_s, prop, restorer.build_v0(phi), t)
    self._write_json(
        self._path(output_file, _RESTORE_FILE), sender=rho_s, report=report
    )
    self._results['restore'] = report
    return report

  def verify_published(
      self,
      n_states: int = 20,
      seed: int = 0,
      output_file: Optional[str] = None,
  ) -> PublishedCheck:
    """Re-evaluates the bundled published angles end to end.

    Builds the published chain, recomputes its transfer optimum, then
    evaluates the restoring residuals and the scale factors of the published
    angles at the published registration time, and checks restoring on
    `n_states` random sender states.
    """
    spec = optimizer.published_chain()
    t = optimizer.published_registration_time()
    self._update_metadata(spec, t, seed)
    prop = dynamics.build_propagator(spec)
    transfer = dynamics.optimize_registration_time(prop, _PUBLISHED_WINDOW)
    reference = optimizer.published_transfer()['optimized']
    transfer_deviation = abs(transfer.value - reference.value)
    t_max_deviation = abs(transfer.t_max - reference.t_max)
    v0 = restorer.build_v0(optimizer.load_published_phi())
    cols = restorer.restoring_columns(prop, v0, t)
    residual_max = restorer.residuals_from_columns(cols).max_abs()
    magnitudes = tuple(
        float(m) for m in restorer.factors_from_columns(cols).magnitudes()
    )
    published = tuple(m for m, _ in optimizer.published_table()[-1])
    deviation = float(np.max(np.abs(np.subtract(magnitudes, published))))
    rng = np.random.default_rng(seed)
    reports = [
        restorer.verify_restoring(qstate.random_state(rng), prop, v0, t)
        for _ in range(n_states)
    ]
    check = PublishedCheck(
        transfer=transfer,
        transfer_deviation=transfer_deviation,
        t_max_deviation=t_max_deviation,
        t=t,
        residual_max=residual_max,
        magnitudes=magnitudes,
        published_magnitudes=published,
        max_magnitude_deviation=deviation,
        max_discrepancy=max((r.max_discrepancy for r in reports), default=0.0),
        model_error=max((r.model_error for r in reports), default=0.0),
        passed=(
            transfer_deviation <= PUBLISHED_TRANSFER_TOL and
            t_max_deviation <= PUBLISHED_TIME_TOL and
            residual_max <= PUBLISHED_RESIDUAL_TOL and
            deviation <= PUBLISHED_MAGNITUDE_TOL
        ),
    )
    if check.passed:
      logging.info(
          'Published chain and angles verified: transfer %.4f at t=%.4f, '
          'residual max %.3e, magnitude deviation %.3e.', transfer.value,
          transfer.t_max, residual_max, deviation
      )
    else:
      logging.warning(
          'Published chain or angles not reproduced: transfer %.4f at '
          't=%.4f, residual max %.3e, magnitude deviation %.3e.',
          transfer.value, transfer.t_max, residual_max, deviation
      )
    self._write_json(self._path(output_file, _VERIFY_FILE), result=check)
    self._results['published_check'] = check
    return check

  def _template_variables(self) -> Dict[str, Any]:
    variables = {
        'metadata': self._metadata.to_dict(),
        'factor_columns': restorer.TABLE_COLUMNS,
    }
    transfer = self._results.get('transfer')
    if transfer:
      variables['transfer'] = transfer.to_dict()
    for name in ('scan_graph', 'factor_graph'):
      graph = self._results.get(name)
      if graph:
        variables[name] = graph.base64str
    result = self._results.get('phi_result')
    if result:
      variables['phi_result'] = {
          'objective': result.objective,
          'residual_max': result.residual_max,
          'restart_index': result.restart_index,
          'factors': restorer.scale_factor_table_row(result.factors),
      }
    table = self._results.get('table')
    if table:
      names = [t.value for t in optimizer.TABLE_TARGETS] + ['SumAll']
      variables['table'] = [{
          'target': name,
          'cells': restorer.scale_factor_table_row(row.factors),
          'residual_max': row.residual_max,
      } for name, row in zip(names, table.rows)]
      variables['published_table'] = optimizer.published_table()
    report = self._results.get('restore')
    if report:
      variables['restore'] = {
          't': report.t,
          'max_discrepancy': report.max_discrepancy,
          'diagonal_max_discrepancy': report.diagonal_max_discrepancy,
          'normalization_defect': report.normalization_defect,
          'model_error': report.model_error,
          'residual_max': report.residual_max,
      }
    check = self._results.get('published_check')
    if check:
      variables['published_check'] = check.to_dict()
    return variables

  def _write_templates(self) -> None:
    """Copies the bundled templates into the output directory."""
    for template_path in _UI_TEMPLATES:
      template_content = pkgutil.get_data(
          'state_restoring_toolkit', template_path
      )
      if template_content is None:
        raise FileNotFoundError(f"Cannot find file: '{template_path}'")
      io_utils.write_file(
          os.path.join(self.output_dir, template_path),
          template_content.decode('utf8')
      )

  def export_report(
      self,
      output_format: str = 'html',
      template_path: Optional[str] = None,
      output_file: Optional[str] = None,
      template_variables: Optional[Dict[str, Any]] = None,
  ) -> str:
    """Renders a report of every result produced so far.

    The report is both returned and saved under `output_dir/reports`.

    Args:
      output_format: 'html' or 'md'; selects the default template and file
        name.
      template_path: The file path of a Jinja template. If not provided, the
        default template of `output_format` is used.
      output_file: The file name of the report. If the file already exists,
        it is overwritten.
      template_variables: Variables passed to the template in addition to
        the results.

    Returns:
      The report content.

    Raises:
      ValueError: If `output_format` is unknown, or if no result has been
        produced yet.
    """
    template_utils.check_report_format(output_format)
    if not self._results:
      raise ValueError(
          'export_report is called before any result was produced. Run '
          'optimize_chain, optimize_phi, reproduce_factor_table, restore or '
          'verify_published first.'
      )
    if not template_path:
      self._write_templates()
      template_path = os.path.join(
          self._template_dir, template_utils.template_file(output_format)
      )
    output_file = output_file or _DEFAULT_REPORT_FILE_NAMES[output_format]
    variables = self._template_variables()
    variables.update(template_variables or {})
    return template_utils.render(
        template_path=template_path,
        output_path=os.path.join(self._reports_dir, output_file),
        template_variables=variables,
    )
