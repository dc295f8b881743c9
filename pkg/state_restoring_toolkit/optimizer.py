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
"""Multi-start maximization of scale factors over the receiver angles.

Each restart draws the 42 angles uniformly, maximizes the target magnitude
under a quadratic penalty on the seven restoring conditions with an
increasing weight schedule, and finally projects onto the constraint
manifold with Gauss-Newton steps. Restart r draws from a random stream seeded
by (seed, r), so results do not depend on execution order.
"""

import dataclasses
import enum
import json
import logging
import pkgutil
import time
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import scipy.optimize

from state_restoring_toolkit import chain, dynamics, errors, restorer
from state_restoring_toolkit.base_record import BaseRecord
from state_restoring_toolkit.utils import io_utils

_PUBLISHED_DATA = 'data/published_phi.json'
_JACOBIAN_STEP = 1e-6

SELECTION_NOTE = (
    'SumAll maximizes the plain sum of the six non-diagonal factor '
    'magnitudes; other targets break objective ties by the sum of the other '
    'magnitudes, SumAll by the smallest magnitude'
)


class Target(enum.Enum):
  """The scale factor, or sum of factors, to maximize."""
  L0_FLIP = 'L0_flip'
  L1_00_01 = 'L1_00_01'
  L1_00_10 = 'L1_00_10'
  L1_01_11 = 'L1_01_11'
  L1_10_11 = 'L1_10_11'
  L2 = 'L2'
  SUM_ALL = 'SumAll'


class SelectionRule(enum.Enum):
  """How restarts with equal objectives are ranked."""
  MAX_SUM_OF_OTHERS = 'MaxSumOfOthers'
  MAX_MIN_FACTOR = 'MaxMinFactor'


@dataclasses.dataclass(frozen=True)
class OptimizationTask(BaseRecord):
  """Settings of a multi-start angle optimization.

  Attributes:
    target: The factor to maximize.
    restarts: Number of random starts.
    seed: Root seed of the per-restart random streams.
    penalty_weight_schedule: Increasing penalty weights on the squared
      residuals.
    convergence_tol: Gradient tolerance of each penalized stage.
    selection_rule: Tie-break between restarts of equal objective.
    feasibility_threshold: Largest residual magnitude of a feasible point.
    objective_tie_tol: Objectives closer than this are considered equal.
    max_iterations: Iteration cap of each penalized stage.
    projection_iterations: Iteration cap of the Gauss-Newton projection.
  """
  target: Target
  restarts: int = 1000
  seed: int = 0
  penalty_weight_schedule: Tuple[float, ...] = (10.0, 1e3, 1e5)
  convergence_tol: float = 1e-6
  selection_rule: SelectionRule = SelectionRule.MAX_SUM_OF_OTHERS
  feasibility_threshold: float = 1e-10
  objective_tie_tol: float = 1e-6
  max_iterations: int = 500
  projection_iterations: int = 50

  _schema_name = 'optimization_task'

  def __post_init__(self):
    if not isinstance(self.target, Target):
      object.__setattr__(self, 'target', Target(self.target))
    if not isinstance(self.selection_rule, SelectionRule):
      object.__setattr__(
          self, 'selection_rule', SelectionRule(self.selection_rule)
      )
    object.__setattr__(
        self, 'penalty_weight_schedule',
        tuple(float(w) for w in self.penalty_weight_schedule)
    )
    if self.restarts < 1:
      raise ValueError(f'restarts must be at least 1, got {self.restarts}.')
    if not self.penalty_weight_schedule or min(
        self.penalty_weight_schedule
    ) <= 0:
      raise ValueError(
          'penalty_weight_schedule must hold positive weights, got '
          f'{self.penalty_weight_schedule}.'
      )
    for name in (
        'convergence_tol', 'feasibility_threshold', 'objective_tie_tol'
    ):
      if getattr(self, name) <= 0:
        raise ValueError(f'{name} must be positive, got {getattr(self, name)}.')
    for name in ('max_iterations', 'projection_iterations'):
      if getattr(self, name) < 1:
        raise ValueError(f'{name} must be at least 1.')


def load_task(path) -> OptimizationTask:
  """Loads an OptimizationTask from a JSON config file."""
  return OptimizationTask.load(path)


@dataclasses.dataclass
class OptimizationResult(BaseRecord):
  """The selected point of a multi-start optimization.

  Attributes:
    phi: The angles.
    factors: The scale factors at these angles.
    residual_max: Largest constraint residual magnitude.
    objective: The maximized quantity.
    restart_index: The restart that produced the point.
    wall_time: Seconds spent in that restart.
    feasible: Whether residual_max is within the feasibility threshold.
    selection_metric: The tie-break value under the task's selection rule.
  """
  phi: restorer.PhiParams
  factors: restorer.ScaleFactors
  residual_max: float
  objective: float
  restart_index: int
  wall_time: float
  feasible: bool = False
  selection_metric: float = 0.0

  def to_dict(self) -> Dict[str, Any]:
    """Converts this result to a dictionary; `phi` uses the angles format."""
    result = super().to_dict()
    result['phi'] = self.phi.to_dict()
    return result


def objective_value(factors: restorer.ScaleFactors, target: Target) -> float:
  """Returns the maximized magnitude, or the sum of all six for SumAll."""
  if target is Target.SUM_ALL:
    return float(np.sum(factors.magnitudes()))
  return abs(factors.by_target(target.value))


def selection_metric(
    factors: restorer.ScaleFactors, target: Target, rule: SelectionRule
) -> float:
  magnitudes = factors.magnitudes()
  if rule is SelectionRule.MAX_MIN_FACTOR:
    return float(np.min(magnitudes))
  if target is Target.SUM_ALL:
    return float(np.sum(magnitudes))
  others = [
      m for name, m in zip(restorer.TABLE_COLUMNS, magnitudes)
      if name != target.value
  ]
  return float(np.sum(others))


class _RestoringObjective:
  """Evaluates factors and residuals for an angle vector at a fixed time."""

  def __init__(self, columns: restorer.SenderColumns, target: Target):
    self.columns = columns
    self.target = target

  def evaluate(self, x: np.ndarray):
    v0 = restorer.build_v0(restorer.PhiParams(tuple(x)))
    cols = self.columns.with_receiver_unitary(v0)
    return (
        restorer.factors_from_columns(cols),
        restorer.residuals_from_columns(cols),
    )

  def penalized(self, x: np.ndarray, weight: float) -> float:
    factors, residuals = self.evaluate(x)
    penalty = float(np.sum(residuals.as_real_vector()**2))
    return -objective_value(factors, self.target) + weight * penalty

  def residual_vector(self, x: np.ndarray) -> np.ndarray:
    return self.evaluate(x)[1].as_real_vector()

  def residual_jacobian(self, x: np.ndarray) -> np.ndarray:
    """Central-difference Jacobian of the 14 real residuals."""
    jacobian = np.empty((14, len(x)))
    for p in range(len(x)):
      step = np.zeros_like(x)
      step[p] = _JACOBIAN_STEP
      jacobian[:, p] = (
          self.residual_vector(x + step) - self.residual_vector(x - step)
      ) / (2 * _JACOBIAN_STEP)
    return jacobian


def _project(
    objective: _RestoringObjective, x: np.ndarray, task: OptimizationTask
) -> np.ndarray:
  """Drives the residuals to zero with minimum-norm Gauss-Newton steps."""
  for _ in range(task.projection_iterations):
    residuals = objective.residual_vector(x)
    complex_residuals = residuals[:7] + 1j * residuals[7:]
    if np.max(np.abs(complex_residuals)) <= task.feasibility_threshold:
      break
    step = np.linalg.lstsq(
        objective.residual_jacobian(x), residuals, rcond=None
    )[0]
    x = x - step
  return x


def run_restart(
    task: OptimizationTask, columns: restorer.SenderColumns,
    restart_index: int
) -> OptimizationResult:
  """Runs one restart of the penalty-then-projection search."""
  start = time.perf_counter()
  rng = np.random.default_rng([task.seed, restart_index])
  x = restorer.PhiParams.uniform(rng).as_array()
  objective = _RestoringObjective(columns, task.target)
  for weight in task.penalty_weight_schedule:
    stage = scipy.optimize.minimize(
        objective.penalized,
        x,
        args=(weight, ),
        method='BFGS',
        options={
            'gtol': task.convergence_tol,
            'maxiter': task.max_iterations
        },
    )
    x = stage.x
    logging.debug(
        'Restart %d weight %g: penalized objective %.6f.', restart_index,
        weight, stage.fun
    )
  x = _project(objective, x, task)
  factors, residuals = objective.evaluate(x)
  residual_max = residuals.max_abs()
  return OptimizationResult(
      phi=restorer.PhiParams(tuple(x)),
      factors=factors,
      residual_max=residual_max,
      objective=objective_value(factors, task.target),
      restart_index=restart_index,
      wall_time=time.perf_counter() - start,
      feasible=residual_max <= task.feasibility_threshold,
      selection_metric=selection_metric(
          factors, task.target, task.selection_rule
      ),
  )


def select_result(
    results: Sequence[OptimizationResult], task: OptimizationTask
) -> OptimizationResult:
  """Picks the best feasible result independently of the input order.

  Results within `objective_tie_tol` of the best objective are ranked by
  their selection metric, then by the lowest restart index.
  """
  feasible = [r for r in results if r.feasible]
  if not feasible:
    raise ValueError('No feasible result to select from.')
  best_objective = max(r.objective for r in feasible)
  tied = [
      r for r in feasible
      if r.objective >= best_objective - task.objective_tie_tol
  ]
  return min(tied, key=lambda r: (-r.selection_metric, r.restart_index))


def _run_restarts(
    task: OptimizationTask, columns: restorer.SenderColumns, n_jobs: int
) -> List[OptimizationResult]:
  if n_jobs == 1:
    return [run_restart(task, columns, r) for r in range(task.restarts)]
  from state_restoring_toolkit import dependencies  # pylint: disable=g-import-not-at-top
  dependencies.ensure_parallel_extra_deps_installed()
  import joblib  # pylint: disable=g-import-not-at-top
  return joblib.Parallel(n_jobs=n_jobs)(
      joblib.delayed(run_restart)(task, columns, r)
      for r in range(task.restarts)
  )


def optimize_phi(
    task: OptimizationTask,
    prop: dynamics.Propagator,
    t: float,
    n_jobs: int = 1,
) -> OptimizationResult:
  """Maximizes the task's target over the 42 angles at a fixed time.

  Args:
    task: The optimization settings.
    prop: The propagator of the chain.
    t: The registration time, normally the transfer optimum.
    n_jobs: Parallel workers for the restarts (requires joblib when > 1).

  Returns:
    The selected feasible result.

  Raises:
    InfeasibleError: If no restart met the feasibility threshold; `best`
      holds the candidate with the smallest residual.
  """
  columns = restorer.SenderColumns.from_propagator(prop, t)
  results = _run_restarts(task, columns, n_jobs)
  feasible_count = sum(r.feasible for r in results)
  logging.info(
      'Target %s: %d of %d restarts feasible.', task.target.value,
      feasible_count, task.restarts
  )
  if not feasible_count:
    best = min(results, key=lambda r: (r.residual_max, r.restart_index))
    logging.warning(
        'No feasible point for target %s; smallest residual %.3e.',
        task.target.value, best.residual_max
    )
    raise errors.InfeasibleError(
        f'No restart reached residuals <= {task.feasibility_threshold} for '
        f'target {task.target.value}.',
        best=best,
    )
  selected = select_result(results, task)
  logging.info(
      'Selected restart %d: objective %.4f, residual max %.2e.',
      selected.restart_index, selected.objective, selected.residual_max
  )
  return selected


TABLE_TARGETS = tuple(Target(name) for name in restorer.TABLE_COLUMNS)


def table_tasks(
    seed: int, restarts: int = 1000, **kwargs
) -> List[OptimizationTask]:
  """Returns the seven tasks behind the scale-factor table.

  The first six rows maximize one factor each; the last row maximizes their
  sum and picks the restart with the largest smallest factor.
  """
  tasks = [
      OptimizationTask(target=target, restarts=restarts, seed=seed, **kwargs)
      for target in TABLE_TARGETS
  ]
  tasks.append(
      OptimizationTask(
          target=Target.SUM_ALL,
          restarts=restarts,
          seed=seed,
          selection_rule=SelectionRule.MAX_MIN_FACTOR,
          **kwargs
      )
  )
  return tasks


@dataclasses.dataclass
class ScaleFactorTable(BaseRecord):
  """One optimization result per table row."""
  rows: List[OptimizationResult]

  def to_dict(self) -> Dict[str, Any]:
    return {'rows': [row.to_dict() for row in self.rows]}

  def magnitudes(self) -> np.ndarray:
    """Returns the 7 x 6 matrix of factor magnitudes."""
    return np.array([row.factors.magnitudes() for row in self.rows])

  def diagonal(self) -> np.ndarray:
    """Returns the maximized magnitude of each single-target row."""
    return np.diag(self.magnitudes()[:len(restorer.TABLE_COLUMNS)])

  def to_csv(self) -> str:
    header = ['row', 'target']
    for name in restorer.TABLE_COLUMNS:
      header += [f'{name}_magnitude', f'{name}_phase']
    header += ['residual_max']
    csv_rows = []
    for index, (task_target, row) in enumerate(
        zip([t.value for t in TABLE_TARGETS] + ['SumAll'], self.rows), 1
    ):
      values = [
          f'{v:.6f}' for pair in restorer.scale_factor_table_row(row.factors)
          for v in pair
      ]
      csv_rows.append(
          [index, task_target] + values + [f'{row.residual_max:.3e}']
      )
    return io_utils.to_csv(header, csv_rows)


def reproduce_factor_table(
    prop: dynamics.Propagator,
    t: float,
    seed: int,
    restarts: int = 1000,
    n_jobs: int = 1,
) -> ScaleFactorTable:
  """Runs the seven table optimizations.

  Raises:
    InfeasibleError: If any row finds no feasible point.
  """
  rows = []
  for task in table_tasks(seed, restarts):
    logging.info('Optimizing table row for %s.', task.target.value)
    rows.append(optimize_phi(task, prop, t, n_jobs=n_jobs))
  return ScaleFactorTable(rows=rows)


def _published_data() -> Dict[str, Any]:
  content = pkgutil.get_data('state_restoring_toolkit', _PUBLISHED_DATA)
  if content is None:
    raise FileNotFoundError(f"Cannot find file: '{_PUBLISHED_DATA}'")
  return json.loads(content)


def load_published_phi() -> restorer.PhiParams:
  """Returns the bundled angles behind the SumAll table row."""
  return restorer.PhiParams.from_json(_published_data()['phi'])


def published_chain() -> chain.ChainSpec:
  """Returns the boundary-optimized 42-node chain of the bundled data."""
  return chain.ChainSpec.from_json(_published_data()['chain'])


def published_registration_time() -> float:
  return float(_published_data()['registration_time'])


def published_transfer() -> Dict[str, dynamics.TransferOptimum]:
  """Returns the reference transfer optima, homogeneous and optimized."""
  return {
      name: dynamics.TransferOptimum.from_json(value)
      for name, value in _published_data()['transfer'].items()
  }


def published_table() -> List[List[Tuple[float, float]]]:
  """Returns the published 7 x 6 (magnitude, phase) table."""
  return [[(cell['magnitude'], cell['phase'])
           for cell in row]
          for row in _published_data()['table']]
