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
"""Command line for the State Restoring Toolkit.

Usage:

  state-restoring-toolkit <command> [--flags]

Commands:

  chain-opt         Transfer optimum of a chain, optionally tuning its boundary.
  phi-opt           Maximize one scale factor over the receiver angles.
  factor-table      The seven scale-factor table rows.
  restore           Restoring check of one sender state.
  verify-published  Re-evaluate the bundled published angles.

`table1` and `verify-paper` are accepted for `factor-table` and
`verify-published`, and `--rho-in` for `--rho_in`.

Values from --chain and --task config files are overridden by flags given on
the command line.
"""

import logging
from typing import Any, Callable, Dict, Optional

from absl import app, flags

from state_restoring_toolkit import chain, core, optimizer

FLAGS = flags.FLAGS

flags.DEFINE_string(
    'output_dir', default='restoring_output',
    help='Where the outputs are written.'
)
flags.DEFINE_string(
    'out', default=None,
    help='Main output file, relative to --output_dir unless absolute.'
)
flags.DEFINE_enum(
    'report', default=None, enum_values=['md', 'html'],
    help='Also render a report in this format.'
)
flags.DEFINE_integer(
    'n_jobs', default=1, help='Parallel workers; values other than 1 need '
    'joblib.'
)

# Chain.
flags.DEFINE_string('chain', default=None, help='ChainSpec JSON config file.')
flags.DEFINE_integer('n_nodes', default=42, help='Chain length N.')
flags.DEFINE_float('base_coupling', default=1.0, help='Bulk coupling.')
flags.DEFINE_float(
    'boundary_ratio_1', default=1.0, help='D_12 / base coupling.'
)
flags.DEFINE_float(
    'boundary_ratio_2', default=1.0, help='D_23 / base coupling.'
)
flags.DEFINE_enum(
    'coupling_model', default=chain.DEFAULT_COUPLING_MODEL.value,
    enum_values=[m.value for m in chain.CouplingModel],
    help='Which node pairs interact.'
)
flags.DEFINE_bool(
    'optimize_boundary', default=True,
    help='chain-opt: search the boundary ratios.'
)
flags.DEFINE_float(
    't_window_start', default=0.0, help='Start of the time window.'
)
flags.DEFINE_float(
    't_window_end', default=None, help='End of the time window; 3N if unset.'
)
flags.DEFINE_float(
    'grid_step', default=0.01, help='Spacing of the time grid.'
)
flags.DEFINE_float(
    't', default=None,
    help='Registration time; the transfer optimum if unset.'
)

# Angle optimization.
flags.DEFINE_string(
    'task', default=None, help='OptimizationTask JSON config file.'
)
flags.DEFINE_enum(
    'target', default='L2', enum_values=[t.value for t in optimizer.Target],
    help='The scale factor to maximize.'
)
flags.DEFINE_integer('restarts', default=1000, help='Random restarts.')
flags.DEFINE_integer('seed', default=0, help='Root random seed.')
flags.DEFINE_enum(
    'selection_rule', default=optimizer.SelectionRule.MAX_SUM_OF_OTHERS.value,
    enum_values=[r.value for r in optimizer.SelectionRule],
    help='Tie-break between restarts.'
)
flags.DEFINE_integer(
    'max_iterations', default=500, help='Iterations per penalty stage.'
)

# Restoring.
flags.DEFINE_string('phi', default=None, help='Receiver angles JSON file.')
flags.DEFINE_string(
    'rho_in', default=None, help='Sender density matrix JSON file.'
)
flags.DEFINE_alias('rho-in', 'rho_in')
flags.DEFINE_integer(
    'n_states', default=20, help='verify-published: random sender states.'
)

_CHAIN_FLAGS = (
    'n_nodes', 'base_coupling', 'boundary_ratio_1', 'boundary_ratio_2',
    'coupling_model'
)
_TASK_FLAGS = (
    'target', 'restarts', 'seed', 'selection_rule', 'max_iterations'
)


def _merge_flags(
    config: Dict[str, Any], names, override_all: bool
) -> Dict[str, Any]:
  """Overrides config values with flags; only flags given if a file was read."""
  merged = dict(config)
  for name in names:
    if override_all or not FLAGS[name].using_default_value:
      merged[name] = FLAGS[name].value
  return merged


def chain_spec_from_flags(
    default: Optional[chain.ChainSpec] = None
) -> chain.ChainSpec:
  """Builds the chain from --chain, a default chain and the chain flags."""
  if FLAGS.chain:
    config = chain.load_chain_spec(FLAGS.chain).to_dict()
  elif default is not None:
    config = default.to_dict()
  else:
    return chain.ChainSpec.from_json(_merge_flags({}, _CHAIN_FLAGS, True))
  return chain.ChainSpec.from_json(_merge_flags(config, _CHAIN_FLAGS, False))


def task_from_flags() -> optimizer.OptimizationTask:
  """Builds the optimization task from --task and the task flags."""
  if FLAGS.task:
    config = optimizer.load_task(FLAGS.task).to_dict()
    return optimizer.OptimizationTask.from_json(
        _merge_flags(config, _TASK_FLAGS, False)
    )
  return optimizer.OptimizationTask.from_json(
      _merge_flags({}, _TASK_FLAGS, True)
  )


def _time_window():
  if FLAGS.t_window_end is None:
    return None
  return (FLAGS.t_window_start, FLAGS.t_window_end)


def run_chain_opt(toolkit: core.RestoringToolkit) -> int:
  spec = chain_spec_from_flags()
  optimum = toolkit.optimize_chain(
      spec,
      t_window=_time_window(),
      grid_step=FLAGS.grid_step,
      optimize_boundary=FLAGS.optimize_boundary,
      n_jobs=FLAGS.n_jobs,
      output_file=FLAGS.out,
  )
  logging.info('Transfer optimum %.4f at t=%.4f.', optimum.value, optimum.t_max)
  return 0


def run_phi_opt(toolkit: core.RestoringToolkit) -> int:
  toolkit.optimize_phi(
      task_from_flags(),
      chain_spec_from_flags(optimizer.published_chain()),
      t=FLAGS.t,
      n_jobs=FLAGS.n_jobs,
      output_file=FLAGS.out,
  )
  return 0


def run_factor_table(toolkit: core.RestoringToolkit) -> int:
  spec = chain_spec_from_flags(optimizer.published_chain())
  t = FLAGS.t
  if t is None and spec == optimizer.published_chain():
    t = optimizer.published_registration_time()
  toolkit.reproduce_factor_table(
      spec,
      t=t,
      seed=FLAGS.seed,
      restarts=FLAGS.restarts,
      n_jobs=FLAGS.n_jobs,
      output_file=FLAGS.out,
  )
  return 0


def run_restore(toolkit: core.RestoringToolkit) -> int:
  if not FLAGS.phi or not FLAGS.rho_in:
    raise app.UsageError('restore needs --phi and --rho-in.')
  report = toolkit.restore(
      FLAGS.phi,
      FLAGS.rho_in,
      chain_spec_from_flags(optimizer.published_chain()),
      t=FLAGS.t,
      output_file=FLAGS.out,
  )
  logging.info('Max discrepancy %.3e.', report.max_discrepancy)
  return 0


def run_verify_published(toolkit: core.RestoringToolkit) -> int:
  check = toolkit.verify_published(
      n_states=FLAGS.n_states, seed=FLAGS.seed, output_file=FLAGS.out
  )
  return 0 if check.passed else 1


COMMANDS: Dict[str, Callable[[core.RestoringToolkit], int]] = {
    'chain-opt': run_chain_opt,
    'phi-opt': run_phi_opt,
    'factor-table': run_factor_table,
    'restore': run_restore,
    'verify-published': run_verify_published,
    # Alternative names.
    'table1': run_factor_table,
    'verify-paper': run_verify_published,
}


def main(argv) -> int:
  if len(argv) != 2 or argv[1] not in COMMANDS:
    raise app.UsageError(
        f'Expected exactly one command out of {", ".join(COMMANDS)}; got '
        f'{argv[1:]}.'
    )
  toolkit = core.RestoringToolkit(FLAGS.output_dir)
  status = COMMANDS[argv[1]](toolkit)
  if FLAGS.report:
    toolkit.export_report(output_format=FLAGS.report)
  return status


def run():
  """Entry point of the `state-restoring-toolkit` console script."""
  app.run(main)


if __name__ == '__main__':
  run()
