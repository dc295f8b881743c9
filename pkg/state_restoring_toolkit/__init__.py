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
"""A toolkit for two-qubit state transfer and structural restoring."""
from state_restoring_toolkit.chain import (
    ChainSpec, CouplingModel, build_couplings, load_chain_spec
)
from state_restoring_toolkit.core import (
    PublishedCheck, RestoringToolkit, RunMetadata
)
from state_restoring_toolkit.dynamics import (
    TransferOptimum, build_propagator, optimize_boundary_couplings,
    optimize_registration_time, transfer_probability
)
from state_restoring_toolkit.optimizer import (
    OptimizationResult, OptimizationTask, SelectionRule, Target,
    load_published_phi, load_task, optimize_phi, reproduce_factor_table
)
from state_restoring_toolkit.qstate import (
    TwoQubitState, load_state, mq_decompose, receiver_state
)
from state_restoring_toolkit.restorer import (
    PhiParams, RestoreReport, ScaleFactors, build_v0, constraint_residuals,
    load_phi, scale_factors, verify_restoring
)
from state_restoring_toolkit.version import __version__

__all__ = [
    'ChainSpec',
    'CouplingModel',
    'OptimizationResult',
    'OptimizationTask',
    'PublishedCheck',
    'PhiParams',
    'RestoreReport',
    'RestoringToolkit',
    'RunMetadata',
    'ScaleFactors',
    'SelectionRule',
    'Target',
    'TransferOptimum',
    'TwoQubitState',
    'build_couplings',
    'build_propagator',
    'build_v0',
    'constraint_residuals',
    'load_chain_spec',
    'load_phi',
    'load_published_phi',
    'load_state',
    'load_task',
    'mq_decompose',
    'optimize_boundary_couplings',
    'optimize_phi',
    'optimize_registration_time',
    'receiver_state',
    'reproduce_factor_table',
    'scale_factors',
    'transfer_probability',
    'verify_restoring',
]
