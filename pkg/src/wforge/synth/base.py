"""Synthesis results and machine-checkable contracts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Mapping, Sequence

import numpy as np

from ..circuit import Circuit, ResourceReport, count_resources, expand, macro_census
from ..core import InvalidArgument, ResourceLimitError, get_tol
from ..sim import Comparison, PureState, apply_circuit, circuit_columns, circuit_unitary, compare_states, compare_unitaries


@dataclass(frozen=True, eq=False)
class Contract:
    """Declared action of a synthesized circuit.

    Column contracts list input basis indices and the expected image of
    each (dense, full register). State contracts give an input state and
    the target output. ``mode`` is "exact" (after multiplying the circuit
    by ``global_phase``) or "global_phase". ``klass`` says whether the
    construction is exact or only correct up to a controlled global phase
    (the phase is then recorded in ``phases``). A state contract with a
    ``support_bound`` runs on the sparse engine and fails as soon as the
    intermediate support exceeds it.
    """

    klass: str = "exact"
    mode: str = "global_phase"
    columns: tuple[int, ...] | None = None
    expected: np.ndarray | None = None
    input_state: PureState | None = None
    target_state: PureState | None = None
    global_phase: complex = 1
    phases: Mapping[str, complex] = field(default_factory=dict)
    subspace: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    description: str = ""
    support_bound: int | None = None

    @property
    def kind(self) -> str:
        return "state" if self.target_state is not None else "columns"

    def summary(self) -> dict[str, Any]:
        return {
            "class": self.klass,
            "mode": self.mode,
            "kind": self.kind,
            "description": self.description,
            "control_subspace": {str(k): list(v) for k, v in sorted(self.subspace.items())},
            "recorded_phases": {k: _fmt_complex(v) for k, v in sorted(self.phases.items())},
            "support_bound": self.support_bound,
        }


def _fmt_complex(z: complex) -> list[float]:
    z = complex(z)
    return [round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0]


@dataclass(frozen=True, eq=False)
class SynthResult:
    kind: str
    params: Mapping[str, Any]
    circuit: Circuit
    contract: Contract

    @cached_property
    def expanded(self) -> Circuit:
        return expand(self.circuit)

    @cached_property
    def report(self) -> ResourceReport:
        return count_resources(self.expanded)

    @cached_property
    def census(self) -> dict[str, int]:
        return macro_census(self.circuit)

    def check(self, tol: float | None = None) -> Comparison:
        return check_contract(self, tol)

    def summary(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "dims": list(self.circuit.dims),
            "ancillas": list(self.circuit.ancillas),
            "contract": self.contract.summary(),
            "report": self.report.to_dict(),
            "macros": dict(sorted(self.census.items())),
        }


def check_contract(res: SynthResult, tol: float | None = None) -> Comparison:
    """Simulate the expanded circuit and compare it with its contract."""
    ct = res.contract
    circ = res.expanded
    if ct.kind == "state":
        inp = ct.input_state if ct.support_bound is None else ct.input_state.to_sparse()
        try:
            out = apply_circuit(inp, circ, max_support=ct.support_bound)
        except ResourceLimitError:
            return Comparison(False, math.inf)
        if ct.mode == "exact":
            out = PureState(out.register, sparse={k: v * ct.global_phase for k, v in out.to_sparse().sparse.items()})
            diff = _state_dev(out, ct.target_state)
            ok = diff <= (tol if tol is not None else get_tol())
            return Comparison(ok, diff)
        return compare_states(out, ct.target_state, tol)
    D = circ.register.total_dim
    cols = list(ct.columns) if ct.columns is not None else list(range(D))
    if len(cols) == D:
        U = circuit_unitary(circ)
    else:
        U = circuit_columns(circ, cols)
    return compare_unitaries(U * ct.global_phase, np.asarray(ct.expected), ct.mode, tol=tol)


def _state_dev(a: PureState, b: PureState) -> float:
    sa, sb = a.to_sparse().sparse, b.to_sparse().sparse
    keys = set(sa) | set(sb)
    return max((abs(sa.get(k, 0) - sb.get(k, 0)) for k in keys), default=0.0)


def column_contract(
    dims: Sequence[int],
    reference: np.ndarray,
    *,
    columns: Sequence[int] | None = None,
    **kw: Any,
) -> Contract:
    """Restrict a full-register reference matrix to the given input columns."""
    reference = np.asarray(reference, dtype=complex)
    D = int(np.prod(dims))
    if reference.shape != (D, D):
        raise InvalidArgument(f"reference shape {reference.shape} does not match register dimension {D}")
    cols = tuple(range(D)) if columns is None else tuple(columns)
    return Contract(columns=cols, expected=reference[:, list(cols)], **kw)
