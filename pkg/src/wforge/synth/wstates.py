"""W-state circuits: single-layer preparation, spread gates and trees."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .. import oracles
from ..circuit import Builder, GateInstance, MacroDef, ResourceReport, register_macro
from ..core import InvalidArgument, RadixRegister, ResourceLimitError, require_odd_prime, require_prime
from ..sim import PureState, apply_circuit, make_state, post_select_many
from .base import Contract, SynthResult
from .controlled import ch_phase

MAX_WIRES = 4096


def _guard(n_wires: int, max_wires: int | None) -> None:
    limit = MAX_WIRES if max_wires is None else max_wires
    if n_wires > limit:
        raise ResourceLimitError(f"construction needs {n_wires} wires, limit is {limit}")


# -- bodies ------------------------------------------------------------------------


def _w_prime_body(dims, params):
    d = dims[0]
    if len(dims) != d or len(set(dims)) != 1:
        raise InvalidArgument(f"WPRIME needs {d} wires of dimension {d}, got {list(dims)}")
    b = Builder()
    b.add("H", 1)
    b.add("ZCX", 1, 0, k=0, power=1, exact=False)
    for k in range(2, d):
        b.add("KCX", 1, k, k=k, power=1, exact=False)
        b.repeat(k, "CX", k, 1, dag=True)
    # The lax phases add up to omega^{(d-1)/2} on every branch except the
    # one left on wire 1; undo it there (i for qubits).
    if d == 2:
        b.add("S", 1, dag=True)
    else:
        b.add("Z", 1, dag=True, p=(d - 1) // 2)
    return b.gates


def _spread_tail(b: Builder, d: int, to_control: bool) -> None:
    for k in range(2, d):
        b.add("KCX", 1, k, k=k, power=1, exact=True)
        b.repeat(k, "CX", k, 1, dag=True)
        if to_control:
            b.repeat(k - 1, "CX", k, 0)


def _spread_body(dims, params):
    d = dims[-1]
    if len(dims) < 2 or len(set(dims[1:])) != 1:
        raise InvalidArgument(f"SPREAD needs a control plus equal-dimension targets, got {list(dims)}")
    if dims[0] != d:
        if params.get("embed"):
            return None
        if len(dims) != d:
            raise InvalidArgument(f"SPREAD over dimension {d} needs {d} wires, got {len(dims)}")
        # Cross-dimension node: embedded head on (control, first target), then
        # the usual tail, which only touches the uniform target wires.
        b = Builder().add("SPREAD", 0, 1, embed=True)
        _spread_tail(b, d, to_control=False)
        return b.gates
    if len(dims) != d:
        raise InvalidArgument(f"SPREAD over dimension {d} needs {d} wires, got {len(dims)}")
    b = Builder()
    b.add("CH", 0, 1)
    b.add("CX", 1, 0, dag=True)
    _spread_tail(b, d, to_control=True)
    return b.gates


def _embedded_head(dims, params) -> np.ndarray:
    """On (control of dimension dc, target of dimension p).

    Control 1 applies phase * H to the target, then the control's |0> and
    |1> are exchanged whenever the target is nonzero. Control values >= 2
    are left alone.
    """
    dc, p = dims
    ph = ch_phase(p)
    H = oracles.fourier(p)
    U = np.zeros((dc * p, dc * p), dtype=complex)
    for c in range(dc):
        for t in range(p):
            col = c * p + t
            if c != 1:
                amps = {t: 1}
            else:
                amps = {j: ph * H[j, t] for j in range(p)}
            for j, a in amps.items():
                c2 = c
                if c in (0, 1) and j != 0:
                    c2 = 1 - c
                U[c2 * p + j, col] += a
    return U


def _embedded_cost(dims, params) -> ResourceReport:
    return ResourceReport(gates=1, two_qudit=1)


def _tree_layout(factors: Sequence[int]) -> tuple[list[int], list[tuple[int, list[int]]]]:
    """Wire dimensions and (control, new wires) spread nodes after the first layer."""
    dims = [factors[0]] * factors[0]
    nodes = []
    for p in factors[1:]:
        active = len(dims)
        for m in range(active):
            new = list(range(len(dims), len(dims) + p - 1))
            dims.extend([p] * (p - 1))
            nodes.append((m, new))
    return dims, nodes


def _tree_body(factors: Sequence[int]) -> list[GateInstance]:
    _, nodes = _tree_layout(factors)
    b = Builder()
    b.add("WPRIME", *range(factors[0]))
    for m, new in nodes:
        b.add("SPREAD", m, *new)
    return b.gates


def _wtree_body(dims, params):
    d, n = dims[0], int(params["n"])
    if len(dims) != d**n or len(set(dims)) != 1:
        raise InvalidArgument(f"WTREE(n={n}) needs {d**n} wires of dimension {d}")
    return _tree_body([d] * n)


def _mixed_body(dims, params):
    factors = [int(f) for f in params["factors"]]
    want, _ = _tree_layout(factors)
    if list(dims) != want:
        raise InvalidArgument(f"MIXEDTREE{factors} needs wire dimensions {want}, got {list(dims)}")
    return _tree_body(factors)


def _qspread_body(dims, params):
    d = dims[0]
    if len(dims) != d + 1 or len(set(dims)) != 1:
        raise InvalidArgument(f"QSPREAD needs {d} wires plus one ancilla, all of dimension {d}")
    anc = d
    b = Builder()
    for k in range(1, d):
        b.add("KCH", 0, k, anc, k=k)
        for j in range(1, d):
            b.add("KCX", k, 0, k=j, power=(-k) % d, exact=True)
    return b.gates


def _qtree_layout(d: int, n: int) -> tuple[int, int, list[tuple[int, list[int], int]]]:
    data = d**n
    pool = d ** (n - 1)
    nodes = [(0, list(range(1, d)), data)]
    active = d
    for _ in range(2, n + 1):
        for m in range(active):
            base = active + m * (d - 1)
            nodes.append((m, list(range(base, base + d - 1)), data + m))
        active *= d
    return data, pool, nodes


def _qwtree_body(dims, params):
    d, n = dims[0], int(params["n"])
    data, pool, nodes = _qtree_layout(d, n)
    if len(dims) != data + pool or len(set(dims)) != 1:
        raise InvalidArgument(f"QWTREE(n={n}) needs {data + pool} wires of dimension {d}")
    b = Builder()
    for m, new, anc in nodes:
        b.add("QSPREAD", m, *new, anc)
    return b.gates


register_macro(MacroDef("WPRIME", _w_prime_body))
register_macro(
    MacroDef(
        "SPREAD",
        _spread_body,
        contract="cgp",
        phase_note="CH phase on the firing branch; control in {0, 1}",
        unitary=_embedded_head,
        cost=_embedded_cost,
    )
)
register_macro(MacroDef("WTREE", _wtree_body))
register_macro(MacroDef("MIXEDTREE", _mixed_body))
register_macro(MacroDef("QSPREAD", _qspread_body, contract="cgp", phase_note="CH phase on every firing input"))
register_macro(MacroDef("QWTREE", _qwtree_body))


# -- public constructors -----------------------------------------------------------


def _state_contract(reg: RadixRegister, inp: PureState, target: PureState, **kw) -> Contract:
    return Contract(input_state=inp, target_state=target, **kw)


def synth_w_prime(d: int) -> SynthResult:
    """d-wire circuit taking |0...0> to the d-qubit W state (qubit subspace of each qudit)."""
    d = require_prime(d)
    reg = RadixRegister.uniform(d, d)
    circ = Builder().add("WPRIME", *range(d)).build(reg)
    ct = _state_contract(reg, make_state("zero", reg), make_state("w_qubit", reg), description=f"|0>^{d} -> W_{d}")
    return SynthResult("wprime", {"d": d}, circ, ct)


def synth_spread(d: int) -> SynthResult:
    """|0...0> -> |0...0> and |1,0...0> -> phase * W_d (control in {0, 1})."""
    d = require_prime(d)
    reg = RadixRegister.uniform(d, d)
    circ = Builder().add("SPREAD", *range(d)).build(reg)
    ph = ch_phase(d)
    zero = [0] * d
    one = [1] + [0] * (d - 1)
    cols = (reg.encode(zero), reg.encode(one))
    exp = np.zeros((reg.total_dim, 2), dtype=complex)
    exp[cols[0], 0] = 1
    for cfg, a in oracles.w_qubit_terms(d).items():
        exp[reg.encode(cfg), 1] = ph * a
    ct = Contract(
        klass="cgp",
        columns=cols,
        expected=exp,
        phases={"control=1": ph},
        subspace={0: (0, 1)},
        description="spread: |0..0> fixed, |10..0> -> W_d",
    )
    return SynthResult("spread", {"d": d}, circ, ct)


def synth_spread_tree(d: int, n: int, max_wires: int | None = None) -> SynthResult:
    """n layers of spread gates preparing the d^n-qubit W state from |0...0>."""
    d = require_prime(d)
    n = int(n)
    if n < 1:
        raise InvalidArgument(f"number of layers must be >= 1, got {n}")
    _guard(d**n, max_wires)
    reg = RadixRegister.uniform(d, d**n)
    circ = Builder().add("WTREE", *range(d**n), n=n).build(reg)
    ct = _state_contract(
        reg,
        make_state("zero", reg),
        make_state("w_qubit", reg),
        description=f"|0>^N -> W_N, N = {d}^{n}",
        support_bound=d * len(reg),
    )
    return SynthResult("wtree", {"d": d, "n": n}, circ, ct)


def synth_qudit_spread(d: int) -> SynthResult:
    """Qudit spread gate on d wires; wire d is a clean ancilla."""
    d = require_odd_prime(d)
    reg = RadixRegister.uniform(d, d + 1)
    circ = Builder().add("QSPREAD", *range(d + 1)).build(reg, ancillas=(d,))
    ph = ch_phase(d)
    cols, exps = [], []
    for k in range(d):
        cols.append(reg.encode([k] + [0] * d))
        vec = np.zeros(reg.total_dim, dtype=complex)
        for cfg, a in oracles.qudit_spread_action(d, k).items():
            vec[reg.encode(list(cfg) + [0])] = a * (ph if k else 1)
        exps.append(vec)
    ct = Contract(
        klass="cgp",
        columns=tuple(cols),
        expected=np.array(exps).T,
        phases={"control!=0": ph},
        description="|k,0..0> -> (sum_j |0..j_k..0> + |k,0..0>)/sqrt(d), ancilla clean",
    )
    return SynthResult("qspread", {"d": d}, circ, ct)


def synth_qudit_w_tree(d: int, n: int, max_wires: int | None = None) -> SynthResult:
    """Qudit W state on d^n wires from the resource state on wire 0.

    An ancilla pool of d^{n-1} wires (one per spread in the widest layer)
    follows the data wires and is returned clean.
    """
    d = require_odd_prime(d)
    n = int(n)
    if n < 1:
        raise InvalidArgument(f"number of layers must be >= 1, got {n}")
    data, pool, _ = _qtree_layout(d, n)
    _guard(data + pool, max_wires)
    reg = RadixRegister.uniform(d, data + pool)
    ancillas = tuple(range(data, data + pool))
    circ = Builder().add("QWTREE", *range(data + pool), n=n).build(reg, ancillas)
    inp = make_state("resource", reg, wire=0)
    target = make_state("w_qudit", reg, wires=list(range(data)))
    # each node's controlled H spreads every branch by d before the
    # uncompute collapses it, so the qudit tree peaks near d (d - 1) per wire
    ct = _state_contract(reg, inp, target, description=f"resource state -> qudit W_{data}", support_bound=d * (d - 1) * len(reg))
    return SynthResult("qwtree", {"d": d, "n": n}, circ, ct)


def mixed_dims(factors: Sequence[int]) -> list[int]:
    return _tree_layout(list(factors))[0]


def synth_mixed_tree(factors: Sequence[int], max_wires: int | None = None) -> SynthResult:
    """W state on N = prod(factors) qubit subspaces, layer i over dimension factors[i]."""
    factors = [require_prime(int(f), "factor") for f in factors]
    if not factors:
        raise InvalidArgument("need at least one factor")
    _guard(math.prod(factors), max_wires)
    dims = mixed_dims(factors)
    reg = RadixRegister(dims)
    circ = Builder().add("MIXEDTREE", *range(len(dims)), factors=factors).build(reg)
    ct = _state_contract(
        reg,
        make_state("zero", reg),
        make_state("w_qubit", reg),
        description=f"|0>^N -> W_N over dims {factors}",
        support_bound=max(dims) * len(dims),
    )
    return SynthResult("mixed", {"factors": factors}, circ, ct)


@dataclass(frozen=True)
class PostSelectionPlan:
    N: int
    d: int
    layers: int
    tree_size: int
    drop_wires: tuple[int, ...]
    probability: Fraction
    expected_attempts: Fraction

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "layers": self.layers,
            "tree_size": self.tree_size,
            "drop_wires": list(self.drop_wires),
            "probability": str(self.probability),
            "expected_attempts": str(self.expected_attempts),
        }


def plan_postselected_w(N: int, d: int) -> PostSelectionPlan:
    """Smallest d-ary tree with at least N wires; the surplus wires are projected onto |0>."""
    d = require_prime(d)
    N = int(N)
    if N < 2:
        raise InvalidArgument(f"N must be >= 2, got {N}")
    n, size = 1, d
    while size < N:
        n, size = n + 1, size * d
    return PostSelectionPlan(N, d, n, size, tuple(range(N, size)), Fraction(N, size), Fraction(size, N))


def run_postselected_w(plan: PostSelectionPlan) -> tuple[float, PureState]:
    """Simulate the plan's tree from |0...0> and project the dropped wires onto |0>.

    The returned state keeps the full register; the dropped wires are |0>.
    """
    res = synth_spread_tree(plan.d, plan.layers)
    out = apply_circuit(make_state("zero", res.circuit.register, sparse=True), res.expanded)
    return post_select_many(out, {w: 0 for w in plan.drop_wires})
