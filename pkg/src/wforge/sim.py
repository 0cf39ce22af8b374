"""Dense and sparse state-vector simulation, unitary oracle and comparisons."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .circuit import Circuit, GateInstance, expand, get_macro
from .core import InvalidArgument, RadixRegister, ResourceLimitError, WForgeError, get_tol
from .gates import gate_matrix

UNITARY_CAP = 4096
DENSE_STATE_CAP = 1 << 22
PRUNE = 1e-14


class ImpossibleOutcome(WForgeError):
    pass


# -- states ------------------------------------------------------------------------


@dataclass(frozen=True)
class PureState:
    """Amplitudes over a register, either a dense vector or a config -> amplitude map."""

    register: RadixRegister
    dense: np.ndarray | None = None
    sparse: Mapping[tuple[int, ...], complex] | None = None

    def __post_init__(self):
        if (self.dense is None) == (self.sparse is None):
            raise InvalidArgument("exactly one of dense / sparse must be given")
        if self.dense is not None:
            vec = np.asarray(self.dense, dtype=complex).reshape(-1)
            if vec.size != self.register.total_dim:
                raise InvalidArgument(f"vector length {vec.size} != register dimension {self.register.total_dim}")
            vec.setflags(write=False)
            object.__setattr__(self, "dense", vec)
        else:
            clean = {}
            n = len(self.register)
            for cfg, a in self.sparse.items():
                cfg = tuple(int(x) for x in cfg)
                if len(cfg) != n:
                    raise InvalidArgument(f"configuration {cfg} has wrong length for {n} wires")
                if abs(a) >= PRUNE:
                    clean[cfg] = complex(a)
            object.__setattr__(self, "sparse", clean)

    @property
    def is_sparse(self) -> bool:
        return self.sparse is not None

    @property
    def dims(self) -> tuple[int, ...]:
        return self.register.dims

    def items(self) -> Iterable[tuple[tuple[int, ...], complex]]:
        if self.is_sparse:
            return sorted(self.sparse.items())
        nz = np.flatnonzero(np.abs(self.dense) >= PRUNE)
        return [(self.register.decode(int(i)), complex(self.dense[i])) for i in nz]

    @property
    def support_size(self) -> int:
        if self.is_sparse:
            return len(self.sparse)
        return int(np.count_nonzero(np.abs(self.dense) >= PRUNE))

    def norm(self) -> float:
        if self.is_sparse:
            return math.sqrt(sum(abs(a) ** 2 for a in self.sparse.values()))
        return float(np.linalg.norm(self.dense))

    def amplitude(self, digits: Sequence[int]) -> complex:
        if self.is_sparse:
            return self.sparse.get(tuple(digits), 0j)
        return complex(self.dense[self.register.encode(digits)])

    def to_dense(self) -> "PureState":
        if not self.is_sparse:
            return self
        if self.register.total_dim > DENSE_STATE_CAP:
            raise ResourceLimitError(f"dense vector of dimension {self.register.total_dim} exceeds cap {DENSE_STATE_CAP}")
        vec = np.zeros(self.register.total_dim, dtype=complex)
        for cfg, a in self.sparse.items():
            vec[self.register.encode(cfg)] = a
        return PureState(self.register, dense=vec)

    def to_sparse(self) -> "PureState":
        if self.is_sparse:
            return self
        return PureState(self.register, sparse=dict(self.items()))


def make_state(kind: str, reg: RadixRegister | Sequence[int], sparse: bool | None = None, **params: Any) -> PureState:
    """Analytic states.

    kinds: zero; basis (digits); plus (wire, default all wires); resource
    (wire, default 0); w_qubit (wires, default all); w_qudit (wires, default all).
    """
    if not isinstance(reg, RadixRegister):
        reg = RadixRegister(reg)
    n = len(reg)
    if sparse is None:
        sparse = reg.total_dim > UNITARY_CAP
    zero = [0] * n
    terms: dict[tuple[int, ...], complex]
    if kind == "zero":
        terms = {tuple(zero): 1}
    elif kind == "basis":
        digits = params.get("digits")
        if digits is None:
            raise InvalidArgument("basis state needs 'digits'")
        reg.encode(digits)
        terms = {tuple(int(x) for x in digits): 1}
    elif kind in ("plus", "resource"):
        wire = params.get("wire")
        wires = list(range(n)) if wire is None and kind == "plus" else [0 if wire is None else int(wire)]
        for w in wires:
            if not 0 <= w < n:
                raise InvalidArgument(f"wire {w} out of range")
        terms = {tuple(zero): 1}
        for w in wires:
            d = reg[w]
            vals = range(d) if kind == "plus" else range(1, d)
            amp = 1 / math.sqrt(len(vals))
            nxt = {}
            for cfg, a in terms.items():
                for v in vals:
                    c2 = list(cfg)
                    c2[w] = v
                    nxt[tuple(c2)] = a * amp
            terms = nxt
    elif kind in ("w_qubit", "w_qudit"):
        wires = list(params.get("wires") or range(n))
        if not wires:
            raise InvalidArgument("W state needs at least one wire")
        terms = {}
        for w in wires:
            if not 0 <= w < n:
                raise InvalidArgument(f"wire {w} out of range")
            vals = [1] if kind == "w_qubit" else list(range(1, reg[w]))
            for v in vals:
                c2 = list(zero)
                c2[w] = v
                terms[tuple(c2)] = 1
        amp = 1 / math.sqrt(len(terms))
        terms = {k: amp for k in terms}
    else:
        raise InvalidArgument(f"unknown state kind {kind!r}")
    st = PureState(reg, sparse=terms)
    return st if sparse else st.to_dense()


# -- gate kernels --------------------------------------------------------------------


def _local_matrix(g: GateInstance, dims: Sequence[int]) -> np.ndarray:
    if g.is_primitive:
        return gate_matrix(g.spec(dims), g.dagger)
    defn = get_macro(g.name)
    if defn.unitary is None:
        raise InvalidArgument(f"macro {g.name} has no expansion or embedded unitary for dims {[dims[w] for w in g.wires]}")
    m = defn.unitary(tuple(dims[w] for w in g.wires), g.param_dict)
    return m.conj().T if g.dagger else m


def _ops(c: Circuit) -> list[tuple[tuple[int, ...], np.ndarray]]:
    full = expand(c, lower=False) if any(not g.is_primitive for g in c.gates) else c
    return [(g.wires, _local_matrix(g, full.dims)) for g in full.gates]


@lru_cache(maxsize=8192)
def _columns(key: bytes, shape: tuple[int, ...], local_dims: tuple[int, ...]) -> tuple:
    # Nonzero entries of each column as (output digits, amplitude).
    M = np.frombuffer(key, dtype=complex).reshape(shape)
    outs = []
    digits = [tuple(int(v) for v in np.unravel_index(r, local_dims)) for r in range(shape[0])]
    for col in range(shape[1]):
        nz = np.flatnonzero(np.abs(M[:, col]) > 1e-15)
        outs.append(tuple((digits[r], complex(M[r, col])) for r in nz))
    return tuple(outs)


def _apply_sparse(
    amps: dict[tuple[int, ...], complex], wires: tuple[int, ...], M: np.ndarray, dims: Sequence[int]
) -> dict[tuple[int, ...], complex]:
    local_dims = tuple(dims[w] for w in wires)
    cols = _columns(np.ascontiguousarray(M).tobytes(), M.shape, local_dims)
    out: dict[tuple[int, ...], complex] = defaultdict(complex)
    if len(wires) == 1:
        w = wires[0]
        for cfg, a in amps.items():
            for (v,), m in cols[cfg[w]]:
                out[cfg[:w] + (v,) + cfg[w + 1 :]] += a * m
    else:
        for cfg, a in amps.items():
            li = 0
            for w, d in zip(wires, local_dims):
                li = li * d + cfg[w]
            for vals, m in cols[li]:
                c2 = list(cfg)
                for w, v in zip(wires, vals):
                    c2[w] = v
                out[tuple(c2)] += a * m
    return {k: v for k, v in out.items() if abs(v) >= PRUNE}


def _apply_tensor(psi: np.ndarray, wires: tuple[int, ...], M: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    k = len(wires)
    local = [dims[w] for w in wires]
    Mt = M.reshape(local + local)
    out = np.tensordot(Mt, psi, axes=(list(range(k, 2 * k)), list(wires)))
    return np.moveaxis(out, list(range(k)), list(wires))


def apply_circuit(
    state: PureState,
    c: Circuit,
    engine: str = "auto",
    max_support: int | None = None,
    stats: dict | None = None,
) -> PureState:
    """Run ``c`` on ``state`` gate by gate.

    ``engine`` is "dense", "sparse" or "auto" (follow the state's
    representation). ``max_support`` raises :class:`ResourceLimitError` as
    soon as the sparse support exceeds it; ``stats`` receives the peak
    support size under key "peak_support".
    """
    if state.register != c.register:
        raise InvalidArgument(f"state dims {state.dims} do not match circuit dims {c.dims}")
    if engine == "auto":
        engine = "sparse" if state.is_sparse else "dense"
    if engine not in ("dense", "sparse"):
        raise InvalidArgument(f"unknown engine {engine!r}")
    dims = c.dims
    ops = _ops(c)
    if engine == "sparse":
        amps = dict(state.to_sparse().sparse)
        peak = len(amps)
        for wires, M in ops:
            amps = _apply_sparse(amps, wires, M, dims)
            peak = max(peak, len(amps))
            if max_support is not None and len(amps) > max_support:
                raise ResourceLimitError(f"sparse support {len(amps)} exceeds bound {max_support}")
        if stats is not None:
            stats["peak_support"] = peak
        return PureState(c.register, sparse=amps)
    psi = state.to_dense().dense.reshape(dims).copy()
    for wires, M in ops:
        psi = _apply_tensor(psi, wires, M, dims)
    if stats is not None:
        stats["peak_support"] = None
    return PureState(c.register, dense=psi.reshape(-1))


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense matrix of ``c``; column j is the image of basis state j."""
    D = c.register.total_dim
    if D > UNITARY_CAP:
        raise ResourceLimitError(f"total dimension {D} exceeds dense cap {UNITARY_CAP}")
    dims = c.dims
    U = np.eye(D, dtype=complex).reshape(tuple(dims) + (D,))
    for wires, M in _ops(c):
        U = _apply_tensor(U, wires, M, dims)
    return U.reshape(D, D)


def circuit_columns(c: Circuit, columns: Sequence[int]) -> np.ndarray:
    """Images of the selected basis states only (no total-dimension cap beyond memory)."""
    D = c.register.total_dim
    cols = list(columns)
    if D * max(len(cols), 1) > DENSE_STATE_CAP:
        raise ResourceLimitError(f"{len(cols)} columns of dimension {D} exceed cap {DENSE_STATE_CAP}")
    dims = c.dims
    U = np.zeros((D, len(cols)), dtype=complex)
    U[cols, range(len(cols))] = 1
    U = U.reshape(tuple(dims) + (len(cols),))
    for wires, M in _ops(c):
        U = _apply_tensor(U, wires, M, dims)
    return U.reshape(D, len(cols))


# -- comparisons -----------------------------------------------------------------------


def inner(a: PureState, b: PureState) -> complex:
    if a.register != b.register:
        raise InvalidArgument(f"register mismatch: {a.dims} vs {b.dims}")
    if not a.is_sparse and not b.is_sparse:
        return complex(np.vdot(a.dense, b.dense))
    sa, sb = a.to_sparse().sparse, b.to_sparse().sparse
    if len(sa) <= len(sb):
        return complex(sum(np.conj(v) * sb.get(k, 0) for k, v in sa.items()))
    return complex(sum(np.conj(sa.get(k, 0)) * v for k, v in sb.items()))


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2."""
    return float(abs(inner(a, b)) ** 2)


@dataclass(frozen=True)
class Comparison:
    ok: bool
    deviation: float
    phase: complex = 1

    def __bool__(self) -> bool:
        return self.ok


def _align(U: np.ndarray, V: np.ndarray) -> complex:
    # Phase from the largest-modulus entry of the reference V.
    idx = np.unravel_index(int(np.argmax(np.abs(V))), V.shape)
    if abs(U[idx]) < 1e-12:
        return 1
    ph = U[idx] / V[idx]
    return ph / abs(ph)


def compare_unitaries(
    U: np.ndarray,
    V: np.ndarray,
    mode: str = "exact",
    *,
    dims: Sequence[int] | None = None,
    control: int | None = None,
    values: Iterable[int] | None = None,
    columns: Sequence[int] | None = None,
    phase_mode: str = "global_phase",
    tol: float | None = None,
) -> Comparison:
    """Compare U against the reference V.

    mode "exact" is entrywise; "global_phase" first aligns one common phase;
    "control_subspace" keeps only columns whose ``control`` digit (under
    ``dims``) lies in ``values`` and then compares under ``phase_mode``.
    An explicit ``columns`` list restricts any mode the same way.
    """
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if U.shape != V.shape:
        raise InvalidArgument(f"shape mismatch {U.shape} vs {V.shape}")
    tol = get_tol() if tol is None else tol
    if mode == "control_subspace":
        if dims is None or control is None or values is None:
            raise InvalidArgument("control_subspace mode needs dims, control and values")
        reg = RadixRegister(dims)
        allowed = set(values)
        columns = [j for j in range(reg.total_dim) if reg.decode(j)[control] in allowed]
        mode = phase_mode
    if columns is not None:
        U, V = U[:, list(columns)], V[:, list(columns)]
    if mode == "exact":
        ph = 1
    elif mode == "global_phase":
        ph = _align(U, V)
    else:
        raise InvalidArgument(f"unknown comparison mode {mode!r}")
    dev = float(np.abs(U - ph * V).max()) if U.size else 0.0
    return Comparison(dev <= tol, dev, complex(ph))


def compare_states(a: PureState, b: PureState, tol: float | None = None) -> Comparison:
    """Fidelity-based comparison; deviation is 1 - fidelity."""
    tol = get_tol() if tol is None else tol
    ov = inner(b, a)
    dev = 1 - abs(ov) ** 2
    ph = ov / abs(ov) if abs(ov) > 1e-12 else 1
    return Comparison(dev <= tol, float(max(dev, 0.0)), complex(ph))


def post_select(state: PureState, wire: int, value: int) -> tuple[float, PureState]:
    """Project ``wire`` onto ``value`` and renormalize."""
    n = len(state.register)
    if not 0 <= wire < n:
        raise InvalidArgument(f"wire {wire} out of range for {n} wires")
    if not 0 <= value < state.register[wire]:
        raise InvalidArgument(f"value {value} out of range for wire {wire}")
    if state.is_sparse:
        kept = {k: v for k, v in state.sparse.items() if k[wire] == value}
        prob = sum(abs(v) ** 2 for v in kept.values())
        if prob < 1e-12:
            raise ImpossibleOutcome(f"outcome {value} on wire {wire} has probability {prob:.3g}")
        s = 1 / math.sqrt(prob)
        return prob, PureState(state.register, sparse={k: v * s for k, v in kept.items()})
    psi = state.dense.reshape(state.dims).copy()
    mask = np.zeros(state.dims[wire], dtype=bool)
    mask[value] = True
    sl = [slice(None)] * n
    sl[wire] = ~mask
    psi[tuple(sl)] = 0
    prob = float(np.vdot(psi, psi).real)
    if prob < 1e-12:
        raise ImpossibleOutcome(f"outcome {value} on wire {wire} has probability {prob:.3g}")
    return prob, PureState(state.register, dense=psi.reshape(-1) / math.sqrt(prob))


def post_select_many(state: PureState, outcomes: Mapping[int, int]) -> tuple[float, PureState]:
    total = 1.0
    for wire, value in sorted(outcomes.items()):
        p, state = post_select(state, wire, value)
        total *= p
    return total, state
