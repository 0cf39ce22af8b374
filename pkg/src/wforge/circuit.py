"""Circuit intermediate representation over mixed-radix registers.

A circuit is an immutable list of gate instances. Primitive gates have a
matrix in :mod:`wforge.gates`; macro gates are expanded through a registry
that the synthesis package fills in at import time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .core import InvalidArgument, RadixRegister, WForgeError
from .gates import PRIMITIVES, TWO_WIRE, GateSpec, freeze_params, gate_matrix, uma_level

FORMAT_VERSION = 1

MACROS = (
    "ZCX",
    "KCX",
    "CGP",
    "CH",
    "OCH",
    "KCH",
    "CZTAU",
    "POINTPHASE",
    "GADGET",
    "WPRIME",
    "SPREAD",
    "QSPREAD",
    "WTREE",
    "QWTREE",
    "MIXEDTREE",
)
GATE_NAMES = frozenset(PRIMITIVES) | frozenset(MACROS)
# Primitive but not in the Clifford+sqrt(Z) basis; expand() lowers them.
LOWERED = frozenset({"P1", "ZALPHA"})


class ParseError(WForgeError, ValueError):
    pass


class UnknownMacroError(WForgeError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0])


@dataclass(frozen=True)
class GateInstance:
    name: str
    wires: tuple[int, ...]
    params: tuple[tuple[str, Any], ...] = ()
    dagger: bool = False

    @classmethod
    def make(cls, name: str, wires: Sequence[int], dagger: bool = False, **params: Any) -> "GateInstance":
        return cls(name, tuple(int(w) for w in wires), freeze_params(params), bool(dagger))

    @property
    def is_primitive(self) -> bool:
        return self.name in PRIMITIVES

    def param(self, key: str, default: Any = None) -> Any:
        for k, v in self.params:
            if k == key:
                return v
        return default

    @property
    def param_dict(self) -> dict[str, Any]:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params}

    def spec(self, dims: Sequence[int]) -> GateSpec:
        return GateSpec(self.name, tuple(dims[w] for w in self.wires), self.params)

    def relabel(self, mapping: Sequence[int]) -> "GateInstance":
        return GateInstance(self.name, tuple(mapping[w] for w in self.wires), self.params, self.dagger)

    def inverse(self) -> "GateInstance":
        return GateInstance(self.name, self.wires, self.params, not self.dagger)


@dataclass(frozen=True)
class Circuit:
    register: RadixRegister
    gates: tuple[GateInstance, ...] = ()
    ancillas: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "ancillas", tuple(sorted(set(int(a) for a in self.ancillas))))
        n = len(self.register)
        for a in self.ancillas:
            if not 0 <= a < n:
                raise InvalidArgument(f"ancilla wire {a} out of range for {n} wires")
        for i, g in enumerate(self.gates):
            _validate_instance(g, self.register.dims, f"gates[{i}]")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.register.dims

    @property
    def data_wires(self) -> tuple[int, ...]:
        anc = set(self.ancillas)
        return tuple(w for w in range(len(self.register)) if w not in anc)

    def __len__(self) -> int:
        return len(self.gates)


def _validate_instance(g: GateInstance, dims: Sequence[int], where: str) -> None:
    if g.name not in GATE_NAMES:
        raise InvalidArgument(f"{where}: unknown gate {g.name!r}")
    if not g.wires:
        raise InvalidArgument(f"{where}: gate {g.name} has no wires")
    if len(set(g.wires)) != len(g.wires):
        raise InvalidArgument(f"{where}: repeated wire in {g.wires}")
    for w in g.wires:
        if not 0 <= w < len(dims):
            raise InvalidArgument(f"{where}: wire {w} out of range for {len(dims)} wires")
    if g.is_primitive:
        want = 2 if g.name in TWO_WIRE else 1
        if len(g.wires) != want:
            raise InvalidArgument(f"{where}: {g.name} acts on {want} wire(s), got {len(g.wires)}")
        wd = [dims[w] for w in g.wires]
        if g.name in TWO_WIRE and wd[0] != wd[1]:
            raise InvalidArgument(f"{where}: {g.name} needs equal wire dimensions, got {wd}")
        if g.name == "T2" and wd[0] != 2:
            raise InvalidArgument(f"{where}: T2 needs a qubit wire, got dimension {wd[0]}")


class Builder:
    """Mutable gate list used while constructing circuits and macro bodies."""

    def __init__(self):
        self.gates: list[GateInstance] = []

    def add(self, name: str, *wires: int, dag: bool = False, **params: Any) -> "Builder":
        self.gates.append(GateInstance.make(name, wires, dagger=dag, **params))
        return self

    def repeat(self, times: int, name: str, *wires: int, dag: bool = False, **params: Any) -> "Builder":
        for _ in range(times):
            self.add(name, *wires, dag=dag, **params)
        return self

    def extend(self, gates: Iterable[GateInstance]) -> "Builder":
        self.gates.extend(gates)
        return self

    def build(self, register: RadixRegister | Sequence[int], ancillas: Iterable[int] = ()) -> Circuit:
        if not isinstance(register, RadixRegister):
            register = RadixRegister(register)
        return Circuit(register, tuple(self.gates), tuple(ancillas))


# -- macro registry -----------------------------------------------------------

MacroBody = Callable[[tuple[int, ...], dict[str, Any]], "list[GateInstance] | None"]


@dataclass(frozen=True)
class MacroDef:
    """A macro gate.

    ``build`` maps (wire dims, params) to a gate list on local wires
    0..k-1, or None when the instance has no primitive expansion (a
    cross-dimension node); such opaque nodes must supply ``unitary`` and
    ``cost``. ``contract`` is "exact" or "cgp" (equal up to a controlled
    global phase, value in ``phase_note``).
    """

    name: str
    build: MacroBody
    contract: str = "exact"
    phase_note: str = ""
    unitary: Callable[[tuple[int, ...], dict[str, Any]], np.ndarray] | None = None
    cost: Callable[[tuple[int, ...], dict[str, Any]], "ResourceReport"] | None = None


_REGISTRY: dict[str, MacroDef] = {}


def register_macro(defn: MacroDef) -> MacroDef:
    if defn.name not in MACROS:
        raise InvalidArgument(f"{defn.name!r} is not a recognised macro name")
    if defn.contract not in ("exact", "cgp"):
        raise InvalidArgument(f"unknown contract class {defn.contract!r}")
    _REGISTRY[defn.name] = defn
    return defn


def get_macro(name: str) -> MacroDef:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownMacroError(f"macro {name!r} is not registered") from None


def macro_body(g: GateInstance, dims: Sequence[int]) -> list[GateInstance] | None:
    """One-level expansion on global wires (daggered if needed), None if opaque."""
    defn = get_macro(g.name)
    local_dims = tuple(dims[w] for w in g.wires)
    body = defn.build(local_dims, g.param_dict)
    if body is None:
        return None
    body = [b.relabel(g.wires) for b in body]
    if g.dagger:
        body = [b.inverse() for b in reversed(body)]
    return body


def is_opaque(g: GateInstance, dims: Sequence[int]) -> bool:
    if g.is_primitive:
        return False
    return macro_body(g, dims) is None


# -- lowering to the Clifford + sqrt(Z) basis ------------------------------------


def _lower_p1(d: int, k: int, wire: int, dagger: bool) -> list[GateInstance]:
    # P1(k) = zeta X^k sqrtZ^dag X sqrtZ X^-(k+1); the zeta global phase is dropped.
    seq = []
    pre = (-(k + 1)) % d
    if pre:
        seq.append(GateInstance.make("X", [wire], p=pre))
    seq.append(GateInstance.make("SQRTZ", [wire]))
    seq.append(GateInstance.make("X", [wire]))
    seq.append(GateInstance.make("SQRTZ", [wire], dagger=True))
    if k % d:
        seq.append(GateInstance.make("X", [wire], p=k % d))
    if dagger:
        seq = [s.inverse() for s in reversed(seq)]
    return seq


def lower_primitive(g: GateInstance, dims: Sequence[int]) -> list[GateInstance]:
    """Rewrite P1 / ZALPHA into X and SQRTZ gates (up to global phase)."""
    d = dims[g.wires[0]]
    w = g.wires[0]
    if g.name == "P1":
        k = int(g.param("k"))
        if not 0 <= k < d:
            raise InvalidArgument(f"P1 needs 0 <= k < {d}, got {k}")
        return _lower_p1(d, k, w, g.dagger)
    if g.name == "ZALPHA":
        alpha = [int(a) % d for a in g.param("alpha")]
        if len(alpha) != d:
            raise InvalidArgument(f"ZALPHA needs {d} exponents, got {len(alpha)}")
        out = []
        for k, a in enumerate(alpha):
            a = (-a) % d if g.dagger else a
            # omega^a on |k>: a copies of P1(k), or d - a copies of its inverse
            inv = a > d - a
            for _ in range(d - a if inv else a):
                out.extend(_lower_p1(d, k, w, inv))
        return out
    return [g]


def expand(c: Circuit, lower: bool = True) -> Circuit:
    """Expand every macro down to primitives.

    With ``lower`` set, P1 and ZALPHA are also rewritten into X / SQRTZ so
    that the result is in the Clifford + sqrt(Z) (+ qubit T) gate set.
    Opaque cross-dimension nodes are left in place.
    """
    dims = c.dims
    out: list[GateInstance] = []
    stack = list(reversed(c.gates))
    while stack:
        g = stack.pop()
        if g.is_primitive:
            if lower and g.name in LOWERED:
                out.extend(lower_primitive(g, dims))
            else:
                out.append(g)
            continue
        body = macro_body(g, dims)
        if body is None:
            out.append(g)
        else:
            stack.extend(reversed(body))
    return Circuit(c.register, tuple(out), c.ancillas)


def macro_census(c: Circuit, names: Iterable[str] | None = None) -> dict[str, int]:
    """Count macro instances at every nesting level."""
    want = set(names) if names is not None else None
    counts: dict[str, int] = {}
    stack = list(c.gates)
    dims = c.dims
    while stack:
        g = stack.pop()
        if g.is_primitive:
            continue
        if want is None or g.name in want:
            counts[g.name] = counts.get(g.name, 0) + 1
        body = macro_body(g, dims)
        if body:
            stack.extend(body)
    return counts


# -- composition ----------------------------------------------------------------


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Apply ``a`` then ``b``."""
    if a.register != b.register:
        raise InvalidArgument(f"register mismatch: {a.dims} vs {b.dims}")
    return Circuit(a.register, a.gates + b.gates, tuple(set(a.ancillas) | set(b.ancillas)))


def inverse(c: Circuit) -> Circuit:
    return Circuit(c.register, tuple(g.inverse() for g in reversed(c.gates)), c.ancillas)


# -- resources ----------------------------------------------------------------------


@dataclass
class ResourceReport:
    sqrtz: dict[int, int] = field(default_factory=dict)
    t_count: int = 0
    non_clifford: dict[int, int] = field(default_factory=dict)
    two_qudit: int = 0
    gates: int = 0
    depth: int = 0
    ancillas: int = 0
    embedded: int = 0

    def __add__(self, other: "ResourceReport") -> "ResourceReport":
        return ResourceReport(
            _add_counts(self.sqrtz, other.sqrtz),
            self.t_count + other.t_count,
            _add_counts(self.non_clifford, other.non_clifford),
            self.two_qudit + other.two_qudit,
            self.gates + other.gates,
            self.depth + other.depth,
            self.ancillas + other.ancillas,
            self.embedded + other.embedded,
        )

    @property
    def total_non_clifford(self) -> int:
        return sum(self.non_clifford.values())

    @property
    def total_sqrtz(self) -> int:
        return sum(self.sqrtz.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "sqrtz": {str(k): v for k, v in sorted(self.sqrtz.items())},
            "t_count": self.t_count,
            "non_clifford": {str(k): v for k, v in sorted(self.non_clifford.items())},
            "two_qudit": self.two_qudit,
            "gates": self.gates,
            "depth": self.depth,
            "ancillas": self.ancillas,
            "embedded": self.embedded,
        }


def _add_counts(a: Mapping[int, int], b: Mapping[int, int]) -> dict[int, int]:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def count_resources(c: Circuit) -> ResourceReport:
    """Tally gates of an expanded circuit (daggers count like the gate itself).

    The non-Clifford tally is sqrt(Z) on odd-dimension wires and T on qubit
    wires; opaque cross-dimension nodes contribute their registered cost.
    """
    rep = ResourceReport(ancillas=len(c.ancillas), depth=depth(c))
    dims = c.dims
    for g in c.gates:
        if not g.is_primitive:
            body = macro_body(g, dims)
            if body is not None:
                raise InvalidArgument(f"unexpanded macro {g.name} present; call expand() first")
            defn = get_macro(g.name)
            sub = defn.cost(tuple(dims[w] for w in g.wires), g.param_dict)
            rep.sqrtz = _add_counts(rep.sqrtz, sub.sqrtz)
            rep.non_clifford = _add_counts(rep.non_clifford, sub.non_clifford)
            rep.t_count += sub.t_count
            rep.two_qudit += sub.two_qudit
            rep.gates += sub.gates
            rep.embedded += 1
            continue
        if g.name in LOWERED:
            raise InvalidArgument(f"{g.name} must be lowered before counting; call expand()")
        d = dims[g.wires[0]]
        rep.gates += 1
        if len(g.wires) == 2:
            rep.two_qudit += 1
        if g.name == "SQRTZ":
            rep.sqrtz = _add_counts(rep.sqrtz, {d: 1})
            if d != 2:
                rep.non_clifford = _add_counts(rep.non_clifford, {d: 1})
        elif g.name == "T2":
            rep.t_count += 1
            rep.non_clifford = _add_counts(rep.non_clifford, {2: 1})
        elif g.name == "UMA" and uma_level(d, int(g.param("m")), int(g.param("a"))) > 2:
            rep.non_clifford = _add_counts(rep.non_clifford, {d: 1})
    return rep


def depth(c: Circuit) -> int:
    """Greedy as-soon-as-possible layer count; gates share a layer iff wire-disjoint."""
    avail = [0] * len(c.register)
    top = 0
    for g in c.gates:
        layer = 1 + max(avail[w] for w in g.wires)
        for w in g.wires:
            avail[w] = layer
        top = max(top, layer)
    return top


# -- document format ------------------------------------------------------------


def _param_json(v: Any) -> Any:
    return list(v) if isinstance(v, tuple) else v


def serialize(c: Circuit) -> str:
    """Circuit document: one gate per line, fixed field order, sorted parameter keys."""
    head = [
        f'  "version": {FORMAT_VERSION}',
        f'  "dims": {json.dumps(list(c.dims))}',
        f'  "ancillas": {json.dumps(list(c.ancillas))}',
    ]
    rows = []
    for g in c.gates:
        p = {k: _param_json(v) for k, v in g.params}
        rows.append(
            '    {"g": %s, "w": %s, "p": %s, "dag": %s}'
            % (json.dumps(g.name), json.dumps(list(g.wires)), json.dumps(p, sort_keys=True), json.dumps(g.dagger))
        )
    gates = '  "gates": [\n' + ",\n".join(rows) + "\n  ]" if rows else '  "gates": []'
    return "{\n" + ",\n".join(head + [gates]) + "\n}\n"


_TOP_FIELDS = {"version", "dims", "ancillas", "gates"}
_GATE_FIELDS = {"g", "w", "p", "dag"}


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"$: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise ParseError("$: document must be an object")
    extra = set(doc) - _TOP_FIELDS
    if extra:
        raise ParseError(f"$: unknown field(s) {sorted(extra)}")
    missing = _TOP_FIELDS - set(doc) - {"ancillas"}
    if missing:
        raise ParseError(f"$: missing field(s) {sorted(missing)}")
    if doc["version"] != FORMAT_VERSION or not _is_int(doc["version"]):
        raise ParseError(f"$.version: unsupported version {doc['version']!r}")
    dims = doc["dims"]
    if not isinstance(dims, list) or not dims or not all(_is_int(x) for x in dims):
        raise ParseError("$.dims: must be a non-empty array of integers")
    try:
        register = RadixRegister(dims)
    except InvalidArgument as exc:
        raise ParseError(f"$.dims: {exc}") from exc
    ancillas = doc.get("ancillas", [])
    if not isinstance(ancillas, list) or not all(_is_int(x) for x in ancillas):
        raise ParseError("$.ancillas: must be an array of integers")
    if not isinstance(doc["gates"], list):
        raise ParseError("$.gates: must be an array")
    gates = []
    for i, raw in enumerate(doc["gates"]):
        where = f"$.gates[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: must be an object")
        extra = set(raw) - _GATE_FIELDS
        if extra:
            raise ParseError(f"{where}: unknown field(s) {sorted(extra)}")
        name = raw.get("g")
        if not isinstance(name, str):
            raise ParseError(f"{where}.g: missing gate name")
        if name not in GATE_NAMES:
            raise ParseError(f"{where}.g: unknown gate {name!r}")
        wires = raw.get("w")
        if not isinstance(wires, list) or not all(_is_int(w) for w in wires):
            raise ParseError(f"{where}.w: must be an array of integers")
        params = raw.get("p", {})
        if not isinstance(params, dict):
            raise ParseError(f"{where}.p: must be an object")
        for k, v in params.items():
            ok = _is_int(v) or isinstance(v, bool) or (isinstance(v, list) and all(_is_int(x) for x in v))
            if not ok:
                raise ParseError(f"{where}.p.{k}: unsupported value {v!r}")
        dag = raw.get("dag", False)
        if not isinstance(dag, bool):
            raise ParseError(f"{where}.dag: must be a boolean")
        g = GateInstance.make(name, wires, dagger=dag, **params)
        try:
            _validate_instance(g, register.dims, where)
            if g.is_primitive:
                gate_matrix(g.spec(register.dims))
        except InvalidArgument as exc:
            raise ParseError(str(exc)) from exc
        gates.append(g)
    try:
        return Circuit(register, tuple(gates), tuple(ancillas))
    except InvalidArgument as exc:
        raise ParseError(f"$.ancillas: {exc}") from exc


def save(c: Circuit, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(c))


def load(path: str) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
