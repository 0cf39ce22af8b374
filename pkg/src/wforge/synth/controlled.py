"""Controlled-X, controlled-phase and controlled-H constructions."""

from __future__ import annotations

from typing import Sequence


from .. import oracles
from ..circuit import Builder, Circuit, GateInstance, MacroDef, register_macro
from ..core import InvalidArgument, RadixRegister, mod_inverse, require_odd_prime, require_prime, roots
from ..gates import PhaseVector, alpha_vector, is_clifford, p1, tau_vector
from .base import Contract, SynthResult, column_contract


def ch_phase(d: int) -> complex:
    """Phase picked up by the subspace controlled-H when the control is |1>.

    The circuit is Z(tau) H^dag Z(tau) H Z(tau) on the target, which equals
    i^{-(d-1)/2} H; the qubit construction is exact.
    """
    if d == 2:
        return 1
    return (-1j) ** ((d - 1) // 2)


def lax_phase(d: int, power: int = 1) -> complex:
    """Controlled global phase left by a lax controlled-X on every other control value."""
    if d == 2:
        return 1j**power
    return roots(d).w(power * (d - 1) // 2)


def _uniform(dims: Sequence[int], arity: int, name: str) -> int:
    if len(dims) != arity:
        raise InvalidArgument(f"{name} acts on {arity} wires, got {len(dims)}")
    if len(set(dims)) != 1:
        raise InvalidArgument(f"{name} needs equal wire dimensions, got {list(dims)}")
    return dims[0]


# -- macro bodies ------------------------------------------------------------------


def _cgp_body(dims, params):
    d = _uniform(dims, 1, "CGP")
    b = Builder()
    if d == 2:
        # diag(i, 1) up to global phase
        return b.add("SQRTZ", 0, dag=True).gates
    return b.repeat((d - 1) // 2, "P1", 0, k=0).gates


def _zcx_body(dims, params):
    d = _uniform(dims, 2, "ZCX")
    k = int(params.get("k", 0)) % d
    power = int(params.get("power", 1)) % d
    if power == 0:
        raise InvalidArgument("target power must be nonzero mod d")
    exact = bool(params.get("exact", False))
    b = Builder()
    if k:
        b.add("X", 0, p=(-k) % d)
    for _ in range(power):
        b.add("H", 1)
        for _ in range(d):
            b.add("CX", 0, 1).add("SQRTZ", 1)
        b.add("H", 1, dag=True)
        if exact:
            b.add("CGP", 0)
    if k:
        b.add("X", 0, p=k)
    return b.gates


def _kcx_body(dims, params):
    _uniform(dims, 2, "KCX")
    return [GateInstance.make("ZCX", [0, 1], **params)]


def _gadget_body(dims, params):
    d = _uniform(dims, 2, "GADGET")
    alpha = list(params["alpha"])
    if len(alpha) != d:
        raise InvalidArgument(f"GADGET needs {d} exponents, got {len(alpha)}")
    bdir = int(params.get("b", 1)) % d
    if bdir == 0:
        raise InvalidArgument("gadget direction b must be nonzero mod d")
    return (
        Builder()
        .add("CX", 0, 1, p=bdir)
        .add("ZALPHA", 1, alpha=alpha)
        .add("CX", 0, 1, dag=True, p=bdir)
        .gates
    )


def _point_phase_body(dims, params):
    d = _uniform(dims, 3, "POINTPHASE")
    cval, tval = int(params["cval"]) % d, int(params["tval"]) % d
    power = int(params.get("power", 1)) % d
    b = Builder()
    if power == 0:
        return b.gates
    if d == 2:
        # omega = -1: a Clifford controlled-Z conjugated onto the marked pair
        flips = [w for w, v in ((0, cval), (1, tval)) if v == 0]
        for w in flips:
            b.add("X", w)
        b.add("H", 1).add("CX", 0, 1).add("H", 1, dag=True)
        for w in flips:
            b.add("X", w)
        return b.gates
    # ancilla reaches 2 exactly on |cval, tval>
    b.add("KCX", 0, 2, k=cval, power=1, exact=True)
    b.add("KCX", 1, 2, k=tval, power=1, exact=True)
    b.repeat(power, "P1", 2, k=2)
    b.add("KCX", 1, 2, dag=True, k=tval, power=1, exact=True)
    b.add("KCX", 0, 2, dag=True, k=cval, power=1, exact=True)
    return b.gates


def _cztau_body(dims, params):
    d = _uniform(dims, 2, "CZTAU")
    require_odd_prime(d)
    b = Builder()
    alpha, consistent = alpha_vector(d)
    if consistent:
        # alpha(t) - alpha(t + c) = c t^2 for c in {0, 1}; the control-wire phase alpha(c) vanishes
        neg = list((-alpha).exponents)
        for _ in range(mod_inverse(2, d)):
            b.add("ZALPHA", 1, alpha=list(alpha.exponents))
            b.add("GADGET", 0, 1, alpha=neg, b=1)
        return b.gates
    # d = 3 has no omega-granular solution, but one exists over zeta:
    # zeta^{s(2c+t) - s(t) + s(c-1)} with s(k) = k, which differs between
    # control 1 and control 0 by zeta^{6t^2} = omega^{tau(t)}.
    b.add("CX", 0, 1, p=2).add("SQRTZ", 1).add("CX", 0, 1, dag=True, p=2).add("SQRTZ", 1, dag=True)
    b.add("X", 0, dag=True).add("SQRTZ", 0).add("X", 0)
    return b.gates


def _ch_body(dims, params):
    d = _uniform(dims, 2, "CH")
    b = Builder()
    if d == 2:
        # A^dag X A = H with A = T H S, so conjugating CX gives an exact CH.
        b.add("S", 1).add("H", 1).add("T2", 1)
        b.add("CX", 0, 1)
        b.add("T2", 1, dag=True).add("H", 1, dag=True).add("S", 1, dag=True)
        return b.gates
    b.add("CZTAU", 0, 1).add("H", 1).add("CZTAU", 0, 1).add("H", 1, dag=True).add("CZTAU", 0, 1)
    return b.gates


def _kch_body(dims, params):
    _uniform(dims, 3, "KCH")
    k = int(params.get("k", 1))
    return (
        Builder()
        .add("KCX", 0, 2, k=k, power=1, exact=True)
        .add("CH", 2, 1)
        .add("KCX", 0, 2, dag=True, k=k, power=1, exact=True)
        .gates
    )


register_macro(MacroDef("CGP", _cgp_body))
register_macro(MacroDef("ZCX", _zcx_body, contract="cgp", phase_note="omega^((d-1)/2) per repetition on control != k unless exact"))
register_macro(MacroDef("KCX", _kcx_body, contract="cgp", phase_note="as ZCX"))
register_macro(MacroDef("GADGET", _gadget_body))
register_macro(MacroDef("POINTPHASE", _point_phase_body))
register_macro(MacroDef("CZTAU", _cztau_body, phase_note="valid for control in {0, 1}"))
register_macro(MacroDef("CH", _ch_body, contract="cgp", phase_note="i^(-(d-1)/2) on control 1; control in {0, 1}"))
register_macro(MacroDef("KCH", _kch_body, contract="cgp", phase_note="i^(-(d-1)/2) on control k"))
register_macro(MacroDef("OCH", _kch_body, contract="cgp", phase_note="i^(-(d-1)/2) on control k (default 1)"))


# -- public constructors -----------------------------------------------------------


def _single(name: str, dims: Sequence[int], wires: Sequence[int], ancillas=(), dag=False, **params) -> Circuit:
    return Builder().add(name, *wires, dag=dag, **params).build(RadixRegister(dims), ancillas)


def _subspace_columns(dims: Sequence[int], control: int, values=(0, 1)) -> list[int]:
    reg = RadixRegister(dims)
    return [j for j in range(reg.total_dim) if reg.decode(j)[control] in values]


def synth_p1(d: int, k: int) -> SynthResult:
    """P1(k) in the Clifford + sqrt(Z) gate set.

    The lowered circuit equals zeta^{-1} P1(k); the zeta is recorded as the
    contract's global phase so the identity is checked exactly. At d = 2
    the gate is Clifford and the result is flagged as such.
    """
    d = require_prime(d)
    k = int(k)
    if not 0 <= k < d:
        raise InvalidArgument(f"k must lie in [0, {d}), got {k}")
    circ = _single("P1", [d], [0], k=k)
    zeta = roots(d).zeta
    ct = column_contract(
        [d],
        oracles.p1(d, k),
        klass="exact",
        mode="exact",
        global_phase=zeta,
        phases={"global": zeta},
        description=f"P1({k}) including the zeta factor",
    )
    return SynthResult("p1", {"d": d, "k": k, "clifford": bool(is_clifford(p1(d, k)))}, circ, ct)


def synth_cgp(d: int) -> SynthResult:
    """Single-wire diagonal putting omega^{(d-1)/2} on |0> (i at d = 2)."""
    d = require_prime(d)
    circ = _single("CGP", [d], [0])
    ph = lax_phase(d)
    ref = oracles.from_action([d], lambda x: {x: ph if x[0] == 0 else 1})
    ct = column_contract([d], ref, klass="exact", description="controlled-global-phase correction on |0>")
    return SynthResult("cgp", {"d": d}, circ, ct)


def synth_zcx(d: int, k: int = 0, p: int = 1, exact: bool = False) -> SynthResult:
    """|k>-controlled X^p on (control, target).

    The lax form leaves omega^{p(d-1)/2} on every control value other than
    k; the exact form appends the correcting diagonal on the control after
    each repetition.
    """
    d = require_prime(d)
    k = int(k) % d
    p = int(p) % d
    if p == 0:
        raise InvalidArgument("target power must be nonzero mod d")
    name = "ZCX" if k == 0 else "KCX"
    circ = _single(name, [d, d], [0, 1], k=k, power=p, exact=bool(exact))
    ref = oracles.controlled_x(d, k, p)
    phases = {}
    if not exact:
        ref = ref @ oracles.lax_phase(d, k, reps=p)
        phases = {f"control!={k}": lax_phase(d, p)}
    ct = column_contract(
        [d, d],
        ref,
        klass="exact" if exact else "cgp",
        phases=phases,
        description=f"|{k}>-controlled X^{p}" + ("" if exact else " with lax controlled phase"),
    )
    return SynthResult("zcx", {"d": d, "k": k, "p": p, "exact": bool(exact)}, circ, ct)


def _as_exponents(d: int, alpha: PhaseVector | Sequence[int]) -> list[int]:
    if isinstance(alpha, PhaseVector):
        if alpha.granularity != "omega":
            raise InvalidArgument("phase gadget needs an omega-granularity phase vector")
        if alpha.d != d:
            raise InvalidArgument(f"phase vector dimension {alpha.d} != {d}")
        return list(alpha.exponents)
    alpha = [int(a) % d for a in alpha]
    if len(alpha) != d:
        raise InvalidArgument(f"phase vector needs {d} entries, got {len(alpha)}")
    return alpha


def synth_phase_gadget(d: int, alpha: PhaseVector | Sequence[int], b: int = 1) -> SynthResult:
    """Two-wire diagonal omega^{alpha((b x + y) mod d)}."""
    d = require_prime(d)
    exps = _as_exponents(d, alpha)
    b = int(b) % d
    if b == 0:
        raise InvalidArgument("gadget direction b must be nonzero mod d")
    circ = _single("GADGET", [d, d], [0, 1], alpha=exps, b=b)
    ct = column_contract([d, d], oracles.phase_gadget(d, exps, b), description=f"phase gadget, direction {b}")
    return SynthResult("gadget", {"d": d, "alpha": exps, "b": b}, circ, ct)


def synth_point_phase(d: int, cval: int, tval: int, power: int = 1) -> SynthResult:
    """omega^power on |cval, tval> only; wire 2 is a clean ancilla."""
    d = require_prime(d)
    cval, tval, power = int(cval) % d, int(tval) % d, int(power) % d
    dims = [d, d, d]
    circ = _single("POINTPHASE", dims, [0, 1, 2], ancillas=(2,), cval=cval, tval=tval, power=power)
    cols, outs = oracles.embed_ancillas(oracles.point_phase(d, cval, tval, power), dims, [2])
    ct = Contract(columns=tuple(cols), expected=outs, description=f"omega^{power} on |{cval},{tval}>, ancilla clean")
    return SynthResult("pointphase", {"d": d, "cval": cval, "tval": tval, "power": power}, circ, ct)


def synth_controlled_ztau(d: int) -> SynthResult:
    """Z(tau) on the target when the control is |1>, identity when |0>."""
    d = require_odd_prime(d)
    circ = _single("CZTAU", [d, d], [0, 1])
    tau = list(tau_vector(d).exponents)
    ref = oracles.controlled_diagonal(d, oracles.tau_exponents(d), k=1)
    alpha, consistent = alpha_vector(d)
    ct = column_contract(
        [d, d],
        ref,
        columns=_subspace_columns([d, d], 0),
        subspace={0: (0, 1)},
        description="controlled Z(tau), control in {0, 1}",
    )
    params = {
        "d": d,
        "tau": tau,
        "alpha": list(alpha.exponents),
        "alpha_consistent": consistent,
        "repetitions": mod_inverse(2, d) if consistent else 0,
    }
    return SynthResult("cztau", params, circ, ct)


def synth_controlled_h(d: int, mode: str = "subspace", k: int = 1) -> SynthResult:
    """Controlled Hadamard.

    ``subspace``: the control is promised to lie in {0, 1}; control 1 gives
    H times the recorded phase. ``full``: |k>-controlled H for every
    control value, using one clean ancilla (wire 2).
    """
    d = require_prime(d)
    ph = ch_phase(d)
    if mode == "subspace":
        if int(k) != 1:
            raise InvalidArgument("subspace mode fires on control |1>; use mode='full' for other values")
        dims = [d, d]
        circ = _single("CH", dims, [0, 1])
        ct = column_contract(
            dims,
            oracles.controlled_h(d, 1, ph),
            columns=_subspace_columns(dims, 0),
            klass="cgp" if d != 2 else "exact",
            phases={"control=1": ph},
            subspace={0: (0, 1)},
            description="identity on control 0, phase * H on control 1",
        )
        return SynthResult("ch", {"d": d, "mode": mode, "k": 1}, circ, ct)
    if mode != "full":
        raise InvalidArgument(f"mode must be 'subspace' or 'full', got {mode!r}")
    k = int(k) % d
    dims = [d, d, d]
    circ = _single("KCH", dims, [0, 1, 2], ancillas=(2,), k=k)
    cols, outs = oracles.embed_ancillas(oracles.controlled_h(d, k, ph), dims, [2])
    ct = Contract(
        klass="cgp" if d != 2 else "exact",
        columns=tuple(cols),
        expected=outs,
        phases={f"control={k}": ph},
        description=f"|{k}>-controlled H for every control value, ancilla clean",
    )
    return SynthResult("ch", {"d": d, "mode": mode, "k": k}, circ, ct)
