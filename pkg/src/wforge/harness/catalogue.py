"""Name-based dispatch over the synthesis constructors."""

from __future__ import annotations

from typing import Any, Callable

from ..core import InvalidArgument
from .. import synth

KINDS: dict[str, tuple[Callable[..., synth.SynthResult], tuple[str, ...]]] = {
    "p1": (lambda d, k=0: synth.synth_p1(d, k), ("d", "k")),
    "cgp": (lambda d: synth.synth_cgp(d), ("d",)),
    "zcx": (lambda d, k=0, p=1, exact=False: synth.synth_zcx(d, k, p, exact), ("d", "k", "p", "exact")),
    "gadget": (lambda d, alpha=None, b=1: synth.synth_phase_gadget(d, alpha if alpha is not None else [0] * d, b), ("d", "alpha", "b")),
    "pointphase": (lambda d, cval=1, tval=0, power=1: synth.synth_point_phase(d, cval, tval, power), ("d", "cval", "tval", "power")),
    "cztau": (lambda d: synth.synth_controlled_ztau(d), ("d",)),
    "ch": (lambda d, mode="subspace", k=1: synth.synth_controlled_h(d, mode, k), ("d", "mode", "k")),
    "wprime": (lambda d: synth.synth_w_prime(d), ("d",)),
    "spread": (lambda d: synth.synth_spread(d), ("d",)),
    "wtree": (lambda d, n=1: synth.synth_spread_tree(d, n), ("d", "n")),
    "qspread": (lambda d: synth.synth_qudit_spread(d), ("d",)),
    "qwtree": (lambda d, n=1: synth.synth_qudit_w_tree(d, n), ("d", "n")),
    "mixed": (lambda factors: synth.synth_mixed_tree(factors), ("factors",)),
}


def build(kind: str, **params: Any) -> synth.SynthResult:
    """Run the named construction, passing only the parameters it accepts."""
    try:
        fn, accepted = KINDS[kind]
    except KeyError:
        raise InvalidArgument(f"unknown construction {kind!r}; choose from {sorted(KINDS)}") from None
    args = {k: v for k, v in params.items() if k in accepted and v is not None}
    return fn(**args)


def standard_set(dims=(2, 3, 5), max_layers: int = 3) -> list[synth.SynthResult]:
    """Every construction over the given dimensions, trees up to ``max_layers``."""
    out = []
    for d in dims:
        out.append(synth.synth_p1(d, 0))
        out.append(synth.synth_cgp(d))
        for exact in (False, True):
            out.append(synth.synth_zcx(d, 0, 1, exact))
            out.append(synth.synth_zcx(d, d - 1, 1, exact))
        out.append(synth.synth_phase_gadget(d, [k * k % d for k in range(d)], 1))
        out.append(synth.synth_point_phase(d, 1, 0, 1))
        out.append(synth.synth_controlled_h(d))
        out.append(synth.synth_controlled_h(d, "full", 0))
        out.append(synth.synth_w_prime(d))
        out.append(synth.synth_spread(d))
        for n in range(1, max_layers + 1):
            if d**n <= 27 or n <= 2:
                out.append(synth.synth_spread_tree(d, n))
        if d != 2:
            out.append(synth.synth_controlled_ztau(d))
            out.append(synth.synth_qudit_spread(d))
            out.append(synth.synth_qudit_w_tree(d, 1))
    out.append(synth.synth_qudit_w_tree(3, 2))
    for f in ([2], [2, 3], [3, 2], [2, 5]):
        out.append(synth.synth_mixed_tree(f))
    return out
