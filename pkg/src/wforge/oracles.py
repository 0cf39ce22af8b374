"""Brute-force reference actions, coded by case analysis over basis states.

Nothing here calls the gate generators in :mod:`wforge.gates`; every matrix
is filled one basis column at a time from its defining action so that the
synthesized circuits can be checked against an independent source.
"""

from __future__ import annotations

import cmath
import itertools
import math
from typing import Callable, Sequence

import numpy as np


def _w(d: int, k: float) -> complex:
    return cmath.exp(2j * cmath.pi * k / d)


def _index(digits: Sequence[int], dims: Sequence[int]) -> int:
    idx = 0
    for x, d in zip(digits, dims):
        idx = idx * d + x
    return idx


def from_action(dims: Sequence[int], action: Callable[[tuple[int, ...]], dict[tuple[int, ...], complex]]) -> np.ndarray:
    """Matrix whose column for basis |x> is the superposition ``action(x)``."""
    D = math.prod(dims)
    out = np.zeros((D, D), dtype=complex)
    for x in itertools.product(*(range(d) for d in dims)):
        col = _index(x, dims)
        for y, amp in action(x).items():
            out[_index(y, dims), col] += amp
    return out


def fourier(d: int) -> np.ndarray:
    return from_action([d], lambda x: {(j,): _w(d, j * x[0]) / math.sqrt(d) for j in range(d)})


def p1(d: int, k: int) -> np.ndarray:
    return from_action([d], lambda x: {x: _w(d, 1) if x[0] == k else 1})


def diagonal(d: int, exponents: Sequence[int]) -> np.ndarray:
    return from_action([d], lambda x: {x: _w(d, exponents[x[0]])})


def tau_exponents(d: int) -> list[int]:
    half = next(h for h in range(1, d) if 2 * h % d == 1)
    return [half * k * k % d for k in range(d)]


def controlled_x(d: int, k: int = 0, p: int = 1) -> np.ndarray:
    """|c, t> -> |c, t + p> if c == k else |c, t>."""
    return from_action([d, d], lambda x: {(x[0], (x[1] + p) % d if x[0] == k else x[1]): 1})


def lax_phase(d: int, k: int = 0, reps: int = 1) -> np.ndarray:
    """Controlled global phase omega^{reps (d-1)/2} on every control value except k.

    At d = 2 the phase omega^{1/2} is i.
    """
    ph = 1j**reps if d == 2 else _w(d, reps * (d - 1) // 2)
    return from_action([d, d], lambda x: {x: 1 if x[0] == k else ph})


def controlled_h(d: int, k: int = 1, phase: complex = 1) -> np.ndarray:
    """|k>-controlled (phase * H); identity on every other control value."""
    def act(x):
        c, t = x
        if c != k:
            return {x: 1}
        return {(c, j): phase * _w(d, j * t) / math.sqrt(d) for j in range(d)}

    return from_action([d, d], act)


def controlled_diagonal(d: int, exponents: Sequence[int], k: int = 1) -> np.ndarray:
    return from_action([d, d], lambda x: {x: _w(d, exponents[x[1]]) if x[0] == k else 1})


def point_phase(d: int, cval: int, tval: int, power: int) -> np.ndarray:
    ph = _w(d, power)
    return from_action([d, d], lambda x: {x: ph if x == (cval, tval) else 1})


def phase_gadget(d: int, exponents: Sequence[int], b: int) -> np.ndarray:
    """|x, y> -> omega^{alpha((b x + y) mod d)} |x, y>."""
    return from_action([d, d], lambda x: {x: _w(d, exponents[(b * x[0] + x[1]) % d])})


def embed_ancillas(U: np.ndarray, dims: Sequence[int], ancillas: Sequence[int]) -> tuple[list[int], np.ndarray]:
    """Columns of the full register with ancillas at |0>, mapped by U on the data wires.

    Returns (input column indices, expected output columns); the expected
    outputs keep every ancilla at |0>.
    """
    data = [w for w in range(len(dims)) if w not in set(ancillas)]
    ddims = [dims[w] for w in data]
    D = math.prod(dims)
    cols, outs = [], []
    for x in itertools.product(*(range(d) for d in ddims)):
        full = [0] * len(dims)
        for w, v in zip(data, x):
            full[w] = v
        cols.append(_index(full, dims))
        src = _index(x, ddims)
        vec = np.zeros(D, dtype=complex)
        for y in itertools.product(*(range(d) for d in ddims)):
            amp = U[_index(y, ddims), src]
            if amp != 0:
                out = [0] * len(dims)
                for w, v in zip(data, y):
                    out[w] = v
                vec[_index(out, dims)] = amp
        outs.append(vec)
    return cols, np.array(outs).T


def w_qubit_terms(n: int) -> dict[tuple[int, ...], complex]:
    """Sparse single-excitation state over n wires, excitation value 1."""
    a = 1 / math.sqrt(n)
    return {tuple(1 if i == j else 0 for i in range(n)): a for j in range(n)}


def w_qudit_terms(n: int, d: int) -> dict[tuple[int, ...], complex]:
    a = 1 / math.sqrt((d - 1) * n)
    return {tuple(v if i == j else 0 for i in range(n)): a for j in range(n) for v in range(1, d)}


def qudit_spread_action(d: int, k: int) -> dict[tuple[int, ...], complex]:
    """Image of |k, 0, ..., 0> (d wires) under the qudit spread gate."""
    zero = (0,) * d
    if k == 0:
        return {zero: 1}
    a = 1 / math.sqrt(d)
    out = {tuple(k if i == 0 else 0 for i in range(d)): a}
    for j in range(1, d):
        out[tuple(j if i == k else 0 for i in range(d))] = a
    return out
