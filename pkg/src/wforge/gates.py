"""Primitive qudit gates and Clifford-hierarchy classification."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Mapping

import numpy as np

from .core import (
    InvalidArgument,
    is_prime,
    mod_inverse,
    require_odd_prime,
    require_prime,
    roots,
)

PRIMITIVES = ("X", "Z", "S", "H", "CX", "SQRTZ", "T2", "P1", "ZALPHA", "UMA")
TWO_WIRE = frozenset({"CX"})

_UNITARY_TOL = 1e-9


def freeze_params(params: Mapping[str, Any] | None) -> tuple[tuple[str, Any], ...]:
    """Hashable, key-sorted form of a parameter mapping (lists become tuples)."""
    if not params:
        return ()
    out = []
    for key in sorted(params):
        val = params[key]
        if isinstance(val, list):
            val = tuple(val)
        out.append((key, val))
    return tuple(out)


@dataclass(frozen=True)
class GateSpec:
    """A primitive gate: its kind, the dimension of each wire it acts on, and parameters."""

    name: str
    dims: tuple[int, ...]
    params: tuple[tuple[str, Any], ...] = ()

    @classmethod
    def make(cls, name: str, d: int | tuple[int, ...], **params: Any) -> "GateSpec":
        if isinstance(d, int):
            d = (d,) * (2 if name in TWO_WIRE else 1)
        return cls(name, tuple(d), freeze_params(params))

    @property
    def d(self) -> int:
        return self.dims[0]

    def param(self, key: str, default: Any = None) -> Any:
        for k, v in self.params:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class PhaseVector:
    """Diagonal phase exponents: entry k is the power of omega (or zeta) applied to |k>."""

    d: int
    exponents: tuple[int, ...]
    granularity: str = "omega"

    def __post_init__(self):
        if self.granularity not in ("omega", "zeta"):
            raise InvalidArgument(f"unknown granularity {self.granularity!r}")
        if len(self.exponents) != self.d:
            raise InvalidArgument(f"phase vector needs {self.d} entries, got {len(self.exponents)}")
        object.__setattr__(self, "exponents", tuple(int(e) % self.modulus for e in self.exponents))

    @property
    def modulus(self) -> int:
        return self.d if self.granularity == "omega" else self.d * self.d

    def __neg__(self) -> "PhaseVector":
        return PhaseVector(self.d, tuple(-e for e in self.exponents), self.granularity)

    def scaled(self, m: int) -> "PhaseVector":
        return PhaseVector(self.d, tuple(m * e for e in self.exponents), self.granularity)

    def diagonal(self) -> np.ndarray:
        rt = roots(self.d)
        f = rt.w if self.granularity == "omega" else rt.z
        return np.array([f(e) for e in self.exponents])

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal())


@dataclass(frozen=True)
class PauliWord:
    """Per-wire X and Z powers of a projective Pauli operator."""

    d: int
    x: tuple[int, ...]
    z: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(a) % self.d for a in self.x))
        object.__setattr__(self, "z", tuple(int(b) % self.d for b in self.z))

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for a, b in zip(self.x, self.z):
            out = np.kron(out, shift(self.d, a) @ clock(self.d, b))
        return out

    def is_identity(self) -> bool:
        return not any(self.x) and not any(self.z)


# -- matrix generators -------------------------------------------------------


def shift(d: int, p: int = 1) -> np.ndarray:
    """X^p : |k> -> |k+p mod d>."""
    return np.roll(np.eye(d, dtype=complex), p % d, axis=0)


def clock(d: int, p: int = 1) -> np.ndarray:
    """Z^p : |k> -> omega^{pk} |k>."""
    rt = roots(d)
    return np.diag([rt.w(p * k) for k in range(d)])


def fourier(d: int) -> np.ndarray:
    rt = roots(d)
    return np.array([[rt.w(j * k) for k in range(d)] for j in range(d)]) / math.sqrt(d)


def phase_s(d: int) -> np.ndarray:
    if d == 2:
        return np.diag([1, 1j]).astype(complex)
    rt = roots(d)
    return np.diag([rt.w(k * (k - 1) // 2) for k in range(d)])


def sqrt_z(d: int) -> np.ndarray:
    rt = roots(d)
    return np.diag([rt.z(k) for k in range(d)])


def p1(d: int, k: int) -> np.ndarray:
    out = np.eye(d, dtype=complex)
    out[k % d, k % d] = roots(d).omega
    return out


def u_ma(d: int, m: int, a: int) -> np.ndarray:
    return np.diag([np.exp(2j * np.pi * (j**a) / d**m) for j in range(d)])


def controlled_add(d: int, p: int = 1) -> np.ndarray:
    """Lambda(X^p): |c, t> -> |c, t + p c mod d>, control on the first wire."""
    out = np.zeros((d * d, d * d), dtype=complex)
    for c in range(d):
        for t in range(d):
            out[c * d + (t + p * c) % d, c * d + t] = 1
    return out


def gate_matrix(spec: GateSpec, dagger: bool = False) -> np.ndarray:
    """Defining matrix of a primitive gate, wire 0 most significant."""
    m = _gate_matrix_cached(spec)
    return m.conj().T if dagger else m


@lru_cache(maxsize=4096)
def _gate_matrix_cached(spec: GateSpec) -> np.ndarray:
    name = spec.name
    if name not in PRIMITIVES:
        raise InvalidArgument(f"unknown primitive gate {name!r}")
    want = 2 if name in TWO_WIRE else 1
    if len(spec.dims) != want:
        raise InvalidArgument(f"{name} acts on {want} wire(s), got dims {spec.dims}")
    for d in spec.dims:
        require_prime(d)
    d = spec.d
    if name in TWO_WIRE and spec.dims[0] != spec.dims[1]:
        raise InvalidArgument(f"{name} needs equal wire dimensions, got {spec.dims}")
    p = int(spec.param("p", 1))
    if name == "X":
        m = shift(d, p)
    elif name == "Z":
        m = clock(d, p)
    elif name == "S":
        m = phase_s(d)
    elif name == "H":
        m = fourier(d)
    elif name == "CX":
        m = controlled_add(d, p)
    elif name == "SQRTZ":
        m = sqrt_z(d)
    elif name == "T2":
        if d != 2:
            raise InvalidArgument(f"T2 is a qubit gate, got dimension {d}")
        m = np.diag([1, np.exp(1j * np.pi / 4)])
    elif name == "P1":
        k = spec.param("k")
        if k is None or not 0 <= int(k) < d:
            raise InvalidArgument(f"P1 needs 0 <= k < {d}, got {k!r}")
        m = p1(d, int(k))
    elif name == "ZALPHA":
        alpha = spec.param("alpha")
        if alpha is None:
            raise InvalidArgument("ZALPHA needs an 'alpha' phase vector")
        m = PhaseVector(d, tuple(alpha)).matrix()
    else:  # UMA
        mm, a = spec.param("m"), spec.param("a")
        if mm is None or a is None or int(mm) < 1 or int(a) < 1:
            raise InvalidArgument(f"UMA needs m >= 1 and a >= 1, got m={mm!r} a={a!r}")
        m = u_ma(d, int(mm), int(a))
    m = np.asarray(m, dtype=complex)
    m.setflags(write=False)
    return m


# -- tau / alpha phase vectors ----------------------------------------------


def tau_vector(d: int) -> PhaseVector:
    """Exponents 2^{-1} k^2 mod d (the Euler-decomposition phase of H)."""
    d = require_odd_prime(d)
    half = mod_inverse(2, d)
    return PhaseVector(d, tuple(half * k * k for k in range(d)))


def alpha_vector(d: int) -> tuple[PhaseVector, bool]:
    """Solve the controlled-square phase recurrence with alpha(0) = 0.

    Returns the vector alpha(k) = -sum_{j<k} j^2 mod d and whether the
    cyclic condition sum_{j<d} j^2 = 0 mod d holds (false only for d = 3).
    """
    d = require_odd_prime(d)
    acc, out = 0, []
    for k in range(d):
        out.append(-acc)
        acc += k * k
    return PhaseVector(d, tuple(out)), acc % d == 0


# -- classification ------------------------------------------------------------


def _check_unitary(U: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {U.shape}")
    if np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() > _UNITARY_TOL:
        raise InvalidArgument("matrix is not unitary")
    return U


def infer_qudits(dim: int) -> tuple[int, int]:
    """(d, n) with dim = d**n for a single prime d."""
    if dim < 2:
        raise InvalidArgument(f"dimension {dim} is not a prime power")
    d = next(p for p in range(2, dim + 1) if dim % p == 0)
    n, rest = 0, dim
    while rest % d == 0:
        rest //= d
        n += 1
    if rest != 1 or not is_prime(d):
        raise InvalidArgument(f"dimension {dim} is not a power of a single prime")
    return d, n


def _digits(index: int, d: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        index, r = divmod(index, d)
        out.append(r)
    return tuple(reversed(out))


def is_pauli(U: np.ndarray, d: int | None = None, tol: float = 1e-9) -> PauliWord | None:
    """Return the Pauli word U is proportional to, or None."""
    U = _check_unitary(U)
    return _match_pauli(U, d, tol)


def _match_pauli(U: np.ndarray, d: int | None, tol: float) -> PauliWord | None:
    dim = U.shape[0]
    if d is None:
        d, n = infer_qudits(dim)
    else:
        n = round(math.log(dim, d))
    col0 = np.abs(U[:, 0])
    r = int(np.argmax(col0))
    if abs(col0[r] - 1) > tol:
        return None
    x = _digits(r, d, n)
    rt = roots(d)
    ref = U[r, 0]
    z = []
    stride = 1
    strides = []
    for _ in range(n):
        strides.append(stride)
        stride *= d
    strides.reverse()
    for i in range(n):
        col = U[:, strides[i]]
        row = int(np.argmax(np.abs(col)))
        ratio = col[row] / ref
        b = int(round(np.angle(ratio) / (2 * np.pi / d))) % d
        if abs(ratio - rt.w(b)) > tol:
            return None
        z.append(b)
    word = PauliWord(d, x, tuple(z))
    if np.abs(U - ref * word.matrix()).max() > tol:
        return None
    return word


def pauli_generators(d: int, n: int) -> list[tuple[str, int, np.ndarray]]:
    out = []
    for i in range(n):
        for kind in ("X", "Z"):
            x = [0] * n
            z = [0] * n
            (x if kind == "X" else z)[i] = 1
            out.append((kind, i, PauliWord(d, tuple(x), tuple(z)).matrix()))
    return out


def clifford_witness(U: np.ndarray, d: int | None = None) -> dict[tuple[str, int], PauliWord] | None:
    """Map each generator X_i, Z_i to the Pauli word U P U^dagger, or None if not Clifford."""
    U = _check_unitary(U)
    if d is None:
        d, n = infer_qudits(U.shape[0])
    else:
        n = round(math.log(U.shape[0], d))
    out = {}
    for kind, i, P in pauli_generators(d, n):
        w = _match_pauli(U @ P @ U.conj().T, d, 1e-9)
        if w is None:
            return None
        out[(kind, i)] = w
    return out


def is_clifford(U: np.ndarray, d: int | None = None) -> bool:
    return clifford_witness(U, d) is not None


class _LevelOracle:
    """Memoized recursive membership test for the Clifford hierarchy.

    One instance per hierarchy_level call; the cache is not shared. Membership
    is invariant under global phase and right multiplication by a Pauli, so
    monomial operators are reduced to their diagonal part, and diagonal
    operators only need X-type probes (Z-type conjugates are trivially Pauli).
    """

    def __init__(self, d: int, n: int):
        self.d = d
        self.n = n
        self.dim = d**n
        self.rt = roots(d)
        self.gens = [P for _, _, P in pauli_generators(d, n)]
        self._paulis: list[np.ndarray] | None = None
        digits = np.array([_digits(j, d, n) for j in range(self.dim)]).reshape(self.dim, n)
        self.digits = digits
        weights = np.array([d ** (n - 1 - i) for i in range(n)])
        shifts = [np.array(a) for a in itertools.product(range(d), repeat=n) if any(a)]
        # perm[a][i] = flat index of (digits(i) - a) mod d
        self.shift_perms = [((digits - a) % d) @ weights for a in shifts]
        self.unit_shift_perms = [
            ((digits - np.eye(n, dtype=int)[i]) % d) @ weights for i in range(n)
        ]
        self.unit_index = [int(weights[i]) for i in range(n)]
        self.memo: dict[tuple[bytes, int], bool] = {}

    @property
    def paulis(self) -> list[np.ndarray]:
        if self._paulis is None:
            d, n = self.d, self.n
            self._paulis = [
                PauliWord(d, xs, zs).matrix()
                for xs in itertools.product(range(d), repeat=n)
                for zs in itertools.product(range(d), repeat=n)
                if any(xs) or any(zs)
            ]
        return self._paulis

    def _diagonal_part(self, W: np.ndarray) -> np.ndarray | None:
        """Diagonal D with W = D X^a when W has that monomial shape."""
        mags = np.abs(W)
        r = int(np.argmax(mags[:, 0]))
        if abs(mags[r, 0] - 1) > 1e-8:
            return None
        x = np.array(_digits(r, self.d, self.n))
        weights = np.array([self.d ** (self.n - 1 - i) for i in range(self.n)])
        rows = ((self.digits + x) % self.d) @ weights
        vals = W[rows, np.arange(self.dim)]
        if np.abs(np.abs(vals) - 1).max() > 1e-8:
            return None
        # D[rows[j]] = vals[j]
        delta = np.empty(self.dim, dtype=complex)
        delta[rows] = vals
        return delta

    def _normalize(self, delta: np.ndarray) -> np.ndarray:
        delta = delta / delta[0]
        step = 2 * np.pi / self.d
        ramp = np.zeros(self.dim)
        for i, e in enumerate(self.unit_index):
            theta = np.angle(delta[e]) % (2 * np.pi)
            b = math.floor(theta / step + 1e-7) % self.d
            ramp += b * self.digits[:, i]
        return delta * np.exp(-1j * step * ramp)

    def _diag_is_pauli(self, delta: np.ndarray) -> bool:
        delta = self._normalize(delta)
        return bool(np.abs(delta - 1).max() < 1e-8)

    def diag_member(self, delta: np.ndarray, level: int) -> bool:
        if level == 1:
            return self._diag_is_pauli(delta)
        delta = self._normalize(delta)
        key = (np.round(delta, 8).tobytes(), level)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        perms = self.unit_shift_perms if level == 2 else self.shift_perms
        # W X^a W^dagger = D_a X^a with D_a(i) = delta(i) conj(delta(i - a)).
        res = all(self.diag_member(delta * delta[perm].conj(), level - 1) for perm in perms)
        self.memo[key] = res
        return res

    def member(self, W: np.ndarray, level: int) -> bool:
        delta = self._diagonal_part(W)
        if delta is not None:
            return self.diag_member(delta, level)
        if level == 1:
            return False
        flat = W.ravel()
        ref = flat[int(np.argmax(np.abs(flat) > 1e-9))]
        key = (np.round(W * (abs(ref) / ref), 8).tobytes(), level)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        Wd = W.conj().T
        # C_2 is a group, so the generators suffice there.
        probes = self.gens if level == 2 else self.paulis
        res = all(self.member(W @ P @ Wd, level - 1) for P in probes)
        self.memo[key] = res
        return res


def hierarchy_level(U: np.ndarray, max_level: int = 8, d: int | None = None) -> int | None:
    """Smallest n with U in C_n, or None if U is not in C_{max_level}."""
    if not 1 <= max_level <= 8:
        raise InvalidArgument(f"max_level must be in 1..8, got {max_level}")
    U = _check_unitary(U)
    if U.shape[0] > 4096:
        raise InvalidArgument(f"dimension {U.shape[0]} too large for dense classification")
    if d is None:
        d, n = infer_qudits(U.shape[0])
    else:
        n = round(math.log(U.shape[0], d))
    oracle = _LevelOracle(d, n)
    for level in range(1, max_level + 1):
        if oracle.member(U, level):
            return level
    return None


def uma_level(d: int, m: int, a: int) -> int:
    """Closed-form hierarchy level (d-1)(m-1)+a of U_{m,a}."""
    return (d - 1) * (m - 1) + a
