"""Mixed-radix indexing, modular arithmetic and roots of unity.

Flat indices put wire 0 in the most significant position.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-10
TOL_ENV = "WFORGE_TOL"


class WForgeError(Exception):
    """Base class for all package errors."""


class InvalidArgument(WForgeError, ValueError):
    pass


class ResourceLimitError(WForgeError, RuntimeError):
    pass


def get_tol() -> float:
    """Global comparison tolerance, overridable through ``WFORGE_TOL``."""
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise InvalidArgument(f"{TOL_ENV}={raw!r} is not a float") from exc
    if not tol > 0:
        raise InvalidArgument(f"{TOL_ENV} must be positive, got {tol}")
    return tol


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for f in range(3, math.isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def require_prime(d: int, what: str = "dimension") -> int:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or not is_prime(int(d)):
        raise InvalidArgument(f"{what} must be prime, got {d!r}")
    return int(d)


def require_odd_prime(d: int, what: str = "dimension") -> int:
    d = require_prime(d, what)
    if d == 2:
        raise InvalidArgument(f"{what} must be an odd prime, got 2")
    return d


def mod_inverse(a: int, d: int) -> int:
    """Multiplicative inverse of ``a`` modulo the prime ``d``.

    >>> mod_inverse(2, 5)
    3
    """
    require_prime(d, "modulus")
    if a % d == 0:
        raise InvalidArgument(f"{a} has no inverse modulo {d}")
    return pow(a, -1, d)


@dataclass(frozen=True)
class RadixRegister:
    """Ordered per-wire prime dimensions."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(x) for x in dims)
        if not dims:
            raise InvalidArgument("register needs at least one wire")
        for i, d in enumerate(dims):
            if not is_prime(d):
                raise InvalidArgument(f"wire {i} dimension must be prime, got {d}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def uniform(cls, d: int, n: int) -> "RadixRegister":
        return cls([d] * n)

    def __len__(self) -> int:
        return len(self.dims)

    def __getitem__(self, i: int) -> int:
        return self.dims[i]

    @cached_property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out = [1] * len(self.dims)
        for i in range(len(self.dims) - 2, -1, -1):
            out[i] = out[i + 1] * self.dims[i + 1]
        return tuple(out)

    def encode(self, digits: Sequence[int]) -> int:
        return encode(digits, self)

    def decode(self, index: int) -> tuple[int, ...]:
        return decode(index, self)


def encode(digits: Sequence[int], reg: RadixRegister) -> int:
    if len(digits) != len(reg.dims):
        raise InvalidArgument(f"expected {len(reg.dims)} digits, got {len(digits)}")
    idx = 0
    for i, (x, d) in enumerate(zip(digits, reg.dims)):
        if not 0 <= x < d:
            raise InvalidArgument(f"digit {x} out of range for wire {i} (dimension {d})")
        idx = idx * d + int(x)
    return idx


def decode(index: int, reg: RadixRegister) -> tuple[int, ...]:
    if not 0 <= index < reg.total_dim:
        raise InvalidArgument(f"index {index} out of range [0, {reg.total_dim})")
    out = []
    for d in reversed(reg.dims):
        index, r = divmod(index, d)
        out.append(r)
    return tuple(reversed(out))


@dataclass(frozen=True)
class RootTable:
    """omega = exp(2 pi i / d) and zeta = exp(2 pi i / d^2) with cached powers."""

    d: int
    omega_powers: np.ndarray = field(repr=False, compare=False)
    zeta_powers: np.ndarray = field(repr=False, compare=False)

    @property
    def omega(self) -> complex:
        return complex(self.omega_powers[1])

    @property
    def zeta(self) -> complex:
        return complex(self.zeta_powers[1])

    def w(self, k: int) -> complex:
        """omega ** k, exact index lookup."""
        return complex(self.omega_powers[k % self.d])

    def z(self, k: int) -> complex:
        """zeta ** k, exact index lookup."""
        return complex(self.zeta_powers[k % (self.d * self.d)])


@lru_cache(maxsize=None)
def roots(d: int) -> RootTable:
    d = require_prime(d)
    # Evaluate each power directly: repeated multiplication drifts.
    wp = np.exp(2j * np.pi * np.arange(d) / d)
    zp = np.exp(2j * np.pi * np.arange(d * d) / (d * d))
    wp.setflags(write=False)
    zp.setflags(write=False)
    return RootTable(d, wp, zp)
