"""Truth-table Boolean functions, Walsh spectra, correlation and instance generators.

Index convention: the truth-table entry at index ``i`` is f(x) where x is the
n-bit big-endian encoding of i, i.e. x_1 is the most significant bit.  All
spectral quantities are dyadic rationals; they are computed as exact integer
sums and divided by 2**n only at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational, Real
from typing import Iterable, Sequence

import numpy as np

from boolprop.errors import ArityError, FormatError, RepresentabilityError

MAX_ARITY = 24
NAIVE_MAX_ARITY = 16

BUILTIN_NAMES = ("const0", "const1", "parity", "and", "majority")


def to_fraction(value) -> Fraction:
    """Exact rational view of ``value``.

    Floats go through their shortest decimal repr, so ``0.2`` becomes 1/5
    rather than the binary neighbour of 0.2.  Strings may be decimals or
    ``p/q``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"not a number: {value!r}") from exc
    if isinstance(value, Real):
        if not math.isfinite(value):
            raise ValueError(f"not a finite number: {value!r}")
        return Fraction(repr(float(value)))
    raise TypeError(f"cannot interpret {value!r} as a number")


def _check_arity(n: int, cap: int = MAX_ARITY) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ArityError(f"arity must be an integer, got {n!r}")
    n = int(n)
    if not 1 <= n <= cap:
        raise ArityError(f"arity n={n} outside supported range 1..{cap}")
    return n


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """A function {0,1}^n -> {0,1} stored as its full truth table.

    ``table`` is a read-only uint8 array of length 2**n holding 0/1 values.
    Instances are immutable and safe to share between threads.
    """

    n: int
    table: np.ndarray

    def __post_init__(self):
        n = _check_arity(self.n)
        table = np.asarray(self.table)
        if table.ndim != 1 or table.shape[0] != 1 << n:
            raise ArityError(
                f"truth table has {table.size} entries, expected 2**{n} = {1 << n}"
            )
        if table.dtype != np.uint8 or table.flags.writeable:
            if table.dtype.kind not in "biu" or table.min() < 0 or table.max() > 1:
                raise FormatError("truth table entries must be 0 or 1")
            table = table.astype(np.uint8, copy=True)
            table.flags.writeable = False
        elif table.max() > 1:
            raise FormatError("truth table entries must be 0 or 1")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "table", table)

    @property
    def arity(self) -> int:
        return self.n

    @property
    def size(self) -> int:
        return 1 << self.n

    @cached_property
    def weight(self) -> int:
        return int(self.table.sum(dtype=np.int64))

    @cached_property
    def signs(self) -> np.ndarray:
        """(-1)^f(x) as a read-only int8 array."""
        s = (1 - 2 * self.table.astype(np.int8)).astype(np.int8)
        s.flags.writeable = False
        return s

    def __call__(self, x) -> int:
        return self.eval(x)

    def eval(self, x) -> int:
        """Value at ``x``, given as an index or as a bit sequence (x_1 first)."""
        if isinstance(x, (int, np.integer)):
            i = int(x)
        else:
            bits = list(x)
            if len(bits) != self.n:
                raise ArityError(f"expected {self.n} input bits, got {len(bits)}")
            i = 0
            for b in bits:
                i = (i << 1) | (int(b) & 1)
        if not 0 <= i < self.size:
            raise IndexError(f"input index {i} outside 0..{self.size - 1}")
        return int(self.table[i])

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __repr__(self):
        if self.n <= 4:
            return f"BooleanFunction(n={self.n}, table={self.table.tolist()})"
        return f"BooleanFunction(n={self.n}, weight={self.weight})"

    def complement(self) -> "BooleanFunction":
        return BooleanFunction(self.n, 1 - self.table)

    # text format: decimal n, then ceil(2**n / 4) hex digits, index 0 first
    def to_text(self) -> str:
        digits = (self.size + 3) // 4
        packed = np.packbits(self.table, bitorder="big").tobytes().hex()
        return f"{self.n}\n{packed[:digits]}\n"

    @classmethod
    def from_text(cls, text: str) -> "BooleanFunction":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if len(lines) != 2:
            raise FormatError(
                f"truth-table text needs exactly 2 non-empty lines, got {len(lines)}"
            )
        try:
            n = int(lines[0], 10)
        except ValueError as exc:
            raise FormatError(f"first line must be decimal n, got {lines[0]!r}") from exc
        try:
            n = _check_arity(n)
        except ArityError as exc:
            raise FormatError(str(exc)) from exc
        size = 1 << n
        hexstr = lines[1].lower()
        digits = (size + 3) // 4
        if len(hexstr) != digits:
            raise FormatError(f"expected {digits} hex digits for n={n}, got {len(hexstr)}")
        try:
            raw = bytes.fromhex(hexstr + ("0" if digits % 2 else ""))
        except ValueError as exc:
            raise FormatError(f"invalid hex digits in {hexstr!r}") from exc
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="big")
        if bits[size:].any():
            raise FormatError("trailing pad bits must be zero")
        return cls(n, bits[:size])


def from_truth_table(bits: Sequence[int] | np.ndarray, n: int) -> BooleanFunction:
    """Build f with f(x) = bits[index(x)]."""
    n = _check_arity(n)
    arr = np.asarray(bits)
    if arr.ndim != 1 or arr.shape[0] != 1 << n:
        raise ArityError(f"expected {1 << n} bits for n={n}, got {arr.size}")
    return BooleanFunction(n, arr)


def read_truth_table(path) -> BooleanFunction:
    with open(path, encoding="ascii") as fh:
        return BooleanFunction.from_text(fh.read())


def write_truth_table(f: BooleanFunction, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f.to_text())


def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def builtin(name: str, n: int) -> BooleanFunction:
    """Named functions: const0, const1, parity, and (n-way AND), majority (n odd)."""
    n = _check_arity(n)
    idx = _indices(n)
    if name == "const0":
        table = np.zeros(1 << n, dtype=np.uint8)
    elif name == "const1":
        table = np.ones(1 << n, dtype=np.uint8)
    elif name == "parity":
        table = (np.bitwise_count(idx) & 1).astype(np.uint8)
    elif name == "and":
        table = (idx == (1 << n) - 1).astype(np.uint8)
    elif name == "majority":
        if n % 2 == 0:
            raise ArityError(f"majority needs odd n, got {n}")
        table = (2 * np.bitwise_count(idx) > n).astype(np.uint8)
    else:
        raise FormatError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    return BooleanFunction(n, table)


def _same_arity(f: BooleanFunction, g: BooleanFunction) -> None:
    if f.n != g.n:
        raise ArityError(f"arity mismatch: {f.n} vs {g.n}")


def hamming_distance(f: BooleanFunction, g: BooleanFunction) -> int:
    _same_arity(f, g)
    return int(np.count_nonzero(f.table != g.table))


def dist(f: BooleanFunction, g: BooleanFunction) -> float:
    """Fraction of inputs on which f and g disagree."""
    return hamming_distance(f, g) / f.size


def xor(f: BooleanFunction, g: BooleanFunction) -> BooleanFunction:
    _same_arity(f, g)
    return BooleanFunction(f.n, f.table ^ g.table)


def correlation(f: BooleanFunction, g: BooleanFunction) -> float:
    """(agreements - disagreements) / 2**n."""
    ham = hamming_distance(f, g)
    return (f.size - 2 * ham) / f.size


def bias(f: BooleanFunction) -> float:
    """Correlation with the constant-0 function; equals the spectrum at omega=0."""
    return (f.size - 2 * f.weight) / f.size


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    """Walsh coefficients W_f(omega), held as exact integer sums over 2**n.

    ``sums[omega]`` is sum_x (-1)^(f(x) + omega.x); ``coeffs`` divides by 2**n.
    """

    n: int
    sums: np.ndarray

    @property
    def arity(self) -> int:
        return self.n

    @cached_property
    def coeffs(self) -> np.ndarray:
        c = self.sums / float(1 << self.n)
        c.flags.writeable = False
        return c

    def __getitem__(self, omega: int) -> float:
        return float(self.coeffs[omega])

    def __len__(self) -> int:
        return 1 << self.n

    def __eq__(self, other):
        if not isinstance(other, WalshSpectrum):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.sums, other.sums)

    def exact(self, omega: int) -> Fraction:
        return Fraction(int(self.sums[omega]), 1 << self.n)


def walsh_spectrum_naive(f: BooleanFunction) -> WalshSpectrum:
    """Direct double sum over (omega, x); quadratic time, used as a cross-check."""
    n = _check_arity(f.n, NAIVE_MAX_ARITY)
    size = 1 << n
    x = _indices(n)
    fx = f.table.astype(np.int64)
    sums = np.empty(size, dtype=np.int64)
    block = max(1, (1 << 22) // size)
    for start in range(0, size, block):
        omega = x[start:start + block]
        parity = np.bitwise_count(omega[:, None] & x[None, :]) & 1
        sums[start:start + block] = (1 - 2 * (parity ^ fx[None, :])).sum(axis=1)
    sums.flags.writeable = False
    return WalshSpectrum(n, sums)


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard butterfly, in place on a length-2**k array."""
    size = values.shape[0]
    if size & (size - 1):
        raise ArityError(f"length {size} is not a power of two")
    h = 1
    while h < size:
        v = values.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        np.subtract(lo, v[:, 1, :], out=v[:, 1, :])
        h <<= 1
    return values


def walsh_spectrum_fast(f: BooleanFunction) -> WalshSpectrum:
    """O(N log N) spectrum via the fast Walsh-Hadamard transform."""
    _check_arity(f.n)
    sums = fwht(f.signs.astype(np.int64))
    sums.flags.writeable = False
    return WalshSpectrum(f.n, sums)


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def gen_random(n: int, rng=None) -> BooleanFunction:
    n = _check_arity(n)
    return BooleanFunction(n, _rng(rng).integers(0, 2, size=1 << n, dtype=np.uint8))


def gen_at_distance(g: BooleanFunction, d: int, rng=None) -> BooleanFunction:
    """Flip exactly ``d`` entries of g, positions uniform without replacement."""
    d = int(d)
    if not 0 <= d <= g.size:
        raise RepresentabilityError(f"distance d={d} outside 0..{g.size}")
    flips = _rng(rng).choice(g.size, size=d, replace=False)
    table = g.table.copy()
    table[flips] ^= 1
    return BooleanFunction(g.n, table)


def representable_biases(n: int) -> Iterable[Fraction]:
    """All |C(f)| values attainable at arity n: k / 2**(n-1)."""
    half = 1 << (_check_arity(n) - 1)
    return (Fraction(k, half) for k in range(half + 1))


def bias_weight(n: int, c, sign: int = 1) -> int:
    """Weight w with C(f) = sign * c, i.e. w = (1 - sign*c) * 2**(n-1).

    Raises RepresentabilityError carrying the nearest representable biases.
    """
    n = _check_arity(n)
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    cf = to_fraction(c)
    if not 0 <= cf <= 1:
        raise RepresentabilityError(f"bias c={c} outside [0, 1]")
    half = 1 << (n - 1)
    scaled = cf * half
    if scaled.denominator != 1:
        lo, hi = Fraction(math.floor(scaled), half), Fraction(math.ceil(scaled), half)
        raise RepresentabilityError(
            f"bias c={c} not representable at n={n}; nearest: {lo} or {hi}",
            nearest=(lo, hi),
        )
    return int((1 - sign * cf) * half)


def gen_with_bias(n: int, c, sign: int = 1, rng=None) -> BooleanFunction:
    """Random f with exactly C(f) = sign * c; the ones are placed uniformly."""
    w = bias_weight(n, c, sign)
    size = 1 << n
    ones = _rng(rng).choice(size, size=w, replace=False)
    table = np.zeros(size, dtype=np.uint8)
    table[ones] = 1
    return BooleanFunction(n, table)
