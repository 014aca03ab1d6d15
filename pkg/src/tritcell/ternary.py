"""
Ternary value domain, reference cells, and the word-level oracle
================================================================

The unbalanced digit set {0, 1, 2} maps onto {0, vdd/2, vdd}.  This module
holds the pure/behavioral side of the system: inverter truth tables, the
half-adder / 1-trit-multiplier / full-adder reference functions that the
switch-level fixtures are verified against, radix utilities, and a word-level
multiplier built by composing those reference cells through a fixed
partial-product reduction network.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "TRITS",
    "VoltageLevelMap",
    "IndeterminateLevel",
    "trit_to_voltage",
    "voltage_to_trit",
    "nti",
    "pti",
    "stb",
    "sti",
    "tha_ref",
    "tmul_ref",
    "tfa_ref",
    "max_unsigned",
    "noise_margin",
    "word_to_int",
    "int_to_word",
    "word_to_str",
    "str_to_word",
    "int_to_balanced",
    "balanced_to_int",
    "CellCensus",
    "ReductionPlan",
    "plan_reduction",
    "multiply_words_behavioral",
]

TRITS = (0, 1, 2)

# Inverter/buffer truth tables, indexed by input trit.
_NTI = (2, 0, 0)
_PTI = (2, 2, 0)
_STB = (0, 1, 2)
_STI = (2, 1, 0)


class IndeterminateLevel(ValueError):
    """A node voltage fell between the legal level bands (degraded/floating)."""

    def __init__(self, voltage: float) -> None:
        super().__init__(f"voltage {voltage:.4f} V is not within any logic-level band")
        self.voltage = voltage


@dataclass(frozen=True)
class VoltageLevelMap:
    """Trit <-> voltage assignment: levels at 0, vdd/2, vdd.

    tolerance_band is the half-width of the acceptance window around each
    level; bands must not touch, hence tolerance_band < vdd/4.  The default
    band is vdd/18 (0.05 V at vdd = 0.9 V).
    """

    vdd: float
    tolerance_band: float

    def __post_init__(self) -> None:
        if self.vdd <= 0:
            raise ValueError("vdd must be positive")
        if not 0 < self.tolerance_band < self.vdd / 4.0:
            raise ValueError("tolerance_band must be in (0, vdd/4)")

    @classmethod
    def for_vdd(cls, vdd: float, tolerance_band: float | None = None) -> "VoltageLevelMap":
        return cls(vdd=vdd, tolerance_band=vdd / 18.0 if tolerance_band is None else tolerance_band)

    def levels(self) -> tuple[float, float, float]:
        return (0.0, self.vdd / 2.0, self.vdd)


def trit_to_voltage(t: int, level_map: VoltageLevelMap) -> float:
    _check_trit(t)
    return level_map.levels()[t]


def voltage_to_trit(v: float, level_map: VoltageLevelMap) -> int:
    """Classify a voltage into a trit, or raise IndeterminateLevel."""
    for t, level in enumerate(level_map.levels()):
        if abs(v - level) <= level_map.tolerance_band:
            return t
    raise IndeterminateLevel(v)


def _check_trit(t: int) -> None:
    if t not in (0, 1, 2):
        raise ValueError(f"not a trit: {t!r}")


def nti(x: int) -> int:
    """Negative ternary inverter: 0->2, 1->0, 2->0."""
    _check_trit(x)
    return _NTI[x]


def pti(x: int) -> int:
    """Positive ternary inverter: 0->2, 1->2, 2->0."""
    _check_trit(x)
    return _PTI[x]


def stb(x: int) -> int:
    """Standard ternary buffer: identity."""
    _check_trit(x)
    return _STB[x]


def sti(x: int) -> int:
    """Standard ternary inverter: 0->2, 1->1, 2->0 (involution)."""
    _check_trit(x)
    return _STI[x]


def tha_ref(a: int, b: int) -> tuple[int, int]:
    """Half adder reference: (carry, sum) = divmod(a + b, 3)."""
    _check_trit(a)
    _check_trit(b)
    return divmod(a + b, 3)


def tmul_ref(a: int, b: int) -> tuple[int, int]:
    """1-trit multiplier reference: (carry, product) = divmod(a * b, 3)."""
    _check_trit(a)
    _check_trit(b)
    return divmod(a * b, 3)


def tfa_ref(a: int, b: int, cin: int) -> tuple[int, int]:
    """Full adder reference: (carry, sum) = divmod(a + b + cin, 3)."""
    _check_trit(a)
    _check_trit(b)
    _check_trit(cin)
    return divmod(a + b + cin, 3)


def max_unsigned(radix: int, digits: int) -> int:
    """Largest unsigned integer in `digits` digits of base `radix`.

    Arbitrary-precision: the 64-digit rows of the radix comparison need
    big integers, which Python ints provide natively.
    """
    if radix < 2:
        raise ValueError("radix must be >= 2")
    if digits < 1:
        raise ValueError("digits must be >= 1")
    return radix**digits - 1


def noise_margin(radix: int, vdd: float) -> float:
    """Ideal per-level noise margin vdd / (2*radix - 2)."""
    if radix < 2:
        raise ValueError("radix must be >= 2")
    if vdd <= 0:
        raise ValueError("vdd must be positive")
    return vdd / (2 * radix - 2)


# ---------------------------------------------------------------------------
# Trit words.  A word is a tuple of trits, most-significant digit first.
# ---------------------------------------------------------------------------


def word_to_int(w: tuple[int, ...]) -> int:
    n = 0
    for t in w:
        _check_trit(t)
        n = n * 3 + t
    return n


def int_to_word(n: int, width: int) -> tuple[int, ...]:
    if width < 1:
        raise ValueError("width must be >= 1")
    if n < 0 or n > 3**width - 1:
        raise ValueError(f"{n} is out of range for a {width}-trit word")
    digits = []
    for _ in range(width):
        n, d = divmod(n, 3)
        digits.append(d)
    return tuple(reversed(digits))


def word_to_str(w: tuple[int, ...]) -> str:
    return "".join(str(t) for t in w)


def str_to_word(s: str) -> tuple[int, ...]:
    if not s or any(c not in "012" for c in s):
        raise ValueError(f"not a trit string: {s!r}")
    return tuple(int(c) for c in s)


def int_to_balanced(n: int) -> tuple[int, ...]:
    """Balanced-ternary digits of n (each in {-1,0,1}), most-significant first.

    Conversion helper only; all circuit work uses the unbalanced set.
    """
    if n == 0:
        return (0,)
    sign = 1 if n > 0 else -1
    n = abs(n)
    digits = []
    while n:
        n, r = divmod(n, 3)
        if r == 2:
            r = -1
            n += 1
        digits.append(sign * r)
    return tuple(reversed(digits))


def balanced_to_int(digits: tuple[int, ...]) -> int:
    n = 0
    for d in digits:
        if d not in (-1, 0, 1):
            raise ValueError(f"not a balanced trit: {d!r}")
        n = n * 3 + d
    return n


# ---------------------------------------------------------------------------
# Word multiplier: partial products + column reduction network.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CellCensus:
    tmul: int
    tha: int
    tfa: int


@dataclass(frozen=True)
class ReductionPlan:
    """Per-column reduction schedule for a width-n x width-n multiply.

    schedule[w] = (tfa_ops, tha_ops) for column weight w; within a column the
    TFAs run first, then the THAs, on a FIFO queue of that column's items.
    Every op pushes its carry onto the next column's queue.
    """

    width: int
    schedule: dict[int, tuple[int, int]]

    def census(self) -> CellCensus:
        tfa = sum(f for f, _ in self.schedule.values())
        tha = sum(h for _, h in self.schedule.values())
        return CellCensus(tmul=self.width * self.width, tha=tha, tfa=tfa)


# The width-4 network is a fixed transcription; its cell census is part of
# the structural contract (16 multipliers, 15 half adders, 18 full adders).
_SCHEDULE_4 = {
    1: (0, 2),
    2: (3, 0),
    3: (4, 1),
    4: (5, 1),
    5: (5, 0),
    6: (1, 5),
    7: (0, 6),
}


def plan_reduction(width: int) -> ReductionPlan:
    """Reduction schedule for a given word width.

    Width 4 returns the fixed transcription; other widths fall back to a
    greedy schedule (full adders while >= 3 items, one half adder for the
    final pair).  Both are validated the same way: the executor requires each
    column to finish with exactly one digit.
    """
    if width < 1:
        raise ValueError("width must be >= 1")
    if width == 4:
        return ReductionPlan(width=4, schedule=dict(_SCHEDULE_4))
    # Greedy fallback: simulate column sizes to derive op counts.
    sizes = _initial_column_sizes(width)
    schedule: dict[int, tuple[int, int]] = {}
    carries = 0
    for w in range(2 * width):
        m = sizes[w] + carries
        tfa = tha = 0
        while m > 2:
            tfa += 1
            m -= 2
        if m == 2:
            tha += 1
            m -= 1
        schedule[w] = (tfa, tha)
        carries = tfa + tha
    return ReductionPlan(width=width, schedule=schedule)


def _initial_column_sizes(width: int) -> list[int]:
    sizes = [0] * (2 * width)
    for i in range(width):
        for j in range(width):
            sizes[i + j] += 1  # product trit
            sizes[i + j + 1] += 1  # carry trit
    return sizes


def multiply_words_behavioral(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Multiply two equal-width trit words through the cell network.

    Instantiates width^2 one-trit multipliers and reduces the partial-product
    columns with half/full adders per plan_reduction(width).  The result has
    width 2n and always equals the integer product (the discarded carries of
    the top column are provably zero; a defensive check enforces it).
    """
    if len(a) != len(b):
        raise ValueError("operand widths differ")
    width = len(a)
    plan = plan_reduction(width)

    # Partial products, LSB-first per column. a[-1-i] is digit of weight i.
    columns: list[list[int]] = [[] for _ in range(2 * width + 1)]
    for i in range(width):
        for j in range(width):
            carry, prod = tmul_ref(a[-1 - i], b[-1 - j])
            columns[i + j].append(prod)
            columns[i + j + 1].append(carry)

    digits_lsb: list[int] = []
    for w in range(2 * width):
        queue = columns[w]
        tfa_ops, tha_ops = plan.schedule.get(w, (0, 0))
        for _ in range(tfa_ops):
            x, y, z = queue.pop(0), queue.pop(0), queue.pop(0)
            carry, s = tfa_ref(x, y, z)
            queue.append(s)
            columns[w + 1].append(carry)
        for _ in range(tha_ops):
            x, y = queue.pop(0), queue.pop(0)
            carry, s = tha_ref(x, y)
            queue.append(s)
            columns[w + 1].append(carry)
        if len(queue) != 1:
            raise ValueError(f"reduction schedule leaves {len(queue)} items in column {w}")
        digits_lsb.append(queue[0])
    if any(columns[2 * width]):
        raise ArithmeticError("nonzero carry out of the top column")
    return tuple(reversed(digits_lsb))
