"""
Utility functions shared across the newton-osc toolkit
Exact rational helpers, small exact linear algebra and report formatting
"""
import logging
import math
from datetime import datetime
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import pytz

import config
from errors import InputFormatError, Overflow

logger = logging.getLogger('newton_osc.utilities')

RatLike = Union[int, str, Fraction]
Vector = Tuple[Fraction, ...]


def to_rat(value: RatLike) -> Fraction:
    """Parse an int, Fraction or "p/q" string into a reduced Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputFormatError(f"Boolean is not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InputFormatError(f"Cannot read rational {value!r}: {e}") from e
    raise InputFormatError(f"Unsupported rational literal {value!r}")


def rat_str(value: Fraction) -> str:
    """Format a rational as "p/q", or "p" when integral"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vector_str(vector: Iterable[Fraction]) -> List[str]:
    return [rat_str(v) for v in vector]


def check_size(value: Fraction) -> Fraction:
    """Raise Overflow when a rational grows beyond the configured size"""
    if (abs(value.numerator).bit_length() > config.MAX_RATIONAL_BITS
            or value.denominator.bit_length() > config.MAX_RATIONAL_BITS):
        raise Overflow(f"Rational with {value.denominator.bit_length()} bit denominator exceeds limit")
    return value


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def lcm_all(values: Iterable[int]) -> int:
    result = 1
    for v in values:
        result = result * v // math.gcd(result, v)
    return result


def primitive(vector: Sequence[Fraction]) -> Tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray"""
    fracs = [Fraction(v) for v in vector]
    denom = lcm_all(f.denominator for f in fracs)
    ints = [int(f * denom) for f in fracs]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


def unit_vector(n: int, j: int) -> Tuple[int, ...]:
    return tuple(1 if k == j else 0 for k in range(n))


def row_echelon(rows: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """Exact Gaussian elimination, returns the nonzero echelon rows"""
    matrix = [[Fraction(x) for x in row] for row in rows]
    if not matrix:
        return []
    width = len(matrix[0])
    echelon: List[List[Fraction]] = []
    col = 0
    while matrix and col < width:
        pivot = next((r for r in matrix if r[col] != 0), None)
        if pivot is None:
            col += 1
            continue
        matrix.remove(pivot)
        inv = 1 / pivot[col]
        pivot = [x * inv for x in pivot]
        reduced = []
        for r in matrix:
            if r[col] != 0:
                factor = r[col]
                r = [x - factor * y for x, y in zip(r, pivot)]
            if any(r):
                reduced.append(r)
        matrix = reduced
        echelon.append(pivot)
        col += 1
    return echelon


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    if not rows:
        return 0
    return len(row_echelon(rows))


def det(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a square matrix"""
    m = [[Fraction(x) for x in row] for row in matrix]
    size = len(m)
    result = Fraction(1)
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if m[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            result = -result
        result *= m[col][col]
        for r in range(col + 1, size):
            if m[r][col] != 0:
                factor = m[r][col] / m[col][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return result


def solve(columns: Sequence[Sequence], target: Sequence) -> Optional[List[Fraction]]:
    """Solve sum_k lam_k * columns[k] = target exactly for a square nonsingular system"""
    size = len(columns)
    aug = [[Fraction(columns[k][i]) for k in range(size)] + [Fraction(target[i])] for i in range(size)]
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if pivot_row is None:
            return None
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][size] for i in range(size)]


def utc_timestamp() -> str:
    """Report timestamp in UTC"""
    return datetime.now(pytz.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def approx(value) -> dict:
    """Mark a float (or complex) as approximate in JSON output"""
    if isinstance(value, complex):
        return {"re": float(value.real), "im": float(value.imag), "approx": True}
    return {"value": float(value), "approx": True}
