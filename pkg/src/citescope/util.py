"""Small shared helpers: compensated summation, hashing, number formatting."""

from __future__ import annotations

import hashlib
import os


class KahanSum:
    """Compensated (Kahan) summation; groups can reach millions of terms."""

    __slots__ = ("_total", "_carry")

    def __init__(self) -> None:
        self._total = 0.0
        self._carry = 0.0

    def add(self, value: float) -> None:
        y = value - self._carry
        t = self._total + y
        self._carry = (t - self._total) - y
        self._total = t

    def merge(self, other: "KahanSum") -> None:
        self.add(other._total)
        self.add(-other._carry)

    @property
    def value(self) -> float:
        return self._total


def sha256_file(path: str | os.PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def fmt_number(value: float | int | None) -> str:
    """CSV cell rendering: ints verbatim, floats at 6 significant digits,
    missing values as empty cells."""
    if value is None:
        return ""
    if isinstance(value, bool):
        raise TypeError("booleans are not CSV numbers")
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"
