"""Bit-exact fixed-point FIR arithmetic.

All values are raw two's-complement integers. Bit ``j`` of a sample carries
weight ``2**j`` and the top bit carries ``-2**(B-1)``, so the distributed
arithmetic evaluation reproduces the direct-form inner product exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionError, DomainError


def clog2(n: int) -> int:
    """ceil(log2(n)) for n >= 1, with clog2(1) == 0."""
    if n < 1:
        raise DomainError(f"clog2 needs n >= 1, got {n}")
    return (n - 1).bit_length()


def signed_range(width: int) -> tuple[int, int]:
    return -(1 << (width - 1)), (1 << (width - 1)) - 1


@dataclass(frozen=True)
class QuantizedFilter:
    coefficients: tuple[int, ...]
    coef_width: int
    scale_exponent: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))
        if self.coef_width < 1:
            raise DomainError(f"coef_width must be >= 1, got {self.coef_width}")
        if not self.coefficients:
            raise DomainError("a filter needs at least one coefficient")
        lo, hi = signed_range(self.coef_width)
        for i, c in enumerate(self.coefficients):
            if not lo <= c <= hi:
                raise DomainError(
                    f"coefficient {i} = {c} outside the {self.coef_width}-bit range [{lo}, {hi}]"
                )

    @property
    def order_n(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class SampleWindow:
    """Tap window; ``samples[0]`` is the newest input x[t], ``samples[i]`` is x[t-i]."""

    samples: tuple[int, ...]
    input_width: int

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(int(s) for s in self.samples))
        if self.input_width < 1:
            raise DomainError(f"input_width must be >= 1, got {self.input_width}")
        lo, hi = signed_range(self.input_width)
        for i, s in enumerate(self.samples):
            if not lo <= s <= hi:
                raise DomainError(
                    f"sample {i} = {s} outside the {self.input_width}-bit range [{lo}, {hi}]"
                )


@dataclass(frozen=True)
class BitPlaneMatrix:
    planes: tuple[tuple[int, ...], ...]

    @property
    def msb_index(self) -> int:
        return len(self.planes) - 1

    def reconstruct(self) -> list[int]:
        msb = self.msb_index
        n = len(self.planes[0]) if self.planes else 0
        out = []
        for i in range(n):
            value = -(self.planes[msb][i] << msb)
            for j in range(msb):
                value += self.planes[j][i] << j
            out.append(value)
        return out


@dataclass(frozen=True)
class FilterOutput:
    value: int
    width: int


def output_width(filt: QuantizedFilter, input_width: int) -> int:
    return filt.coef_width + input_width + clog2(filt.order_n)


def _check_pair(filt: QuantizedFilter, window: SampleWindow):
    if len(window.samples) != filt.order_n:
        raise DimensionError(
            f"window has {len(window.samples)} samples but the filter has {filt.order_n} taps"
        )


def direct_fir(filt: QuantizedFilter, window: SampleWindow) -> FilterOutput:
    _check_pair(filt, window)
    acc = sum(c * x for c, x in zip(filt.coefficients, window.samples))
    return FilterOutput(acc, output_width(filt, window.input_width))


def bit_decompose(window: SampleWindow) -> BitPlaneMatrix:
    mask = (1 << window.input_width) - 1
    encoded = [s & mask for s in window.samples]
    planes = tuple(
        tuple((e >> j) & 1 for e in encoded) for j in range(window.input_width)
    )
    return BitPlaneMatrix(planes)


def partial_sum(filt: QuantizedFilter, plane_bits: Sequence[int]) -> int:
    """Sum of the coefficients whose tap bit is set."""
    if len(plane_bits) != filt.order_n:
        raise DimensionError(
            f"plane has {len(plane_bits)} bits but the filter has {filt.order_n} taps"
        )
    return sum(c for c, b in zip(filt.coefficients, plane_bits) if b)


def accumulate_planes(plane_sums: Sequence[int]) -> int:
    """Shift-accumulate per-plane sums; the last plane is the sign plane."""
    msb = len(plane_sums) - 1
    acc = -(plane_sums[msb] << msb)
    for j in range(msb):
        acc += plane_sums[j] << j
    return acc


def da_fir(filt: QuantizedFilter, window: SampleWindow) -> FilterOutput:
    _check_pair(filt, window)
    planes = bit_decompose(window).planes
    sums = [partial_sum(filt, plane) for plane in planes]
    return FilterOutput(accumulate_planes(sums), output_width(filt, window.input_width))
