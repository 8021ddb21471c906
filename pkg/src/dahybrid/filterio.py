"""Coefficient ingestion and a windowed-sinc stand-in for filter design."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

from scipy import signal

from .dacore import QuantizedFilter, signed_range
from .errors import DomainError

log = logging.getLogger(__name__)


class CoefficientParseError(DomainError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


@dataclass(frozen=True)
class FilterSpecRequest:
    order: int
    sample_rate: float
    f_pass: float
    f_stop: float
    coef_width: int = 16

    def __post_init__(self):
        if self.order < 1:
            raise DomainError(f"order must be >= 1, got {self.order}")
        if self.coef_width < 2:
            raise DomainError(f"coef_width must be >= 2, got {self.coef_width}")
        if not 0 < self.f_pass < self.f_stop < self.sample_rate / 2:
            raise DomainError(
                "need 0 < f_pass < f_stop < sample_rate/2, got "
                f"{self.f_pass}, {self.f_stop}, {self.sample_rate}"
            )


# Reference band plans (Hz): order -> (f_pass, f_stop)
REFERENCE_BANDS = {
    8: (1.2e6, 3.8e6),
    18: (1.2e6, 3.8e6),
    31: (1.6e6, 3.0e6),
    72: (2.2e6, 2.8e6),
    108: (2.2e6, 2.8e6),
    143: (2.2e6, 2.8e6),
}
REFERENCE_SAMPLE_RATE = 40e6


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def saturate(value: int, width: int) -> int:
    lo, hi = signed_range(width)
    return min(max(value, lo), hi)


def gen_filter(request: FilterSpecRequest) -> QuantizedFilter:
    """Hamming-windowed sinc lowpass, peak-normalized to the full C-bit range."""
    cutoff = (request.f_pass + request.f_stop) / 2
    taps = signal.firwin(request.order, cutoff, window="hamming", fs=request.sample_rate)
    peak = max(abs(float(t)) for t in taps)
    full = (1 << (request.coef_width - 1)) - 1
    coefs = [saturate(round_half_away(float(t) / peak * full), request.coef_width) for t in taps]
    return QuantizedFilter(tuple(coefs), request.coef_width, scale_exponent=-(request.coef_width - 1))


def reference_request(order: int, coef_width: int = 16) -> FilterSpecRequest:
    f_pass, f_stop = REFERENCE_BANDS[order]
    return FilterSpecRequest(order, REFERENCE_SAMPLE_RATE, f_pass, f_stop, coef_width)


def parse_coefficients(text: str, coef_width: int, source="<text>") -> tuple[QuantizedFilter, list[int]]:
    """Parse one value per line; returns the filter and the indices that saturated.

    All-integer files are taken as already quantized. Otherwise each real is
    scaled by 2**(C-1), rounded half away from zero and saturated.
    """
    if coef_width < 1:
        raise DomainError(f"coef_width must be >= 1, got {coef_width}")
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip().replace("−", "-")
        if line:
            tokens.append((lineno, line))
    if not tokens:
        raise DomainError(f"{source}: no coefficients found")

    def is_int(tok):
        try:
            int(tok)
            return True
        except ValueError:
            return False

    integer_mode = all(is_int(tok) for _, tok in tokens)
    values = []
    for lineno, tok in tokens:
        try:
            values.append(int(tok) if integer_mode else float(tok))
        except ValueError:
            raise CoefficientParseError(source, lineno, f"not a number: {tok!r}") from None
        if not integer_mode and not math.isfinite(values[-1]):
            raise CoefficientParseError(source, lineno, f"not a finite number: {tok!r}")

    if integer_mode:
        raw = values
        scale_exponent = 0
    else:
        raw = [round_half_away(v * (1 << (coef_width - 1))) for v in values]
        scale_exponent = -(coef_width - 1)
    coefs = [saturate(v, coef_width) for v in raw]
    saturated = [i for i, (a, b) in enumerate(zip(raw, coefs)) if a != b]
    if saturated:
        log.warning("%s: saturated coefficient(s) at index %s to %d bits", source, saturated, coef_width)
    return QuantizedFilter(tuple(coefs), coef_width, scale_exponent), saturated


def load_coefficients(path, coef_width: int) -> QuantizedFilter:
    path = Path(path)
    filt, _ = parse_coefficients(path.read_text(), coef_width, source=str(path))
    return filt


def format_coefficients(filt: QuantizedFilter) -> str:
    return "".join(f"{c}\n" for c in filt.coefficients)
