"""Trace loading, saving, dataset manifests and synthetic generators.

Trace files are UTF-8 text with one sample per line. Blank lines and lines
starting with ``#`` are skipped.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

from .errors import ValidationError
from .predictor import is_finite_real

__all__ = [
    "Trace",
    "ManifestEntry",
    "DatasetManifest",
    "TABLE_II",
    "load_trace",
    "save_trace",
    "parse_trace",
    "format_trace",
    "load_manifest",
    "splitmix64",
    "gen_constant",
    "gen_ramp",
    "gen_sine",
    "gen_random_walk",
]

PathLike = Union[str, "os.PathLike[str]"]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Trace:
    name: str
    values: tuple[float, ...]
    default_eps: Optional[float] = None

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValidationError(f"trace {self.name!r} is empty")
        for i, v in enumerate(values):
            if not math.isfinite(v):
                raise ValidationError(f"trace {self.name!r}: sample {i} is not finite")
        object.__setattr__(self, "values", values)
        if self.default_eps is not None:
            if not is_finite_real(self.default_eps) or self.default_eps < 0:
                raise ValidationError(
                    f"trace {self.name!r}: default_eps must be finite and >= 0"
                )
            object.__setattr__(self, "default_eps", float(self.default_eps))

    def __len__(self) -> int:
        return len(self.values)

    def with_eps(self, eps: Optional[float]) -> "Trace":
        return Trace(self.name, self.values, eps)


class TraceFormatError(ValidationError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "") -> None:
        where = f"{source}:{line}: " if line is not None else (f"{source}: " if source else "")
        super().__init__(where + message)
        self.line = line


def parse_trace(text: str, name: str = "trace", default_eps: Optional[float] = None) -> Trace:
    values: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            value = float(line)
        except ValueError:
            raise TraceFormatError(f"cannot parse {line!r} as a number", lineno, name) from None
        if not math.isfinite(value):
            raise TraceFormatError(f"non-finite value {line!r}", lineno, name)
        values.append(value)
    if not values:
        raise TraceFormatError("no samples found", source=name)
    return Trace(name, tuple(values), default_eps)


def load_trace(path: PathLike, name: Optional[str] = None, default_eps: Optional[float] = None) -> Trace:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_trace(text, name if name is not None else path.stem, default_eps)


def format_trace(values: Sequence[float], comment: Optional[str] = None) -> str:
    # repr() gives the shortest string that round-trips.
    lines = [f"# {c}" for c in comment.splitlines()] if comment else []
    lines.extend(repr(float(v)) for v in values)
    return "\n".join(lines) + "\n"


def save_trace(trace: Trace, path: PathLike, comment: Optional[str] = None) -> Path:
    path = Path(path)
    path.write_text(format_trace(trace.values, comment), encoding="utf-8")
    return path


@dataclass(frozen=True)
class ManifestEntry:
    """One dataset: name, source (record id or trace path) and eps."""

    name: str
    source: str
    eps: Optional[float]


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for entry in self.entries:
            if entry.name in seen:
                raise ValidationError(f"duplicate dataset name {entry.name!r} in manifest")
            seen.add(entry.name)

    def __iter__(self) -> Iterator[ManifestEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def eps_for(self, name: str) -> Optional[float]:
        for entry in self.entries:
            if entry.name == name:
                return entry.eps
        raise KeyError(name)


# MGH/MF waveform records and error bounds used in the reference evaluation.
TABLE_II = DatasetManifest(
    (
        ManifestEntry("ECG", "mghdb/mgh012", 0.1),
        ManifestEntry("PAP", "mghdb/mgh183", 3.5),
        ManifestEntry("ART", "mghdb/mgh003", 5.0),
        ManifestEntry("CVP", "mghdb/mgh239", 2.5),
        ManifestEntry("RI", "mghdb/mgh022", 0.15),
    )
)


def load_manifest(path: PathLike) -> DatasetManifest:
    """Read a ``name,path,eps`` manifest.

    Relative trace paths resolve against the manifest's directory. An empty
    eps cell is kept as ``None`` so callers can decide how to fail.
    """
    path = Path(path)
    base = path.parent
    entries = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) == 2:
            parts.append("")
        if len(parts) != 3 or not parts[0] or not parts[1]:
            raise TraceFormatError(f"expected 'name,path,eps', got {line!r}", lineno, str(path))
        name, source, eps_text = parts
        eps: Optional[float] = None
        if eps_text:
            try:
                eps = float(eps_text)
            except ValueError:
                raise TraceFormatError(f"bad eps {eps_text!r}", lineno, str(path)) from None
            if not math.isfinite(eps) or eps < 0:
                raise TraceFormatError(f"eps must be finite and >= 0, got {eps_text}", lineno, str(path))
        source_path = Path(source)
        if not source_path.is_absolute():
            source_path = base / source_path
        entries.append(ManifestEntry(name, str(source_path), eps))
    return DatasetManifest(tuple(entries))


def _check_n(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    return n


def gen_constant(c: float, n: int, name: str = "constant") -> Trace:
    _check_n(n)
    if not is_finite_real(c):
        raise ValidationError(f"constant must be finite, got {c!r}")
    return Trace(name, (float(c),) * n)


def gen_ramp(a: float, b: float, n: int, name: str = "ramp") -> Trace:
    """x_k = a + b*k for k = 0..n-1."""
    _check_n(n)
    if not (is_finite_real(a) and is_finite_real(b)):
        raise ValidationError("ramp offset and slope must be finite")
    return Trace(name, tuple(a + b * k for k in range(n)))


def gen_sine(amplitude: float, period: float, n: int, name: str = "sine") -> Trace:
    """x_k = amplitude * sin(2*pi*k / period)."""
    _check_n(n)
    if not is_finite_real(amplitude):
        raise ValidationError("amplitude must be finite")
    if not is_finite_real(period) or period <= 0:
        raise ValidationError(f"period must be > 0, got {period!r}")
    step = 2.0 * math.pi / period
    return Trace(name, tuple(amplitude * math.sin(step * k) for k in range(n)))


def splitmix64(seed: int) -> Iterator[int]:
    state = seed & _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def _unit_interval(u: int) -> float:
    # top 53 bits -> [0, 1) -> [-1, 1)
    return (u >> 11) * 2.0**-53 * 2.0 - 1.0


def gen_random_walk(seed: int, step_scale: float, n: int, name: str = "walk") -> Trace:
    """Random walk starting at 0 with uniform steps in [-step_scale, step_scale).

    Steps come from splitmix64 seeded with ``seed``, so the trace is the same
    on every platform.
    """
    _check_n(n)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValidationError(f"seed must be an integer, got {seed!r}")
    if not is_finite_real(step_scale) or step_scale < 0:
        raise ValidationError(f"step_scale must be finite and >= 0, got {step_scale!r}")
    rng = splitmix64(seed)
    values = [0.0]
    x = 0.0
    for _ in range(n - 1):
        x += step_scale * _unit_interval(next(rng))
        values.append(x)
    return Trace(name, tuple(values))
