"""Power-trace ingestion: parsing, validation, resampling, matrix assembly.

A trace is the motor power (kW) recorded at fixed intervals while one unit
is ground.  Traces of differing duration are aligned onto a fixed number of
variables by linear-interpolation resampling before any statistics are run.
Parsing is strict: bad sensor data is rejected, never repaired.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadResampleLength,
    CampaignFileError,
    EmptyCampaign,
    GrindmonError,
    InvalidValue,
    MalformedHeader,
    ManifestError,
    NonMonotoneTime,
    NonNumericField,
    TooFewSamples,
)

TRACE_HEADER = "time_s,power_kw"
MANIFEST_HEADER = "trace_file,unit_id,wheel_id,parts_ground,burn_rank"

LABEL_NOBURN = "NoBurn"
LABEL_BURN = "Burn"

DEFAULT_RESAMPLE_LENGTH = 512


def label_from_rank(burn_rank: int | None) -> str | None:
    """Binary class from the three-level burn ranking (rank >= 2 is Burn)."""
    if burn_rank is None:
        return None
    return LABEL_BURN if burn_rank >= 2 else LABEL_NOBURN


@dataclass(frozen=True)
class PowerTrace:
    """One unit's power-vs-time series plus provenance metadata.

    times are seconds, strictly increasing; powers are kilowatts, all finite;
    parts_ground counts units cut by this wheel before this one.
    """

    unit_id: str
    wheel_id: str
    parts_ground: int
    burn_rank: int | None
    times: np.ndarray
    powers: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        powers = np.asarray(self.powers, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "powers", powers)
        if times.ndim != 1 or powers.ndim != 1 or times.shape != powers.shape:
            raise ValueError("times and powers must be 1-d arrays of equal length")
        if times.size < 2:
            raise TooFewSamples("a trace needs at least 2 samples")
        if not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(powers)):
            raise ValueError("times and powers must be finite")
        if self.parts_ground < 0:
            raise ValueError("parts_ground must be non-negative")
        if self.burn_rank is not None and self.burn_rank not in (1, 2, 3):
            raise ValueError("burn_rank must be 1, 2 or 3 when present")

    @property
    def n_samples(self) -> int:
        return int(self.times.size)

    @property
    def duration_s(self) -> float:
        return float(self.times[-1] - self.times[0])

    @property
    def label(self) -> str | None:
        return label_from_rank(self.burn_rank)


@dataclass(frozen=True)
class ManifestEntry:
    trace_file: str
    unit_id: str
    wheel_id: str
    parts_ground: int
    burn_rank: int | None

    @property
    def label(self) -> str | None:
        return label_from_rank(self.burn_rank)


@dataclass(frozen=True)
class CampaignManifest:
    """Ordered list of trace files with per-unit metadata.

    Within one wheel, unit ids are unique and parts_ground never decreases
    (a campaign is recorded in wear order).  base_dir anchors relative
    trace_file paths.
    """

    entries: tuple[ManifestEntry, ...]
    base_dir: Path = field(default_factory=Path)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "base_dir", Path(self.base_dir))
        seen: dict[tuple[str, str], int] = {}
        last_parts: dict[str, int] = {}
        for i, e in enumerate(self.entries, start=1):
            key = (e.wheel_id, e.unit_id)
            if key in seen:
                raise ManifestError(
                    f"row {i}: unit_id {e.unit_id!r} repeated for wheel {e.wheel_id!r}"
                    f" (first at row {seen[key]})"
                )
            seen[key] = i
            prev = last_parts.get(e.wheel_id)
            if prev is not None and e.parts_ground < prev:
                raise ManifestError(
                    f"row {i}: parts_ground decreases for wheel {e.wheel_id!r}"
                    f" ({prev} -> {e.parts_ground})"
                )
            last_parts[e.wheel_id] = e.parts_ground
            if e.parts_ground < 0:
                raise ManifestError(f"row {i}: parts_ground must be non-negative")
            if e.burn_rank is not None and e.burn_rank not in (1, 2, 3):
                raise ManifestError(f"row {i}: burn_rank must be 1, 2, 3 or empty")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def fingerprint(self) -> str:
        """SHA-256 of the canonical serialization, independent of file layout."""
        return hashlib.sha256(serialize_manifest_csv(self).encode("utf-8")).hexdigest()

    def labels(self) -> list[str | None]:
        return [e.label for e in self.entries]


@dataclass(frozen=True)
class TraceMatrix:
    """n aligned observations x L resampled power variables, row-linked to metadata."""

    values: np.ndarray
    meta: tuple[ManifestEntry, ...]
    resample_length: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "meta", tuple(self.meta))
        if values.ndim != 2:
            raise ValueError("values must be a 2-d matrix")
        n, L = values.shape
        if n < 1:
            raise ValueError("matrix needs at least one row")
        if L != self.resample_length:
            raise ValueError("column count must equal resample_length")
        if len(self.meta) != n:
            raise ValueError("one metadata entry per row required")
        if not np.all(np.isfinite(values)):
            raise ValueError("matrix values must be finite")

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    def labels(self) -> list[str | None]:
        return [m.label for m in self.meta]


def parse_trace_csv(
    text: str,
    *,
    unit_id: str = "",
    wheel_id: str = "",
    parts_ground: int = 0,
    burn_rank: int | None = None,
) -> PowerTrace:
    """Parse a `time_s,power_kw` CSV stream into a PowerTrace.

    Accepts LF or CRLF line endings and a `.` decimal separator only.
    Rejects non-numeric fields, non-finite values and non-monotone time;
    row numbers in errors are 1-based over data rows.
    """
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise MalformedHeader(f"expected header {TRACE_HEADER!r}")

    times: list[float] = []
    powers: list[float] = []
    for row, line in enumerate(lines[1:], start=1):
        line = line.strip()
        parts = line.split(",")
        if len(parts) != 2:
            raise NonNumericField(row, f"data row {row}: expected 2 fields, got {len(parts)}")
        try:
            t = float(parts[0])
            p = float(parts[1])
        except ValueError:
            raise NonNumericField(row) from None
        if not (np.isfinite(t) and np.isfinite(p)):
            raise InvalidValue(row)
        if times and t <= times[-1]:
            raise NonMonotoneTime(row)
        times.append(t)
        powers.append(p)

    if len(times) < 2:
        raise TooFewSamples(f"trace has {len(times)} samples, need at least 2")
    return PowerTrace(
        unit_id=unit_id,
        wheel_id=wheel_id,
        parts_ground=parts_ground,
        burn_rank=burn_rank,
        times=np.array(times),
        powers=np.array(powers),
    )


def serialize_trace_csv(trace: PowerTrace) -> str:
    """Trace back to CSV text; floats printed in shortest round-trip form."""
    out = [TRACE_HEADER]
    for t, p in zip(trace.times, trace.powers):
        out.append(f"{float(t)!r},{float(p)!r}")
    return "\n".join(out) + "\n"


def resample(trace: PowerTrace, length: int) -> np.ndarray:
    """Power linearly interpolated at `length` equally spaced times.

    The grid spans [t_first, t_last]; both endpoint values are preserved
    exactly.
    """
    if length < 2:
        raise BadResampleLength(f"resample length must be >= 2, got {length}")
    grid = np.linspace(trace.times[0], trace.times[-1], length)
    values = np.interp(grid, trace.times, trace.powers)
    values[0] = trace.powers[0]
    values[-1] = trace.powers[-1]
    return values


def parse_manifest_csv(text: str, base_dir: Path | str = ".") -> CampaignManifest:
    """Parse a campaign manifest.  burn_rank may be empty (unlabeled row)."""
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r]
    if not rows or ",".join(rows[0]).strip() != MANIFEST_HEADER:
        raise ManifestError(f"expected header {MANIFEST_HEADER!r}")
    entries = []
    for i, r in enumerate(rows[1:], start=1):
        if len(r) != 5:
            raise ManifestError(f"row {i}: expected 5 fields, got {len(r)}")
        trace_file, unit_id, wheel_id, parts_s, rank_s = (f.strip() for f in r)
        try:
            parts_ground = int(parts_s)
        except ValueError:
            raise ManifestError(f"row {i}: parts_ground {parts_s!r} is not an integer") from None
        rank: int | None = None
        if rank_s:
            try:
                rank = int(rank_s)
            except ValueError:
                raise ManifestError(f"row {i}: burn_rank {rank_s!r} is not an integer") from None
        entries.append(ManifestEntry(trace_file, unit_id, wheel_id, parts_ground, rank))
    return CampaignManifest(entries=tuple(entries), base_dir=Path(base_dir))


def serialize_manifest_csv(manifest: CampaignManifest) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MANIFEST_HEADER.split(","))
    for e in manifest.entries:
        rank = "" if e.burn_rank is None else str(e.burn_rank)
        writer.writerow([e.trace_file, e.unit_id, e.wheel_id, str(e.parts_ground), rank])
    return buf.getvalue()


def load_manifest(path: Path | str) -> CampaignManifest:
    path = Path(path)
    return parse_manifest_csv(path.read_text(encoding="utf-8"), base_dir=path.parent)


def save_manifest(manifest: CampaignManifest, path: Path | str) -> None:
    Path(path).write_text(serialize_manifest_csv(manifest), encoding="utf-8")


def load_trace(path: Path | str, entry: ManifestEntry | None = None) -> PowerTrace:
    """Load one trace file, attaching manifest metadata when given."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CampaignFileError(path, exc) from exc
    kwargs = {}
    if entry is not None:
        kwargs = dict(
            unit_id=entry.unit_id,
            wheel_id=entry.wheel_id,
            parts_ground=entry.parts_ground,
            burn_rank=entry.burn_rank,
        )
    try:
        return parse_trace_csv(text, **kwargs)
    except GrindmonError as exc:
        raise CampaignFileError(path, exc) from exc


def build_matrix(manifest: CampaignManifest, length: int = DEFAULT_RESAMPLE_LENGTH) -> TraceMatrix:
    """Resample every manifest trace to `length` and stack in manifest order."""
    if length < 2:
        raise BadResampleLength(f"resample length must be >= 2, got {length}")
    if not manifest.entries:
        raise EmptyCampaign("manifest has no entries")
    rows = np.empty((len(manifest.entries), length))
    for i, entry in enumerate(manifest.entries):
        trace = load_trace(manifest.base_dir / entry.trace_file, entry)
        rows[i] = resample(trace, length)
    return TraceMatrix(values=rows, meta=manifest.entries, resample_length=length)
