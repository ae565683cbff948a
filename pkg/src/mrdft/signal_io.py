"""Reading signals, writing spectra, and rendering one level as a PGM image.

File formats
------------
Signal ``csv``
    One sample per line, either ``re`` or ``re,im``.
Signal ``raw64``
    Little-endian float64, interleaved ``re, im`` pairs.
Spectrum ``json``
    ``{"n", "m", "layout", "levels": [{"i", "frames": [[[re, im], ...], ...]}, ...]}``
Spectrum ``csv``
    Header ``level,frame,bin,re,im`` then one row per flat index.

Floats are written with the shortest repr that round-trips, so output bytes
depend only on the values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .core import Layout, MrSpectrum

PathLike = Union[str, Path]

SIGNAL_FORMATS = ("csv", "raw64")
SPECTRUM_FORMATS = ("json", "csv")
SCALES = ("linear", "log")


class SignalFormatError(ValueError):
    pass


@dataclass
class SignalFile:
    samples: np.ndarray
    format: str

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def m(self) -> int:
        return self.n.bit_length() - 1


def _parse_csv(text: str) -> list[complex]:
    samples = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        try:
            if len(fields) == 1:
                samples.append(complex(float(fields[0]), 0.0))
            elif len(fields) == 2:
                samples.append(complex(float(fields[0]), float(fields[1])))
            else:
                raise ValueError
        except ValueError:
            raise SignalFormatError(f"line {lineno}: malformed sample {line!r}") from None
    return samples


def _validate_length(samples: np.ndarray, pad_zeros: bool) -> np.ndarray:
    n = samples.size
    if n == 0:
        raise SignalFormatError("empty signal")
    if n & (n - 1):
        if not pad_zeros:
            raise SignalFormatError(
                f"signal length {n} is not a power of two (use --pad-zeros to extend it)"
            )
        target = 1 << n.bit_length()
        samples = np.concatenate([samples, np.zeros(target - n, dtype=np.complex128)])
    if samples.size == 1:
        if not pad_zeros:
            raise SignalFormatError("signal length 1 gives m=0; m must be >= 1")
        samples = np.concatenate([samples, np.zeros(1, dtype=np.complex128)])
    return samples


def read_signal(path: PathLike, format: str = "csv", pad_zeros: bool = False) -> SignalFile:
    """Load a signal whose length must be a power of two, at least 2.

    With ``pad_zeros`` a short signal is zero-extended to the next valid
    length instead of being rejected.
    """
    path = Path(path)
    if format == "csv":
        samples = np.array(_parse_csv(path.read_text()), dtype=np.complex128)
    elif format == "raw64":
        raw = path.read_bytes()
        if len(raw) % 16:
            raise SignalFormatError(
                f"raw64 file size {len(raw)} is not a multiple of 16 bytes (re, im float64 pairs)"
            )
        pairs = np.frombuffer(raw, dtype="<f8").reshape(-1, 2)
        samples = pairs[:, 0] + 1j * pairs[:, 1]
    else:
        raise ValueError(f"unknown signal format {format!r}; expected one of {SIGNAL_FORMATS}")
    return SignalFile(_validate_length(samples, pad_zeros), format)


def write_signal(samples, path: PathLike, format: str = "csv") -> None:
    samples = np.asarray(samples, dtype=np.complex128)
    path = Path(path)
    if format == "csv":
        path.write_text("".join(f"{float(z.real)!r},{float(z.imag)!r}\n" for z in samples))
    elif format == "raw64":
        pairs = np.empty((samples.size, 2), dtype="<f8")
        pairs[:, 0] = samples.real
        pairs[:, 1] = samples.imag
        path.write_bytes(pairs.tobytes())
    else:
        raise ValueError(f"unknown signal format {format!r}; expected one of {SIGNAL_FORMATS}")


def spectrum_to_json(spectrum: MrSpectrum) -> str:
    levels = []
    for i in range(1, spectrum.m + 1):
        frames = [[[float(z.real), float(z.imag)] for z in frame] for frame in spectrum.level(i)]
        levels.append({"i": i, "frames": frames})
    record = {"n": spectrum.n, "m": spectrum.m, "layout": spectrum.layout.value, "levels": levels}
    return json.dumps(record, separators=(",", ":")) + "\n"


def spectrum_to_csv(spectrum: MrSpectrum) -> str:
    lines = ["level,frame,bin,re,im"]
    for i in range(1, spectrum.m + 1):
        for f, frame in enumerate(spectrum.level(i)):
            for k, z in enumerate(frame):
                lines.append(f"{i},{f},{k},{float(z.real)!r},{float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def write_spectrum(spectrum: MrSpectrum, path: PathLike, format: str = "json") -> None:
    if format == "json":
        text = spectrum_to_json(spectrum)
    elif format == "csv":
        text = spectrum_to_csv(spectrum)
    else:
        raise ValueError(f"unknown spectrum format {format!r}; expected one of {SPECTRUM_FORMATS}")
    Path(path).write_text(text)


def read_spectrum(path: PathLike, format: str = "json") -> MrSpectrum:
    path = Path(path)
    if format == "json":
        record = json.loads(path.read_text())
        m, n = record["m"], record["n"]
        data = np.empty(m * n, dtype=np.complex128)
        for level in record["levels"]:
            i = level["i"]
            pairs = np.array(level["frames"], dtype=np.float64).reshape(-1, 2)
            data[(i - 1) * n : i * n] = pairs[:, 0] + 1j * pairs[:, 1]
        return MrSpectrum(m, n, data, Layout(record["layout"]))
    if format == "csv":
        rows = path.read_text().splitlines()[1:]
        parsed = [r.split(",") for r in rows if r]
        m = max(int(r[0]) for r in parsed)
        n = len(parsed) // m
        data = np.empty(m * n, dtype=np.complex128)
        for level, frame, k, re, im in parsed:
            i = int(level)
            data[(i - 1) * n + int(frame) * (1 << i) + int(k)] = complex(float(re), float(im))
        # csv carries no layout column; readers get what the writer was given
        return MrSpectrum(m, n, data, Layout.NATURAL)
    raise ValueError(f"unknown spectrum format {format!r}; expected one of {SPECTRUM_FORMATS}")


def level_image(spectrum: MrSpectrum, level: int, scale: str = "linear") -> np.ndarray:
    """8-bit magnitude map of one level: rows are bins (bin 0 on top), columns frames."""
    if spectrum.layout is not Layout.NATURAL:
        raise ValueError("spectrogram needs a natural-order spectrum")
    if not 1 <= level <= spectrum.m:
        raise ValueError(f"level {level} out of range [1, {spectrum.m}]")
    if scale not in SCALES:
        raise ValueError(f"unknown scale {scale!r}; expected one of {SCALES}")
    mag = np.abs(spectrum.level(level)).T
    peak = mag.max()
    if peak == 0:
        return np.zeros(mag.shape, dtype=np.uint8)
    if scale == "linear":
        norm = mag / peak
    else:
        norm = np.log1p(mag) / np.log1p(peak)
    return np.clip(np.floor(255.0 * norm + 0.5), 0, 255).astype(np.uint8)


def write_level_pgm(
    spectrum: MrSpectrum, level: int, path: PathLike, scale: str = "linear"
) -> None:
    """Write one level as a binary (P5) PGM, width = frames, height = bins."""
    img = level_image(spectrum, level, scale)
    height, width = img.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (width, height) + img.tobytes())
