"""Synthetic modulated signals, AWGN injection, and labeled datasets.

Five desk-scale modulation schemes over a real-valued carrier:

* ``ook``  - on-off keying: bit 1 transmits the carrier, bit 0 silence.
* ``bpsk`` - binary phase-shift keying: bit 1 is the carrier, bit 0 the
  carrier shifted by pi (samplewise negation).
* ``qpsk`` - quadrature PSK: Gray-coded bit pairs select one of four
  carrier phases (00 -> pi/4, 01 -> 3pi/4, 11 -> 5pi/4, 10 -> 7pi/4).
* ``fsk2`` - binary FSK with continuous phase: bit 0 keeps the carrier
  frequency, bit 1 adds one extra cycle per symbol.
* ``am``   - amplitude modulation of a fixed two-tone message onto the
  carrier; payload bits only set the duration.

Noise is calibrated by RMS ratio: snr_db = 20 log10(rms(signal)/rms(noise)).
The Gaussian draw is renormalized to exactly unit RMS before scaling, so the
realized SNR matches the target up to rounding.  All randomness flows
through numpy's PCG64 generator seeded explicitly; a dataset is a pure
function of its configuration and seed.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, FramingError

SCHEMES = ("ook", "bpsk", "qpsk", "fsk2", "am")

# Maximum magnitude of the random fractional frequency offset applied by
# make_dataset, in cycles per sample.  Small enough that coherent BPSK
# demodulation still succeeds over desk-scale payloads.
FREQ_OFFSET_MAX = 0.002

# AM message: two fixed tones (cycles per sample, starting phase) and the
# modulation depth.  Chosen well below the default carrier frequency.
_AM_TONES = ((0.0131, 0.0), (0.0292, 1.0))
_AM_DEPTH = 0.7

_DATASET_MAGIC = b"PMLBDS01"


@dataclass(frozen=True)
class ModemConfig:
    """Carrier and symbol-timing parameters shared by modulator and receiver."""

    scheme: str
    samples_per_symbol: int = 16
    carrier_cycles_per_symbol: float = 2.0
    phase_offset: float = 0.0
    freq_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigurationError(
                f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}"
            )
        if self.samples_per_symbol < 4:
            raise DomainError(
                f"samples_per_symbol must be >= 4, got {self.samples_per_symbol}"
            )
        if self.carrier_cycles_per_symbol <= 0:
            raise DomainError(
                "carrier_cycles_per_symbol must be positive, got "
                f"{self.carrier_cycles_per_symbol}"
            )

    @property
    def carrier_freq(self) -> float:
        """Carrier frequency in cycles per sample, before any offset."""
        return self.carrier_cycles_per_symbol / self.samples_per_symbol


@dataclass(frozen=True)
class LabeledSignal:
    """One dataset item: samples, scheme label, channel SNR, and seed."""

    samples: np.ndarray
    label: str
    snr_db: float | None
    seed: int


def _validate_bits(bits: Sequence[int] | np.ndarray) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("bit sequence must be a non-empty 1-d sequence")
    if not np.all((arr == 0) | (arr == 1)):
        raise DomainError("bit sequence entries must be 0 or 1")
    return arr


def modulate(bits: Sequence[int] | np.ndarray, cfg: ModemConfig) -> np.ndarray:
    """Encode a bit sequence as a real-valued waveform.

    The output holds one symbol period (``samples_per_symbol`` samples) per
    bit, except QPSK which consumes two bits per symbol and requires an even
    bit count.
    """
    arr = _validate_bits(bits)
    sps = cfg.samples_per_symbol
    freq = cfg.carrier_freq + cfg.freq_offset

    if cfg.scheme == "qpsk":
        if arr.size % 2:
            raise DomainError(f"qpsk needs an even number of bits, got {arr.size}")
        pairs = arr.reshape(-1, 2)
        gray = {(0, 0): 0, (0, 1): 1, (1, 1): 2, (1, 0): 3}
        quadrant = np.array([gray[(int(a), int(b))] for a, b in pairs])
        theta = np.pi / 4 + quadrant * np.pi / 2
        n = theta.size * sps
        i = np.arange(n)
        return np.cos(2 * np.pi * freq * i + cfg.phase_offset + np.repeat(theta, sps))

    n = arr.size * sps
    i = np.arange(n)

    if cfg.scheme == "fsk2":
        # Continuous phase: integrate the per-sample frequency so symbol
        # transitions carry no discontinuity.
        extra = arr.astype(float) / sps  # one extra cycle per symbol for bit 1
        per_sample_freq = freq + np.repeat(extra, sps)
        phase = cfg.phase_offset + 2 * np.pi * np.concatenate(
            ([0.0], np.cumsum(per_sample_freq[:-1]))
        )
        return np.cos(phase)

    carrier = np.cos(2 * np.pi * freq * i + cfg.phase_offset)
    if cfg.scheme == "ook":
        return np.repeat(arr.astype(float), sps) * carrier
    if cfg.scheme == "bpsk":
        return np.repeat(np.where(arr == 1, 1.0, -1.0), sps) * carrier
    if cfg.scheme == "am":
        message = np.zeros(n)
        for tone_freq, tone_phase in _AM_TONES:
            message += np.sin(2 * np.pi * tone_freq * i + tone_phase)
        message /= len(_AM_TONES)
        return (1.0 + _AM_DEPTH * message) * carrier
    raise ConfigurationError(f"unknown scheme {cfg.scheme!r}")


def bpsk_demodulate(y: Sequence[float] | np.ndarray, cfg: ModemConfig) -> np.ndarray:
    """Recover bits from a BPSK waveform by coherent correlation.

    Each symbol period is correlated against the reference carrier;
    non-negative correlation decodes as 1 (an exactly-zero correlation,
    e.g. an all-zero input, therefore yields all ones).
    """
    if cfg.scheme != "bpsk":
        raise ConfigurationError(
            f"bpsk_demodulate requires a bpsk config, got {cfg.scheme!r}"
        )
    arr = np.asarray(y, dtype=float)
    sps = cfg.samples_per_symbol
    if arr.ndim != 1 or arr.size == 0 or arr.size % sps:
        raise FramingError(
            f"waveform length {arr.size} is not a positive multiple of "
            f"samples_per_symbol={sps}"
        )
    freq = cfg.carrier_freq + cfg.freq_offset
    reference = np.cos(2 * np.pi * freq * np.arange(arr.size) + cfg.phase_offset)
    correlations = (arr * reference).reshape(-1, sps).sum(axis=1)
    return (correlations >= 0).astype(np.int64)


def awgn(x: Sequence[float] | np.ndarray, snr_db: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise at a calibrated RMS signal-to-noise ratio.

    The noise draw is scaled to rms(noise) = rms(x) * 10**(-snr_db / 20)
    exactly, so recomputing 20 log10(rms(x)/rms(noise)) recovers ``snr_db``
    up to floating-point rounding.  Deterministic for a fixed seed.
    """
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        raise DomainError("cannot add noise to an empty signal")
    if not np.isfinite(snr_db):
        raise DomainError(f"snr_db must be finite, got {snr_db}")
    signal_rms = float(np.sqrt(np.mean(arr**2)))
    if signal_rms == 0.0:
        raise DomainError("signal has zero RMS; SNR is undefined")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(arr.size)
    noise *= signal_rms * 10.0 ** (-snr_db / 20.0) / np.sqrt(np.mean(noise**2))
    return arr + noise


def make_dataset(
    schemes: Sequence[str],
    per_class: int,
    t: int = 2048,
    snr_db: float | None = None,
    seed: int = 0,
    samples_per_symbol: int = 16,
    carrier_cycles_per_symbol: float = 2.0,
) -> list[LabeledSignal]:
    """Generate ``per_class`` signals per scheme with randomized channel state.

    Each signal draws its own payload bits, a phase offset uniform in
    [0, 2pi), and a fractional frequency offset uniform in
    [-FREQ_OFFSET_MAX, FREQ_OFFSET_MAX], then passes through AWGN at
    ``snr_db`` (``None`` = clean channel).  Signal i uses generator seed
    ``seed ^ i``, so the dataset is reproducible item by item regardless of
    evaluation order.  Waveforms are truncated to exactly ``t`` samples.
    """
    schemes = [str(s).lower() for s in schemes]
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigurationError(
                f"unknown scheme {s!r}; expected one of {SCHEMES}"
            )
    if per_class < 1:
        raise DomainError(f"per_class must be >= 1, got {per_class}")
    if t < 256:
        raise DomainError(f"signal length must be >= 256, got {t}")
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")

    signals: list[LabeledSignal] = []
    for class_idx, scheme in enumerate(schemes):
        for j in range(per_class):
            item_seed = seed ^ (class_idx * per_class + j)
            rng = np.random.default_rng(item_seed)
            n_symbols = -(-t // samples_per_symbol)  # whole symbols covering t
            n_bits = 2 * n_symbols if scheme == "qpsk" else n_symbols
            bits = rng.integers(0, 2, size=n_bits)
            cfg = ModemConfig(
                scheme=scheme,
                samples_per_symbol=samples_per_symbol,
                carrier_cycles_per_symbol=carrier_cycles_per_symbol,
                phase_offset=float(rng.uniform(0.0, 2 * np.pi)),
                freq_offset=float(rng.uniform(-FREQ_OFFSET_MAX, FREQ_OFFSET_MAX)),
            )
            clean = modulate(bits, cfg)[:t]
            noise_seed = int(rng.integers(2**63))
            samples = clean if snr_db is None else awgn(clean, snr_db, noise_seed)
            signals.append(
                LabeledSignal(
                    samples=samples, label=scheme, snr_db=snr_db, seed=item_seed
                )
            )
    return signals


def save_dataset(path: str, signals: Sequence[LabeledSignal], seed: int) -> None:
    """Write a dataset file: magic, JSON header, then per-signal records.

    Each record is a little-endian uint32 label id (index into the header's
    scheme list) followed by the samples as little-endian float64.  The
    header stores the dataset-level generator seed; per-signal seeds are
    re-derived as ``seed ^ index`` on load.
    """
    if not signals:
        raise DomainError("cannot save an empty dataset")
    t = signals[0].samples.size
    snr = signals[0].snr_db
    labels: list[str] = []
    for sig in signals:
        if sig.samples.size != t:
            raise DomainError("all signals in a dataset must share one length")
        if sig.snr_db != snr and not (sig.snr_db is None and snr is None):
            raise DomainError("all signals in a dataset must share one SNR")
        if sig.label not in labels:
            labels.append(sig.label)
    header = {
        "format_version": 1,
        "t": t,
        "schemes": labels,
        "snr_db": snr,
        "seed": seed,
        "count": len(signals),
    }
    header_bytes = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_DATASET_MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        for sig in signals:
            fh.write(struct.pack("<I", labels.index(sig.label)))
            fh.write(np.asarray(sig.samples, dtype="<f8").tobytes())


def load_dataset(path: str) -> list[LabeledSignal]:
    """Read a dataset file written by :func:`save_dataset`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_DATASET_MAGIC))
        if magic != _DATASET_MAGIC:
            raise ConfigurationError(f"{path} is not a dataset file")
        (header_len,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(header_len).decode("utf-8"))
        t = int(header["t"])
        labels = list(header["schemes"])
        snr = header["snr_db"]
        seed = int(header["seed"])
        signals = []
        for i in range(int(header["count"])):
            (label_id,) = struct.unpack("<I", fh.read(4))
            samples = np.frombuffer(fh.read(8 * t), dtype="<f8").astype(float)
            signals.append(
                LabeledSignal(
                    samples=samples,
                    label=labels[label_id],
                    snr_db=snr,
                    seed=seed ^ i,
                )
            )
    return signals


def dataset_to_csv(path: str, signals: Iterable[LabeledSignal]) -> None:
    """Export a dataset as CSV rows: label, then the samples."""
    with open(path, "w", encoding="utf-8") as fh:
        for sig in signals:
            values = ",".join(repr(float(v)) for v in sig.samples)
            fh.write(f"{sig.label},{values}\n")
