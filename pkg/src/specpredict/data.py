"""Occupancy data handling: sweep files, thresholding, windowing, and the
synthetic two-state channel generator.

A sweep file holds one power reading per channel per analyzer pass.
Thresholding turns a channel's power column into a binary busy/idle
series, which is then sliced into (past window, next slot) training
patterns.  When no measured data is available, ``synth_generate``
simulates channels as two-state Markov chains with Gaussian power levels.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from math import floor

import numpy as np

from ._validation import as_rng, bits_to_bipolar, check_bits, check_probability
from .errors import DataFormatError, StructuralError
from .training import TrainingPattern

DEFAULT_CHANNEL_WIDTH_KHZ = 200.0
DEFAULT_SLOT_DURATION_S = 16.0


@dataclass(frozen=True)
class BandDefinition:
    """A named frequency range divided into equal-width channels."""

    service: str
    freq_lo_mhz: float
    freq_hi_mhz: float
    channel_width_khz: float = DEFAULT_CHANNEL_WIDTH_KHZ

    def __post_init__(self):
        if not self.freq_lo_mhz < self.freq_hi_mhz:
            raise StructuralError(
                f"band {self.service!r}: freq_lo must be below freq_hi, "
                f"got {self.freq_lo_mhz}..{self.freq_hi_mhz}"
            )
        if not self.channel_width_khz > 0:
            raise StructuralError(f"band {self.service!r}: channel width must be positive")
        if self.channel_count < 1:
            raise StructuralError(f"band {self.service!r}: narrower than one channel")

    @property
    def channel_count(self) -> int:
        span_khz = (self.freq_hi_mhz - self.freq_lo_mhz) * 1000.0
        return int(floor(span_khz / self.channel_width_khz))


def _band_from_record(record, source="preset") -> BandDefinition:
    try:
        return BandDefinition(
            service=str(record["service"]),
            freq_lo_mhz=float(record["freq_lo_mhz"]),
            freq_hi_mhz=float(record["freq_hi_mhz"]),
            channel_width_khz=float(record.get("channel_width_khz", DEFAULT_CHANNEL_WIDTH_KHZ)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"bad band record in {source}: {exc}") from exc


def load_band_presets(path) -> list[BandDefinition]:
    """Read a band preset file: a JSON array of band records."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            records = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"band preset file is not valid JSON: {exc}") from exc
    if not isinstance(records, list):
        raise DataFormatError("band preset file must be a JSON array")
    return [_band_from_record(r, source=str(path)) for r in records]


def default_band_presets() -> list[BandDefinition]:
    """The five built-in service presets shipped with the package."""
    text = resources.files(__package__).joinpath("bands.json").read_text(encoding="utf-8")
    return [_band_from_record(r) for r in json.loads(text)]


def band_by_name(name: str, presets=None) -> BandDefinition:
    presets = default_band_presets() if presets is None else presets
    wanted = name.strip().lower()
    for band in presets:
        if band.service.lower() == wanted:
            return band
    known = ", ".join(b.service for b in presets)
    raise StructuralError(f"unknown band {name!r}; known bands: {known}")


@dataclass
class PowerSweep:
    """One analyzer pass: a power reading (dBm) per channel."""

    sweep_index: int
    slot_duration_s: float
    powers: np.ndarray

    def __post_init__(self):
        self.powers = np.asarray(self.powers, dtype=np.float64)
        if self.powers.ndim != 1:
            raise StructuralError("sweep powers must be a 1-D vector")
        if not np.all(np.isfinite(self.powers)):
            raise StructuralError(f"sweep {self.sweep_index}: non-finite power values")


@dataclass
class OccupancySeries:
    """Binary busy/idle series for one channel, one bit per time slot."""

    channel_id: int
    bits: np.ndarray

    def __post_init__(self):
        self.bits = check_bits(self.bits, name="occupancy bits")

    def __len__(self):
        return self.bits.shape[0]


@dataclass
class WindowedDataset:
    """Supervised patterns: each input is the ``order`` slots before its target.

    ``target_slots[i]`` is the absolute slot index predicted by pattern i,
    preserved through splits so per-slot traces stay aligned with the
    source series.
    """

    order: int
    inputs: np.ndarray
    targets: np.ndarray
    target_slots: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def pattern_count(self) -> int:
        return self.inputs.shape[0]

    @property
    def patterns(self) -> list[TrainingPattern]:
        return [TrainingPattern(x, t) for x, t in zip(self.inputs, self.targets)]

    def __len__(self):
        return self.pattern_count


@dataclass(frozen=True)
class ChannelModel:
    """Two-state Markov channel with Gaussian power in each state."""

    p_idle_to_busy: float
    p_busy_to_idle: float
    busy_power_mean: float = -60.0
    busy_power_sigma: float = 5.0
    noise_floor_mean: float = -90.0
    noise_floor_sigma: float = 5.0

    def __post_init__(self):
        check_probability(self.p_idle_to_busy, "p_idle_to_busy", open_interval=True)
        check_probability(self.p_busy_to_idle, "p_busy_to_idle", open_interval=True)
        if not self.busy_power_mean > self.noise_floor_mean:
            raise StructuralError("busy power mean must exceed the noise floor mean")
        if not (self.busy_power_sigma > 0 and self.noise_floor_sigma > 0):
            raise StructuralError("power sigmas must be positive")

    @property
    def stationary_busy(self) -> float:
        """Long-run busy probability p / (p + q)."""
        return self.p_idle_to_busy / (self.p_idle_to_busy + self.p_busy_to_idle)

    @property
    def midpoint_threshold(self) -> float:
        """Default decision threshold: midway between the two power means."""
        return 0.5 * (self.busy_power_mean + self.noise_floor_mean)


def bayes_floor(model: ChannelModel) -> float:
    """Minimum achievable one-step prediction error for a known channel.

    With the true state known, the best predictor picks the likelier next
    state, erring with the smaller transition probability; the floor
    averages that over the stationary distribution.
    """
    p, q = model.p_idle_to_busy, model.p_busy_to_idle
    pi_busy = model.stationary_busy
    return (1.0 - pi_busy) * min(p, 1.0 - p) + pi_busy * min(q, 1.0 - q)


def _sweep_header(n_channels: int) -> list[str]:
    return ["sweep_index", "slot_duration_s"] + [f"ch_{i}" for i in range(n_channels)]


def save_sweeps(path, sweeps: list[PowerSweep]):
    """Write sweeps as CSV; power values keep full double precision."""
    if not sweeps:
        raise StructuralError("cannot save an empty sweep list")
    n_channels = sweeps[0].powers.shape[0]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_sweep_header(n_channels))
        for sweep in sweeps:
            writer.writerow(
                [sweep.sweep_index, repr(float(sweep.slot_duration_s))]
                + [repr(float(p)) for p in sweep.powers]
            )


def load_sweeps(path, band: BandDefinition | None = None) -> list[PowerSweep]:
    """Parse a sweep CSV; errors name the offending line.

    Sweeps must be indexed contiguously from 0, every row must carry one
    power per channel, and the channel count must match ``band`` when one
    is given.
    """
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty file, expected a sweep header", line=1) from None
        header = [h.strip() for h in header]
        if header[:2] != ["sweep_index", "slot_duration_s"]:
            raise DataFormatError(
                "header must start with 'sweep_index,slot_duration_s'", line=1
            )
        n_channels = len(header) - 2
        if header[2:] != [f"ch_{i}" for i in range(n_channels)]:
            raise DataFormatError("channel columns must be named ch_0..ch_N in order", line=1)
        if band is not None and n_channels != band.channel_count:
            raise DataFormatError(
                f"file has {n_channels} channels but band {band.service!r} "
                f"defines {band.channel_count}",
                line=1,
            )
        sweeps = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n_channels + 2:
                raise DataFormatError(
                    f"expected {n_channels + 2} columns, got {len(row)}", line=lineno
                )
            try:
                index = int(row[0])
                duration = float(row[1])
                powers = np.asarray([float(v) for v in row[2:]], dtype=np.float64)
            except ValueError as exc:
                raise DataFormatError(f"non-numeric value: {exc}", line=lineno) from None
            if index != len(sweeps):
                raise DataFormatError(
                    f"sweep_index must be contiguous from 0, expected {len(sweeps)} got {index}",
                    line=lineno,
                )
            if not np.all(np.isfinite(powers)):
                raise DataFormatError("non-finite power value", line=lineno)
            sweeps.append(PowerSweep(index, duration, powers))
    return sweeps


def sweeps_to_matrix(sweeps: list[PowerSweep]) -> np.ndarray:
    """Stack sweeps into a (n_sweeps, n_channels) power matrix."""
    if not sweeps:
        return np.empty((0, 0))
    return np.stack([s.powers for s in sweeps])


def binarize(sweeps: list[PowerSweep], channel: int, threshold_dbm: float) -> OccupancySeries:
    """Threshold one channel's powers into a busy/idle series.

    A power exactly equal to the threshold counts as busy.
    """
    powers = sweeps_to_matrix(sweeps)
    if powers.size == 0:
        return OccupancySeries(channel_id=channel, bits=np.empty(0, dtype=np.uint8))
    if not 0 <= channel < powers.shape[1]:
        raise StructuralError(
            f"channel {channel} out of range for {powers.shape[1]}-channel sweeps"
        )
    bits = (powers[:, channel] >= float(threshold_dbm)).astype(np.uint8)
    return OccupancySeries(channel_id=channel, bits=bits)


def window(series, order: int, provenance: dict | None = None) -> WindowedDataset:
    """Slice a binary series into (window of ``order`` slots, next slot) patterns.

    Bits are mapped 0 -> -1 and 1 -> +1 so targets sit inside the
    activation's range.  Pattern i covers slots [i, i + order) and
    predicts slot i + order; there are len(series) - order patterns.
    """
    if order < 1:
        raise StructuralError(f"order must be >= 1, got {order}")
    if isinstance(series, OccupancySeries):
        bits = series.bits
        provenance = dict(provenance or {})
        provenance.setdefault("channel", series.channel_id)
    else:
        bits = check_bits(series, name="series")
        provenance = dict(provenance or {})
    n = bits.shape[0]
    if n <= order:
        raise StructuralError(f"series of length {n} is too short for order {order}")
    bipolar = bits_to_bipolar(bits)
    windows = np.lib.stride_tricks.sliding_window_view(bipolar, order)
    inputs = windows[:-1].copy()
    targets = bipolar[order:].copy().reshape(-1, 1)
    target_slots = np.arange(order, n, dtype=np.int64)
    return WindowedDataset(order, inputs, targets, target_slots, provenance)


def split(dataset: WindowedDataset, train_fraction: float, rng=None, mode: str = "chrono"):
    """Partition patterns into (train, test).

    Chronological mode keeps the first fraction for training so no future
    slot leaks backwards; shuffle mode samples membership with the given
    generator but keeps each side slot-ordered.
    """
    if not 0.0 < train_fraction < 1.0:
        raise StructuralError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if mode not in ("chrono", "shuffle"):
        raise StructuralError(f"split mode must be 'chrono' or 'shuffle', got {mode!r}")
    n = dataset.pattern_count
    n_train = int(n * train_fraction)
    if n_train == 0 or n_train == n:
        raise StructuralError(
            f"fraction {train_fraction} leaves an empty side for {n} patterns"
        )
    if mode == "chrono":
        train_idx = np.arange(n_train)
        test_idx = np.arange(n_train, n)
    else:
        perm = as_rng(rng).permutation(n)
        train_idx = np.sort(perm[:n_train])
        test_idx = np.sort(perm[n_train:])

    def take(idx):
        return WindowedDataset(
            dataset.order,
            dataset.inputs[idx].copy(),
            dataset.targets[idx].copy(),
            dataset.target_slots[idx].copy(),
            dict(dataset.provenance),
        )

    return take(train_idx), take(test_idx)


def synth_generate(
    model: ChannelModel,
    channels: int,
    sweeps: int,
    rng=None,
    slot_duration_s: float = DEFAULT_SLOT_DURATION_S,
    return_states: bool = False,
):
    """Simulate power sweeps for independent two-state Markov channels.

    Each channel gets its own child stream of the given generator (spawned
    by channel index), starts from the stationary distribution, and draws
    slot powers from the Gaussian matching its state.  With
    ``return_states`` the true busy/idle matrix is returned as well.
    """
    if sweeps < 1:
        raise StructuralError(f"sweeps must be >= 1, got {sweeps}")
    if channels < 1:
        raise StructuralError(f"channels must be >= 1, got {channels}")
    rng = as_rng(rng)
    powers = np.empty((sweeps, channels))
    states = np.empty((sweeps, channels), dtype=np.uint8)
    for ch, stream in enumerate(rng.spawn(channels)):
        draws = stream.random(sweeps)
        busy = np.empty(sweeps, dtype=np.uint8)
        busy[0] = draws[0] < model.stationary_busy
        for t in range(1, sweeps):
            if busy[t - 1]:
                busy[t] = draws[t] >= model.p_busy_to_idle
            else:
                busy[t] = draws[t] < model.p_idle_to_busy
        noise = stream.standard_normal(sweeps)
        mean = np.where(busy, model.busy_power_mean, model.noise_floor_mean)
        sigma = np.where(busy, model.busy_power_sigma, model.noise_floor_sigma)
        powers[:, ch] = mean + sigma * noise
        states[:, ch] = busy
    result = [
        PowerSweep(i, slot_duration_s, powers[i]) for i in range(sweeps)
    ]
    return (result, states) if return_states else result


def save_occupancy(path, series_list):
    """Write occupancy series as CSV: narrow `slot,bit` for one channel,
    wide `slot,ch_...` for several."""
    if isinstance(series_list, OccupancySeries):
        series_list = [series_list]
    if not series_list:
        raise StructuralError("cannot save an empty series list")
    lengths = {len(s) for s in series_list}
    if len(lengths) != 1:
        raise StructuralError("all series must have equal length")
    n = lengths.pop()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if len(series_list) == 1:
            writer.writerow(["slot", "bit"])
            for slot in range(n):
                writer.writerow([slot, int(series_list[0].bits[slot])])
        else:
            writer.writerow(["slot"] + [f"ch_{s.channel_id}" for s in series_list])
            for slot in range(n):
                writer.writerow([slot] + [int(s.bits[slot]) for s in series_list])


def load_occupancy(path) -> list[OccupancySeries]:
    """Read an occupancy CSV in either the narrow or the wide form."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataFormatError("empty file, expected an occupancy header", line=1) from None
        if header == ["slot", "bit"]:
            channel_ids = [0]
        elif header[0] == "slot" and all(h.startswith("ch_") for h in header[1:]) and len(header) > 1:
            try:
                channel_ids = [int(h[3:]) for h in header[1:]]
            except ValueError:
                raise DataFormatError("bad channel column name", line=1) from None
        else:
            raise DataFormatError("header must be 'slot,bit' or 'slot,ch_...'", line=1)
        columns = [[] for _ in channel_ids]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(channel_ids) + 1:
                raise DataFormatError(
                    f"expected {len(channel_ids) + 1} columns, got {len(row)}", line=lineno
                )
            try:
                slot = int(row[0])
                values = [int(v) for v in row[1:]]
            except ValueError as exc:
                raise DataFormatError(f"non-integer value: {exc}", line=lineno) from None
            if slot != len(columns[0]):
                raise DataFormatError(
                    f"slots must be contiguous from 0, expected {len(columns[0])} got {slot}",
                    line=lineno,
                )
            if any(v not in (0, 1) for v in values):
                raise DataFormatError("occupancy bits must be 0 or 1", line=lineno)
            for col, v in zip(columns, values):
                col.append(v)
    return [
        OccupancySeries(channel_id=ch, bits=np.asarray(col, dtype=np.uint8))
        for ch, col in zip(channel_ids, columns)
    ]
