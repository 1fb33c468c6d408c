"""Command-line pipeline: generate sweeps, inspect bands, train, evaluate.

All randomness flows from one master ``--seed``: each stage derives its
own stream from a fixed label (generate, split, ga, init, gd), so one
seed reproduces a whole run bit for bit.  Settings come from flags or a
plain ``key = value`` config file with flags winning, and every command
echoes its effective settings into the output directory as ``run_config``.
That file is itself a valid ``--config`` for later commands, which is how
``evaluate`` recomputes the exact split a training run used.

Exit codes: 0 success, 2 usage, 3 numerical failure, 4 data/format error.
"""

from __future__ import annotations

import functools
from pathlib import Path

import click

from ._validation import derive_rng
from .data import (
    DEFAULT_SLOT_DURATION_S,
    ChannelModel,
    band_by_name,
    bayes_floor,
    binarize,
    default_band_presets,
    load_band_presets,
    load_occupancy,
    load_sweeps,
    save_sweeps,
    synth_generate,
    window,
)
from .data import split as split_dataset
from .errors import DataFormatError, NumericalError, StructuralError
from .evaluation import emit_report
from .evaluation import evaluate as evaluate_dataset
from .genetic import GaConfig, ga_lm_train
from .network import NetworkTopology, init_random, load_model, save_model
from .training import REASON_DIVERGED, GdConfig, LmConfig, train_gd, train_lm

MAX_SEED = 2**64 - 1


class NumericalCliError(click.ClickException):
    """Training or linear algebra failed; exits with code 3."""

    exit_code = 3


class DataCliError(click.ClickException):
    """Malformed or mismatched input data; exits with code 4."""

    exit_code = 4


def _pipeline_errors(func):
    """Map package exceptions onto the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except NumericalError as exc:
            raise NumericalCliError(str(exc)) from exc
        except (DataFormatError, StructuralError) as exc:
            raise DataCliError(str(exc)) from exc
        except OSError as exc:
            raise DataCliError(str(exc)) from exc

    return wrapper


def _parse_uint(text):
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise ValueError(f"must fit in 64 unsigned bits: {value}")
    return value


def _parse_positive_int(text):
    value = int(text)
    if value < 1:
        raise ValueError(f"must be >= 1: {value}")
    return value


def _parse_nonneg_int(text):
    value = int(text)
    if value < 0:
        raise ValueError(f"must be >= 0: {value}")
    return value


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int_list(text):
    try:
        values = tuple(int(part) for part in str(text).split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated integers: {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise ValueError(f"layer sizes must be positive: {text!r}")
    return values


def _parse_float_pair(text):
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'lo,hi': {text!r}")
    return (float(parts[0]), float(parts[1]))


def _parse_choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"must be one of {'|'.join(options)}: {text!r}")
        return text

    return parse


# Every key a config file may define, with its value parser.  The order
# here is also the order keys appear in an echoed run_config.
KNOWN_KEYS = {
    "seed": _parse_uint,
    "order": _parse_positive_int,
    "hidden": _parse_int_list,
    "trainer": _parse_choice("gd", "lm", "ga+lm"),
    "eta": float,
    "theta": float,
    "max_epochs": _parse_nonneg_int,
    "mu0": float,
    "beta": float,
    "mu_max": float,
    "max_iter": _parse_nonneg_int,
    "pop_size": _parse_positive_int,
    "generations": _parse_nonneg_int,
    "crossover_prob": float,
    "mutation_prob": float,
    "crossover_kind": _parse_choice("one-point", "arithmetic"),
    "mutation_kind": _parse_choice("gaussian", "uniform"),
    "gaussian_sigma": float,
    "elitism": _parse_nonneg_int,
    "gene_range": _parse_float_pair,
    "weight_range": _parse_float_pair,
    "fitness_patterns": _parse_positive_int,
    "threshold_dbm": float,
    "split": float,
    "split_mode": _parse_choice("chrono", "shuffle"),
    "band": str,
    "channel": _parse_nonneg_int,
    "channels": _parse_positive_int,
    "sweeps": _parse_positive_int,
    "slot_duration": float,
    "p_idle_to_busy": float,
    "p_busy_to_idle": float,
    "busy_power_dbm": float,
    "busy_sigma_dbm": float,
    "noise_floor_dbm": float,
    "noise_sigma_dbm": float,
    "format": _parse_choice("csv", "json"),
    "side": _parse_choice("train", "test"),
    "trace": _parse_bool,
    "in": str,
    "model": str,
    "bands_file": str,
}


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def read_config(path) -> dict:
    """Parse a ``key = value`` settings file; unknown keys are rejected."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataFormatError(f"expected 'key = value', got {line!r}", line=lineno)
            key, _, text = line.partition("=")
            key, text = key.strip(), text.strip()
            if key not in KNOWN_KEYS:
                raise DataFormatError(f"unknown config key {key!r}", line=lineno)
            try:
                values[key] = KNOWN_KEYS[key](text)
            except ValueError as exc:
                raise DataFormatError(f"bad value for {key}: {exc}", line=lineno) from None
    return values


class Settings:
    """Flag > config file > built-in default, recording what was used."""

    def __init__(self, config_path=None):
        self.file_values = read_config(config_path) if config_path else {}
        self.effective = {}

    def get(self, key, flag_value, default=None):
        if flag_value is not None:
            value = flag_value
        elif key in self.file_values:
            value = self.file_values[key]
        else:
            value = default
        if value is not None:
            self.effective[key] = value
        return value

    def write(self, directory):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        lines = [
            f"{key} = {_format_value(self.effective[key])}"
            for key in KNOWN_KEYS
            if key in self.effective
        ]
        (directory / "run_config").write_text("\n".join(lines) + "\n", encoding="utf-8")


class _IntListType(click.ParamType):
    name = "sizes"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return _parse_int_list(value)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


class _FloatPairType(click.ParamType):
    name = "lo,hi"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return _parse_float_pair(value)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


INT_LIST = _IntListType()
FLOAT_PAIR = _FloatPairType()

_seed_option = click.option(
    "--seed",
    type=click.IntRange(0, MAX_SEED),
    default=None,
    help="Master random seed; every stage derives its own stream from it. [default: 0]",
)
_config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="'key = value' settings file; explicit flags win over it.",
)
_bands_file_option = click.option(
    "--bands-file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Band preset JSON to use instead of the built-in five services.",
)


@click.group()
def main():
    """Spectrum occupancy prediction: binarize power sweeps into busy/idle
    series, train a per-channel neural predictor, and score next-slot
    predictions.

    Typical flow: `generate` (or bring your own sweep CSV), `train`,
    then `evaluate` with the run_config the training run wrote.
    """


def _resolve_band(settings, band_flag, bands_file_flag):
    bands_file = settings.get("bands_file", str(bands_file_flag) if bands_file_flag else None)
    name = settings.get("band", band_flag)
    presets = load_band_presets(bands_file) if bands_file else default_band_presets()
    if name is None:
        return None
    return band_by_name(name, presets)


def _load_series(in_path, channel, threshold_dbm, band):
    """Read a sweep or occupancy CSV (sniffed by header) as one channel's bits."""
    with open(in_path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("sweep_index"):
        if threshold_dbm is None:
            raise click.UsageError(
                "--threshold-dbm is required for power-sweep input "
                "(or supply threshold_dbm via --config)"
            )
        return binarize(load_sweeps(in_path, band=band), channel, threshold_dbm)
    for series in load_occupancy(in_path):
        if series.channel_id == channel:
            return series
    raise StructuralError(f"channel {channel} not present in {in_path}")


def _resolve_in_path(settings, in_path) -> Path:
    value = settings.get("in", str(in_path) if in_path else None)
    if value is None:
        raise click.UsageError("missing input file: pass --in or set 'in' in the config")
    return Path(value)


@main.command("generate")
@_seed_option
@click.option("--channels", type=click.IntRange(min=1), default=None,
              help="Number of simulated channels. [default: 1]")
@click.option("--sweeps", type=click.IntRange(min=1), default=None,
              help="Number of sweeps, one power sample per channel each. [default: 2700]")
@click.option("--slot-duration", type=float, default=None,
              help="Seconds of spectrum time per sweep. [default: 16.0]")
@click.option("--p-idle-to-busy", type=click.FloatRange(0, 1), default=None,
              help="Per-slot idle to busy transition probability. [default: 0.1]")
@click.option("--p-busy-to-idle", type=click.FloatRange(0, 1), default=None,
              help="Per-slot busy to idle transition probability. [default: 0.2]")
@click.option("--busy-power-dbm", type=float, default=None,
              help="Mean received power when busy. [default: -60.0]")
@click.option("--busy-sigma-dbm", type=float, default=None,
              help="Power standard deviation when busy. [default: 5.0]")
@click.option("--noise-floor-dbm", type=float, default=None,
              help="Mean received power when idle. [default: -90.0]")
@click.option("--noise-sigma-dbm", type=float, default=None,
              help="Power standard deviation when idle. [default: 5.0]")
@click.option("--out", "out_path", required=True,
              type=click.Path(dir_okay=False, path_type=Path),
              help="Output sweep CSV path.")
@_config_option
@_pipeline_errors
def cmd_generate(seed, channels, sweeps, slot_duration, p_idle_to_busy, p_busy_to_idle,
                 busy_power_dbm, busy_sigma_dbm, noise_floor_dbm, noise_sigma_dbm,
                 out_path, config_path):
    """Simulate two-state Markov channels and write a power sweep CSV.

    Prints the model's bayes_floor, the best possible next-slot error
    rate, for judging trained predictors.  The echoed run_config includes
    the midpoint power threshold so later commands binarize consistently.
    """
    settings = Settings(config_path)
    seed = settings.get("seed", seed, 0)
    channels = settings.get("channels", channels, 1)
    n_sweeps = settings.get("sweeps", sweeps, 2700)
    slot_duration = settings.get("slot_duration", slot_duration, DEFAULT_SLOT_DURATION_S)
    model = ChannelModel(
        p_idle_to_busy=settings.get("p_idle_to_busy", p_idle_to_busy, 0.1),
        p_busy_to_idle=settings.get("p_busy_to_idle", p_busy_to_idle, 0.2),
        busy_power_mean=settings.get("busy_power_dbm", busy_power_dbm, -60.0),
        busy_power_sigma=settings.get("busy_sigma_dbm", busy_sigma_dbm, 5.0),
        noise_floor_mean=settings.get("noise_floor_dbm", noise_floor_dbm, -90.0),
        noise_floor_sigma=settings.get("noise_sigma_dbm", noise_sigma_dbm, 5.0),
    )
    settings.get("threshold_dbm", None, model.midpoint_threshold)
    sweep_list = synth_generate(
        model, channels, n_sweeps, derive_rng(seed, "generate"), slot_duration
    )
    save_sweeps(out_path, sweep_list)
    settings.write(out_path.parent)
    click.echo(f"bayes_floor = {bayes_floor(model)!r}")
    click.echo(f"wrote {len(sweep_list)} sweeps x {channels} channels -> {out_path}")


@main.command("bands")
@_bands_file_option
@_pipeline_errors
def cmd_bands(bands_file):
    """List the service band presets and their 200 kHz channel counts."""
    presets = load_band_presets(bands_file) if bands_file else default_band_presets()
    for band in presets:
        click.echo(
            f"{band.service}: {band.freq_lo_mhz:g}-{band.freq_hi_mhz:g} MHz, "
            f"{band.channel_count} channels of {band.channel_width_khz:g} kHz"
        )


@main.command("train")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Input sweep CSV or occupancy CSV.")
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False, path_type=Path),
              help="Output directory for model.json, logs, and run_config.")
@_seed_option
@click.option("--order", type=click.IntRange(min=1), default=None,
              help="History window length: past slots fed to the network. [default: 10]")
@click.option("--hidden", type=INT_LIST, default=None,
              help="Hidden layer sizes, comma separated. [default: 10]")
@click.option("--trainer", type=click.Choice(["gd", "lm", "ga+lm"]), default=None,
              help="Training algorithm. [default: ga+lm]")
@click.option("--eta", type=float, default=None,
              help="Gradient-descent learning rate. [default: 0.1]")
@click.option("--theta", type=float, default=None,
              help="Error goal per pattern and output. [default: 0.01]")
@click.option("--max-epochs", type=click.IntRange(min=0), default=None,
              help="Gradient-descent epoch limit. [default: 1000]")
@click.option("--mu0", type=float, default=None,
              help="Initial damping factor. [default: 0.001]")
@click.option("--beta", type=float, default=None,
              help="Damping multiplier/divisor per rejected/accepted step. [default: 10.0]")
@click.option("--mu-max", type=float, default=None,
              help="Damping ceiling; beyond it training stalls. [default: 1e10]")
@click.option("--max-iter", type=click.IntRange(min=0), default=None,
              help="Damped-solver iteration limit. [default: 1000]")
@click.option("--pop-size", type=click.IntRange(min=2), default=None,
              help="Genetic population size (even). [default: 50]")
@click.option("--generations", type=click.IntRange(min=0), default=None,
              help="Genetic generations; 0 keeps the best random draw. [default: 100]")
@click.option("--crossover-prob", type=click.FloatRange(0, 1), default=None,
              help="Per-pair crossover probability. [default: 0.8]")
@click.option("--mutation-prob", type=click.FloatRange(0, 1), default=None,
              help="Per-gene mutation probability. [default: 0.05]")
@click.option("--crossover-kind", type=click.Choice(["one-point", "arithmetic"]), default=None,
              help="Crossover operator. [default: one-point]")
@click.option("--mutation-kind", type=click.Choice(["gaussian", "uniform"]), default=None,
              help="Mutation operator. [default: gaussian]")
@click.option("--gaussian-sigma", type=float, default=None,
              help="Gaussian mutation step size. [default: 0.1]")
@click.option("--elitism", type=click.IntRange(min=0), default=None,
              help="Best members copied unchanged each generation. [default: 1]")
@click.option("--gene-range", type=FLOAT_PAIR, default=None,
              help="Chromosome gene range 'lo,hi'. [default: -1,1]")
@click.option("--weight-range", type=FLOAT_PAIR, default=None,
              help="Random init range 'lo,hi' for gd/lm trainers. [default: -1,1]")
@click.option("--fitness-patterns", type=click.IntRange(min=1), default=None,
              help="Fitness-evaluation subsample size. [default: all patterns]")
@click.option("--threshold-dbm", type=float, default=None,
              help="Busy threshold: power >= threshold is busy. Required for sweep input.")
@click.option("--split", "split_fraction", type=float, default=None,
              help="Fraction of patterns used for training. [default: 0.5]")
@click.option("--split-mode", type=click.Choice(["chrono", "shuffle"]), default=None,
              help="chrono: first fraction trains; shuffle: seeded random split. [default: chrono]")
@click.option("--band", type=str, default=None,
              help="Band preset name; checks channel count and labels reports.")
@click.option("--channel", type=click.IntRange(min=0), default=None,
              help="Channel index to train on. [default: 0]")
@_bands_file_option
@_config_option
@_pipeline_errors
def cmd_train(in_path, out_dir, seed, order, hidden, trainer, eta, theta, max_epochs,
              mu0, beta, mu_max, max_iter, pop_size, generations, crossover_prob,
              mutation_prob, crossover_kind, mutation_kind, gaussian_sigma, elitism,
              gene_range, weight_range, fitness_patterns, threshold_dbm, split_fraction,
              split_mode, band, channel, bands_file, config_path):
    """Train a next-slot predictor for one channel.

    Binarizes the input (for sweep files), windows it, splits off the
    training side, and trains with the chosen algorithm.  Writes
    model.json, trainer_log.csv, ga_log.csv (for ga+lm), and run_config;
    rerunning with identical settings reproduces every file byte for byte.
    Exits 3 if training diverges.
    """
    settings = Settings(config_path)
    seed = settings.get("seed", seed, 0)
    order = settings.get("order", order, 10)
    hidden = settings.get("hidden", hidden, (10,))
    trainer = settings.get("trainer", trainer, "ga+lm")
    theta = settings.get("theta", theta, 0.01)
    eta = settings.get("eta", eta, 0.1)
    max_epochs = settings.get("max_epochs", max_epochs, 1000)
    lm_config = LmConfig(
        mu0=settings.get("mu0", mu0, 1e-3),
        beta=settings.get("beta", beta, 10.0),
        mu_max=settings.get("mu_max", mu_max, 1e10),
        theta=theta,
        max_iterations=settings.get("max_iter", max_iter, 1000),
    )
    ga_config = GaConfig(
        population_size=settings.get("pop_size", pop_size, 50),
        generations=settings.get("generations", generations, 100),
        crossover_prob=settings.get("crossover_prob", crossover_prob, 0.8),
        mutation_prob=settings.get("mutation_prob", mutation_prob, 0.05),
        gene_range=settings.get("gene_range", gene_range, (-1.0, 1.0)),
        crossover_kind=settings.get("crossover_kind", crossover_kind, "one-point"),
        mutation_kind=settings.get("mutation_kind", mutation_kind, "gaussian"),
        gaussian_sigma=settings.get("gaussian_sigma", gaussian_sigma, 0.1),
        elitism=settings.get("elitism", elitism, 1),
        fitness_patterns=settings.get("fitness_patterns", fitness_patterns),
    )
    weight_range = settings.get("weight_range", weight_range, (-1.0, 1.0))
    threshold_dbm = settings.get("threshold_dbm", threshold_dbm)
    split_fraction = settings.get("split", split_fraction, 0.5)
    split_mode = settings.get("split_mode", split_mode, "chrono")
    channel = settings.get("channel", channel, 0)
    band_def = _resolve_band(settings, band, bands_file)
    in_path = _resolve_in_path(settings, in_path)

    series = _load_series(in_path, channel, threshold_dbm, band_def)
    provenance = {"source": str(in_path)}
    if threshold_dbm is not None:
        provenance["threshold_dbm"] = threshold_dbm
    dataset = window(series, order, provenance)
    train_set, _ = split_dataset(dataset, split_fraction, derive_rng(seed, "split"), split_mode)

    topology = NetworkTopology(order=order, hidden_sizes=hidden, output_size=1)
    ga_log = None
    if trainer == "ga+lm":
        result = ga_lm_train(topology, train_set, ga_config, lm_config, derive_rng(seed, "ga"))
        weights, train_log, ga_log = result.weights, result.train_log, result.ga_log
    elif trainer == "lm":
        start = init_random(topology, weight_range, derive_rng(seed, "init"))
        weights, train_log = train_lm(start, train_set, lm_config)
    else:
        start = init_random(topology, weight_range, derive_rng(seed, "init"))
        gd_config = GdConfig(eta=eta, theta=theta, max_epochs=max_epochs)
        weights, train_log = train_gd(start, train_set, gd_config, derive_rng(seed, "gd"))

    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = out_dir / "model.json"
    save_model(weights, model_path)
    train_log.write_csv(out_dir / "trainer_log.csv")
    if ga_log is not None:
        ga_log.write_csv(out_dir / "ga_log.csv")
    settings.effective["model"] = str(model_path)
    settings.write(out_dir)
    click.echo(f"trained on {train_set.pattern_count} of {dataset.pattern_count} patterns")
    click.echo(f"final_error = {train_log.final_error!r}")
    click.echo(f"termination = {train_log.reason}")
    click.echo(f"wrote model -> {model_path}")
    if train_log.reason == REASON_DIVERGED:
        raise NumericalCliError(
            f"training diverged: error reached {train_log.final_error!r}"
        )


@main.command("evaluate")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Trained model JSON (train echoes its path into run_config).")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="The sweep or occupancy CSV the model was trained from.")
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False, path_type=Path),
              help="Output directory for the summary, traces, and run_config.")
@_seed_option
@click.option("--order", type=click.IntRange(min=1), default=None,
              help="History window length; must match the model. [default: the model's]")
@click.option("--threshold-dbm", type=float, default=None,
              help="Busy threshold for sweep input; use the training value.")
@click.option("--split", "split_fraction", type=float, default=None,
              help="Training fraction used when the model was trained. [default: 0.5]")
@click.option("--split-mode", type=click.Choice(["chrono", "shuffle"]), default=None,
              help="Split mode used when the model was trained. [default: chrono]")
@click.option("--band", type=str, default=None,
              help="Band preset name for the report's band column.")
@click.option("--channel", type=click.IntRange(min=0), default=None,
              help="Channel index to evaluate. [default: 0]")
@click.option("--side", type=click.Choice(["train", "test"]), default=None,
              help="Which side of the split to score. [default: test]")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
              help="Summary format. [default: csv]")
@click.option("--trace", is_flag=True, default=None,
              help="Also write per-slot trace CSVs (slot,predicted,actual).")
@_bands_file_option
@_config_option
@_pipeline_errors
def cmd_evaluate(model_path, in_path, out_dir, seed, order, threshold_dbm, split_fraction,
                 split_mode, band, channel, side, fmt, trace, bands_file, config_path):
    """Score a trained model on one side of the train/test split.

    Recomputes the identical split from the recorded seed and settings
    (pass the training run's run_config as --config), evaluates the
    requested side, and writes the summary report.
    """
    settings = Settings(config_path)
    seed = settings.get("seed", seed, 0)
    threshold_dbm = settings.get("threshold_dbm", threshold_dbm)
    split_fraction = settings.get("split", split_fraction, 0.5)
    split_mode = settings.get("split_mode", split_mode, "chrono")
    channel = settings.get("channel", channel, 0)
    side = settings.get("side", side, "test")
    fmt = settings.get("format", fmt, "csv")
    trace = settings.get("trace", trace, False)
    band_def = _resolve_band(settings, band, bands_file)
    in_path = _resolve_in_path(settings, in_path)
    model_value = settings.get("model", str(model_path) if model_path else None)
    if model_value is None:
        raise click.UsageError("missing model file: pass --model or set 'model' in the config")

    weights = load_model(model_value)
    model_order = weights.topology.order
    order = settings.get("order", order, model_order)
    if order != model_order:
        raise DataCliError(
            f"window order {order} does not match the model's input size {model_order}"
        )

    series = _load_series(in_path, channel, threshold_dbm, band_def)
    dataset = window(series, order, {"source": str(in_path)})
    train_set, test_set = split_dataset(
        dataset, split_fraction, derive_rng(seed, "split"), split_mode
    )
    side_set = train_set if side == "train" else test_set
    report = evaluate_dataset(
        weights,
        side_set,
        band=band_def.service if band_def is not None else "",
        channel=channel,
        keep_trace=trace,
    )
    summary_path = emit_report(out_dir, [report], fmt, traces=trace)
    settings.write(out_dir)
    click.echo(f"evaluated {report.pattern_count} {side} patterns")
    click.echo(f"error_rate = {report.error_rate!r}")
    click.echo(f"wrote summary -> {summary_path}")


if __name__ == "__main__":
    main()
