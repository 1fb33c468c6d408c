"""Genetic-algorithm search over initial network weights and thresholds.

A chromosome is the flat real-valued parameter vector of one complete
network (same ordering as the model file).  The population evolves by
roulette-wheel selection, one-point or arithmetic crossover, and Gaussian
or uniform mutation; the best chromosome seeds the damped Gauss-Newton
trainer.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import as_rng, check_interval, check_probability
from .errors import StructuralError
from .network import NetworkTopology, NetworkWeights, network_outputs
from .training import LmConfig, TrainLog, as_pattern_arrays, train_lm

CROSSOVER_KINDS = ("one-point", "arithmetic")
MUTATION_KINDS = ("gaussian", "uniform")


@dataclass
class Chromosome:
    """Flat gene vector encoding one full set of weights and thresholds."""

    genes: np.ndarray
    fitness: Optional[float] = None

    def __post_init__(self):
        self.genes = np.asarray(self.genes, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(self.genes)):
            raise StructuralError("chromosome genes must be finite")

    def copy(self) -> "Chromosome":
        return Chromosome(self.genes.copy(), self.fitness)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    generations: int = 100
    crossover_prob: float = 0.8
    mutation_prob: float = 0.05
    gene_range: tuple[float, float] = (-1.0, 1.0)
    crossover_kind: str = "one-point"
    mutation_kind: str = "gaussian"
    gaussian_sigma: float = 0.1
    elitism: int = 1
    fitness_patterns: Optional[int] = None

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2 != 0:
            raise StructuralError(
                f"population_size must be an even integer >= 2, got {self.population_size}"
            )
        if self.generations < 0:
            raise StructuralError(f"generations must be >= 0, got {self.generations}")
        check_probability(self.crossover_prob, "crossover_prob")
        check_probability(self.mutation_prob, "mutation_prob")
        check_interval(self.gene_range[0], self.gene_range[1], name="gene_range")
        if self.crossover_kind not in CROSSOVER_KINDS:
            raise StructuralError(f"crossover_kind must be one of {CROSSOVER_KINDS}")
        if self.mutation_kind not in MUTATION_KINDS:
            raise StructuralError(f"mutation_kind must be one of {MUTATION_KINDS}")
        if not self.gaussian_sigma > 0.0:
            raise StructuralError(f"gaussian_sigma must be > 0, got {self.gaussian_sigma}")
        if self.elitism < 0 or self.elitism > self.population_size:
            raise StructuralError(f"elitism must lie in [0, population_size], got {self.elitism}")
        if self.fitness_patterns is not None and self.fitness_patterns < 1:
            raise StructuralError(f"fitness_patterns must be >= 1, got {self.fitness_patterns}")


@dataclass
class Population:
    members: list[Chromosome] = field(default_factory=list)
    generation: int = 0
    best_ever: Optional[Chromosome] = None

    def observe(self, member: Chromosome):
        """Track the best chromosome ever evaluated."""
        if self.best_ever is None or (member.fitness or 0.0) > (self.best_ever.fitness or 0.0):
            self.best_ever = member.copy()


@dataclass
class GaLog:
    """Per-generation best/mean fitness trace."""

    rows: list[tuple[int, float, float, float]]

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["generation", "best_fitness", "mean_fitness", "best_error"])
            for gen, best, mean, best_error in self.rows:
                writer.writerow([gen, repr(float(best)), repr(float(mean)), repr(float(best_error))])


def encode(weights: NetworkWeights) -> Chromosome:
    """Flatten a network into a chromosome (model-file parameter order)."""
    return Chromosome(weights.to_flat())


def decode(chromosome: Chromosome, topology: NetworkTopology) -> NetworkWeights:
    """Rebuild the network a chromosome encodes; inverse of encode."""
    return NetworkWeights.from_flat(topology, chromosome.genes)


def _genes_error(genes: np.ndarray, topology: NetworkTopology, x: np.ndarray, t: np.ndarray):
    weights = NetworkWeights.from_flat(topology, genes)
    with np.errstate(over="ignore", invalid="ignore"):
        z = network_outputs(weights, x)
    if not np.all(np.isfinite(z)):
        return None
    diff = t - z
    return 0.5 * float(np.dot(diff.ravel(), diff.ravel()))


def fitness(chromosome: Chromosome, topology: NetworkTopology, patterns) -> float:
    """Selection score 1 / (1 + error): in (0, 1], larger for smaller error.

    A chromosome whose network produces non-finite outputs scores 0.
    """
    x, t = as_pattern_arrays(patterns)
    error = _genes_error(chromosome.genes, topology, x, t)
    return 0.0 if error is None or not np.isfinite(error) else 1.0 / (1.0 + error)


def roulette_select(fitnesses, rng=None) -> int:
    """Fitness-proportionate selection with a single uniform draw.

    Falls back to a uniform pick when every fitness is zero.
    """
    rng = as_rng(rng)
    values = np.asarray([getattr(m, "fitness", m) for m in fitnesses], dtype=np.float64)
    if values.size == 0:
        raise StructuralError("cannot select from an empty population")
    if np.any(values < 0.0) or not np.all(np.isfinite(values)):
        raise StructuralError("fitness values must be finite and non-negative")
    total = values.sum()
    if total == 0.0:
        return int(rng.integers(values.size))
    cumulative = np.cumsum(values)
    return int(np.searchsorted(cumulative, rng.random() * total, side="right"))


def crossover(parent_a: Chromosome, parent_b: Chromosome, config: GaConfig, rng=None):
    """Recombine two parents; with probability 1 - crossover_prob, copy them.

    One-point swaps gene suffixes at a uniform cut; arithmetic blends with
    a single uniform weight (children keep the parents' gene-wise sums).
    """
    rng = as_rng(rng)
    a, b = parent_a.genes, parent_b.genes
    if a.shape != b.shape:
        raise StructuralError("parents must have equal gene counts")
    if rng.random() >= config.crossover_prob or a.size < 2:
        return parent_a.copy(), parent_b.copy()
    if config.crossover_kind == "one-point":
        cut = int(rng.integers(1, a.size))
        child_a = np.concatenate([a[:cut], b[cut:]])
        child_b = np.concatenate([b[:cut], a[cut:]])
    else:
        lam = rng.random()
        child_a = lam * a + (1.0 - lam) * b
        child_b = (1.0 - lam) * a + lam * b
    return Chromosome(child_a), Chromosome(child_b)


def mutate(chromosome: Chromosome, config: GaConfig, rng=None) -> Chromosome:
    """Mutate each gene independently with probability mutation_prob.

    Gaussian mutation adds N(0, sigma^2); uniform mutation redraws the
    gene from gene_range.
    """
    rng = as_rng(rng)
    genes = chromosome.genes.copy()
    mask = rng.random(genes.size) < config.mutation_prob
    count = int(mask.sum())
    if count:
        if config.mutation_kind == "gaussian":
            genes[mask] += rng.normal(0.0, config.gaussian_sigma, size=count)
        else:
            lo, hi = config.gene_range
            genes[mask] = rng.uniform(lo, hi, size=count)
    return Chromosome(genes)


def evolve(topology: NetworkTopology, patterns, config: GaConfig, rng=None):
    """Evolve a population of candidate networks; returns (best, GaLog).

    Generation 0 is the random population drawn uniform in gene_range.
    Each later generation keeps the ``elitism`` best members unchanged and
    fills the rest through select -> crossover -> mutate.  The log records
    one row per generation; the best-ever fitness never decreases.  The
    loop exits early once a chromosome reaches zero error.
    """
    x, t = as_pattern_arrays(patterns)
    rng = as_rng(rng)
    if config.fitness_patterns is not None and config.fitness_patterns < x.shape[0]:
        # One subsample is drawn up front and reused for every evaluation,
        # keeping fitness comparable across generations.
        chosen = np.sort(rng.choice(x.shape[0], size=config.fitness_patterns, replace=False))
        x, t = x[chosen], t[chosen]
    lo, hi = config.gene_range
    n_genes = topology.parameter_count

    def evaluate(member: Chromosome):
        if member.fitness is None:
            error = _genes_error(member.genes, topology, x, t)
            member.fitness = 0.0 if error is None or not np.isfinite(error) else 1.0 / (1.0 + error)

    population = Population(
        members=[Chromosome(rng.uniform(lo, hi, size=n_genes)) for _ in range(config.population_size)]
    )
    rows = []
    for member in population.members:
        evaluate(member)
        population.observe(member)

    def log_generation():
        values = np.asarray([m.fitness for m in population.members])
        best = float(values.max())
        best_error = np.inf if best == 0.0 else 1.0 / best - 1.0
        rows.append((population.generation, best, float(values.mean()), best_error))

    log_generation()
    for generation in range(1, config.generations + 1):
        if population.best_ever.fitness >= 1.0:
            break
        values = [m.fitness for m in population.members]
        ranked = np.argsort(-np.asarray(values), kind="stable")
        offspring = [population.members[i].copy() for i in ranked[: config.elitism]]
        while len(offspring) < config.population_size:
            pa = population.members[roulette_select(values, rng)]
            pb = population.members[roulette_select(values, rng)]
            child_a, child_b = crossover(pa, pb, config, rng)
            offspring.append(mutate(child_a, config, rng))
            if len(offspring) < config.population_size:
                offspring.append(mutate(child_b, config, rng))
        population.members = offspring
        population.generation = generation
        for member in population.members:
            evaluate(member)
            population.observe(member)
        log_generation()
    return population.best_ever.copy(), GaLog(rows)


@dataclass
class GaLmResult:
    """Outcome of the GA seeding phase followed by LM training."""

    weights: NetworkWeights
    ga_log: GaLog
    train_log: TrainLog

    @property
    def final_error(self) -> float:
        return self.train_log.final_error


def ga_lm_train(
    topology: NetworkTopology,
    patterns,
    ga_config: GaConfig,
    lm_config: LmConfig,
    rng=None,
) -> GaLmResult:
    """Evolve initial weights, then train with damped Gauss-Newton.

    The LM phase starts from the best evolved chromosome and only ever
    accepts improvements, so the final error never exceeds the seed's.
    """
    rng = as_rng(rng)
    best, ga_log = evolve(topology, patterns, ga_config, rng)
    seed_weights = decode(best, topology)
    trained, train_log = train_lm(seed_weights, patterns, lm_config)
    return GaLmResult(trained, ga_log, train_log)
