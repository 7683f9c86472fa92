//! NSGA-II over the Walker chromosome.
//!
//! The generational loop is the usual one: tournament selection on
//! (rank, crowding), crossover and mutation to build an offspring population
//! of equal size, then parents and offspring are merged, sorted into fronts
//! and truncated back. All random draws happen in the sequential loop, so an
//! [`Evaluator`] may score a batch in parallel without perturbing the run.

pub mod operators;
pub mod sort;

use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use operators::{crossover, mutate, random_chromosome, repair, select};
pub use sort::{crowding_distance, dominates, nondominated_sort};

use crate::constellation::{expand_with, ConstellationError, GeneBounds, WalkerChromosome};
use crate::coverage::{CoverageError, CoverageEvaluator, CoverageReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Minimise the single combined coverage fitness.
    Scalar,
    /// Minimise `(1/C, R, 1/P_cov, N)` and keep the Pareto front.
    MultiObjective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// Per-gene mutation probability.
    pub mutation_prob: f64,
    pub tournament_size: usize,
    pub seed: u64,
    pub mode: Mode,
    /// SBX distribution index.
    pub eta_crossover: f64,
    /// Polynomial-mutation distribution index.
    pub eta_mutation: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 60,
            generations: 100,
            crossover_prob: 0.9,
            mutation_prob: 1.0 / 6.0,
            tournament_size: 2,
            seed: 0,
            mode: Mode::Scalar,
            eta_crossover: 15.0,
            eta_mutation: 20.0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.population < 4 || self.population % 2 != 0 {
            return Err("population must be even and at least 4");
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) || !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err("probabilities must lie in [0, 1]");
        }
        if self.tournament_size == 0 {
            return Err("tournament size must be at least 1");
        }
        Ok(())
    }
}

/// What an evaluator reports for one chromosome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    #[serde(with = "crate::serde_float")]
    pub scalar: f64,
    #[serde(with = "crate::serde_float::vec")]
    pub objectives: Vec<f64>,
}

/// Scores chromosomes. `evaluate_batch` may be overridden to run in parallel;
/// results must come back in input order.
pub trait Evaluator {
    type Error;

    fn evaluate(&self, genes: &WalkerChromosome) -> Result<Fitness, Self::Error>;

    fn evaluate_batch(&self, batch: &[WalkerChromosome]) -> Vec<Result<Fitness, Self::Error>> {
        batch.iter().map(|g| self.evaluate(g)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genes: WalkerChromosome,
    /// Values being minimised: `[scalar]` in scalar mode, the objective vector otherwise.
    #[serde(with = "crate::serde_float::vec")]
    pub objectives: Vec<f64>,
    #[serde(with = "crate::serde_float")]
    pub scalar: f64,
    pub rank: usize,
    #[serde(with = "crate::serde_float")]
    pub crowding: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best scalar fitness in the current population.
    #[serde(with = "crate::serde_float")]
    pub best_fitness: f64,
    #[serde(with = "crate::serde_float")]
    pub best_so_far: f64,
    /// Mean over finite scalar fitness values; `inf` when none are finite.
    #[serde(with = "crate::serde_float")]
    pub mean_fitness: f64,
    pub front0_size: usize,
    /// FNV-1a over the population's genes and objectives.
    pub population_hash: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerError<E> {
    InvalidConfig(&'static str),
    EvaluatorFailure { chromosome: WalkerChromosome, source: E },
}

impl<E: fmt::Display> fmt::Display for OptimizerError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizerError::InvalidConfig(m) => write!(f, "invalid GA configuration: {m}"),
            OptimizerError::EvaluatorFailure { chromosome, source } => {
                write!(f, "evaluation failed for {chromosome:?}: {source}")
            }
        }
    }
}

impl<E: fmt::Debug + fmt::Display> core::error::Error for OptimizerError<E> {}

/// Everything needed to resume a run bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunState {
    pub config: GaConfig,
    pub bounds: GeneBounds,
    /// Generations completed after the initial population.
    pub generation: usize,
    pub population: Vec<Individual>,
    pub best: Option<Individual>,
    pub history: Vec<GenerationStats>,
    /// ChaCha word position split into `(high, low)` halves.
    pub rng_word_pos: (u64, u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Front 0 of the final population, restricted to finite objectives.
    pub archive: Vec<Individual>,
    pub best: Option<Individual>,
    pub history: Vec<GenerationStats>,
}

pub struct Nsga2 {
    state: RunState,
    rng: ChaCha8Rng,
}

impl Nsga2 {
    pub fn new<E>(config: GaConfig, bounds: GeneBounds) -> Result<Self, OptimizerError<E>> {
        config.validate().map_err(OptimizerError::InvalidConfig)?;
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(Self {
            state: RunState {
                config,
                bounds,
                generation: 0,
                population: Vec::new(),
                best: None,
                history: Vec::new(),
                rng_word_pos: (0, 0),
            },
            rng,
        })
    }

    /// Restores a run from a checkpoint.
    pub fn resume<E>(state: RunState) -> Result<Self, OptimizerError<E>> {
        state.config.validate().map_err(OptimizerError::InvalidConfig)?;
        let mut rng = ChaCha8Rng::seed_from_u64(state.config.seed);
        let (hi, lo) = state.rng_word_pos;
        rng.set_word_pos(((hi as u128) << 64) | lo as u128);
        Ok(Self { state, rng })
    }

    pub fn state(&self) -> RunState {
        let mut s = self.state.clone();
        let pos = self.rng.get_word_pos();
        s.rng_word_pos = ((pos >> 64) as u64, pos as u64);
        s
    }

    pub fn is_initialized(&self) -> bool {
        !self.state.population.is_empty()
    }

    pub fn is_done(&self) -> bool {
        self.is_initialized() && self.state.generation >= self.state.config.generations
    }

    pub fn generation(&self) -> usize {
        self.state.generation
    }

    pub fn population(&self) -> &[Individual] {
        &self.state.population
    }

    /// Draws and scores the initial population.
    pub fn initialize<V: Evaluator>(&mut self, ev: &V) -> Result<(), OptimizerError<V::Error>> {
        let genes: Vec<WalkerChromosome> =
            (0..self.state.config.population).map(|_| random_chromosome(&self.state.bounds, &mut self.rng)).collect();
        let mut pop = self.score(&genes, ev)?;
        rank_population(&mut pop);
        self.state.population = pop;
        self.record();
        Ok(())
    }

    /// Runs one generation.
    pub fn step<V: Evaluator>(&mut self, ev: &V) -> Result<(), OptimizerError<V::Error>> {
        let cfg = self.state.config;
        let bounds = self.state.bounds;
        let pop = &self.state.population;
        let mut children = Vec::with_capacity(cfg.population);
        while children.len() < cfg.population {
            let parents = select(pop, 2, cfg.tournament_size, &mut self.rng);
            let (c1, c2) = crossover(
                &pop[parents[0]].genes,
                &pop[parents[1]].genes,
                cfg.crossover_prob,
                cfg.eta_crossover,
                &bounds,
                &mut self.rng,
            );
            children.push(mutate(&c1, cfg.mutation_prob, cfg.eta_mutation, &bounds, &mut self.rng));
            if children.len() < cfg.population {
                children.push(mutate(&c2, cfg.mutation_prob, cfg.eta_mutation, &bounds, &mut self.rng));
            }
        }
        let offspring = self.score(&children, ev)?;
        let mut merged = core::mem::take(&mut self.state.population);
        merged.extend(offspring);
        let mut next = truncate(merged, cfg.population);
        rank_population(&mut next);
        self.state.population = next;
        self.state.generation += 1;
        self.record();
        Ok(())
    }

    pub fn result(&self) -> RunResult {
        let archive = self
            .state
            .population
            .iter()
            .filter(|i| i.rank == 0 && i.objectives.iter().all(|v| v.is_finite()))
            .cloned()
            .collect();
        RunResult { archive, best: self.state.best.clone(), history: self.state.history.clone() }
    }

    fn score<V: Evaluator>(
        &self,
        genes: &[WalkerChromosome],
        ev: &V,
    ) -> Result<Vec<Individual>, OptimizerError<V::Error>> {
        let mode = self.state.config.mode;
        ev.evaluate_batch(genes)
            .into_iter()
            .zip(genes)
            .map(|(res, g)| {
                let fit = res.map_err(|source| OptimizerError::EvaluatorFailure { chromosome: *g, source })?;
                let objectives = match mode {
                    Mode::Scalar => alloc::vec![fit.scalar],
                    Mode::MultiObjective => fit.objectives,
                };
                Ok(Individual { genes: *g, objectives, scalar: fit.scalar, rank: 0, crowding: 0.0 })
            })
            .collect()
    }

    fn record(&mut self) {
        let pop = &self.state.population;
        let best_now = pop.iter().min_by(|a, b| a.scalar.total_cmp(&b.scalar)).cloned();
        if let Some(b) = best_now {
            let improves = self.state.best.as_ref().is_none_or(|cur| b.scalar < cur.scalar);
            if improves {
                self.state.best = Some(b);
            }
        }
        let finite: Vec<f64> = pop.iter().map(|i| i.scalar).filter(|v| v.is_finite()).collect();
        let mean_fitness =
            if finite.is_empty() { f64::INFINITY } else { finite.iter().sum::<f64>() / finite.len() as f64 };
        let best_fitness = pop.iter().map(|i| i.scalar).fold(f64::INFINITY, f64::min);
        let stats = GenerationStats {
            generation: self.state.generation,
            best_fitness,
            best_so_far: self.state.best.as_ref().map_or(f64::INFINITY, |b| b.scalar),
            mean_fitness,
            front0_size: pop.iter().filter(|i| i.rank == 0).count(),
            population_hash: population_hash(pop),
        };
        self.state.history.push(stats);
    }
}

/// Assigns rank and crowding distance in place.
pub fn rank_population(pop: &mut [Individual]) {
    let objs: Vec<Vec<f64>> = pop.iter().map(|i| i.objectives.clone()).collect();
    for (rank, front) in nondominated_sort(&objs).into_iter().enumerate() {
        let dist = crowding_distance(&objs, &front);
        for (&i, d) in front.iter().zip(dist) {
            pop[i].rank = rank;
            pop[i].crowding = d;
        }
    }
}

/// Keeps whole fronts while they fit, then the most spread-out members of the
/// first front that does not.
fn truncate(merged: Vec<Individual>, size: usize) -> Vec<Individual> {
    let objs: Vec<Vec<f64>> = merged.iter().map(|i| i.objectives.clone()).collect();
    let mut keep: Vec<usize> = Vec::with_capacity(size);
    for front in nondominated_sort(&objs) {
        if keep.len() + front.len() <= size {
            keep.extend_from_slice(&front);
        } else {
            let dist = crowding_distance(&objs, &front);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(front[a].cmp(&front[b])));
            let room = size - keep.len();
            keep.extend(order.into_iter().take(room).map(|k| front[k]));
        }
        if keep.len() == size {
            break;
        }
    }
    let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
    keep.into_iter().filter_map(|i| slots[i].take()).collect()
}

fn population_hash(pop: &[Individual]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    for ind in pop {
        let g = &ind.genes;
        eat(&g.a_km.to_bits().to_le_bytes());
        eat(&g.e.to_bits().to_le_bytes());
        eat(&g.i_deg.to_bits().to_le_bytes());
        eat(&g.planes.to_le_bytes());
        eat(&g.phasing.to_le_bytes());
        eat(&g.per_plane.to_le_bytes());
        for v in &ind.objectives {
            eat(&v.to_bits().to_le_bytes());
        }
    }
    h
}

/// Runs the full loop: initial population plus `config.generations` generations.
pub fn run<V: Evaluator>(config: GaConfig, bounds: GeneBounds, ev: &V) -> Result<RunResult, OptimizerError<V::Error>> {
    let mut ga = Nsga2::new(config, bounds)?;
    ga.initialize(ev)?;
    while !ga.is_done() {
        ga.step(ev)?;
    }
    Ok(ga.result())
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitnessError {
    #[error(transparent)]
    Constellation(#[from] ConstellationError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

/// Coverage-based fitness: expand the chromosome, evaluate it over the region.
pub struct CoverageFitness {
    pub evaluator: CoverageEvaluator,
    pub bounds: GeneBounds,
}

impl CoverageFitness {
    pub fn report(&self, genes: &WalkerChromosome) -> Result<CoverageReport, FitnessError> {
        let c = expand_with(genes, &self.bounds)?;
        Ok(self.evaluator.evaluate(&c)?)
    }
}

impl Evaluator for CoverageFitness {
    type Error = FitnessError;

    fn evaluate(&self, genes: &WalkerChromosome) -> Result<Fitness, FitnessError> {
        let r = self.report(genes)?;
        Ok(Fitness { scalar: r.fitness, objectives: r.objectives().to_vec() })
    }
}
