//! The many-objective search loop: one objective per coverage goal,
//! targets activated along control dependencies, an archive of the best
//! covering test per goal.

mod archive;
mod sorting;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chromosome::{crossover, mutate, Factory, FactoryConfig, FactoryError, Representation, TestCase};
use crate::runtime::{execute_test, fitness_from, focal_window, Limits};
use crate::subject::{GoalId, GoalIndex, SubjectUnit};

pub use archive::{Archive, ArchiveEntry};
pub use sorting::{crowding_distance, dominates, non_dominated_fronts, preference_sort};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub population_size: usize,
    /// Budget in test executions.
    pub max_evaluations: u64,
    pub crossover_rate: f64,
    pub seed: u64,
    pub representation: Representation,
    pub max_len: usize,
    pub init_len: usize,
    pub limits: Limits,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            population_size: 50,
            max_evaluations: 50_000,
            crossover_rate: 0.75,
            seed: 0,
            representation: Representation::Focal,
            max_len: 40,
            init_len: 8,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Population(usize),
    CrossoverRate(f64),
    StepLimit,
    Factory(FactoryError),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Population(n) => write!(f, "population size {n} must be even and at least 4"),
            ConfigError::CrossoverRate(p) => write!(f, "crossover rate {p} is not a probability"),
            ConfigError::StepLimit => f.write_str("step limit must be positive"),
            ConfigError::Factory(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for ConfigError {}

impl SearchConfig {
    pub fn factory_config(&self) -> FactoryConfig {
        FactoryConfig { max_len: self.max_len, init_len: self.init_len }
    }

    /// Checks everything that does not depend on the subject.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size < 4 || !self.population_size.is_multiple_of(2) {
            return Err(ConfigError::Population(self.population_size));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(ConfigError::CrossoverRate(self.crossover_rate));
        }
        if self.limits.step_limit == 0 {
            return Err(ConfigError::StepLimit);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub generation: usize,
    pub evaluations: u64,
    pub covered: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub evaluations: u64,
    pub generations: usize,
    pub goals_total: usize,
    pub goals_covered: usize,
    /// Archive coverage after initialization and after every generation.
    pub curve: Vec<CurvePoint>,
}

/// Goals the search currently targets: every root plus every goal whose
/// parent outcome is covered.
pub fn activate_targets(covered: &BTreeSet<GoalId>, goals: &GoalIndex) -> BTreeSet<GoalId> {
    (0..goals.len()).filter(|&g| goals.parent(g).is_none_or(|p| covered.contains(&p))).collect()
}

struct Individual {
    test: TestCase,
    /// Per-goal minimum distance over the counted statements.
    dist: Vec<f64>,
    rank: usize,
    crowding: f64,
}

struct Run<'a> {
    unit: &'a SubjectUnit,
    goals: &'a GoalIndex,
    cfg: &'a SearchConfig,
    factory: Factory<'a>,
    rng: ChaCha8Rng,
    archive: Archive,
    evaluations: u64,
}

impl Run<'_> {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.cfg.max_evaluations || self.archive.len() == self.goals.len()
    }

    fn evaluate(&mut self, test: TestCase) -> Option<Individual> {
        if self.evaluations >= self.cfg.max_evaluations {
            return None;
        }
        let trace = execute_test(self.unit, self.goals, &test, self.cfg.limits);
        self.evaluations += 1;
        let window = focal_window(&test);
        for (g, s) in trace.covered(window.clone()) {
            self.archive.offer(self.unit, self.goals, g, &test, s, self.evaluations);
        }
        Some(Individual { dist: trace.branch_min_distance(window), test, rank: 0, crowding: 0.0 })
    }

    fn targets(&self) -> Vec<GoalId> {
        let covered: BTreeSet<GoalId> = self.archive.iter().map(|(g, _)| g).collect();
        activate_targets(&covered, self.goals).into_iter().filter(|g| !covered.contains(g)).collect()
    }

    fn fresh(&mut self) -> TestCase {
        let targets = self.targets();
        let g = *targets.choose(&mut self.rng).unwrap_or(&0);
        self.factory.random_test(self.cfg.representation, self.goals.goal(g), &mut self.rng)
    }

    fn tournament<'p>(&mut self, pop: &'p [Individual]) -> &'p Individual {
        let a = &pop[self.rng.random_range(0..pop.len())];
        let b = &pop[self.rng.random_range(0..pop.len())];
        if b.rank < a.rank || (b.rank == a.rank && b.crowding > a.crowding) {
            b
        } else {
            a
        }
    }

    /// Ranks `pool` against the current targets and keeps the best
    /// `population_size`.
    fn select(&self, pool: Vec<Individual>) -> Vec<Individual> {
        let targets = self.targets();
        let fit: Vec<Vec<f64>> =
            pool.iter().map(|ind| targets.iter().map(|&g| fitness_from(self.goals, g, &ind.dist)).collect()).collect();
        let lens: Vec<usize> = pool.iter().map(|i| i.test.len()).collect();
        let fronts = preference_sort(&fit, &lens);
        let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
        let mut next = Vec::with_capacity(self.cfg.population_size);
        for (rank, front) in fronts.iter().enumerate() {
            let room = self.cfg.population_size - next.len();
            if room == 0 {
                break;
            }
            let crowd = crowding_distance(&fit, front);
            let mut order: Vec<usize> = (0..front.len()).collect();
            if front.len() > room {
                order.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]).then(a.cmp(&b)));
                order.truncate(room);
            }
            for k in order {
                let mut ind = slots[front[k]].take().expect("each individual sits in one front");
                ind.rank = rank;
                ind.crowding = crowd[k];
                next.push(ind);
            }
        }
        next
    }
}

/// Runs the search until every goal is covered or the budget is spent.
pub fn run_search(unit: &SubjectUnit, goals: &GoalIndex, cfg: &SearchConfig) -> Result<(Archive, SearchStats), ConfigError> {
    cfg.validate()?;
    let factory = Factory::new(unit, cfg.factory_config()).map_err(ConfigError::Factory)?;
    let mut run = Run {
        unit,
        goals,
        cfg,
        factory,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        archive: Archive::default(),
        evaluations: 0,
    };
    let mut stats = SearchStats { evaluations: 0, generations: 0, goals_total: goals.len(), goals_covered: 0, curve: Vec::new() };

    let mut pop = Vec::new();
    while pop.len() < cfg.population_size && !run.exhausted() {
        let t = run.fresh();
        pop.extend(run.evaluate(t));
    }
    if !pop.is_empty() {
        pop = run.select(pop);
    }
    stats.curve.push(CurvePoint { generation: 0, evaluations: run.evaluations, covered: run.archive.len() });

    let n_fresh = cfg.population_size.div_ceil(10);
    while !run.exhausted() && !pop.is_empty() {
        let mut offspring = Vec::with_capacity(cfg.population_size);
        while offspring.len() < cfg.population_size - n_fresh {
            let p1 = run.tournament(&pop).test.clone();
            let p2 = run.tournament(&pop).test.clone();
            let (mut c1, mut c2) = if run.rng.random_bool(cfg.crossover_rate) {
                crossover(&run.factory, &p1, &p2, &mut run.rng)
            } else {
                (p1, p2)
            };
            mutate(&run.factory, &mut c1, &mut run.rng);
            mutate(&run.factory, &mut c2, &mut run.rng);
            offspring.push(c1);
            if offspring.len() < cfg.population_size - n_fresh {
                offspring.push(c2);
            }
        }
        while offspring.len() < cfg.population_size {
            let t = run.fresh();
            offspring.push(t);
        }
        let mut pool = pop;
        for t in offspring {
            if run.exhausted() {
                break;
            }
            pool.extend(run.evaluate(t));
        }
        pop = run.select(pool);
        stats.generations += 1;
        stats.curve.push(CurvePoint { generation: stats.generations, evaluations: run.evaluations, covered: run.archive.len() });
    }
    stats.evaluations = run.evaluations;
    stats.goals_covered = run.archive.len();
    Ok((run.archive, stats))
}
