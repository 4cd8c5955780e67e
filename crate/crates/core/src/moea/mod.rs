//! Steady-state ε-MOEA.
//!
//! A fixed-size population and an ε-dominance archive co-evolve one
//! offspring per iteration: one parent comes from the population via a
//! binary Pareto-dominance tournament, the other uniformly from the
//! archive; the offspring is produced by SBX crossover plus polynomial
//! mutation and then offered to both containers. Runs are deterministic
//! given (seed, config, problem).

mod archive;
mod operators;
mod problem;

pub use archive::{
    pareto_dominates, ArchiveEntry, ArchiveError, EpsilonSpec, OfferOutcome, ParetoArchive,
};
pub use problem::{DecisionSpace, EvalFailure, MoeaProblem, SpaceError, VariableKind};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use operators::{polynomial_mutation, sbx_crossover};

#[derive(Debug, Error)]
pub enum MoeaError {
    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(usize),
    #[error("distribution indices must be strictly positive")]
    BadDistributionIndex,
    #[error("mutation probability {0} outside [0, 1]")]
    BadMutationProbability(f64),
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error(transparent)]
    Evaluation(#[from] EvalFailure),
}

/// Optimizer controls. Defaults carry the reference configuration
/// (P = 50, C = 1000, η_c = 15, η_m = 20, per-variable probability 1/n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoeaConfig {
    pub population_size: usize,
    pub iterations: u64,
    pub eta_crossover: f64,
    pub eta_mutation: f64,
    /// Per-variable mutation probability; `None` means `1 / n_vars`.
    pub mutation_probability: Option<f64>,
    pub seed: u64,
}

impl Default for MoeaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            iterations: 1000,
            eta_crossover: 15.0,
            eta_mutation: 20.0,
            mutation_probability: None,
            seed: 0,
        }
    }
}

impl MoeaConfig {
    pub fn validate(&self) -> Result<(), MoeaError> {
        if self.population_size < 2 {
            return Err(MoeaError::PopulationTooSmall(self.population_size));
        }
        if !(self.eta_crossover > 0.0) || !(self.eta_mutation > 0.0) {
            return Err(MoeaError::BadDistributionIndex);
        }
        if let Some(p) = self.mutation_probability {
            if !(0.0..=1.0).contains(&p) {
                return Err(MoeaError::BadMutationProbability(p));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub decision: Vec<f64>,
    pub objectives: [f64; 2],
}

/// How the offspring entered (or failed to enter) the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationAction {
    ReplacedDominated(usize),
    DiscardedDominated,
    ReplacedRandom(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub offspring_objectives: [f64; 2],
    pub population_action: PopulationAction,
    pub archive_outcome: OfferOutcome,
}

/// In-flight optimizer state. A single run is strictly sequential; spawn
/// one `MoeaRun` per scan angle for parallel sweeps.
pub struct MoeaRun<'p, P: MoeaProblem + ?Sized> {
    problem: &'p P,
    config: MoeaConfig,
    mutation_probability: f64,
    population: Vec<Individual>,
    archive: ParetoArchive,
    rng: ChaCha8Rng,
    evaluations: u64,
}

impl<'p, P: MoeaProblem + ?Sized> MoeaRun<'p, P> {
    /// Evaluates P individuals (uniform random, with `seeds` substituted
    /// into distinct random slots first) and primes the archive with them.
    pub fn initialize(
        problem: &'p P,
        config: MoeaConfig,
        eps: EpsilonSpec,
        mut rng: ChaCha8Rng,
        seeds: &[Vec<f64>],
    ) -> Result<Self, MoeaError> {
        config.validate()?;
        let space = problem.space();
        let mutation_probability = config
            .mutation_probability
            .unwrap_or(1.0 / space.len() as f64);

        let mut decisions: Vec<Vec<f64>> = (0..config.population_size)
            .map(|_| space.sample(&mut rng))
            .collect();
        let mut taken = vec![false; config.population_size];
        for seed in seeds.iter().take(config.population_size) {
            let slot = loop {
                let i = rng.gen_range(0..config.population_size);
                if !taken[i] {
                    break i;
                }
            };
            taken[slot] = true;
            decisions[slot] = seed.clone();
        }

        let mut population = Vec::with_capacity(config.population_size);
        let mut archive = ParetoArchive::new(eps);
        let mut evaluations = 0;
        for mut x in decisions {
            space.confine(&mut x);
            problem.repair(&mut x);
            let objectives = problem.evaluate(&x)?;
            evaluations += 1;
            archive.offer(&x, objectives)?;
            population.push(Individual {
                decision: x,
                objectives,
            });
        }

        Ok(Self {
            problem,
            config,
            mutation_probability,
            population,
            archive,
            rng,
            evaluations,
        })
    }

    pub fn archive(&self) -> &ParetoArchive {
        &self.archive
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn into_archive(self) -> ParetoArchive {
        self.archive
    }

    /// One steady-state iteration: exactly one new objective evaluation.
    pub fn step(&mut self) -> Result<StepOutcome, MoeaError> {
        let space = self.problem.space();

        // population parent: binary Pareto-dominance tournament
        let i = self.rng.gen_range(0..self.population.len());
        let j = self.rng.gen_range(0..self.population.len());
        let pop_parent = if pareto_dominates(
            self.population[i].objectives,
            self.population[j].objectives,
        ) {
            i
        } else if pareto_dominates(
            self.population[j].objectives,
            self.population[i].objectives,
        ) {
            j
        } else if self.rng.gen::<f64>() < 0.5 {
            i
        } else {
            j
        };

        // archive parent: uniform random
        let a = self.rng.gen_range(0..self.archive.len());
        let archive_parent = self.archive.entry(a).decision.clone();

        let (child_a, child_b) = sbx_crossover(
            &self.population[pop_parent].decision,
            &archive_parent,
            self.config.eta_crossover,
            &mut self.rng,
        );
        let mut child = if self.rng.gen::<f64>() < 0.5 {
            child_a
        } else {
            child_b
        };
        space.confine(&mut child);
        polynomial_mutation(
            &mut child,
            space,
            self.config.eta_mutation,
            self.mutation_probability,
            &mut self.rng,
        );
        space.confine(&mut child);
        self.problem.repair(&mut child);

        let objectives = self.problem.evaluate(&child)?;
        self.evaluations += 1;

        let dominated: Vec<usize> = self
            .population
            .iter()
            .enumerate()
            .filter(|(_, ind)| pareto_dominates(objectives, ind.objectives))
            .map(|(k, _)| k)
            .collect();
        let population_action = if !dominated.is_empty() {
            let victim = dominated[self.rng.gen_range(0..dominated.len())];
            self.population[victim] = Individual {
                decision: child.clone(),
                objectives,
            };
            PopulationAction::ReplacedDominated(victim)
        } else if self
            .population
            .iter()
            .any(|ind| pareto_dominates(ind.objectives, objectives))
        {
            PopulationAction::DiscardedDominated
        } else {
            let victim = self.rng.gen_range(0..self.population.len());
            self.population[victim] = Individual {
                decision: child.clone(),
                objectives,
            };
            PopulationAction::ReplacedRandom(victim)
        };

        let archive_outcome = self.archive.offer(&child, objectives)?;

        Ok(StepOutcome {
            offspring_objectives: objectives,
            population_action,
            archive_outcome,
        })
    }
}

/// Full run: P initial evaluations plus `iterations` steps, so the total
/// evaluation count is exactly `P + C`. The final archive is returned.
pub fn run_with_rng<P: MoeaProblem + ?Sized>(
    problem: &P,
    config: &MoeaConfig,
    eps: EpsilonSpec,
    rng: ChaCha8Rng,
    seeds: &[Vec<f64>],
) -> Result<ParetoArchive, MoeaError> {
    let mut state = MoeaRun::initialize(problem, *config, eps, rng, seeds)?;
    for _ in 0..config.iterations {
        state.step()?;
    }
    debug_assert_eq!(
        state.evaluations(),
        config.population_size as u64 + config.iterations
    );
    Ok(state.into_archive())
}

/// Like [`run_with_rng`] but seeding the generator from `config.seed`.
pub fn run<P: MoeaProblem + ?Sized>(
    problem: &P,
    config: &MoeaConfig,
    eps: EpsilonSpec,
    seeds: &[Vec<f64>],
) -> Result<ParetoArchive, MoeaError> {
    run_with_rng(
        problem,
        config,
        eps,
        ChaCha8Rng::seed_from_u64(config.seed),
        seeds,
    )
}
