//! Sequential Monte Carlo approximate Bayesian computation.
//!
//! A population of weighted parameter vectors (particles) is moved towards
//! the approximate posterior through a decreasing sequence of tolerances.
//! Each iteration resamples the previous population, perturbs the selected
//! particles with a Gaussian kernel and keeps a perturbed vector once a
//! simulation from it lands within the current tolerance of the data.
//!
//! Every particle slot owns a random stream derived from the root seed, the
//! iteration and the slot index, so the output does not depend on whether
//! slots run sequentially or on a thread pool.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use thiserror::Error;

use crate::graph::{EvolvingGraph, Snapshot};
use crate::matching::{temporal_objective, MatchParams};
use crate::sim::{self, SimConfig, SimError, Theta, Trajectory};
use crate::{math, rng};

/// Smallest normalising mass accepted for a truncated distribution.
const MIN_TRUNCATED_MASS: f64 = 1e-9;
/// Rejection draws allowed before a truncated sampler gives up.
const MAX_TRUNCATION_DRAWS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbcError {
    #[error("invalid prior for parameter {index}: {reason}")]
    InvalidPrior { index: usize, reason: &'static str },
    #[error("invalid ABC config: {0}")]
    InvalidConfig(&'static str),
    #[error("parameter vector has length {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("kernel density vanishes at an accepted particle")]
    ZeroWeight,
    #[error("weights must be positive and finite")]
    InvalidWeights,
    #[error("truncation region has too little mass to sample")]
    EmptyTruncation,
    #[error("iteration {iteration}: particle slot {slot} exhausted its attempt budget")]
    BudgetExhausted {
        iteration: usize,
        slot: usize,
        diagnostics: Vec<IterationDiagnostics>,
        population: Vec<Particle>,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Prior for one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamPrior {
    /// Normal restricted to `[lo, hi]`.
    TruncatedNormal {
        mean: f64,
        sd: f64,
        lo: f64,
        hi: f64,
    },
    /// Normal rounded to the nearest integer, restricted to `[lo, hi]`.
    TruncatedDiscreteNormal {
        mean: f64,
        sd: f64,
        lo: f64,
        hi: f64,
    },
    /// Gamma given by its mean and standard deviation.
    Gamma {
        mean: f64,
        sd: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
}

impl ParamPrior {
    pub fn validate(&self) -> Result<(), &'static str> {
        let finite = |x: f64| x.is_finite();
        match *self {
            Self::TruncatedNormal { mean, sd, lo, hi }
            | Self::TruncatedDiscreteNormal { mean, sd, lo, hi } => {
                if !(finite(mean) && sd > 0.0 && finite(sd)) {
                    return Err("need finite mean and positive sd");
                }
                if !(lo <= hi) {
                    return Err("need lo <= hi");
                }
                if !(self.truncated_mass() >= MIN_TRUNCATED_MASS) {
                    return Err("truncation region is empty");
                }
            }
            Self::Gamma { mean, sd } => {
                if !(mean > 0.0 && sd > 0.0 && finite(mean) && finite(sd)) {
                    return Err("gamma needs positive mean and sd");
                }
            }
            Self::Uniform { lo, hi } => {
                if !(finite(lo) && finite(hi) && lo < hi) {
                    return Err("uniform needs finite lo < hi");
                }
            }
        }
        Ok(())
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Self::TruncatedDiscreteNormal { .. })
    }

    /// Mean and sd as given, or of the uniform.
    pub fn nominal_moments(&self) -> (f64, f64) {
        match *self {
            Self::TruncatedNormal { mean, sd, .. }
            | Self::TruncatedDiscreteNormal { mean, sd, .. }
            | Self::Gamma { mean, sd } => (mean, sd),
            Self::Uniform { lo, hi } => (0.5 * (lo + hi), (hi - lo) / math::sqrt(12.0)),
        }
    }

    fn truncated_mass(&self) -> f64 {
        match *self {
            Self::TruncatedNormal { mean, sd, lo, hi } => {
                math::norm_cdf((hi - mean) / sd) - math::norm_cdf((lo - mean) / sd)
            }
            Self::TruncatedDiscreteNormal { mean, sd, lo, hi } => {
                let (lo, hi) = (libm::ceil(lo), libm::floor(hi));
                if lo > hi {
                    return 0.0;
                }
                math::norm_cdf((hi + 0.5 - mean) / sd) - math::norm_cdf((lo - 0.5 - mean) / sd)
            }
            _ => 1.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, AbcError> {
        match *self {
            Self::TruncatedNormal { mean, sd, lo, hi } => truncated(
                rng,
                |r| mean + sd * r.sample::<f64, _>(StandardNormal),
                lo,
                hi,
            ),
            Self::TruncatedDiscreteNormal { mean, sd, lo, hi } => truncated(
                rng,
                |r| math::round(mean + sd * r.sample::<f64, _>(StandardNormal)),
                lo,
                hi,
            ),
            Self::Gamma { mean, sd } => {
                let (shape, scale) = gamma_shape_scale(mean, sd);
                let dist = Gamma::new(shape, scale).map_err(|_| AbcError::InvalidPrior {
                    index: 0,
                    reason: "gamma needs positive mean and sd",
                })?;
                Ok(dist.sample(rng))
            }
            Self::Uniform { lo, hi } => Ok(rng.random_range(lo..hi)),
        }
    }

    /// Density (probability mass for the discrete variant) at `x`.
    pub fn density(&self, x: f64) -> f64 {
        if !x.is_finite() {
            return 0.0;
        }
        match *self {
            Self::TruncatedNormal { mean, sd, lo, hi } => {
                if x < lo || x > hi {
                    return 0.0;
                }
                math::norm_pdf((x - mean) / sd) / sd / self.truncated_mass()
            }
            Self::TruncatedDiscreteNormal { mean, sd, lo, hi } => {
                if x < lo || x > hi || math::round(x) != x {
                    return 0.0;
                }
                discrete_normal_mass(x - mean, sd) / self.truncated_mass()
            }
            Self::Gamma { mean, sd } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let (k, theta) = gamma_shape_scale(mean, sd);
                math::exp(
                    (k - 1.0) * math::ln(x) - x / theta - math::lgamma(k) - k * math::ln(theta),
                )
            }
            Self::Uniform { lo, hi } => {
                if x < lo || x >= hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
        }
    }
}

fn gamma_shape_scale(mean: f64, sd: f64) -> (f64, f64) {
    let shape = (mean / sd) * (mean / sd);
    (shape, sd * sd / mean)
}

/// Probability that `round(N(0, sd))` equals the integer `k`.
fn discrete_normal_mass(k: f64, sd: f64) -> f64 {
    math::norm_cdf((k + 0.5) / sd) - math::norm_cdf((k - 0.5) / sd)
}

fn truncated<R: Rng + ?Sized>(
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> f64,
    lo: f64,
    hi: f64,
) -> Result<f64, AbcError> {
    for _ in 0..MAX_TRUNCATION_DRAWS {
        let x = draw(rng);
        if x >= lo && x <= hi {
            return Ok(x);
        }
    }
    Err(AbcError::EmptyTruncation)
}

/// Independent priors, one per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorSpec {
    pub params: Vec<ParamPrior>,
}

impl PriorSpec {
    pub fn new(params: Vec<ParamPrior>) -> Result<Self, AbcError> {
        let spec = Self { params };
        spec.validate()?;
        Ok(spec)
    }

    /// Priors of the toy experiment for `[|I0|, alpha, gamma, beta, lambda,
    /// sigma]` with the given means and sds.
    pub fn epidemic(mean: [f64; 6], sd: [f64; 6]) -> Result<Self, AbcError> {
        Self::new(alloc::vec![
            ParamPrior::TruncatedDiscreteNormal {
                mean: mean[0],
                sd: sd[0],
                lo: 0.0,
                hi: 1500.0
            },
            ParamPrior::TruncatedNormal {
                mean: mean[1],
                sd: sd[1],
                lo: 0.0,
                hi: 1.0
            },
            ParamPrior::Gamma {
                mean: mean[2],
                sd: sd[2]
            },
            ParamPrior::Gamma {
                mean: mean[3],
                sd: sd[3]
            },
            ParamPrior::Gamma {
                mean: mean[4],
                sd: sd[4]
            },
            ParamPrior::TruncatedNormal {
                mean: mean[5],
                sd: sd[5],
                lo: 0.0,
                hi: 1.0
            },
        ])
    }

    /// Means `[100, 0.9, 0.001, 0.001, 0.1, 0.005]`, sds one tenth of them.
    pub fn toy() -> Self {
        let mean = [100.0, 0.9, 0.001, 0.001, 0.1, 0.005];
        Self::epidemic(mean, mean.map(|m| m / 10.0)).expect("toy prior is valid")
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn validate(&self) -> Result<(), AbcError> {
        if self.params.is_empty() {
            return Err(AbcError::InvalidConfig("prior has no parameters"));
        }
        for (index, p) in self.params.iter().enumerate() {
            p.validate()
                .map_err(|reason| AbcError::InvalidPrior { index, reason })?;
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>, AbcError> {
        self.params.iter().map(|p| p.sample(rng)).collect()
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        if x.len() != self.params.len() {
            return 0.0;
        }
        self.params
            .iter()
            .zip(x)
            .map(|(p, &v)| p.density(v))
            .product()
    }

    pub fn discrete_mask(&self) -> Vec<bool> {
        self.params.iter().map(ParamPrior::is_discrete).collect()
    }
}

/// Perturbation of one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelComponent {
    Normal {
        sd: f64,
    },
    /// Normal increment rounded to the nearest integer.
    DiscreteNormal {
        sd: f64,
    },
}

/// Independent per-coordinate perturbation kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub components: Vec<KernelComponent>,
}

impl KernelSpec {
    /// Kernel whose sds are `scale` times the weighted sds of `population`,
    /// floored at `floor`.
    pub fn from_population(
        population: &[Particle],
        discrete: &[bool],
        scale: f64,
        floor: f64,
    ) -> Self {
        let (_, sd) = posterior_summary(population);
        let components = sd
            .iter()
            .zip(discrete)
            .map(|(&s, &d)| {
                let sd = (scale * s).max(floor);
                if d {
                    KernelComponent::DiscreteNormal { sd }
                } else {
                    KernelComponent::Normal { sd }
                }
            })
            .collect();
        Self { components }
    }

    pub fn perturb<R: Rng + ?Sized>(&self, from: &[f64], rng: &mut R) -> Vec<f64> {
        self.components
            .iter()
            .zip(from)
            .map(|(c, &x)| match *c {
                KernelComponent::Normal { sd } => x + sd * rng.sample::<f64, _>(StandardNormal),
                KernelComponent::DiscreteNormal { sd } => {
                    x + math::round(sd * rng.sample::<f64, _>(StandardNormal))
                }
            })
            .collect()
    }

    /// Density of moving from `from` to `to`.
    pub fn density(&self, from: &[f64], to: &[f64]) -> f64 {
        self.components
            .iter()
            .zip(from.iter().zip(to))
            .map(|(c, (&a, &b))| match *c {
                KernelComponent::Normal { sd } => math::norm_pdf((b - a) / sd) / sd,
                KernelComponent::DiscreteNormal { sd } => {
                    let k = b - a;
                    if math::round(k) != k {
                        0.0
                    } else {
                        discrete_normal_mass(k, sd)
                    }
                }
            })
            .product()
    }
}

/// Weighted parameter vector together with the distance that accepted it.
#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub params: Vec<f64>,
    pub weight: f64,
    pub distance: f64,
}

impl Particle {
    /// Interprets the parameters as epidemic parameters.
    pub fn theta(&self) -> Result<Theta, SimError> {
        Theta::from_slice(&self.params)
    }
}

/// Unnormalised importance weight of `theta` at `iteration`; 1 at
/// iteration 0, else prior density over the kernel mixture density of the
/// previous population.
pub fn compute_weight(
    iteration: usize,
    theta: &[f64],
    previous: &[Particle],
    prior: &PriorSpec,
    kernel: &KernelSpec,
) -> Result<f64, AbcError> {
    if iteration == 0 {
        return Ok(1.0);
    }
    if previous.is_empty() {
        return Err(AbcError::InvalidConfig("previous population is empty"));
    }
    let denominator: f64 = previous
        .iter()
        .map(|p| p.weight * kernel.density(&p.params, theta))
        .sum();
    if !(denominator > 0.0) || !denominator.is_finite() {
        return Err(AbcError::ZeroWeight);
    }
    Ok(prior.density(theta) / denominator)
}

/// Index drawn with probability proportional to `weights`.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize, AbcError> {
    let total: f64 = weights.iter().sum();
    if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0)) || !(total > 0.0) {
        return Err(AbcError::InvalidWeights);
    }
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return Ok(i);
        }
        u -= w;
    }
    // rounding left u slightly above the last positive weight
    Ok(weights.iter().rposition(|&w| w > 0.0).unwrap_or(0))
}

/// `population.len()` draws with replacement proportional to weight.
pub fn resample<R: Rng + ?Sized>(
    population: &[Particle],
    rng: &mut R,
) -> Result<Vec<Vec<f64>>, AbcError> {
    let weights: Vec<f64> = population.iter().map(|p| p.weight).collect();
    (0..population.len())
        .map(|_| sample_index(&weights, rng).map(|i| population[i].params.clone()))
        .collect()
}

/// Weighted per-coordinate mean and standard deviation.
pub fn posterior_summary(population: &[Particle]) -> (Vec<f64>, Vec<f64>) {
    let Some(first) = population.first() else {
        return (Vec::new(), Vec::new());
    };
    let dim = first.params.len();
    let total: f64 = population.iter().map(|p| p.weight).sum();
    let mut mean = alloc::vec![0.0; dim];
    for p in population {
        for (m, x) in mean.iter_mut().zip(&p.params) {
            *m += p.weight / total * x;
        }
    }
    let mut var = alloc::vec![0.0; dim];
    for p in population {
        for ((v, x), m) in var.iter_mut().zip(&p.params).zip(&mean) {
            *v += p.weight / total * (x - m) * (x - m);
        }
    }
    (mean, var.into_iter().map(math::sqrt).collect())
}

/// Distance between data simulated from `params` and the observations.
/// `None` when the simulation has no defined summary.
pub trait Discrepancy {
    fn discrepancy(&self, params: &[f64], seed: u64) -> Option<f64>;
}

impl<F: Fn(&[f64], u64) -> Option<f64>> Discrepancy for F {
    fn discrepancy(&self, params: &[f64], seed: u64) -> Option<f64> {
        self(params, seed)
    }
}

/// The epidemic simulator scored by time-weighted graph matching against an
/// observed snapshot sequence.
#[derive(Clone, Debug)]
pub struct EpidemicModel {
    /// Simulation settings; `seed` is replaced per attempt and
    /// `snapshot_days` must match the observations.
    pub sim: SimConfig,
    pub observed: Vec<Snapshot>,
    pub matching: MatchParams,
    pub omega: f64,
    /// Detected network the simulated epidemics start from, at
    /// `sim.start_day`.
    pub seed_network: Option<Snapshot>,
}

impl EpidemicModel {
    pub fn new(
        sim: SimConfig,
        observed: Vec<Snapshot>,
        matching: MatchParams,
        omega: f64,
    ) -> Result<Self, AbcError> {
        let model = Self {
            sim,
            observed,
            matching,
            omega,
            seed_network: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_seed_network(mut self, network: Snapshot) -> Self {
        self.seed_network = Some(network);
        self
    }

    pub fn validate(&self) -> Result<(), AbcError> {
        self.sim.validate()?;
        if self.observed.is_empty() {
            return Err(AbcError::InvalidConfig("no observed snapshots"));
        }
        if self.observed.len() != self.sim.snapshot_days.len() {
            return Err(AbcError::InvalidConfig(
                "observed snapshots and snapshot days differ in number",
            ));
        }
        if self.matching.validate().is_err() {
            return Err(AbcError::InvalidConfig("invalid matching parameters"));
        }
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(AbcError::InvalidConfig("omega must lie in (0, 1]"));
        }
        Ok(())
    }

    /// One simulation from `params` with the given seed. `Ok(None)` when the
    /// parameters are outside the model's domain.
    pub fn simulate(&self, params: &[f64], seed: u64) -> Result<Option<Trajectory>, SimError> {
        let Ok(theta) = Theta::from_slice(params) else {
            return Ok(None);
        };
        let mut config = self.sim.clone();
        config.seed = seed;
        let mut rng = rng::stream(seed, 0);
        let initial = match &self.seed_network {
            Some(net) => {
                let pop = config.population_params(theta.n_initial_infected);
                match EvolvingGraph::seeded(net, &pop, config.start_day, &mut rng) {
                    Ok(g) => Some(g),
                    Err(_) => return Ok(None),
                }
            }
            None if theta.n_initial_infected > config.population => return Ok(None),
            None => None,
        };
        sim::run_with(&theta, &config, initial, &mut rng).map(Some)
    }

    /// Whether a trajectory has a defined summary relative to the data.
    pub fn is_defined(&self, traj: &Trajectory) -> bool {
        let first = self.sim.snapshot_days[0];
        if traj.graph.infective().is_empty() && traj.final_day < first {
            return false;
        }
        !traj
            .snapshots
            .iter()
            .zip(&self.observed)
            .any(|(sim, obs)| sim.vertices.is_empty() && !obs.vertices.is_empty())
    }
}

impl Discrepancy for EpidemicModel {
    fn discrepancy(&self, params: &[f64], seed: u64) -> Option<f64> {
        let traj = self.simulate(params, seed).ok()??;
        if !self.is_defined(&traj) {
            return None;
        }
        temporal_objective(&self.observed, &traj.snapshots, self.omega, &self.matching)
            .ok()
            .map(|m| m.value)
            .filter(|d| d.is_finite())
    }
}

/// How a particle slot picks the ancestor it perturbs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncestorPolicy {
    /// Draw a new ancestor for every attempt. Accepted particles then follow
    /// the kernel mixture the importance weights assume.
    PerAttempt,
    /// Keep perturbing one ancestor for up to `max_sim_attempts` attempts
    /// before drawing another. Faster when acceptance is rare, but
    /// over-represents ancestors whose neighbourhood rarely accepts.
    Sticky,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbcConfig {
    pub n_particles: usize,
    /// Tolerance of the first iteration.
    pub epsilon_initial: f64,
    /// The run stops after an iteration whose accepted distances are all
    /// below this value.
    pub stop_threshold: f64,
    pub ancestor_policy: AncestorPolicy,
    /// Attempts per ancestor before a new one is drawn, for
    /// [`AncestorPolicy::Sticky`].
    pub max_sim_attempts: usize,
    /// Attempts allowed per particle slot and iteration; `None` means
    /// `20 * max_sim_attempts`.
    pub attempt_budget: Option<usize>,
    pub max_iterations: usize,
    /// Kernel sd as a fraction of the previous population's sd.
    pub kernel_scale: f64,
    pub sd_floor: f64,
}

impl Default for AbcConfig {
    fn default() -> Self {
        Self {
            n_particles: 50,
            epsilon_initial: 0.8,
            stop_threshold: 0.3,
            ancestor_policy: AncestorPolicy::PerAttempt,
            max_sim_attempts: 100,
            attempt_budget: None,
            max_iterations: 30,
            kernel_scale: 0.2,
            sd_floor: 1e-8,
        }
    }
}

impl AbcConfig {
    pub fn validate(&self) -> Result<(), AbcError> {
        let fail = |m| Err(AbcError::InvalidConfig(m));
        if self.n_particles == 0 {
            return fail("n_particles must be at least 1");
        }
        if !(self.stop_threshold > 0.0 && self.epsilon_initial > self.stop_threshold) {
            return fail("need epsilon_initial > stop_threshold > 0");
        }
        if self.max_sim_attempts == 0 || self.attempt_budget == Some(0) {
            return fail("attempt limits must be at least 1");
        }
        if self.max_iterations == 0 {
            return fail("max_iterations must be at least 1");
        }
        if !(self.kernel_scale > 0.0 && self.sd_floor > 0.0) {
            return fail("kernel_scale and sd_floor must be positive");
        }
        Ok(())
    }

    pub fn slot_budget(&self) -> usize {
        self.attempt_budget.unwrap_or(20 * self.max_sim_attempts)
    }
}

/// Summary of one completed iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationDiagnostics {
    pub iteration: usize,
    pub epsilon: f64,
    /// Simulations run, accepted or not.
    pub attempts: usize,
    /// Simulations with an undefined summary.
    pub undefined: usize,
    pub acceptance_rate: f64,
    pub mean_distance: f64,
    pub max_distance: f64,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbcOutcome {
    /// Final population; weights sum to 1.
    pub population: Vec<Particle>,
    pub diagnostics: Vec<IterationDiagnostics>,
    /// Whether the stop threshold was reached before `max_iterations`.
    pub converged: bool,
}

struct SlotResult {
    params: Vec<f64>,
    distance: f64,
    attempts: usize,
    undefined: usize,
}

/// Previous population and the kernel used to move it.
struct Proposal<'a> {
    population: &'a [Particle],
    weights: Vec<f64>,
    kernel: KernelSpec,
}

fn fill_slot<M: Discrepancy + ?Sized>(
    slot: usize,
    iteration: usize,
    epsilon: f64,
    prior: &PriorSpec,
    proposal: Option<&Proposal<'_>>,
    config: &AbcConfig,
    model: &M,
    seed: u64,
) -> Result<Result<SlotResult, usize>, AbcError> {
    let stream = rng::stream_id(iteration as u32, slot as u32 + 1);
    let mut rng = rng::stream(seed, stream);
    let budget = config.slot_budget();
    let (mut attempts, mut undefined) = (0, 0);
    let mut ancestor: Option<usize> = None;
    let mut since_ancestor = 0;
    while attempts < budget {
        let candidate = match proposal {
            None => prior.sample(&mut rng)?,
            Some(prop) => {
                let limit = match config.ancestor_policy {
                    AncestorPolicy::PerAttempt => 1,
                    AncestorPolicy::Sticky => config.max_sim_attempts,
                };
                if ancestor.is_none() || since_ancestor >= limit {
                    ancestor = Some(sample_index(&prop.weights, &mut rng)?);
                    since_ancestor = 0;
                }
                let from = &prop.population[ancestor.unwrap_or(0)].params;
                let mut candidate = prop.kernel.perturb(from, &mut rng);
                let mut redraws = 0;
                while !(prior.density(&candidate) > 0.0) {
                    redraws += 1;
                    if redraws > MAX_TRUNCATION_DRAWS {
                        return Err(AbcError::EmptyTruncation);
                    }
                    candidate = prop.kernel.perturb(from, &mut rng);
                }
                since_ancestor += 1;
                candidate
            }
        };
        attempts += 1;
        let sim_seed: u64 = rng.random();
        match model.discrepancy(&candidate, sim_seed) {
            Some(d) if d < epsilon => {
                return Ok(Ok(SlotResult {
                    params: candidate,
                    distance: d,
                    attempts,
                    undefined,
                }))
            }
            Some(_) => {}
            None => undefined += 1,
        }
    }
    Ok(Err(slot))
}

fn fill_population<M: Discrepancy + Sync + ?Sized>(
    iteration: usize,
    epsilon: f64,
    prior: &PriorSpec,
    proposal: Option<&Proposal<'_>>,
    config: &AbcConfig,
    model: &M,
    seed: u64,
) -> Result<Vec<Result<SlotResult, usize>>, AbcError> {
    let run = |slot: usize| {
        fill_slot(
            slot, iteration, epsilon, prior, proposal, config, model, seed,
        )
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..config.n_particles).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..config.n_particles).map(run).collect()
    }
}

/// Runs ABC-SMC until every accepted distance of an iteration is below
/// `config.stop_threshold`, or `config.max_iterations` iterations are done.
pub fn abc_smc<M: Discrepancy + Sync + ?Sized>(
    prior: &PriorSpec,
    config: &AbcConfig,
    model: &M,
    seed: u64,
) -> Result<AbcOutcome, AbcError> {
    prior.validate()?;
    config.validate()?;
    let discrete = prior.discrete_mask();
    let mut population: Vec<Particle> = Vec::new();
    let mut diagnostics: Vec<IterationDiagnostics> = Vec::new();
    let mut epsilon = config.epsilon_initial;
    for iteration in 0..config.max_iterations {
        let proposal = (iteration > 0).then(|| Proposal {
            population: &population,
            weights: population.iter().map(|p| p.weight).collect(),
            kernel: KernelSpec::from_population(
                &population,
                &discrete,
                config.kernel_scale,
                config.sd_floor,
            ),
        });
        let results = fill_population(
            iteration,
            epsilon,
            prior,
            proposal.as_ref(),
            config,
            model,
            seed,
        )?;
        let mut accepted = Vec::with_capacity(results.len());
        for r in results {
            match r {
                Ok(s) => accepted.push(s),
                Err(slot) => {
                    return Err(AbcError::BudgetExhausted {
                        iteration,
                        slot,
                        diagnostics,
                        population,
                    })
                }
            }
        }
        let mut next = Vec::with_capacity(accepted.len());
        for s in &accepted {
            let weight = match &proposal {
                None => 1.0,
                Some(p) => compute_weight(iteration, &s.params, p.population, prior, &p.kernel)?,
            };
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(AbcError::ZeroWeight);
            }
            next.push(Particle {
                params: s.params.clone(),
                weight,
                distance: s.distance,
            });
        }
        let total: f64 = next.iter().map(|p| p.weight).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(AbcError::InvalidWeights);
        }
        next.iter_mut().for_each(|p| p.weight /= total);
        drop(proposal);
        population = next;

        let n = population.len() as f64;
        let attempts: usize = accepted.iter().map(|s| s.attempts).sum();
        let undefined: usize = accepted.iter().map(|s| s.undefined).sum();
        let mean_distance = population.iter().map(|p| p.distance).sum::<f64>() / n;
        let max_distance = population
            .iter()
            .map(|p| p.distance)
            .fold(f64::NEG_INFINITY, f64::max);
        let (mean, sd) = posterior_summary(&population);
        diagnostics.push(IterationDiagnostics {
            iteration,
            epsilon,
            attempts,
            undefined,
            acceptance_rate: n / attempts as f64,
            mean_distance,
            max_distance,
            mean,
            sd,
        });
        if max_distance < config.stop_threshold {
            return Ok(AbcOutcome {
                population,
                diagnostics,
                converged: true,
            });
        }
        epsilon = mean_distance;
    }
    Ok(AbcOutcome {
        population,
        diagnostics,
        converged: false,
    })
}

/// Stream seed for the `index`-th resimulation of an accepted particle.
pub fn resimulation_seed(seed: u64, index: usize) -> u64 {
    rng::stream_id(u32::MAX, index as u32) ^ seed.rotate_left(17)
}
