//! Event-driven simulation of contacts, infections and detections.
//!
//! The total event rate is bounded from above by a constant that holds until
//! the next accepted event; candidate event times are drawn from that bound
//! and accepted in proportion to the exact rates at the candidate time
//! (thinning). Rejected candidates are `Null` events: time advances, nothing
//! else changes.
//!
//! Only infective individuals initiate contacts, so the cost of a step is
//! proportional to the number of infectives and their degrees, not to the
//! population size.

use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::graph::{
    DetectionType, EvolvingGraph, Gender, GraphError, PopulationParams, Snapshot, State, VertexId,
    VertexLabel,
};
use crate::{math, rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} is not infective")]
    NotInfective(VertexId),
    #[error("vertex {0} has no compatible partner")]
    NoCompatiblePartner(VertexId),
    #[error("parameter `{name}` = {value} is out of range")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(&'static str),
}

/// Model parameters `[|I0|, alpha, gamma, beta, lambda, sigma]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theta {
    /// Initial number of infectives.
    pub n_initial_infected: usize,
    /// Probability of re-contacting the previous partner.
    pub alpha: f64,
    /// Random detection rate per infective per day.
    pub gamma: f64,
    /// Detection rate per day per traced detected partner.
    pub beta: f64,
    /// Contact rate per infective per day.
    pub lambda: f64,
    /// Infection probability per contact.
    pub sigma: f64,
}

impl Theta {
    pub const DIM: usize = 6;
    pub const NAMES: [&'static str; 6] = [
        "n_initial_infected",
        "alpha",
        "gamma",
        "beta",
        "lambda",
        "sigma",
    ];

    /// Parameters of the toy epidemic used throughout the tests.
    pub fn toy() -> Self {
        Self {
            n_initial_infected: 100,
            alpha: 0.9,
            gamma: 0.001,
            beta: 0.001,
            lambda: 0.1,
            sigma: 0.005,
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.n_initial_infected as f64,
            self.alpha,
            self.gamma,
            self.beta,
            self.lambda,
            self.sigma,
        ]
    }

    /// Inverse of [`Theta::to_array`]; the first coordinate is rounded.
    pub fn from_slice(values: &[f64]) -> Result<Self, SimError> {
        if values.len() != Self::DIM {
            return Err(SimError::InvalidConfig(
                "parameter vector must have 6 entries",
            ));
        }
        let n = math::round(values[0]);
        if !(n >= 0.0) || !n.is_finite() {
            return Err(SimError::InvalidParameter {
                name: Self::NAMES[0],
                value: values[0],
            });
        }
        let theta = Self {
            n_initial_infected: n as usize,
            alpha: values[1],
            gamma: values[2],
            beta: values[3],
            lambda: values[4],
            sigma: values[5],
        };
        theta.validate()?;
        Ok(theta)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let checks = [
            ("alpha", self.alpha, true),
            ("gamma", self.gamma, false),
            ("beta", self.beta, false),
            ("lambda", self.lambda, false),
            ("sigma", self.sigma, true),
        ];
        for (name, value, unit) in checks {
            let ok = value.is_finite() && value >= 0.0 && (!unit || value <= 1.0);
            if !ok {
                return Err(SimError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

/// Structural settings of a simulation run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Population size `M`.
    pub population: usize,
    /// Last simulated day `T` (absolute).
    pub horizon: f64,
    /// Day at which the run starts; non-zero when seeding from observed data.
    pub start_day: f64,
    /// Weight of hidden versus observed degree in partner choice.
    pub tau: f64,
    /// Contact-tracing window: detected partners count between `eta1` and
    /// `eta2` days after their detection.
    pub eta1: f64,
    pub eta2: f64,
    pub snapshot_days: Vec<f64>,
    pub degree_exponent: f64,
    pub female_frac: f64,
    pub bisexual_frac: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            population: 5000,
            horizon: 1000.0,
            start_day: 0.0,
            tau: 0.5,
            eta1: 720.0,
            eta2: 180.0,
            snapshot_days: subdivision(0.0, 1000.0, 10),
            degree_exponent: 2.0,
            female_frac: 0.5,
            bisexual_frac: 0.05,
            seed: 0,
        }
    }
}

/// `intervals + 1` equally spaced days from `start` to `end`.
pub fn subdivision(start: f64, end: f64, intervals: usize) -> Vec<f64> {
    if intervals == 0 {
        return alloc::vec![end];
    }
    (0..=intervals)
        .map(|k| start + (end - start) * k as f64 / intervals as f64)
        .collect()
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg| Err(SimError::InvalidConfig(msg));
        if self.population == 0 {
            return fail("population must be positive");
        }
        if !(self.start_day >= 0.0) || !(self.horizon >= self.start_day) {
            return fail("need 0 <= start_day <= horizon");
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return fail("tau must lie in [0, 1]");
        }
        if !(self.eta2 >= 0.0 && self.eta1 > self.eta2) {
            return fail("need eta1 > eta2 >= 0");
        }
        if self.snapshot_days.windows(2).any(|w| !(w[0] < w[1])) {
            return fail("snapshot days must be strictly increasing");
        }
        if self
            .snapshot_days
            .iter()
            .any(|&d| !(d >= self.start_day && d <= self.horizon))
        {
            return fail("snapshot days must lie within [start_day, horizon]");
        }
        Ok(())
    }

    pub fn population_params(&self, n_initial_infected: usize) -> PopulationParams {
        PopulationParams {
            size: self.population,
            degree_exponent: self.degree_exponent,
            female_frac: self.female_frac,
            bisexual_frac: self.bisexual_frac,
            n_initial_infected,
        }
    }

    pub fn window(&self) -> TracingWindow {
        TracingWindow {
            eta1: self.eta1,
            eta2: self.eta2,
        }
    }
}

/// Closed window `[day - eta1, day - eta2]` of detection times that exert
/// tracing pressure on day `day`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracingWindow {
    pub eta1: f64,
    pub eta2: f64,
}

impl TracingWindow {
    pub fn contains(&self, detection_time: f64, day: f64) -> bool {
        detection_time >= day - self.eta1 && detection_time <= day - self.eta2
    }
}

/// Rate functionals of the general model. All rates are per day and depend
/// only on labels, so they are constant between events.
pub trait Rates {
    /// Rate at which infective `v` initiates contacts.
    fn contact_rate(&self, v: &VertexLabel) -> f64;
    /// Probability that a contact from `source` infects `target`.
    fn infection_probability(&self, source: &VertexLabel, target: &VertexLabel) -> f64;
    /// Spontaneous detection rate of infective `v`.
    fn random_detection_rate(&self, v: &VertexLabel) -> f64;
    /// Pressure on infective `v` from a detected partner inside the window.
    fn tracing_rate(&self, detected: &VertexLabel, v: &VertexLabel) -> f64;
}

/// Constant rates of the HIV specialisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HivRates {
    pub lambda: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl From<&Theta> for HivRates {
    fn from(theta: &Theta) -> Self {
        Self {
            lambda: theta.lambda,
            sigma: theta.sigma,
            gamma: theta.gamma,
            beta: theta.beta,
        }
    }
}

impl Rates for HivRates {
    fn contact_rate(&self, _: &VertexLabel) -> f64 {
        self.lambda
    }

    fn infection_probability(&self, source: &VertexLabel, target: &VertexLabel) -> f64 {
        if source.gender == Gender::Female && target.gender == Gender::Female {
            0.0
        } else {
            self.sigma
        }
    }

    fn random_detection_rate(&self, _: &VertexLabel) -> f64 {
        self.gamma
    }

    fn tracing_rate(&self, _: &VertexLabel, _: &VertexLabel) -> f64 {
        self.beta
    }
}

/// Detection rate of infective `v` on `day`, split as (random, traced).
pub fn detection_rate_parts<R: Rates>(
    graph: &EvolvingGraph,
    v: VertexId,
    day: f64,
    rates: &R,
    window: TracingWindow,
) -> Result<(f64, f64), SimError> {
    if v >= graph.len() || graph.label(v).state != State::Infective {
        return Err(SimError::NotInfective(v));
    }
    Ok(detection_parts_unchecked(graph, v, day, rates, window))
}

fn detection_parts_unchecked<R: Rates>(
    graph: &EvolvingGraph,
    v: VertexId,
    day: f64,
    rates: &R,
    window: TracingWindow,
) -> (f64, f64) {
    let label = graph.label(v);
    let traced = graph
        .neighbours(v)
        .iter()
        .map(|&u| graph.label(u))
        .filter(|n| matches!(n.detection_time, Some(t) if window.contains(t, day)))
        .map(|n| rates.tracing_rate(n, label))
        .sum();
    (rates.random_detection_rate(label), traced)
}

/// `gamma + beta * #{detected partners inside the tracing window}`.
pub fn detection_rate<R: Rates>(
    graph: &EvolvingGraph,
    v: VertexId,
    day: f64,
    rates: &R,
    window: TracingWindow,
) -> Result<f64, SimError> {
    detection_rate_parts(graph, v, day, rates, window).map(|(r, t)| r + t)
}

/// Upper bound on the total event rate that holds until the state changes.
/// Every detected partner is counted, inside the window or not.
pub fn rate_bound<R: Rates>(graph: &EvolvingGraph, rates: &R) -> f64 {
    graph
        .infective()
        .iter()
        .map(|&v| {
            let label = graph.label(v);
            let tracing: f64 = graph
                .neighbours(v)
                .iter()
                .map(|&u| graph.label(u))
                .filter(|n| n.is_removed())
                .map(|n| rates.tracing_rate(n, label))
                .sum();
            rates.contact_rate(label) + rates.random_detection_rate(label) + tracing
        })
        .sum()
}

/// Exact total event rate at `day` (contacts plus windowed detections).
pub fn exact_total_rate<R: Rates>(
    graph: &EvolvingGraph,
    rates: &R,
    window: TracingWindow,
    day: f64,
) -> f64 {
    graph
        .infective()
        .iter()
        .map(|&v| {
            let (r, t) = detection_parts_unchecked(graph, v, day, rates, window);
            rates.contact_rate(graph.label(v)) + r + t
        })
        .sum()
}

/// Partner for a contact initiated by `v`.
///
/// With probability `alpha` the last partner is contacted again, provided
/// there is one and it is not removed. Otherwise a new partner is drawn among
/// non-removed compatible individuals, excluding `v` and its last partner,
/// with probability proportional to `(1 - tau) d + tau d_h`. If all these
/// weights vanish the draw is uniform.
pub fn choose_partner<G: Rng + ?Sized>(
    graph: &EvolvingGraph,
    v: VertexId,
    alpha: f64,
    tau: f64,
    rng: &mut G,
) -> Result<VertexId, SimError> {
    let last = graph.last_partner(v);
    if let Some(p) = last {
        if !graph.label(p).is_removed() && rng.random::<f64>() < alpha {
            return Ok(p);
        }
    }
    let me = graph.label(v);
    let eligible = |u: VertexId| {
        u != v && Some(u) != last && {
            let l = graph.label(u);
            !l.is_removed() && me.is_compatible(l)
        }
    };
    let weight = |u: VertexId| {
        (1.0 - tau) * graph.degree(u) as f64 + tau * f64::from(graph.label(u).hidden_degree)
    };

    let mut total = 0.0;
    let mut count = 0usize;
    for u in (0..graph.len()).filter(|&u| eligible(u)) {
        total += weight(u);
        count += 1;
    }
    if count == 0 {
        return Err(SimError::NoCompatiblePartner(v));
    }
    let uniform = !(total > 0.0);
    let mut target = rng.random::<f64>() * if uniform { count as f64 } else { total };
    let mut fallback = v;
    for u in (0..graph.len()).filter(|&u| eligible(u)) {
        let w = if uniform { 1.0 } else { weight(u) };
        if w > 0.0 {
            if target < w {
                return Ok(u);
            }
            fallback = u;
        }
        target -= w;
    }
    // rounding left the target past the last positive weight
    Ok(fallback)
}

/// Bernoulli(`sigma`) transmission; women never infect women.
pub fn infection_occurs<G: Rng + ?Sized>(
    source: &VertexLabel,
    target: &VertexLabel,
    sigma: f64,
    rng: &mut G,
) -> bool {
    if source.gender == Gender::Female && target.gender == Gender::Female {
        return false;
    }
    rng.random::<f64>() < sigma
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EventKind {
    Contact {
        initiator: VertexId,
        partner: VertexId,
    },
    Infection {
        source: VertexId,
        target: VertexId,
    },
    DetectionRandom(VertexId),
    DetectionTraced(VertexId),
    Null,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub day: f64,
    pub kind: EventKind,
}

/// Candidate event selected from the thinned clock, before any state change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Proposal {
    Contact(VertexId),
    Detection { vertex: VertexId, traced: bool },
    Null,
}

/// Outcome of one accepted step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub day: f64,
    pub kind: TransitionKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransitionKind {
    Contact {
        initiator: VertexId,
        partner: VertexId,
        infected: bool,
    },
    Detection {
        vertex: VertexId,
        traced: bool,
    },
    Null,
}

impl Transition {
    /// Log entries for this transition: a contact that infects yields a
    /// `Contact` followed by an `Infection` at the same time.
    pub fn events(&self) -> impl Iterator<Item = Event> {
        let day = self.day;
        let (first, second) = match self.kind {
            TransitionKind::Contact {
                initiator,
                partner,
                infected,
            } => (
                EventKind::Contact { initiator, partner },
                infected.then_some(EventKind::Infection {
                    source: initiator,
                    target: partner,
                }),
            ),
            TransitionKind::Detection { vertex, traced } => (
                if traced {
                    EventKind::DetectionTraced(vertex)
                } else {
                    EventKind::DetectionRandom(vertex)
                },
                None,
            ),
            TransitionKind::Null => (EventKind::Null, None),
        };
        core::iter::once(first)
            .chain(second)
            .map(move |kind| Event { day, kind })
    }
}

/// A running epidemic: graph state, rates and clock.
#[derive(Clone, Debug)]
pub struct Simulation<R: Rates = HivRates> {
    graph: EvolvingGraph,
    rates: R,
    alpha: f64,
    tau: f64,
    window: TracingWindow,
    horizon: f64,
    day: f64,
}

impl Simulation<HivRates> {
    pub fn from_theta(theta: &Theta, config: &SimConfig, graph: EvolvingGraph) -> Self {
        Simulation::new(
            graph,
            HivRates::from(theta),
            theta.alpha,
            config.tau,
            config.window(),
            config.start_day,
            config.horizon,
        )
    }
}

impl<R: Rates> Simulation<R> {
    pub fn new(
        graph: EvolvingGraph,
        rates: R,
        alpha: f64,
        tau: f64,
        window: TracingWindow,
        start_day: f64,
        horizon: f64,
    ) -> Self {
        Self {
            graph,
            rates,
            alpha,
            tau,
            window,
            horizon,
            day: start_day,
        }
    }

    pub fn day(&self) -> f64 {
        self.day
    }

    pub fn graph(&self) -> &EvolvingGraph {
        &self.graph
    }

    pub fn into_graph(self) -> EvolvingGraph {
        self.graph
    }

    pub fn rates(&self) -> &R {
        &self.rates
    }

    pub fn window(&self) -> TracingWindow {
        self.window
    }

    pub fn is_halted(&self) -> bool {
        self.day >= self.horizon || self.graph.infective().is_empty()
    }

    pub fn rate_bound(&self) -> f64 {
        rate_bound(&self.graph, &self.rates)
    }

    pub fn exact_total_rate(&self, day: f64) -> f64 {
        exact_total_rate(&self.graph, &self.rates, self.window, day)
    }

    /// Draws the next candidate time after `from` and the event selected at
    /// that time, without changing the state. The time is infinite when the
    /// bound is zero.
    pub fn propose<G: Rng + ?Sized>(&self, from: f64, rng: &mut G) -> (f64, Proposal) {
        let bound = self.rate_bound();
        if !(bound > 0.0) {
            return (f64::INFINITY, Proposal::Null);
        }
        let wait = -math::ln(1.0 - rng.random::<f64>()) / bound;
        let day = from + wait;
        let mut u = rng.random::<f64>() * bound;
        for &v in self.graph.infective() {
            let label = self.graph.label(v);
            let contact = self.rates.contact_rate(label);
            if u < contact {
                return (day, Proposal::Contact(v));
            }
            u -= contact;
            let (random, traced) =
                detection_parts_unchecked(&self.graph, v, day, &self.rates, self.window);
            if u < random {
                return (
                    day,
                    Proposal::Detection {
                        vertex: v,
                        traced: false,
                    },
                );
            }
            u -= random;
            if u < traced {
                return (
                    day,
                    Proposal::Detection {
                        vertex: v,
                        traced: true,
                    },
                );
            }
            u -= traced;
        }
        (day, Proposal::Null)
    }

    /// Advances to the next candidate event and applies it. Returns `None`
    /// once the horizon is reached or no infective remains.
    pub fn step<G: Rng + ?Sized>(&mut self, rng: &mut G) -> Result<Option<Transition>, SimError> {
        if self.is_halted() {
            return Ok(None);
        }
        let (day, proposal) = self.propose(self.day, rng);
        if day >= self.horizon {
            self.day = self.horizon;
            return Ok(None);
        }
        self.day = day;
        let kind = match proposal {
            Proposal::Null => TransitionKind::Null,
            Proposal::Detection { vertex, traced } => {
                let kind = if traced {
                    DetectionType::ContactTraced
                } else {
                    DetectionType::Random
                };
                self.graph.detect(vertex, day, kind)?;
                TransitionKind::Detection { vertex, traced }
            }
            Proposal::Contact(initiator) => {
                match choose_partner(&self.graph, initiator, self.alpha, self.tau, rng) {
                    Err(SimError::NoCompatiblePartner(_)) => TransitionKind::Null,
                    Err(e) => return Err(e),
                    Ok(partner) => {
                        self.graph.add_contact_edge(initiator, partner, day)?;
                        let infected = self.graph.label(partner).state == State::Susceptible && {
                            let p = self.rates.infection_probability(
                                self.graph.label(initiator),
                                self.graph.label(partner),
                            );
                            rng.random::<f64>() < p
                        };
                        if infected {
                            self.graph.infect(partner, day)?;
                        }
                        TransitionKind::Contact {
                            initiator,
                            partner,
                            infected,
                        }
                    }
                }
            }
        };
        Ok(Some(Transition { day, kind }))
    }
}

/// Compartment sizes and detection split at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Counts {
    pub day: f64,
    pub susceptible: usize,
    pub infective: usize,
    pub removed: usize,
    pub random: usize,
    pub traced: usize,
}

impl Counts {
    fn of(graph: &EvolvingGraph, day: f64) -> Self {
        let traced = graph
            .removed()
            .iter()
            .filter(|&&v| graph.label(v).detection_type == Some(DetectionType::ContactTraced))
            .count();
        Self {
            day,
            susceptible: graph.susceptible().len(),
            infective: graph.infective().len(),
            removed: graph.removed().len(),
            random: graph.removed().len() - traced,
            traced,
        }
    }
}

/// Output of a simulation run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Accepted events in time order; `Null` events are only counted.
    pub events: Vec<Event>,
    pub n_null: usize,
    /// Observable networks at the configured snapshot days.
    pub snapshots: Vec<Snapshot>,
    /// Step function of compartment sizes: the initial state, then one entry
    /// per infection or detection.
    pub counts: Vec<Counts>,
    pub final_day: f64,
    pub graph: EvolvingGraph,
}

impl Trajectory {
    /// Counts in force on `day` (right-continuous).
    pub fn counts_at(&self, day: f64) -> Counts {
        let idx = self.counts.partition_point(|c| c.day <= day);
        let mut c = self.counts[idx.saturating_sub(1)];
        c.day = day;
        c
    }
}

/// Runs the model with the generator derived from `config.seed`.
pub fn run(
    theta: &Theta,
    config: &SimConfig,
    initial: Option<EvolvingGraph>,
) -> Result<Trajectory, SimError> {
    run_with(theta, config, initial, &mut rng::stream(config.seed, 0))
}

/// Runs the model from `initial`, or from a fresh population with
/// `theta.n_initial_infected` infectives, until the horizon or extinction.
pub fn run_with<G: Rng + ?Sized>(
    theta: &Theta,
    config: &SimConfig,
    initial: Option<EvolvingGraph>,
    rng: &mut G,
) -> Result<Trajectory, SimError> {
    theta.validate()?;
    config.validate()?;
    let graph = match initial {
        Some(g) => g,
        None => EvolvingGraph::init_population(
            &config.population_params(theta.n_initial_infected),
            rng,
        )?,
    };
    let mut sim = Simulation::from_theta(theta, config, graph);
    let mut events = Vec::new();
    let mut counts = alloc::vec![Counts::of(sim.graph(), sim.day())];
    let mut n_null = 0;
    while let Some(tr) = sim.step(rng)? {
        match tr.kind {
            TransitionKind::Null => n_null += 1,
            TransitionKind::Contact { infected, .. } => {
                events.extend(tr.events());
                if infected {
                    counts.push(Counts::of(sim.graph(), tr.day));
                }
            }
            TransitionKind::Detection { .. } => {
                events.extend(tr.events());
                counts.push(Counts::of(sim.graph(), tr.day));
            }
        }
    }
    let final_day = sim.day();
    let graph = sim.into_graph();
    let snapshots = config
        .snapshot_days
        .iter()
        .map(|&d| graph.observable_network(d))
        .collect();
    Ok(Trajectory {
        events,
        n_null,
        snapshots,
        counts,
        final_day,
        graph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Orientation;
    use alloc::vec;

    fn label(gender: Gender, orientation: Orientation, hidden: u32) -> VertexLabel {
        VertexLabel::susceptible(gender, orientation, hidden)
    }

    fn rates(gamma: f64, beta: f64) -> HivRates {
        HivRates {
            lambda: 0.1,
            sigma: 0.5,
            gamma,
            beta,
        }
    }

    const WINDOW: TracingWindow = TracingWindow {
        eta1: 720.0,
        eta2: 180.0,
    };

    /// Infective man 0 with female partners detected on the given days.
    fn star(detections: &[f64]) -> EvolvingGraph {
        let mut labels = vec![label(Gender::Male, Orientation::Hetero, 1)];
        labels.extend(
            detections
                .iter()
                .map(|_| label(Gender::Female, Orientation::Hetero, 1)),
        );
        let mut g = EvolvingGraph::from_labels(labels).unwrap();
        for (k, _) in detections.iter().enumerate() {
            g.infect(k + 1, 0.0).unwrap();
        }
        g.infect(0, 0.0).unwrap();
        for (k, &d) in detections.iter().enumerate() {
            g.add_contact_edge(0, k + 1, 0.0).unwrap();
            g.detect(k + 1, d, DetectionType::Random).unwrap();
        }
        g
    }

    #[test]
    fn detection_rate_examples() {
        let g = star(&[]);
        assert_eq!(
            detection_rate(&g, 0, 1000.0, &rates(0.001, 0.001), WINDOW).unwrap(),
            0.001
        );
        let g = star(&[800.0, 600.0]);
        let r = detection_rate(&g, 0, 1000.0, &rates(0.001, 0.001), WINDOW).unwrap();
        assert!((r - 0.003).abs() < 1e-15);
        let g = star(&[200.0]);
        assert_eq!(
            detection_rate(&g, 0, 1000.0, &rates(0.001, 0.001), WINDOW).unwrap(),
            0.001
        );
        assert_eq!(
            detection_rate(&g, 1, 1000.0, &rates(0.001, 0.001), WINDOW),
            Err(SimError::NotInfective(1))
        );
    }

    #[test]
    fn window_is_closed() {
        assert!(WINDOW.contains(280.0, 1000.0));
        assert!(WINDOW.contains(820.0, 1000.0));
        assert!(!WINDOW.contains(279.999, 1000.0));
        assert!(!WINDOW.contains(820.001, 1000.0));
    }

    #[test]
    fn bound_examples() {
        let r = rates(0.01, 0.02);
        let g = star(&[]);
        assert!((rate_bound(&g, &r) - (0.1 + 0.01)).abs() < 1e-15);

        // three infectives, one with two detected partners
        let mut labels = vec![label(Gender::Male, Orientation::Hetero, 1); 3];
        labels.extend(vec![label(Gender::Female, Orientation::Hetero, 1); 2]);
        let mut g = EvolvingGraph::from_labels(labels).unwrap();
        for v in 0..5 {
            g.infect(v, 0.0).unwrap();
        }
        g.add_contact_edge(0, 3, 1.0).unwrap();
        g.add_contact_edge(0, 4, 1.0).unwrap();
        g.detect(3, 2.0, DetectionType::Random).unwrap();
        g.detect(4, 3.0, DetectionType::Random).unwrap();
        let expected = 3.0 * 0.1 + 3.0 * 0.01 + 2.0 * 0.02;
        assert!((rate_bound(&g, &r) - expected).abs() < 1e-15);
    }

    #[test]
    fn last_partner_is_preferred() {
        let labels = vec![
            label(Gender::Male, Orientation::Hetero, 1),
            label(Gender::Female, Orientation::Hetero, 1),
            label(Gender::Female, Orientation::Hetero, 50),
        ];
        let mut g = EvolvingGraph::from_labels(labels).unwrap();
        g.add_contact_edge(0, 1, 0.0).unwrap();
        let mut rng = rng::stream(1, 0);
        for _ in 0..100 {
            assert_eq!(choose_partner(&g, 0, 1.0, 1.0, &mut rng).unwrap(), 1);
        }
        // alpha = 0: the last partner is excluded from the new-partner draw
        for _ in 0..100 {
            assert_eq!(choose_partner(&g, 0, 0.0, 1.0, &mut rng).unwrap(), 2);
        }
    }

    #[test]
    fn removed_last_partner_falls_through() {
        let labels = vec![
            label(Gender::Male, Orientation::Hetero, 1),
            label(Gender::Female, Orientation::Hetero, 1),
            label(Gender::Female, Orientation::Hetero, 1),
        ];
        let mut g = EvolvingGraph::from_labels(labels).unwrap();
        g.infect(1, 0.0).unwrap();
        g.add_contact_edge(0, 1, 0.0).unwrap();
        g.detect(1, 1.0, DetectionType::Random).unwrap();
        let mut rng = rng::stream(2, 0);
        for _ in 0..50 {
            assert_eq!(choose_partner(&g, 0, 1.0, 0.5, &mut rng).unwrap(), 2);
        }
    }

    fn frequencies(g: &EvolvingGraph, tau: f64, n: usize) -> Vec<f64> {
        let mut counts = vec![0usize; g.len()];
        let mut rng = rng::stream(11, 0);
        for _ in 0..n {
            counts[choose_partner(g, 0, 0.0, tau, &mut rng).unwrap()] += 1;
        }
        counts.iter().map(|&c| c as f64 / n as f64).collect()
    }

    #[test]
    fn observed_degree_attachment() {
        // woman 0 chooses among men 1..=3 with observed degrees 2, 1, 1
        let mut labels = vec![label(Gender::Female, Orientation::Hetero, 1)];
        labels.extend(vec![label(Gender::Male, Orientation::Hetero, 1); 3]);
        labels.extend(vec![label(Gender::Female, Orientation::Hetero, 1); 2]);
        let mut g = EvolvingGraph::from_labels(labels).unwrap();
        g.add_contact_edge(1, 4, 0.0).unwrap();
        g.add_contact_edge(1, 5, 0.0).unwrap();
        g.add_contact_edge(2, 4, 0.0).unwrap();
        g.add_contact_edge(3, 5, 0.0).unwrap();
        let f = frequencies(&g, 0.0, 100_000);
        for (v, p) in [(1, 0.5), (2, 0.25), (3, 0.25)] {
            let se = (p * (1.0 - p) / 100_000.0f64).sqrt();
            assert!((f[v] - p).abs() < 4.0 * se, "{v}: {}", f[v]);
        }
        assert_eq!(f[4] + f[5], 0.0);
    }

    #[test]
    fn hidden_degree_attachment() {
        let g = EvolvingGraph::from_labels(vec![
            label(Gender::Male, Orientation::Hetero, 1),
            label(Gender::Female, Orientation::Hetero, 3),
            label(Gender::Female, Orientation::Hetero, 1),
        ])
        .unwrap();
        let f = frequencies(&g, 1.0, 100_000);
        let se = (0.75f64 * 0.25 / 100_000.0).sqrt();
        assert!((f[1] - 0.75).abs() < 4.0 * se);
    }

    #[test]
    fn zero_weights_fall_back_to_uniform() {
        let g = EvolvingGraph::from_labels(vec![
            label(Gender::Male, Orientation::Hetero, 1),
            label(Gender::Female, Orientation::Hetero, 1),
            label(Gender::Female, Orientation::Hetero, 1),
        ])
        .unwrap();
        let f = frequencies(&g, 0.0, 40_000);
        assert!((f[1] - 0.5).abs() < 0.02);
    }

    #[test]
    fn no_partner_available() {
        let g = EvolvingGraph::from_labels(vec![
            label(Gender::Female, Orientation::Hetero, 1),
            label(Gender::Female, Orientation::Hetero, 1),
        ])
        .unwrap();
        let r = choose_partner(&g, 0, 0.5, 0.5, &mut rng::stream(0, 0));
        assert_eq!(r, Err(SimError::NoCompatiblePartner(0)));
    }

    #[test]
    fn infection_coin() {
        let m = label(Gender::Male, Orientation::Hetero, 1);
        let f = label(Gender::Female, Orientation::Hetero, 1);
        let mut rng = rng::stream(5, 0);
        assert!((0..1000).all(|_| !infection_occurs(&m, &f, 0.0, &mut rng)));
        assert!((0..1000).all(|_| infection_occurs(&m, &f, 1.0, &mut rng)));
        assert!((0..1000).all(|_| !infection_occurs(&f, &f, 1.0, &mut rng)));
    }

    #[test]
    fn infection_rate_matches_sigma() {
        let m = label(Gender::Male, Orientation::Hetero, 1);
        let f = label(Gender::Female, Orientation::Hetero, 1);
        let mut rng = rng::stream(6, 0);
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| infection_occurs(&m, &f, 0.005, &mut rng))
            .count();
        let rate = hits as f64 / n as f64;
        let tol = 3.0 * (0.005f64 * 0.995 / n as f64).sqrt();
        assert!((rate - 0.005).abs() < tol, "{rate}");
    }

    #[test]
    fn theta_round_trip_and_bounds() {
        let t = Theta::toy();
        assert_eq!(Theta::from_slice(&t.to_array()).unwrap(), t);
        let mut v = t.to_array();
        v[1] = 1.2;
        assert!(Theta::from_slice(&v).is_err());
        v[1] = 0.5;
        v[0] = 99.6;
        assert_eq!(Theta::from_slice(&v).unwrap().n_initial_infected, 100);
    }

    #[test]
    fn config_validation() {
        let mut c = SimConfig::default();
        c.validate().unwrap();
        c.eta2 = 800.0;
        assert!(c.validate().is_err());
        let mut c = SimConfig::default();
        c.snapshot_days = vec![0.0, 2000.0];
        assert!(c.validate().is_err());
        assert_eq!(
            subdivision(0.0, 500.0, 5),
            vec![0.0, 100.0, 200.0, 300.0, 400.0, 500.0]
        );
    }

    #[test]
    fn halts_without_infectives() {
        let g =
            EvolvingGraph::from_labels(vec![label(Gender::Male, Orientation::Hetero, 1)]).unwrap();
        let mut sim = Simulation::from_theta(&Theta::toy(), &SimConfig::default(), g);
        assert!(sim.is_halted());
        assert_eq!(sim.step(&mut rng::stream(0, 0)).unwrap(), None);
    }

    #[test]
    fn transition_events() {
        let t = Transition {
            day: 3.0,
            kind: TransitionKind::Contact {
                initiator: 1,
                partner: 2,
                infected: true,
            },
        };
        let ev: Vec<Event> = t.events().collect();
        assert_eq!(ev.len(), 2);
        assert_eq!(
            ev[1].kind,
            EventKind::Infection {
                source: 1,
                target: 2
            }
        );
        assert_eq!(ev[0].day, ev[1].day);
    }
}
