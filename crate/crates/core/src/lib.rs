//! Stochastic SIR epidemics on time-evolving contact graphs.
//!
//! The crate is organised around four pieces:
//!
//! * [`graph`]: the marked evolving graph (labels, SIR partition, contact
//!   edges) and the observable network of detected individuals.
//! * [`sim`]: an exact event-driven simulator using a dominating rate and
//!   thinning, with contact, infection and detection (random or
//!   contact-traced) events.
//! * [`matching`]: a labelled graph-matching distance based on a relaxed
//!   quadratic assignment problem, and its time-weighted average over
//!   snapshot sequences.
//! * [`abc`]: sequential Monte Carlo approximate Bayesian computation that
//!   fits model parameters to observed snapshot sequences.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. The `parallel` feature evaluates ABC particles on a rayon pool;
//! results do not depend on it.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod abc;
pub mod graph;
pub mod matching;
mod math;
pub mod rng;
pub mod sim;

pub use abc::{
    abc_smc, posterior_summary, AbcConfig, AbcError, AbcOutcome, AncestorPolicy, Discrepancy,
    EpidemicModel, IterationDiagnostics, KernelSpec, ParamPrior, Particle, PriorSpec,
};
pub use graph::{
    graph_stats, DetectionType, EvolvingGraph, Gender, GraphError, GraphStats, ObservedLabel,
    Orientation, PopulationParams, Snapshot, State, VertexId, VertexLabel,
};
pub use matching::{
    brute_force_match, solve_match, temporal_objective, LabelledGraph, MatchError, MatchParams,
    MatchResult,
};
pub use sim::{Event, EventKind, SimConfig, SimError, Simulation, Theta, Trajectory};
