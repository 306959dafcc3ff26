//! The marked evolving contact graph and its observable (detected) part.
//!
//! Vertices are a fixed population carrying labels (gender, orientation,
//! serological state, detection record, hidden degree). Edges are contacts
//! accumulated over time; the graph is simple, so a repeated contact between
//! the same pair keeps the original edge and its first-contact day.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::math;

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Male,
    Female,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Hetero,
    Bisexual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Susceptible,
    Infective,
    Removed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectionType {
    Random,
    ContactTraced,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("fraction `{name}` = {value} is outside [0, 1]")]
    InvalidFraction { name: &'static str, value: f64 },
    #[error("bisexual fraction {bisexual} must be below the male fraction {male}")]
    BisexualExceedsMales { bisexual: f64, male: f64 },
    #[error("degree exponent must exceed 1, got {0}")]
    InvalidExponent(f64),
    #[error("{requested} initial infectives requested in a population of {available}")]
    TooManyInfected { requested: usize, available: usize },
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("removed vertex {0} cannot make contacts")]
    RemovedContact(VertexId),
    #[error("vertex {vertex}: cannot move from {from:?} to {to:?}")]
    InvalidTransition {
        vertex: VertexId,
        from: State,
        to: State,
    },
    #[error("vertex {vertex}: {reason}")]
    InconsistentLabel {
        vertex: VertexId,
        reason: &'static str,
    },
    #[error("graph invariant violated: {0}")]
    Invariant(&'static str),
}

/// Per-individual covariates and serological record.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexLabel {
    pub gender: Gender,
    pub orientation: Orientation,
    pub state: State,
    pub detection_time: Option<f64>,
    pub detection_type: Option<DetectionType>,
    pub hidden_degree: u32,
    pub infection_time: Option<f64>,
}

impl VertexLabel {
    pub fn susceptible(gender: Gender, orientation: Orientation, hidden_degree: u32) -> Self {
        Self {
            gender,
            orientation,
            state: State::Susceptible,
            detection_time: None,
            detection_type: None,
            hidden_degree,
            infection_time: None,
        }
    }

    /// Sexual compatibility: men with women, and bisexual men with each other.
    /// Women never contact women.
    pub fn is_compatible(&self, other: &VertexLabel) -> bool {
        match (self.gender, other.gender) {
            (Gender::Male, Gender::Female) | (Gender::Female, Gender::Male) => true,
            (Gender::Male, Gender::Male) => {
                self.orientation == Orientation::Bisexual
                    && other.orientation == Orientation::Bisexual
            }
            (Gender::Female, Gender::Female) => false,
        }
    }

    pub fn is_removed(&self) -> bool {
        self.state == State::Removed
    }

    /// The covariates visible in a contact database, present once detected.
    pub fn observed(&self) -> Option<ObservedLabel> {
        Some(ObservedLabel {
            gender: self.gender,
            orientation: self.orientation,
            detection_time: self.detection_time?,
            detection_type: self.detection_type?,
        })
    }

    pub fn validate(&self, vertex: VertexId) -> Result<(), GraphError> {
        let fail = |reason| Err(GraphError::InconsistentLabel { vertex, reason });
        if self.hidden_degree < 1 {
            return fail("hidden degree must be at least 1");
        }
        if self.gender == Gender::Female && self.orientation == Orientation::Bisexual {
            return fail("bisexual orientation is only modelled for men");
        }
        let removed = self.state == State::Removed;
        if self.detection_time.is_some() != removed || self.detection_type.is_some() != removed {
            return fail("detection record present iff removed");
        }
        if self.infection_time.is_some() != (self.state != State::Susceptible) {
            return fail("infection time present iff infective or removed");
        }
        if matches!(self.detection_time, Some(t) if !(t >= 0.0)) {
            return fail("detection time must be a non-negative day count");
        }
        Ok(())
    }
}

/// Covariates of a detected individual, as recorded in a contact database.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservedLabel {
    pub gender: Gender,
    pub orientation: Orientation,
    pub detection_time: f64,
    pub detection_type: DetectionType,
}

/// Indexed set with O(1) insert, remove and membership.
#[derive(Clone, Debug, Default)]
struct VertexSet {
    members: Vec<VertexId>,
    slot: Vec<usize>,
}

impl VertexSet {
    const ABSENT: usize = usize::MAX;

    fn with_capacity(n: usize) -> Self {
        Self {
            members: Vec::new(),
            slot: vec![Self::ABSENT; n],
        }
    }

    fn insert(&mut self, v: VertexId) {
        if self.slot[v] == Self::ABSENT {
            self.slot[v] = self.members.len();
            self.members.push(v);
        }
    }

    fn remove(&mut self, v: VertexId) {
        let at = self.slot[v];
        if at == Self::ABSENT {
            return;
        }
        self.members.swap_remove(at);
        if let Some(&moved) = self.members.get(at) {
            self.slot[moved] = at;
        }
        self.slot[v] = Self::ABSENT;
    }

    fn contains(&self, v: VertexId) -> bool {
        self.slot[v] != Self::ABSENT
    }
}

/// Parameters for a synthetic population.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationParams {
    pub size: usize,
    pub degree_exponent: f64,
    pub female_frac: f64,
    pub bisexual_frac: f64,
    pub n_initial_infected: usize,
}

impl PopulationParams {
    pub fn validate(&self) -> Result<(), GraphError> {
        for (name, value) in [
            ("female_frac", self.female_frac),
            ("bisexual_frac", self.bisexual_frac),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GraphError::InvalidFraction { name, value });
            }
        }
        let male = 1.0 - self.female_frac;
        if self.bisexual_frac > 0.0 && self.bisexual_frac >= male {
            return Err(GraphError::BisexualExceedsMales {
                bisexual: self.bisexual_frac,
                male,
            });
        }
        if !(self.degree_exponent > 1.0) {
            return Err(GraphError::InvalidExponent(self.degree_exponent));
        }
        if self.n_initial_infected > self.size {
            return Err(GraphError::TooManyInfected {
                requested: self.n_initial_infected,
                available: self.size,
            });
        }
        Ok(())
    }

    fn bisexual_given_male(&self) -> f64 {
        let male = 1.0 - self.female_frac;
        if self.bisexual_frac <= 0.0 || male <= 0.0 {
            0.0
        } else {
            self.bisexual_frac / male
        }
    }
}

/// Discrete power law `P(d = k) ∝ k^-exponent` on `1..=d_max`, sampled by
/// inverting the tabulated CDF.
#[derive(Clone, Debug)]
pub struct DegreeSampler {
    cdf: Vec<f64>,
}

impl DegreeSampler {
    pub fn new(exponent: f64, d_max: usize) -> Self {
        let d_max = d_max.max(1);
        let mut acc = 0.0;
        let cdf = (1..=d_max)
            .map(|k| {
                acc += math::powf(k as f64, -exponent);
                acc
            })
            .collect();
        Self { cdf }
    }

    pub fn probability(&self, k: u32) -> f64 {
        let k = k as usize;
        if k == 0 || k > self.cdf.len() {
            return 0.0;
        }
        let prev = if k == 1 { 0.0 } else { self.cdf[k - 2] };
        (self.cdf[k - 1] - prev) / self.total()
    }

    fn total(&self) -> f64 {
        *self.cdf.last().expect("non-empty table")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let target = rng.random::<f64>() * self.total();
        let idx = self.cdf.partition_point(|&c| c <= target);
        (idx.min(self.cdf.len() - 1) + 1) as u32
    }
}

/// The evolving graph `G_t = (V, E_t, X_t)`.
#[derive(Clone, Debug)]
pub struct EvolvingGraph {
    labels: Vec<VertexLabel>,
    adjacency: Vec<Vec<VertexId>>,
    edges: BTreeMap<(VertexId, VertexId), f64>,
    last_partner: Vec<Option<VertexId>>,
    detected_neighbours: Vec<u32>,
    susceptible: VertexSet,
    infective: VertexSet,
    removed: VertexSet,
}

fn ordered(i: VertexId, j: VertexId) -> (VertexId, VertexId) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl EvolvingGraph {
    /// Graph with the given labels and no edges.
    pub fn from_labels(labels: Vec<VertexLabel>) -> Result<Self, GraphError> {
        let n = labels.len();
        for (v, label) in labels.iter().enumerate() {
            label.validate(v)?;
        }
        let mut graph = Self {
            adjacency: vec![Vec::new(); n],
            edges: BTreeMap::new(),
            last_partner: vec![None; n],
            detected_neighbours: vec![0; n],
            susceptible: VertexSet::with_capacity(n),
            infective: VertexSet::with_capacity(n),
            removed: VertexSet::with_capacity(n),
            labels,
        };
        for v in 0..n {
            graph.set_of(graph.labels[v].state).insert(v);
        }
        Ok(graph)
    }

    /// Population with power-law hidden degrees and uniformly placed initial
    /// infectives at day 0. Deterministic for a given generator state.
    pub fn init_population<R: Rng + ?Sized>(
        params: &PopulationParams,
        rng: &mut R,
    ) -> Result<Self, GraphError> {
        params.validate()?;
        let labels = random_labels(params, params.size, rng);
        let mut graph = Self::from_labels(labels)?;
        graph.seed_infectives(params.n_initial_infected, 0.0, rng)?;
        Ok(graph)
    }

    /// Population whose first vertices are the detected individuals of
    /// `observed` (removed, with the observed edges among them), completed
    /// with `params.size - observed.len()` fresh individuals, of which
    /// `params.n_initial_infected` are infective at `day`.
    ///
    /// Vertex `k` of the result is `observed.vertices[k]`. Infection times of
    /// seeded vertices are unknown and set to their detection times.
    pub fn seeded<R: Rng + ?Sized>(
        observed: &Snapshot,
        params: &PopulationParams,
        day: f64,
        rng: &mut R,
    ) -> Result<Self, GraphError> {
        params.validate()?;
        let n_seed = observed.vertices.len();
        let fresh = params
            .size
            .checked_sub(n_seed)
            .ok_or(GraphError::TooManyInfected {
                requested: n_seed,
                available: params.size,
            })?;
        if params.n_initial_infected > fresh {
            return Err(GraphError::TooManyInfected {
                requested: params.n_initial_infected,
                available: fresh,
            });
        }
        let sampler = DegreeSampler::new(params.degree_exponent, params.size.saturating_sub(1));
        let mut labels: Vec<VertexLabel> = observed
            .vertices
            .iter()
            .map(|(_, obs)| VertexLabel {
                gender: obs.gender,
                orientation: obs.orientation,
                state: State::Removed,
                detection_time: Some(obs.detection_time),
                detection_type: Some(obs.detection_type),
                hidden_degree: sampler.sample(rng),
                infection_time: Some(obs.detection_time),
            })
            .collect();
        labels.extend(random_labels(params, fresh, rng));
        let mut graph = Self::from_labels(labels)?;
        for &(a, b) in &observed.edges {
            let (i, j) = match (observed.position(a), observed.position(b)) {
                (Some(i), Some(j)) => (i, j),
                _ => {
                    return Err(GraphError::Invariant(
                        "snapshot edge outside its vertex set",
                    ))
                }
            };
            let day = observed.vertices[i]
                .1
                .detection_time
                .min(observed.vertices[j].1.detection_time);
            graph.insert_edge_unchecked(i, j, day)?;
        }
        let candidates: Vec<VertexId> = (n_seed..params.size).collect();
        graph.infect_among(&candidates, params.n_initial_infected, day, rng)?;
        Ok(graph)
    }

    fn seed_infectives<R: Rng + ?Sized>(
        &mut self,
        count: usize,
        day: f64,
        rng: &mut R,
    ) -> Result<(), GraphError> {
        let candidates: Vec<VertexId> = (0..self.len()).collect();
        self.infect_among(&candidates, count, day, rng)
    }

    fn infect_among<R: Rng + ?Sized>(
        &mut self,
        candidates: &[VertexId],
        count: usize,
        day: f64,
        rng: &mut R,
    ) -> Result<(), GraphError> {
        let mut chosen: Vec<VertexId> = rand::seq::index::sample(rng, candidates.len(), count)
            .into_iter()
            .map(|k| candidates[k])
            .collect();
        chosen.sort_unstable();
        for v in chosen {
            self.infect(v, day)?;
        }
        Ok(())
    }

    fn set_of(&mut self, state: State) -> &mut VertexSet {
        match state {
            State::Susceptible => &mut self.susceptible,
            State::Infective => &mut self.infective,
            State::Removed => &mut self.removed,
        }
    }

    fn move_to(&mut self, v: VertexId, to: State) {
        let from = self.labels[v].state;
        self.set_of(from).remove(v);
        self.set_of(to).insert(v);
        self.labels[v].state = to;
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: VertexId) -> &VertexLabel {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    /// Observed degree `d(v)`: number of recorded partners.
    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbours(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn last_partner(&self, v: VertexId) -> Option<VertexId> {
        self.last_partner[v]
    }

    /// Number of neighbours of `v` that have been detected (at any time).
    pub fn detected_neighbours(&self, v: VertexId) -> u32 {
        self.detected_neighbours[v]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(i, j, first_contact_day)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.edges.iter().map(|(&(i, j), &d)| (i, j, d))
    }

    pub fn first_contact(&self, i: VertexId, j: VertexId) -> Option<f64> {
        self.edges.get(&ordered(i, j)).copied()
    }

    pub fn susceptible(&self) -> &[VertexId] {
        &self.susceptible.members
    }

    pub fn infective(&self) -> &[VertexId] {
        &self.infective.members
    }

    pub fn removed(&self) -> &[VertexId] {
        &self.removed.members
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.len() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v))
        }
    }

    /// Records a contact between `i` and `j` on `day`. Returns `true` when the
    /// pair had no edge before. Either way `i` and `j` become each other's
    /// last partner.
    pub fn add_contact_edge(
        &mut self,
        i: VertexId,
        j: VertexId,
        day: f64,
    ) -> Result<bool, GraphError> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        for v in [i, j] {
            if self.removed.contains(v) {
                return Err(GraphError::RemovedContact(v));
            }
        }
        let fresh = self.insert_edge_unchecked(i, j, day)?;
        self.last_partner[i] = Some(j);
        self.last_partner[j] = Some(i);
        Ok(fresh)
    }

    fn insert_edge_unchecked(
        &mut self,
        i: VertexId,
        j: VertexId,
        day: f64,
    ) -> Result<bool, GraphError> {
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        match self.edges.get_mut(&ordered(i, j)) {
            Some(first) => {
                if day < *first {
                    *first = day;
                }
                Ok(false)
            }
            None => {
                self.edges.insert(ordered(i, j), day);
                self.adjacency[i].push(j);
                self.adjacency[j].push(i);
                if self.removed.contains(i) {
                    self.detected_neighbours[j] += 1;
                }
                if self.removed.contains(j) {
                    self.detected_neighbours[i] += 1;
                }
                Ok(true)
            }
        }
    }

    /// Susceptible to infective.
    pub fn infect(&mut self, v: VertexId, day: f64) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        let from = self.labels[v].state;
        if from != State::Susceptible {
            return Err(GraphError::InvalidTransition {
                vertex: v,
                from,
                to: State::Infective,
            });
        }
        self.move_to(v, State::Infective);
        self.labels[v].infection_time = Some(day);
        Ok(())
    }

    /// Infective to removed, recording the detection.
    pub fn detect(&mut self, v: VertexId, day: f64, kind: DetectionType) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        let from = self.labels[v].state;
        if from != State::Infective {
            return Err(GraphError::InvalidTransition {
                vertex: v,
                from,
                to: State::Removed,
            });
        }
        self.move_to(v, State::Removed);
        let label = &mut self.labels[v];
        label.detection_time = Some(day);
        label.detection_type = Some(kind);
        for k in 0..self.adjacency[v].len() {
            let u = self.adjacency[v][k];
            self.detected_neighbours[u] += 1;
        }
        Ok(())
    }

    /// Subgraph induced on individuals detected no later than `day`.
    pub fn observable_network(&self, day: f64) -> Snapshot {
        let mut ids: Vec<VertexId> = self
            .removed
            .members
            .iter()
            .copied()
            .filter(|&v| self.is_detected_by(v, day))
            .collect();
        ids.sort_unstable();
        let vertices = ids
            .iter()
            .map(|&v| {
                (
                    v,
                    self.labels[v]
                        .observed()
                        .expect("removed vertices carry a detection"),
                )
            })
            .collect();
        let mut edges = Vec::new();
        for &i in &ids {
            for &j in &self.adjacency[i] {
                if i < j && self.is_detected_by(j, day) {
                    edges.push((i, j));
                }
            }
        }
        edges.sort_unstable();
        Snapshot {
            day,
            vertices,
            edges,
        }
    }

    fn is_detected_by(&self, v: VertexId, day: f64) -> bool {
        matches!(self.labels[v].detection_time, Some(t) if t <= day)
    }

    /// Checks every structural invariant. Intended for tests and debugging.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.len();
        let (s, i, r) = (
            self.susceptible.members.len(),
            self.infective.members.len(),
            self.removed.members.len(),
        );
        if s + i + r != n {
            return Err(GraphError::Invariant(
                "SIR sets do not partition the population",
            ));
        }
        for (v, label) in self.labels.iter().enumerate() {
            label.validate(v)?;
            let member = match label.state {
                State::Susceptible => self.susceptible.contains(v),
                State::Infective => self.infective.contains(v),
                State::Removed => self.removed.contains(v),
            };
            if !member {
                return Err(GraphError::Invariant("SIR set disagrees with label state"));
            }
        }
        let degree_sum: usize = self.adjacency.iter().map(Vec::len).sum();
        if degree_sum != 2 * self.edges.len() {
            return Err(GraphError::Invariant(
                "degree sum differs from twice the edge count",
            ));
        }
        for (&(a, b), &day) in &self.edges {
            if a >= b || b >= n {
                return Err(GraphError::Invariant(
                    "edge key not ordered or out of range",
                ));
            }
            if !self.adjacency[a].contains(&b) || !self.adjacency[b].contains(&a) {
                return Err(GraphError::Invariant("edge missing from adjacency"));
            }
            for v in [a, b] {
                if let Some(t) = self.labels[v].detection_time {
                    if day > t {
                        return Err(GraphError::Invariant("contact after detection"));
                    }
                }
            }
        }
        for v in 0..n {
            let count = self.adjacency[v]
                .iter()
                .filter(|&&u| self.labels[u].state == State::Removed)
                .count() as u32;
            if count != self.detected_neighbours[v] {
                return Err(GraphError::Invariant(
                    "detected-neighbour count out of date",
                ));
            }
        }
        Ok(())
    }
}

fn random_labels<R: Rng + ?Sized>(
    params: &PopulationParams,
    count: usize,
    rng: &mut R,
) -> Vec<VertexLabel> {
    let sampler = DegreeSampler::new(params.degree_exponent, params.size.saturating_sub(1));
    let p_bi = params.bisexual_given_male();
    (0..count)
        .map(|_| {
            let hidden = sampler.sample(rng);
            let gender = if rng.random::<f64>() < params.female_frac {
                Gender::Female
            } else {
                Gender::Male
            };
            let orientation = if gender == Gender::Male && rng.random::<f64>() < p_bi {
                Orientation::Bisexual
            } else {
                Orientation::Hetero
            };
            VertexLabel::susceptible(gender, orientation, hidden)
        })
        .collect()
}

/// Observable network at one day: detected individuals and the edges among them.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub day: f64,
    /// Sorted by vertex id.
    pub vertices: Vec<(VertexId, ObservedLabel)>,
    /// Pairs `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(VertexId, VertexId)>,
}

impl Snapshot {
    pub fn empty(day: f64) -> Self {
        Self {
            day,
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Index of vertex `id` in `vertices`.
    pub fn position(&self, id: VertexId) -> Option<usize> {
        self.vertices.binary_search_by_key(&id, |(v, _)| *v).ok()
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.vertices.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(GraphError::Invariant(
                "snapshot vertices not strictly sorted",
            ));
        }
        if self
            .vertices
            .iter()
            .any(|(_, l)| l.detection_time > self.day)
        {
            return Err(GraphError::Invariant(
                "snapshot vertex detected after the snapshot day",
            ));
        }
        for &(a, b) in &self.edges {
            if a >= b || self.position(a).is_none() || self.position(b).is_none() {
                return Err(GraphError::Invariant(
                    "snapshot edge outside its vertex set",
                ));
            }
        }
        Ok(())
    }
}

/// Summary counts of a snapshot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GraphStats {
    pub n_detected: usize,
    pub n_random: usize,
    pub n_traced: usize,
    pub n_edges: usize,
    pub n_components: usize,
    pub largest_component: usize,
}

pub fn graph_stats(snapshot: &Snapshot) -> GraphStats {
    let n = snapshot.len();
    let n_traced = snapshot
        .vertices
        .iter()
        .filter(|(_, l)| l.detection_type == DetectionType::ContactTraced)
        .count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in &snapshot.edges {
        if let (Some(i), Some(j)) = (snapshot.position(a), snapshot.position(b)) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
            }
        }
    }
    let mut size = vec![0usize; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        size[r] += 1;
    }
    GraphStats {
        n_detected: n,
        n_random: n - n_traced,
        n_traced,
        n_edges: snapshot.edges.len(),
        n_components: size.iter().filter(|&&s| s > 0).count(),
        largest_component: size.iter().copied().max().unwrap_or(0),
    }
}
