//! CSV output: snapshot directories, trajectories and ABC results.
//!
//! A snapshot directory holds `vertices_D.csv` and `edges_D.csv` for each
//! snapshot day `D` plus `summary.csv`, one row per snapshot. The vertex and
//! edge files use the contact-database schema, so every snapshot can be
//! loaded back with [`crate::db::load_contact_db`].

use std::io;
use std::path::{Path, PathBuf};

use epigraph_core::abc::{AbcOutcome, PriorSpec};
use epigraph_core::graph::{
    graph_stats, DetectionType, Gender, ObservedLabel, Orientation, Snapshot, VertexId,
};
use epigraph_core::sim::{Counts, EventKind, Theta, Trajectory};

use crate::db::{load_contact_db, DbError};

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error(transparent)]
    Db(#[from] DbError),
    #[error("{path}:{line}: invalid day `{value}`")]
    Day {
        path: String,
        line: u64,
        value: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExportError + '_ {
    move |source| ExportError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ExportError + '_ {
    move |source| ExportError::Csv {
        path: path.display().to_string(),
        source,
    }
}

/// Shortest decimal form that parses back to the same day.
pub fn format_day(day: f64) -> String {
    format!("{day}")
}

pub fn vertices_file(dir: &Path, day: f64) -> PathBuf {
    dir.join(format!("vertices_{}.csv", format_day(day)))
}

pub fn edges_file(dir: &Path, day: f64) -> PathBuf {
    dir.join(format!("edges_{}.csv", format_day(day)))
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<std::fs::File>,
}

impl Table {
    fn create(path: PathBuf, header: &[&str]) -> Result<Self, ExportError> {
        let writer = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
        let mut table = Self { path, writer };
        table.row(header)?;
        Ok(table)
    }

    fn row<I, S>(&mut self, fields: I) -> Result<(), ExportError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(csv_err(&self.path))
    }

    fn finish(mut self) -> Result<(), ExportError> {
        self.writer.flush().map_err(io_err(&self.path))
    }
}

fn type_code(t: DetectionType) -> &'static str {
    match t {
        DetectionType::Random => "RAND",
        DetectionType::ContactTraced => "CT",
    }
}

fn gender_code(g: Gender) -> &'static str {
    match g {
        Gender::Male => "M",
        Gender::Female => "F",
    }
}

fn orientation_code(o: Orientation) -> &'static str {
    match o {
        Orientation::Hetero => "HETERO",
        Orientation::Bisexual => "BI",
    }
}

pub fn write_vertices<'a>(
    path: PathBuf,
    vertices: impl IntoIterator<Item = &'a (VertexId, ObservedLabel)>,
) -> Result<(), ExportError> {
    let mut t = Table::create(
        path,
        &["id", "detect_day", "detect_type", "gender", "orientation"],
    )?;
    for (id, l) in vertices {
        t.row([
            id.to_string(),
            format_day(l.detection_time),
            type_code(l.detection_type).to_string(),
            gender_code(l.gender).to_string(),
            orientation_code(l.orientation).to_string(),
        ])?;
    }
    t.finish()
}

pub fn write_edges(path: PathBuf, edges: &[(VertexId, VertexId)]) -> Result<(), ExportError> {
    let mut t = Table::create(path, &["id_a", "id_b"])?;
    for (a, b) in edges {
        t.row([a.to_string(), b.to_string()])?;
    }
    t.finish()
}

pub const SUMMARY_HEADER: [&str; 8] = [
    "day",
    "n_detected",
    "n_random",
    "n_traced",
    "n_edges",
    "n_components",
    "largest_component",
    "n_infected_total",
];

/// Writes a snapshot directory. `infected_totals[k]`, when known, is the
/// number of individuals ever infected by snapshot `k`; otherwise that
/// column is left empty.
pub fn export_snapshots(
    dir: &Path,
    snapshots: &[Snapshot],
    infected_totals: Option<&[usize]>,
) -> Result<(), ExportError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut summary = Table::create(dir.join("summary.csv"), &SUMMARY_HEADER)?;
    for (k, snap) in snapshots.iter().enumerate() {
        write_vertices(vertices_file(dir, snap.day), &snap.vertices)?;
        write_edges(edges_file(dir, snap.day), &snap.edges)?;
        let s = graph_stats(snap);
        let infected = infected_totals
            .and_then(|t| t.get(k))
            .map_or(String::new(), |n| n.to_string());
        summary.row([
            format_day(snap.day),
            s.n_detected.to_string(),
            s.n_random.to_string(),
            s.n_traced.to_string(),
            s.n_edges.to_string(),
            s.n_components.to_string(),
            s.largest_component.to_string(),
            infected,
        ])?;
    }
    summary.finish()
}

/// Reads a snapshot directory written by [`export_snapshots`].
pub fn read_snapshots(dir: &Path) -> Result<Vec<Snapshot>, ExportError> {
    let path = dir.join("summary.csv");
    let mut reader = csv::Reader::from_path(&path).map_err(csv_err(&path))?;
    let mut snapshots = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err(&path))?;
        let raw = record.get(0).unwrap_or("");
        let day: f64 = raw.trim().parse().map_err(|_| ExportError::Day {
            path: path.display().to_string(),
            line: record.position().map_or(0, |p| p.line()),
            value: raw.to_string(),
        })?;
        let db = load_contact_db(&vertices_file(dir, day), &edges_file(dir, day))?;
        snapshots.push(db.snapshot(day));
    }
    Ok(snapshots)
}

/// Number of individuals infected no later than `day`.
pub fn infected_by(traj: &Trajectory, day: f64) -> usize {
    traj.graph
        .labels()
        .iter()
        .filter(|l| matches!(l.infection_time, Some(t) if t <= day))
        .count()
}

/// Snapshot directory plus the full detected network, compartment counts
/// and the event log of a run.
pub fn export_trajectory(dir: &Path, traj: &Trajectory) -> Result<(), ExportError> {
    let totals: Vec<usize> = traj
        .snapshots
        .iter()
        .map(|s| infected_by(traj, s.day))
        .collect();
    export_snapshots(dir, &traj.snapshots, Some(&totals))?;

    let last = traj.graph.observable_network(traj.final_day);
    write_vertices(dir.join("vertices.csv"), &last.vertices)?;
    write_edges(dir.join("edges.csv"), &last.edges)?;

    let mut counts = Table::create(
        dir.join("counts.csv"),
        &[
            "day",
            "susceptible",
            "infective",
            "removed",
            "random",
            "traced",
        ],
    )?;
    for c in &traj.counts {
        counts.row(counts_row(c))?;
    }
    counts.finish()?;

    let mut events = Table::create(dir.join("events.csv"), &["day", "kind", "a", "b"])?;
    for e in &traj.events {
        let (kind, a, b) = match e.kind {
            EventKind::Contact { initiator, partner } => ("contact", initiator, Some(partner)),
            EventKind::Infection { source, target } => ("infection", source, Some(target)),
            EventKind::DetectionRandom(v) => ("detection_random", v, None),
            EventKind::DetectionTraced(v) => ("detection_traced", v, None),
            EventKind::Null => continue,
        };
        events.row([
            format_day(e.day),
            kind.to_string(),
            a.to_string(),
            b.map_or(String::new(), |b| b.to_string()),
        ])?;
    }
    events.finish()
}

fn counts_row(c: &Counts) -> [String; 6] {
    [
        format_day(c.day),
        c.susceptible.to_string(),
        c.infective.to_string(),
        c.removed.to_string(),
        c.random.to_string(),
        c.traced.to_string(),
    ]
}

/// `diagnostics.csv`: one row per ABC iteration.
pub fn write_diagnostics(dir: &Path, outcome: &AbcOutcome) -> Result<(), ExportError> {
    let mut header = vec![
        "iteration",
        "epsilon",
        "attempts",
        "undefined",
        "acceptance_rate",
        "mean_distance",
        "max_distance",
    ];
    let names: Vec<String> = Theta::NAMES
        .iter()
        .flat_map(|n| [format!("mean_{n}"), format!("sd_{n}")])
        .collect();
    header.extend(names.iter().map(String::as_str));
    let mut t = Table::create(dir.join("diagnostics.csv"), &header)?;
    for d in &outcome.diagnostics {
        let mut row = vec![
            d.iteration.to_string(),
            d.epsilon.to_string(),
            d.attempts.to_string(),
            d.undefined.to_string(),
            d.acceptance_rate.to_string(),
            d.mean_distance.to_string(),
            d.max_distance.to_string(),
        ];
        for (m, s) in d.mean.iter().zip(&d.sd) {
            row.push(m.to_string());
            row.push(s.to_string());
        }
        t.row(row)?;
    }
    t.finish()
}

/// `posterior.csv`: weighted mean and sd per parameter next to the prior's.
pub fn write_posterior(
    dir: &Path,
    mean: &[f64],
    sd: &[f64],
    prior: &PriorSpec,
) -> Result<(), ExportError> {
    let mut t = Table::create(
        dir.join("posterior.csv"),
        &["parameter", "mean", "sd", "prior_mean", "prior_sd"],
    )?;
    for (k, name) in Theta::NAMES.iter().enumerate() {
        let (pm, ps) = prior.params[k].nominal_moments();
        t.row([
            name.to_string(),
            mean[k].to_string(),
            sd[k].to_string(),
            pm.to_string(),
            ps.to_string(),
        ])?;
    }
    t.finish()
}

/// `particles.csv`: the final population.
pub fn write_particles(dir: &Path, outcome: &AbcOutcome) -> Result<(), ExportError> {
    let mut header = vec!["particle", "weight", "distance"];
    header.extend(Theta::NAMES);
    let mut t = Table::create(dir.join("particles.csv"), &header)?;
    for (i, p) in outcome.population.iter().enumerate() {
        let mut row = vec![i.to_string(), p.weight.to_string(), p.distance.to_string()];
        row.extend(p.params.iter().map(f64::to_string));
        t.row(row)?;
    }
    t.finish()
}

/// `curves.csv`: compartment counts of resimulated particles on a day grid.
pub fn write_curves(dir: &Path, curves: &[(usize, Vec<Counts>)]) -> Result<(), ExportError> {
    let mut t = Table::create(
        dir.join("curves.csv"),
        &[
            "particle",
            "day",
            "susceptible",
            "infective",
            "removed",
            "random",
            "traced",
        ],
    )?;
    for (particle, counts) in curves {
        for c in counts {
            let mut row = vec![particle.to_string()];
            row.extend(counts_row(c));
            t.row(row)?;
        }
    }
    t.finish()
}
