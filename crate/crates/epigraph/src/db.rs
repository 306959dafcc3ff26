//! Contact database ingestion.
//!
//! `vertices.csv`: `id,detect_day,detect_type,gender,orientation` with
//! `detect_type` in {RAND, CT}, `gender` in {M, F} and `orientation` in
//! {HETERO, BI}. `edges.csv`: `id_a,id_b`. Headers are required (an empty
//! file is an empty table); extra columns are ignored.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use epigraph_core::graph::{DetectionType, Gender, ObservedLabel, Orientation, Snapshot, VertexId};

#[derive(Debug, thiserror::Error)]
pub enum DbError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Row {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: String, column: &'static str },
}

/// Detected individuals and the contacts recorded between them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContactDb {
    pub vertices: BTreeMap<VertexId, ObservedLabel>,
    /// Pairs with `a < b`, sorted, without duplicates.
    pub edges: Vec<(VertexId, VertexId)>,
}

impl ContactDb {
    pub fn from_snapshot(snapshot: &Snapshot) -> Self {
        Self {
            vertices: snapshot.vertices.iter().copied().collect(),
            edges: snapshot.edges.clone(),
        }
    }

    /// Observable network on `day`: individuals detected no later than
    /// `day` and the contacts among them.
    pub fn snapshot(&self, day: f64) -> Snapshot {
        let vertices: Vec<(VertexId, ObservedLabel)> = self
            .vertices
            .iter()
            .filter(|(_, l)| l.detection_time <= day)
            .map(|(&id, &l)| (id, l))
            .collect();
        let seen = |id: VertexId| self.vertices[&id].detection_time <= day;
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| seen(a) && seen(b))
            .collect();
        Snapshot {
            day,
            vertices,
            edges,
        }
    }

    pub fn snapshots(&self, days: &[f64]) -> Vec<Snapshot> {
        days.iter().map(|&d| self.snapshot(d)).collect()
    }
}

pub fn parse_detection_type(s: &str) -> Option<DetectionType> {
    match s {
        "RAND" => Some(DetectionType::Random),
        "CT" => Some(DetectionType::ContactTraced),
        _ => None,
    }
}

pub fn parse_gender(s: &str) -> Option<Gender> {
    match s {
        "M" => Some(Gender::Male),
        "F" => Some(Gender::Female),
        _ => None,
    }
}

pub fn parse_orientation(s: &str) -> Option<Orientation> {
    match s {
        "HETERO" => Some(Orientation::Hetero),
        "BI" => Some(Orientation::Bisexual),
        _ => None,
    }
}

fn open(path: &Path) -> Result<Vec<u8>, DbError> {
    let mut buf = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|source| DbError::Io {
            path: path.display().to_string(),
            source,
        })?;
    Ok(buf)
}

/// Parsed rows of a headed CSV file, keyed by the requested columns.
fn read_table<const N: usize>(
    path: &Path,
    columns: [&'static str; N],
) -> Result<Vec<(u64, [String; N])>, DbError> {
    let bytes = open(path)?;
    let name = path.display().to_string();
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let headers = reader.headers().map_err(|e| DbError::Row {
        path: name.clone(),
        line: 1,
        message: e.to_string(),
    })?;
    let mut index = [0usize; N];
    for (slot, column) in index.iter_mut().zip(columns) {
        *slot = headers
            .iter()
            .position(|h| h == column)
            .ok_or(DbError::MissingColumn {
                path: name.clone(),
                column,
            })?;
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DbError::Row {
            path: name.clone(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut fields: [String; N] = std::array::from_fn(|_| String::new());
        for (k, &i) in index.iter().enumerate() {
            fields[k] = record
                .get(i)
                .ok_or_else(|| DbError::Row {
                    path: name.clone(),
                    line,
                    message: format!("missing field `{}`", columns[k]),
                })?
                .to_string();
        }
        rows.push((line, fields));
    }
    Ok(rows)
}

/// Reads a vertex and an edge table.
pub fn load_contact_db(vertices_path: &Path, edges_path: &Path) -> Result<ContactDb, DbError> {
    let vname = vertices_path.display().to_string();
    let bad = |path: &str, line: u64, message: String| DbError::Row {
        path: path.to_string(),
        line,
        message,
    };
    let mut vertices = BTreeMap::new();
    let rows = read_table(
        vertices_path,
        ["id", "detect_day", "detect_type", "gender", "orientation"],
    )?;
    for (line, [id, day, kind, gender, orientation]) in rows {
        let id: VertexId = id
            .parse()
            .map_err(|_| bad(&vname, line, format!("invalid id `{id}`")))?;
        if day.is_empty() {
            return Err(bad(&vname, line, "detection time is missing".into()));
        }
        let detection_time: f64 = day
            .parse()
            .ok()
            .filter(|d: &f64| d.is_finite())
            .ok_or_else(|| bad(&vname, line, format!("invalid detect_day `{day}`")))?;
        let label = ObservedLabel {
            detection_time,
            detection_type: parse_detection_type(&kind)
                .ok_or_else(|| bad(&vname, line, format!("invalid detect_type `{kind}`")))?,
            gender: parse_gender(&gender)
                .ok_or_else(|| bad(&vname, line, format!("invalid gender `{gender}`")))?,
            orientation: parse_orientation(&orientation)
                .ok_or_else(|| bad(&vname, line, format!("invalid orientation `{orientation}`")))?,
        };
        if vertices.insert(id, label).is_some() {
            return Err(bad(&vname, line, format!("duplicate id {id}")));
        }
    }

    let ename = edges_path.display().to_string();
    let mut edges = Vec::new();
    for (line, [a, b]) in read_table(edges_path, ["id_a", "id_b"])? {
        let parse = |s: &str| -> Result<VertexId, DbError> {
            let id: VertexId = s
                .parse()
                .map_err(|_| bad(&ename, line, format!("invalid id `{s}`")))?;
            if !vertices.contains_key(&id) {
                return Err(bad(
                    &ename,
                    line,
                    format!("edge references unknown id {id}"),
                ));
            }
            Ok(id)
        };
        let (a, b) = (parse(&a)?, parse(&b)?);
        if a == b {
            return Err(bad(&ename, line, format!("self loop on {a}")));
        }
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(ContactDb { vertices, edges })
}
