use std::collections::HashMap;
use std::path::Path;

use crate::engine::{CollapsedVertex, EdgeEvent, GrowthRecord, Provenance};
use crate::error::{Error, Result};

/// A CSV row that ingestion skipped, with its 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRow {
    pub file: String,
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestResult {
    pub record: GrowthRecord,
    /// Original vertex label of each dense id.
    pub labels: Vec<String>,
    pub rejected: Vec<RejectedRow>,
}

struct RawEdge {
    line: u64,
    time: f64,
    source: String,
    target: String,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn column(headers: &csv::StringRecord, name: &str, file: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::data(format!("{file}: missing column {name}")))
}

/// Builds a record from a timestamped edge list (`time,source,target`) and
/// an optional vertex list (`vertex_id,birth_time`).
///
/// Births come from the vertex list when given, otherwise from the first
/// edge in which the vertex appears. An edge is rejected when its source is
/// born after it or its target is not born strictly before it, so an edge
/// that introduces its own target is always rejected. Times are shifted so
/// the earliest birth is 0 and ids are assigned in birth order.
pub fn ingest_real_network(edges_csv: &str, vertices_csv: Option<&str>, source: &str) -> Result<IngestResult> {
    let mut rejected = Vec::new();
    let mut supplied: HashMap<String, f64> = HashMap::new();
    let mut supplied_order: Vec<String> = Vec::new();
    if let Some(text) = vertices_csv {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        let (id_col, birth_col) = (column(&headers, "vertex_id", "vertices")?, column(&headers, "birth_time", "vertices")?);
        for (i, rec) in rdr.records().enumerate() {
            let line = i as u64 + 2;
            let rec = rec?;
            let reject = |reason: String| RejectedRow { file: "vertices".into(), line, reason };
            let id = rec.get(id_col).unwrap_or("").to_string();
            match rec.get(birth_col).and_then(|s| s.parse::<f64>().ok()).filter(|t| t.is_finite()) {
                None => rejected.push(reject("unparsable birth_time".into())),
                Some(_) if supplied.contains_key(&id) => rejected.push(reject(format!("duplicate vertex {id}"))),
                Some(t) => {
                    supplied.insert(id.clone(), t);
                    supplied_order.push(id);
                }
            }
        }
    }

    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(edges_csv.as_bytes());
    let headers = rdr.headers()?.clone();
    let cols = [
        column(&headers, "time", "edges")?,
        column(&headers, "source", "edges")?,
        column(&headers, "target", "edges")?,
    ];
    let mut raw = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec?;
        match rec.get(cols[0]).and_then(|s| s.parse::<f64>().ok()).filter(|t| t.is_finite()) {
            Some(time) => raw.push(RawEdge {
                line,
                time,
                source: rec.get(cols[1]).unwrap_or("").to_string(),
                target: rec.get(cols[2]).unwrap_or("").to_string(),
            }),
            None => rejected.push(RejectedRow { file: "edges".into(), line, reason: "unparsable time".into() }),
        }
    }
    raw.sort_by(|a, b| a.time.total_cmp(&b.time));

    // Vertex births in first-seen order; supplied vertices come first.
    let mut birth: HashMap<String, f64> = supplied;
    let mut order: Vec<String> = supplied_order;
    let mut accepted: Vec<&RawEdge> = Vec::with_capacity(raw.len());
    for e in &raw {
        for v in [&e.source, &e.target] {
            if !birth.contains_key(v) {
                birth.insert(v.clone(), e.time);
                order.push(v.clone());
            }
        }
        let (sb, tb) = (birth[&e.source], birth[&e.target]);
        let reason = if sb > e.time {
            format!("source {} born at {sb}, after the edge at {}", e.source, e.time)
        } else if tb >= e.time {
            format!("target {} born at {tb}, not before the edge at {}", e.target, e.time)
        } else {
            accepted.push(e);
            continue;
        };
        rejected.push(RejectedRow { file: "edges".into(), line: e.line, reason });
    }
    if order.is_empty() {
        return Err(Error::data("no vertices could be ingested"));
    }

    // Dense ids by birth time, ties kept in first-seen order.
    let mut by_birth: Vec<(f64, String)> = order.into_iter().map(|v| (birth[&v], v)).collect();
    by_birth.sort_by(|a, b| a.0.total_cmp(&b.0));
    let t0 = by_birth[0].0;
    let id: HashMap<&str, u32> = by_birth.iter().enumerate().map(|(i, (_, v))| (v.as_str(), i as u32)).collect();
    let edges: Vec<EdgeEvent> = accepted
        .iter()
        .map(|e| EdgeEvent {
            time: e.time - t0,
            source: id[e.source.as_str()],
            target: id[e.target.as_str()],
        })
        .collect();
    let mut vertices: Vec<CollapsedVertex> = by_birth
        .iter()
        .map(|(b, _)| CollapsedVertex {
            birth_time: b - t0,
            fitness: None,
            out_target: None,
            members_born: 0,
        })
        .collect();
    for e in &edges {
        vertices[e.source as usize].members_born += 1;
    }
    let last_edge = edges.last().map_or(0.0, |e| e.time);
    let final_time = last_edge.max(vertices.last().map_or(0.0, |v| v.birth_time));
    let record = GrowthRecord {
        vertices,
        edges,
        final_time,
        provenance: Provenance::Ingested { source: source.to_string() },
    };
    record.validate()?;
    for r in &rejected {
        log::warn!("{source}: {} line {}: {}", r.file, r.line, r.reason);
    }
    Ok(IngestResult {
        record,
        labels: by_birth.into_iter().map(|(_, v)| v).collect(),
        rejected,
    })
}

/// File-based form of [`ingest_real_network`].
pub fn ingest_files(edges: &Path, vertices: Option<&Path>) -> Result<IngestResult> {
    let etext = read_text(edges)?;
    let vtext = vertices.map(read_text).transpose()?;
    ingest_real_network(&etext, vtext.as_deref(), &edges.display().to_string())
}

/// Writes a record in the ingestion format: `edges.csv` with
/// `time,source,target` and `vertices.csv` with `vertex_id,birth_time`.
pub fn export_edge_list(record: &GrowthRecord, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut e = String::from("time,source,target\n");
    for ev in &record.edges {
        e.push_str(&format!("{},{},{}\n", ev.time, ev.source, ev.target));
    }
    let mut v = String::from("vertex_id,birth_time\n");
    for (i, x) in record.vertices.iter().enumerate() {
        v.push_str(&format!("{i},{}\n", x.birth_time));
    }
    let (ep, vp) = (dir.join("edges.csv"), dir.join("vertices.csv"));
    std::fs::write(&ep, e).map_err(|err| Error::io(&ep, err))?;
    std::fs::write(&vp, v).map_err(|err| Error::io(&vp, err))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_instance() {
        // b first appears citing a at 12; c cites a and b at 15.
        let edges = "time,source,target\n15,c,a\n12,b,a\n15,c,b\n";
        let verts = "vertex_id,birth_time\na,10\n";
        let r = ingest_real_network(edges, Some(verts), "hand").unwrap();
        assert!(r.rejected.is_empty());
        assert_eq!(r.labels, vec!["a", "b", "c"]);
        let births: Vec<f64> = r.record.vertices.iter().map(|v| v.birth_time).collect();
        assert_eq!(births, vec![0.0, 2.0, 5.0]);
        let e: Vec<(f64, u32, u32)> = r.record.edges.iter().map(|e| (e.time, e.source, e.target)).collect();
        assert_eq!(e, vec![(2.0, 1, 0), (5.0, 2, 0), (5.0, 2, 1)]);
        assert_eq!(r.record.final_time, 5.0);
    }

    #[test]
    fn unknown_target_is_rejected() {
        let edges = "time,source,target\n1,x,y\n2,z,x\n2,z,y\n";
        let r = ingest_real_network(edges, None, "t").unwrap();
        assert_eq!(r.rejected.len(), 1);
        assert_eq!(r.rejected[0].line, 2);
        assert_eq!(r.labels, vec!["x", "y", "z"]);
        // x and y are born at 1 by the rejected edge; both later edges stand
        assert_eq!(r.record.num_edges(), 2);
    }

    #[test]
    fn cyclic_timestamp_is_rejected() {
        let edges = "time,source,target\n5,a,b\n";
        let verts = "vertex_id,birth_time\na,1\nb,6\n";
        let r = ingest_real_network(edges, Some(verts), "t").unwrap();
        assert_eq!(r.rejected.len(), 1);
        assert_eq!(r.record.num_edges(), 0);
        assert_eq!(r.record.num_vertices(), 2);
    }

    #[test]
    fn reingestion_is_idempotent() {
        let edges = "time,source,target\n1,1,0\n2,2,0\n3,2,1\n3,3,2\n";
        let verts = "vertex_id,birth_time\n0,0\n1,1\n2,2\n3,3\n";
        let a = ingest_real_network(edges, Some(verts), "t").unwrap().record;
        let dir = tempfile::tempdir().unwrap();
        export_edge_list(&a, dir.path()).unwrap();
        let b = ingest_files(&dir.path().join("edges.csv"), Some(&dir.path().join("vertices.csv"))).unwrap();
        assert_eq!(b.record.vertices, a.vertices);
        assert_eq!(b.record.edges, a.edges);
    }
}
