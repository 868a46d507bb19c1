use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelConfigJson;

/// One vertex of the network: a batch of branching-process nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapsedVertex {
    pub birth_time: f64,
    /// Unknown for ingested networks.
    pub fitness: Option<f64>,
    /// Batch size `M_v`; unknown for ingested networks.
    pub out_target: Option<u32>,
    /// Nodes born into the batch so far.
    pub members_born: u32,
}

/// A directed edge `source -> target` created at `time`. `source` is the
/// citing (newer) side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeEvent {
    pub time: f64,
    pub source: u32,
    pub target: u32,
}

impl EdgeEvent {
    pub fn is_self(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Synthetic {
        config: ModelConfigJson,
        seed: u64,
        attempts: u32,
    },
    Ingested {
        source: String,
    },
    /// Built in memory (tests, hand-made instances).
    Manual,
}

/// Timestamped birth and edge stream of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRecord {
    /// Vertices in birth order; the index is the vertex id.
    pub vertices: Vec<CollapsedVertex>,
    /// Edges in nondecreasing time order.
    pub edges: Vec<EdgeEvent>,
    pub final_time: f64,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    format_version: u32,
    final_time: f64,
    vertices: usize,
    edges: usize,
    provenance: Provenance,
}

const RECORD_FORMAT_VERSION: u32 = 1;

impl GrowthRecord {
    pub(crate) fn synthetic(vertices: Vec<CollapsedVertex>, edges: Vec<EdgeEvent>, final_time: f64) -> Self {
        Self {
            vertices,
            edges,
            final_time,
            provenance: Provenance::Manual,
        }
    }

    /// A record from bare birth times and `(time, source, target)` triples.
    pub fn from_parts(birth_times: &[f64], edges: &[(f64, u32, u32)], final_time: f64) -> Result<Self> {
        let mut out_deg = vec![0u32; birth_times.len()];
        for &(_, s, _) in edges {
            if let Some(d) = out_deg.get_mut(s as usize) {
                *d += 1;
            }
        }
        let rec = Self {
            vertices: birth_times
                .iter()
                .zip(&out_deg)
                .map(|(&t, &d)| CollapsedVertex {
                    birth_time: t,
                    fitness: None,
                    out_target: None,
                    members_born: d,
                })
                .collect(),
            edges: edges
                .iter()
                .map(|&(time, source, target)| EdgeEvent { time, source, target })
                .collect(),
            final_time,
            provenance: Provenance::Manual,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Received-edge counts at the final time, including self and parallel edges.
    pub fn in_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.vertices.len()];
        for e in &self.edges {
            deg[e.target as usize] += 1;
        }
        deg
    }

    pub fn out_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.vertices.len()];
        for e in &self.edges {
            deg[e.source as usize] += 1;
        }
        deg
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self.provenance, Provenance::Synthetic { .. })
    }

    /// Checks ordering and endpoint invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(Error::data("record has no vertices"));
        }
        for (i, w) in self.vertices.windows(2).enumerate() {
            if w[1].birth_time < w[0].birth_time {
                return Err(Error::data(format!("vertex {} born before vertex {i}", i + 1)));
            }
        }
        let mut last = f64::NEG_INFINITY;
        for (i, e) in self.edges.iter().enumerate() {
            if !(e.time >= last) {
                return Err(Error::data(format!("edge {i} out of time order")));
            }
            last = e.time;
            if e.source as usize >= n || e.target as usize >= n {
                return Err(Error::data(format!("edge {i} references a missing vertex")));
            }
            let src = self.vertices[e.source as usize].birth_time;
            let tgt = self.vertices[e.target as usize].birth_time;
            if src > e.time || tgt > e.time || (!e.is_self() && tgt >= e.time) {
                return Err(Error::data(format!("edge {i} at {} precedes an endpoint's birth", e.time)));
            }
        }
        if self.final_time < last || self.final_time < self.vertices[n - 1].birth_time {
            return Err(Error::data("final time precedes the last event"));
        }
        Ok(())
    }

    /// Writes `vertices.csv`, `edges.csv` (optionally gzip-compressed) and
    /// the `record.json` sidecar into `dir`. Returns the written paths.
    pub fn write_dir(&self, dir: &Path, gzip: bool) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let ext = if gzip { ".csv.gz" } else { ".csv" };

        let vpath = dir.join(format!("vertices{ext}"));
        let mut vtext = String::from("id,birth_time,fitness,out_target\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let fit = v.fitness.map(|f| f.to_string()).unwrap_or_default();
            let m = v.out_target.map(|m| m.to_string()).unwrap_or_default();
            vtext.push_str(&format!("{i},{},{fit},{m}\n", v.birth_time));
        }
        write_maybe_gz(&vpath, vtext.as_bytes(), gzip)?;

        let epath = dir.join(format!("edges{ext}"));
        let mut etext = String::with_capacity(self.edges.len() * 32);
        etext.push_str("time,source,target,self_flag\n");
        for e in &self.edges {
            etext.push_str(&format!("{},{},{},{}\n", e.time, e.source, e.target, e.is_self() as u8));
        }
        write_maybe_gz(&epath, etext.as_bytes(), gzip)?;

        let spath = dir.join("record.json");
        let sidecar = Sidecar {
            format_version: RECORD_FORMAT_VERSION,
            final_time: self.final_time,
            vertices: self.vertices.len(),
            edges: self.edges.len(),
            provenance: self.provenance.clone(),
        };
        let json = serde_json::to_string_pretty(&sidecar)?;
        std::fs::write(&spath, json).map_err(|e| Error::io(&spath, e))?;
        Ok(vec![vpath, epath, spath])
    }

    /// Reads a record written by [`GrowthRecord::write_dir`].
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let spath = dir.join("record.json");
        let text = std::fs::read_to_string(&spath).map_err(|e| Error::io(&spath, e))?;
        let sidecar: Sidecar = serde_json::from_str(&text)?;

        let vtext = read_maybe_gz(dir, "vertices")?;
        let mut rdr = csv::Reader::from_reader(vtext.as_bytes());
        let mut vertices = Vec::with_capacity(sidecar.vertices);
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let id: usize = parse(&rec[0], "vertex id")?;
            if id != i {
                return Err(Error::data(format!("vertex ids must be dense, found {id} at row {i}")));
            }
            vertices.push(CollapsedVertex {
                birth_time: parse(&rec[1], "birth_time")?,
                fitness: opt_parse(&rec[2], "fitness")?,
                out_target: opt_parse(&rec[3], "out_target")?,
                members_born: 0,
            });
        }

        let etext = read_maybe_gz(dir, "edges")?;
        let mut rdr = csv::Reader::from_reader(etext.as_bytes());
        let mut edges = Vec::with_capacity(sidecar.edges);
        for rec in rdr.records() {
            let rec = rec?;
            edges.push(EdgeEvent {
                time: parse(&rec[0], "time")?,
                source: parse(&rec[1], "source")?,
                target: parse(&rec[2], "target")?,
            });
        }
        let mut record = GrowthRecord {
            vertices,
            edges,
            final_time: sidecar.final_time,
            provenance: sidecar.provenance,
        };
        // every node except the root created one edge from its batch
        let out = record.out_degrees();
        for (i, v) in record.vertices.iter_mut().enumerate() {
            v.members_born = out[i];
        }
        if record.is_synthetic() {
            record.vertices[0].members_born += 1;
        }
        record.validate()?;
        Ok(record)
    }
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::data(format!("cannot parse {what} from {s:?}")))
}

fn opt_parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<Option<T>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse(s, what).map(Some)
    }
}

fn write_maybe_gz(path: &Path, bytes: &[u8], gzip: bool) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    if gzip {
        let mut enc = GzEncoder::new(w, Compression::default());
        enc.write_all(bytes).map_err(|e| Error::io(path, e))?;
        enc.finish().map_err(|e| Error::io(path, e))?;
    } else {
        w.write_all(bytes).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn read_maybe_gz(dir: &Path, stem: &str) -> Result<String> {
    let plain = dir.join(format!("{stem}.csv"));
    let gz = dir.join(format!("{stem}.csv.gz"));
    let mut out = String::new();
    if plain.exists() {
        File::open(&plain)
            .and_then(|f| BufReader::new(f).read_to_string(&mut out))
            .map_err(|e| Error::io(&plain, e))?;
    } else {
        File::open(&gz)
            .and_then(|f| GzDecoder::new(BufReader::new(f)).read_to_string(&mut out))
            .map_err(|e| Error::io(&gz, e))?;
    }
    Ok(out)
}
