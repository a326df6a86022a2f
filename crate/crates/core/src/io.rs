//! JSON and CSV formats.
//!
//! Graph: `{"party_count": q, "vertices": [{"id": 0, "parity": "ket"}, ...],
//! "edges": [{"u": 0, "v": 1, "label": 0}, ...]}` with optional `"party_names"`. State: `{"dims": [...], "amps": [[re, im], ...]}`
//! row-major. Certificate: `{"label": L, "cuts": [{"involution": {"0": 3, ...},
//! "cut_edges": [...], "matrix": [[...], ...]}], "graph": {...}}` where
//! `"graph"` is optional and `"label": null` marks a vertex certificate.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Edge, Parity, PsiGraph};
use crate::linalg::C64;
use crate::locc::SweepRow;
use crate::reflect::{CertificateItems, ConvexityCertificate, ReflectingCut};
use crate::tensor::PureState;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    party_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    party_names: Option<Vec<String>>,
    vertices: Vec<VertexFile>,
    edges: Vec<EdgeFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexFile {
    id: usize,
    parity: Parity,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    u: usize,
    v: usize,
    label: usize,
}

impl Serialize for PsiGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphFile {
            party_count: self.party_count(),
            party_names: self.party_names().map(<[String]>::to_vec),
            vertices: self
                .parities()
                .iter()
                .enumerate()
                .map(|(id, &parity)| VertexFile { id, parity })
                .collect(),
            edges: self
                .edges()
                .iter()
                .map(|e| EdgeFile { u: e.u, v: e.v, label: e.label })
                .collect(),
        }
        .serialize(s)
    }
}

/// Structural decoding only; invariants are left to `validate` so that
/// malformed graphs can still be reported on. Vertex ids may come in any
/// order but must be exactly `0..n`.
impl<'de> Deserialize<'de> for PsiGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = GraphFile::deserialize(d)?;
        let n = f.vertices.len();
        let mut parity = vec![None; n];
        for v in &f.vertices {
            match parity.get_mut(v.id) {
                Some(slot @ None) => *slot = Some(v.parity),
                Some(Some(_)) => {
                    return Err(serde::de::Error::custom(format!("duplicate vertex id {}", v.id)))
                }
                None => {
                    return Err(serde::de::Error::custom(format!(
                        "vertex id {} outside 0..{n}",
                        v.id
                    )))
                }
            }
        }
        let parity = parity.into_iter().map(|p| p.expect("every id filled")).collect();
        let edges = f.edges.iter().map(|e| Edge::new(e.u, e.v, e.label)).collect();
        let g = PsiGraph::new(f.party_count, parity, edges);
        Ok(match f.party_names {
            Some(names) => g.with_party_names(names),
            None => g,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StateFile {
    dims: Vec<usize>,
    amps: Vec<[f64; 2]>,
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateFile {
            dims: self.dims().to_vec(),
            amps: self.amps().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = StateFile::deserialize(d)?;
        let amps = f.amps.iter().map(|&[re, im]| C64::new(re, im)).collect();
        PureState::new(f.dims, amps).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CutFile {
    involution: BTreeMap<usize, usize>,
    cut_edges: Vec<usize>,
    matrix: Vec<Vec<f64>>,
}

/// On-disk certificate, optionally carrying its graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateFile {
    pub label: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PsiGraph>,
    cuts: Vec<CutFile>,
}

impl CertificateFile {
    pub fn from_certificate(cert: &ConvexityCertificate, graph: Option<&PsiGraph>) -> Self {
        let cuts = cert
            .cuts
            .iter()
            .map(|cc| CutFile {
                involution: cc.cut.involution().iter().copied().enumerate().collect(),
                cut_edges: cc.cut.cut_edges().to_vec(),
                matrix: cc
                    .matrix
                    .row_iter()
                    .map(|r| r.iter().copied().collect())
                    .collect(),
            })
            .collect();
        Self {
            label: cert.label(),
            graph: graph.cloned(),
            cuts,
        }
    }

    /// Rebuilds the certificate against `graph`, re-checking every cut.
    pub fn to_certificate(&self, graph: &PsiGraph) -> Result<ConvexityCertificate> {
        let items = match self.label {
            Some(l) => CertificateItems::Edges(l),
            None => CertificateItems::Vertices,
        };
        let mut cert = ConvexityCertificate::new(items);
        for (k, c) in self.cuts.iter().enumerate() {
            let n = graph.vertex_count();
            if c.involution.len() != n || c.involution.keys().copied().ne(0..n) {
                return Err(Error::CertificateMismatch(format!(
                    "cut {k}: involution must map every vertex 0..{n}"
                )));
            }
            let inv: Vec<usize> = c.involution.values().copied().collect();
            let cut = ReflectingCut::from_parts(graph, inv, &c.cut_edges)?;
            let rows = c.matrix.len();
            if c.matrix.iter().any(|r| r.len() != rows) {
                return Err(Error::CertificateMismatch(format!("cut {k}: matrix is not square")));
            }
            let m = DMatrix::from_fn(rows, rows, |i, j| c.matrix[i][j]);
            cert.cuts.push(crate::reflect::CertifiedCut { cut, matrix: m });
        }
        Ok(cert)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

/// Loads a graph and rejects it unless every invariant holds.
pub fn read_graph(path: &Path) -> Result<PsiGraph> {
    let g: PsiGraph = read_json(path)?;
    g.ensure_valid()?;
    Ok(g)
}

pub fn read_state(path: &Path) -> Result<PureState> {
    read_json(path)
}

/// Writes sweep rows with the header `alpha,p_lower,p_det,p_vidal,p_n<n>...`.
pub fn write_sweep_csv<W: Write>(out: W, ns: &[usize], rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["alpha".to_string(), "p_lower".into(), "p_det".into(), "p_vidal".into()];
    header.extend(ns.iter().map(|n| format!("p_n{n}")));
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![
            fmt_f64(row.alpha),
            fmt_f64(row.p_lower),
            fmt_f64(row.p_det),
            fmt_f64(row.p_vidal),
        ];
        rec.extend(row.p_n.iter().map(|&x| fmt_f64(x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a CSV produced by [`write_sweep_csv`].
pub fn read_sweep_csv<R: std::io::Read>(input: R) -> Result<(Vec<usize>, Vec<SweepRow>)> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let ns = headers
        .iter()
        .skip(4)
        .map(|h| {
            h.strip_prefix("p_n")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("unexpected column {h}")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|x| x.parse::<f64>().map_err(|e| Error::InvalidArgument(format!("{x}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 4 + ns.len() {
            return Err(Error::InvalidArgument("ragged sweep row".into()));
        }
        rows.push(SweepRow {
            alpha: vals[0],
            p_lower: vals[1],
            p_det: vals[2],
            p_vidal: vals[3],
            p_n: vals[4..].to_vec(),
        });
    }
    Ok((ns, rows))
}

/// Shortest round-tripping representation.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
