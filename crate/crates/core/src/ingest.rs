//! Text formats: datasets, distance matrices, labels and cluster
//! assignments.
//!
//! Dataset files are line based. `#` starts a comment; tokens are separated
//! by whitespace:
//!
//! ```text
//! vertex_type <Name> [<attr>:<discrete|continuous> ...]
//! edge_type <Name> <arity>
//! v <TypeName> <id> [<attr>=<value> ...]
//! e <TypeName> <id1> ... <idArity>
//! label <id> <classToken>
//! target <TypeName>
//! ```
//!
//! The parsed hypergraph is canonical: vertices are inserted in id order and
//! hyperedges in `(type, member ids)` order, so permuting fact lines gives
//! an identical graph.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::clustering::ClusterAssignment;
use crate::dataset::{Dataset, DatasetError};
use crate::dissimilarity::DistanceMatrix;
use crate::hypergraph::{AttributeKind, AttributeSchema, Hypergraph, HypergraphError};
use crate::matrix::Matrix;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: {source}")]
    Schema {
        line: usize,
        #[source]
        source: HypergraphError,
    },
    #[error("line {line}: unknown reference: {what}")]
    UnknownReference { line: usize, what: String },
    #[error("line {line}: {source}")]
    Dataset {
        line: usize,
        #[source]
        source: DatasetError,
    },
    #[error("matrix is {rows}x{cols} but the header has {ids} ids")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        ids: usize,
    },
    #[error("id `{0}` cannot be written to a comma-separated header")]
    InvalidId(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl IngestError {
    fn parse(line: usize, reason: impl Into<String>) -> Self {
        IngestError::Parse {
            line,
            reason: reason.into(),
        }
    }

    fn from_graph(line: usize, err: HypergraphError) -> Self {
        match err {
            HypergraphError::UnknownType(t) => IngestError::UnknownReference {
                line,
                what: format!("type `{t}`"),
            },
            HypergraphError::UnknownVertex(v) => IngestError::UnknownReference {
                line,
                what: format!("vertex `{v}`"),
            },
            source => IngestError::Schema { line, source },
        }
    }
}

const KEYWORDS: [&str; 6] = ["vertex_type", "edge_type", "v", "e", "label", "target"];

/// Non-empty lines with comments removed, paired with 1-based line numbers.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

struct VertexFact<'a> {
    line: usize,
    ty: &'a str,
    id: &'a str,
    values: Vec<(&'a str, &'a str)>,
}

struct EdgeFact<'a> {
    line: usize,
    ty: &'a str,
    members: Vec<&'a str>,
}

pub fn parse_dataset(text: &str) -> Result<Dataset, IngestError> {
    let mut graph = Hypergraph::new();
    let mut vertex_types = Vec::new();
    let mut edge_types = Vec::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    let mut target: Option<(usize, &str)> = None;

    for (line, tokens) in significant_lines(text) {
        let args = &tokens[1..];
        match tokens[0] {
            "vertex_type" => {
                let (name, attrs) = args
                    .split_first()
                    .ok_or_else(|| IngestError::parse(line, "vertex_type needs a name"))?;
                let mut schema = Vec::with_capacity(attrs.len());
                for a in attrs {
                    let (attr, kind) = a.split_once(':').ok_or_else(|| {
                        IngestError::parse(line, format!("expected <attr>:<kind>, got `{a}`"))
                    })?;
                    let kind: AttributeKind = kind
                        .parse()
                        .map_err(|e: String| IngestError::parse(line, e))?;
                    if attr.is_empty() {
                        return Err(IngestError::parse(line, "empty attribute name"));
                    }
                    schema.push(AttributeSchema::new(attr, kind));
                }
                vertex_types.push((line, *name, schema));
            }
            "edge_type" => {
                let [name, arity] = args else {
                    return Err(IngestError::parse(
                        line,
                        "expected `edge_type <Name> <arity>`",
                    ));
                };
                let arity: usize = arity
                    .parse()
                    .map_err(|_| IngestError::parse(line, format!("bad arity `{arity}`")))?;
                edge_types.push((line, *name, arity));
            }
            "v" => {
                let [ty, id, assignments @ ..] = args else {
                    return Err(IngestError::parse(
                        line,
                        "expected `v <Type> <id> [attr=value ...]`",
                    ));
                };
                let values = assignments
                    .iter()
                    .map(|a| {
                        a.split_once('=').ok_or_else(|| {
                            IngestError::parse(line, format!("expected <attr>=<value>, got `{a}`"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                vertices.push(VertexFact {
                    line,
                    ty,
                    id,
                    values,
                });
            }
            "e" => {
                let [ty, members @ ..] = args else {
                    return Err(IngestError::parse(line, "expected `e <Type> <id> ...`"));
                };
                if let Some(bad) = members.iter().find(|m| m.contains('=')) {
                    return Err(IngestError::parse(
                        line,
                        format!("hyperedges carry no attributes (`{bad}`); reify the relationship as a vertex type"),
                    ));
                }
                edges.push(EdgeFact {
                    line,
                    ty,
                    members: members.to_vec(),
                });
            }
            "label" => {
                let [id, class] = args else {
                    return Err(IngestError::parse(line, "expected `label <id> <class>`"));
                };
                labels.push((line, *id, *class));
            }
            "target" => {
                let [ty] = args else {
                    return Err(IngestError::parse(line, "expected `target <Type>`"));
                };
                if target.is_some() {
                    return Err(IngestError::parse(line, "`target` given more than once"));
                }
                target = Some((line, ty));
            }
            other => {
                return Err(IngestError::parse(
                    line,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }

    for (line, name, schema) in vertex_types {
        graph
            .add_vertex_type(name, schema)
            .map_err(|e| IngestError::from_graph(line, e))?;
    }
    for (line, name, arity) in edge_types {
        graph
            .add_edge_type(name, arity, None)
            .map_err(|e| IngestError::from_graph(line, e))?;
    }

    // Canonical insertion order; ties keep file order so duplicate ids are
    // reported at their second occurrence.
    vertices.sort_by(|a, b| a.id.cmp(b.id).then(a.line.cmp(&b.line)));
    for v in &vertices {
        graph
            .add_vertex(v.ty, v.id, &v.values)
            .map_err(|e| IngestError::from_graph(v.line, e))?;
    }
    edges.sort_by(|a, b| {
        a.ty.cmp(b.ty)
            .then_with(|| a.members.cmp(&b.members))
            .then(a.line.cmp(&b.line))
    });
    for e in &edges {
        graph
            .add_hyperedge(e.ty, &e.members)
            .map_err(|err| IngestError::from_graph(e.line, err))?;
    }

    let (target_line, target_ty) =
        target.ok_or_else(|| IngestError::parse(0, "missing `target <Type>` line"))?;
    let target_ix =
        graph
            .vertex_type_ix(target_ty)
            .ok_or_else(|| IngestError::UnknownReference {
                line: target_line,
                what: format!("type `{target_ty}`"),
            })?;

    let mut label_map = BTreeMap::new();
    for (line, id, class) in labels {
        let v = graph
            .vertex_ix(id)
            .ok_or_else(|| IngestError::UnknownReference {
                line,
                what: format!("vertex `{id}`"),
            })?;
        if graph.vertex(v).ty != target_ix {
            return Err(IngestError::Dataset {
                line,
                source: DatasetError::LabelNotTarget(id.to_owned()),
            });
        }
        if label_map.insert(id.to_owned(), class.to_owned()).is_some() {
            return Err(IngestError::parse(
                line,
                format!("vertex `{id}` labeled twice"),
            ));
        }
    }

    Dataset::new(graph, target_ty, label_map).map_err(|source| IngestError::Dataset {
        line: target_line,
        source,
    })
}

pub fn read_dataset(path: &Path) -> Result<Dataset, IngestError> {
    parse_dataset(&read_text(path)?)
}

pub fn read_text(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Serialises a dataset in the line format accepted by [`parse_dataset`].
pub fn write_dataset(dataset: &Dataset) -> String {
    let g = dataset.hypergraph();
    let mut out = String::new();
    for t in g.vertex_types() {
        out.push_str("vertex_type ");
        out.push_str(&t.name);
        for a in &t.attributes {
            let _ = write!(out, " {}:{}", a.name, a.kind.as_str());
        }
        out.push('\n');
    }
    for t in g.edge_types() {
        let _ = writeln!(out, "edge_type {} {}", t.name, t.arity);
    }
    let _ = writeln!(out, "target {}", dataset.target_type_name());
    for v in g.vertices() {
        let ty = g.vertex_type(v.ty);
        let _ = write!(out, "v {} {}", ty.name, v.id);
        for (schema, value) in ty.attributes.iter().zip(&v.values) {
            if let Some(value) = value {
                let _ = write!(out, " {}={}", schema.name, g.format_value(*value));
            }
        }
        out.push('\n');
    }
    for e in g.edges() {
        let _ = write!(out, "e {}", g.edge_type(e.ty).name);
        for &m in &e.members {
            out.push(' ');
            out.push_str(&g.vertex(m).id);
        }
        out.push('\n');
    }
    for (id, class) in dataset.labels() {
        let _ = writeln!(out, "label {id} {class}");
    }
    out
}

/// Header line of ids, then one comma-separated row per id. Values are
/// printed with 17 significant digits, which round-trips every `f64`.
pub fn write_matrix(values: &Matrix, ids: &[String]) -> Result<String, IngestError> {
    if values.dim() != ids.len() {
        return Err(IngestError::DimensionMismatch {
            rows: values.dim(),
            cols: values.dim(),
            ids: ids.len(),
        });
    }
    if let Some(bad) = ids
        .iter()
        .find(|id| id.is_empty() || id.contains(|c: char| c == ',' || c.is_whitespace()))
    {
        return Err(IngestError::InvalidId(bad.clone()));
    }
    let mut out = String::with_capacity(ids.len() * ids.len() * 24);
    out.push_str(&ids.join(","));
    out.push('\n');
    for i in 0..values.dim() {
        for (j, x) in values.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{x:.16e}");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes a matrix given as rows, rejecting non-square input.
pub fn write_rows(rows: Vec<Vec<f64>>, ids: &[String]) -> Result<String, IngestError> {
    let (r, c) = (rows.len(), rows.first().map_or(0, Vec::len));
    let m = Matrix::from_rows(rows).ok_or(IngestError::DimensionMismatch {
        rows: r,
        cols: c,
        ids: ids.len(),
    })?;
    write_matrix(&m, ids)
}

pub fn write_distance_matrix(m: &DistanceMatrix) -> Result<String, IngestError> {
    write_matrix(&m.values, &m.ids)
}

pub fn parse_matrix(text: &str) -> Result<DistanceMatrix, IngestError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(IngestError::parse(1, "empty matrix file"));
    };
    let ids: Vec<String> = header.split(',').map(|s| s.trim().to_owned()).collect();
    if ids.iter().any(String::is_empty) {
        return Err(IngestError::parse(1, "empty id in header"));
    }
    let n = ids.len();
    let mut m = Matrix::zeros(n);
    let mut rows = 0;
    for (i, line) in lines {
        let lineno = i + 1;
        if rows == n {
            return Err(IngestError::parse(lineno, format!("more than {n} rows")));
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n {
            return Err(IngestError::parse(
                lineno,
                format!("expected {n} values, found {}", cells.len()),
            ));
        }
        for (j, cell) in cells.iter().enumerate() {
            let x: f64 = cell
                .trim()
                .parse()
                .map_err(|_| IngestError::parse(lineno, format!("bad number `{cell}`")))?;
            m.set(rows, j, x);
        }
        rows += 1;
    }
    if rows != n {
        return Err(IngestError::parse(
            text.lines().count(),
            format!("expected {n} rows, found {rows}"),
        ));
    }
    Ok(DistanceMatrix::new(ids, m))
}

/// Reads `<id> <class>` or `label <id> <class>` lines. Other dataset
/// directives are skipped, so a full dataset file can serve as a label file.
pub fn parse_labels(text: &str) -> Result<BTreeMap<String, String>, IngestError> {
    let mut out = BTreeMap::new();
    for (line, tokens) in significant_lines(text) {
        let (id, class) = match tokens.as_slice() {
            ["label", id, class] => (*id, *class),
            [kw, ..] if KEYWORDS.contains(kw) => continue,
            [id, class] => (*id, *class),
            _ => return Err(IngestError::parse(line, "expected `<id> <class>`")),
        };
        if out.insert(id.to_owned(), class.to_owned()).is_some() {
            return Err(IngestError::parse(line, format!("`{id}` labeled twice")));
        }
    }
    Ok(out)
}

/// One `<id> <clusterIndex>` line per vertex.
pub fn write_assignment(a: &ClusterAssignment) -> String {
    let mut out = String::new();
    for (id, c) in a.ids.iter().zip(&a.labels) {
        let _ = writeln!(out, "{id} {c}");
    }
    out
}
