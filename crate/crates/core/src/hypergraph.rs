//! Typed, labeled, oriented hypergraphs.
//!
//! Vertices carry a type and one (possibly missing) value per attribute of
//! that type. Hyperedges are ordered multisets of vertices: the position a
//! vertex occupies is part of the data, and a vertex may occupy several
//! positions of the same hyperedge. Every occupied position gets its own
//! entry in the incidence index.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Discrete,
    Continuous,
}

impl AttributeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKind::Discrete => "discrete",
            AttributeKind::Continuous => "continuous",
        }
    }
}

impl std::str::FromStr for AttributeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "discrete" => Ok(AttributeKind::Discrete),
            "continuous" => Ok(AttributeKind::Continuous),
            other => Err(format!("unknown attribute kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttributeKind,
}

impl AttributeSchema {
    pub fn new(name: impl Into<String>, kind: AttributeKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexType {
    pub name: String,
    pub attributes: Vec<AttributeSchema>,
}

impl VertexType {
    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeType {
    pub name: String,
    pub arity: usize,
    /// Required vertex type name per position, when constrained.
    pub position_types: Option<Vec<String>>,
}

macro_rules! index_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

index_type!(
    /// Dense index of a vertex, in insertion order.
    VertexIx
);
index_type!(
    /// Dense index of a hyperedge, in insertion order.
    EdgeIx
);
index_type!(VertexTypeIx);
index_type!(EdgeTypeIx);
index_type!(
    /// Interned discrete attribute token.
    Symbol
);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Discrete(Symbol),
    Continuous(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub ty: VertexTypeIx,
    /// One slot per attribute of the vertex type, `None` when missing.
    pub values: Vec<Option<Value>>,
}

impl Vertex {
    pub fn set_value_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    pub ty: EdgeTypeIx,
    pub members: Vec<VertexIx>,
}

/// One occupied position of a hyperedge. Positions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Incidence {
    pub edge: EdgeIx,
    pub position: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("type `{0}` is already declared")]
    DuplicateType(String),
    #[error("attribute `{attribute}` declared twice on type `{ty}`")]
    DuplicateAttribute { ty: String, attribute: String },
    #[error("edge type `{0}` must have arity >= 1")]
    InvalidArity(String),
    #[error("edge type `{ty}` has arity {arity} but {given} position types")]
    PositionTypeCount {
        ty: String,
        arity: usize,
        given: usize,
    },
    #[error("vertex id `{0}` is already used")]
    DuplicateId(String),
    #[error("vertex `{vertex}`: {reason}")]
    SchemaMismatch { vertex: String, reason: String },
    #[error("edge type `{ty}` has arity {expected}, got {got} members")]
    ArityMismatch {
        ty: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge type `{ty}` position {position} requires `{expected}`, vertex `{vertex}` is `{found}`")]
    PositionTypeMismatch {
        ty: String,
        position: usize,
        expected: String,
        vertex: String,
        found: String,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Hypergraph {
    vertex_types: Vec<VertexType>,
    vertex_type_names: HashMap<String, VertexTypeIx>,
    edge_types: Vec<EdgeType>,
    edge_type_names: HashMap<String, EdgeTypeIx>,
    vertices: Vec<Vertex>,
    vertex_ids: HashMap<String, VertexIx>,
    edges: Vec<Hyperedge>,
    incidence: Vec<Vec<Incidence>>,
    symbols: Vec<String>,
    symbol_ids: HashMap<String, Symbol>,
}

impl Hypergraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex_type(
        &mut self,
        name: &str,
        attributes: Vec<AttributeSchema>,
    ) -> Result<VertexTypeIx, HypergraphError> {
        if self.vertex_type_names.contains_key(name) {
            return Err(HypergraphError::DuplicateType(name.to_owned()));
        }
        for (i, a) in attributes.iter().enumerate() {
            if attributes[..i].iter().any(|b| b.name == a.name) {
                return Err(HypergraphError::DuplicateAttribute {
                    ty: name.to_owned(),
                    attribute: a.name.clone(),
                });
            }
        }
        let ix = VertexTypeIx(self.vertex_types.len() as u32);
        self.vertex_types.push(VertexType {
            name: name.to_owned(),
            attributes,
        });
        self.vertex_type_names.insert(name.to_owned(), ix);
        Ok(ix)
    }

    pub fn add_edge_type(
        &mut self,
        name: &str,
        arity: usize,
        position_types: Option<Vec<String>>,
    ) -> Result<EdgeTypeIx, HypergraphError> {
        if self.edge_type_names.contains_key(name) {
            return Err(HypergraphError::DuplicateType(name.to_owned()));
        }
        if arity == 0 {
            return Err(HypergraphError::InvalidArity(name.to_owned()));
        }
        if let Some(types) = &position_types {
            if types.len() != arity {
                return Err(HypergraphError::PositionTypeCount {
                    ty: name.to_owned(),
                    arity,
                    given: types.len(),
                });
            }
            if let Some(unknown) = types
                .iter()
                .find(|t| !self.vertex_type_names.contains_key(t.as_str()))
            {
                return Err(HypergraphError::UnknownType(unknown.clone()));
            }
        }
        let ix = EdgeTypeIx(self.edge_types.len() as u32);
        self.edge_types.push(EdgeType {
            name: name.to_owned(),
            arity,
            position_types,
        });
        self.edge_type_names.insert(name.to_owned(), ix);
        Ok(ix)
    }

    /// Adds a vertex. `values` are textual `(attribute, value)` assignments;
    /// continuous attributes must parse as finite reals. Unassigned
    /// attributes are missing.
    pub fn add_vertex(
        &mut self,
        ty: &str,
        id: &str,
        values: &[(&str, &str)],
    ) -> Result<VertexIx, HypergraphError> {
        let ty_ix = self
            .vertex_type_ix(ty)
            .ok_or_else(|| HypergraphError::UnknownType(ty.to_owned()))?;
        if self.vertex_ids.contains_key(id) {
            return Err(HypergraphError::DuplicateId(id.to_owned()));
        }
        let schema = &self.vertex_types[ty_ix.index()];
        let mismatch = |reason: String| HypergraphError::SchemaMismatch {
            vertex: id.to_owned(),
            reason,
        };
        let mut slots: Vec<Option<Value>> = vec![None; schema.attributes.len()];
        let mut pending_symbols = Vec::new();
        for &(name, raw) in values {
            let a = schema
                .attribute_index(name)
                .ok_or_else(|| mismatch(format!("type `{ty}` has no attribute `{name}`")))?;
            if slots[a].is_some() || pending_symbols.iter().any(|(i, _)| *i == a) {
                return Err(mismatch(format!("attribute `{name}` assigned twice")));
            }
            match schema.attributes[a].kind {
                AttributeKind::Continuous => {
                    let x: f64 = raw.parse().map_err(|_| {
                        mismatch(format!(
                            "attribute `{name}` is continuous, `{raw}` is not a number"
                        ))
                    })?;
                    if !x.is_finite() {
                        return Err(mismatch(format!(
                            "attribute `{name}` must be finite, got `{raw}`"
                        )));
                    }
                    slots[a] = Some(Value::Continuous(x));
                }
                AttributeKind::Discrete => pending_symbols.push((a, raw)),
            }
        }
        // Intern only once the whole assignment is known to be valid.
        for (a, raw) in pending_symbols {
            slots[a] = Some(Value::Discrete(self.intern(raw)));
        }
        let ix = VertexIx(self.vertices.len() as u32);
        self.vertices.push(Vertex {
            id: id.to_owned(),
            ty: ty_ix,
            values: slots,
        });
        self.vertex_ids.insert(id.to_owned(), ix);
        self.incidence.push(Vec::new());
        Ok(ix)
    }

    pub fn add_hyperedge(&mut self, ty: &str, members: &[&str]) -> Result<EdgeIx, HypergraphError> {
        let ty_ix = self
            .edge_type_ix(ty)
            .ok_or_else(|| HypergraphError::UnknownType(ty.to_owned()))?;
        let edge_type = &self.edge_types[ty_ix.index()];
        if members.len() != edge_type.arity {
            return Err(HypergraphError::ArityMismatch {
                ty: ty.to_owned(),
                expected: edge_type.arity,
                got: members.len(),
            });
        }
        let mut resolved = Vec::with_capacity(members.len());
        for (p, &id) in members.iter().enumerate() {
            let v = self
                .vertex_ix(id)
                .ok_or_else(|| HypergraphError::UnknownVertex(id.to_owned()))?;
            if let Some(types) = &edge_type.position_types {
                let found = &self.vertex_types[self.vertices[v.index()].ty.index()].name;
                if *found != types[p] {
                    return Err(HypergraphError::PositionTypeMismatch {
                        ty: ty.to_owned(),
                        position: p + 1,
                        expected: types[p].clone(),
                        vertex: id.to_owned(),
                        found: found.clone(),
                    });
                }
            }
            resolved.push(v);
        }
        let e = EdgeIx(self.edges.len() as u32);
        for (p, v) in resolved.iter().enumerate() {
            self.incidence[v.index()].push(Incidence {
                edge: e,
                position: p as u32 + 1,
            });
        }
        self.edges.push(Hyperedge {
            ty: ty_ix,
            members: resolved,
        });
        Ok(e)
    }

    pub fn intern(&mut self, token: &str) -> Symbol {
        if let Some(&s) = self.symbol_ids.get(token) {
            return s;
        }
        let s = Symbol(self.symbols.len() as u32);
        self.symbols.push(token.to_owned());
        self.symbol_ids.insert(token.to_owned(), s);
        s
    }

    pub fn symbol(&self, s: Symbol) -> &str {
        &self.symbols[s.index()]
    }

    pub fn symbol_ix(&self, token: &str) -> Option<Symbol> {
        self.symbol_ids.get(token).copied()
    }

    /// All `(hyperedge, position)` entries of `id`, in insertion order.
    pub fn incident_edges(&self, id: &str) -> Result<&[Incidence], HypergraphError> {
        let v = self
            .vertex_ix(id)
            .ok_or_else(|| HypergraphError::UnknownVertex(id.to_owned()))?;
        Ok(self.incidence(v))
    }

    #[inline]
    pub fn incidence(&self, v: VertexIx) -> &[Incidence] {
        &self.incidence[v.index()]
    }

    pub fn vertex_ix(&self, id: &str) -> Option<VertexIx> {
        self.vertex_ids.get(id).copied()
    }

    pub fn vertex_type_ix(&self, name: &str) -> Option<VertexTypeIx> {
        self.vertex_type_names.get(name).copied()
    }

    pub fn edge_type_ix(&self, name: &str) -> Option<EdgeTypeIx> {
        self.edge_type_names.get(name).copied()
    }

    #[inline]
    pub fn vertex(&self, v: VertexIx) -> &Vertex {
        &self.vertices[v.index()]
    }

    #[inline]
    pub fn edge(&self, e: EdgeIx) -> &Hyperedge {
        &self.edges[e.index()]
    }

    pub fn vertex_type(&self, t: VertexTypeIx) -> &VertexType {
        &self.vertex_types[t.index()]
    }

    pub fn edge_type(&self, t: EdgeTypeIx) -> &EdgeType {
        &self.edge_types[t.index()]
    }

    pub fn vertex_types(&self) -> &[VertexType] {
        &self.vertex_types
    }

    pub fn edge_types(&self) -> &[EdgeType] {
        &self.edge_types
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices_of_type(&self, t: VertexTypeIx) -> impl Iterator<Item = VertexIx> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter(move |(_, v)| v.ty == t)
            .map(|(i, _)| VertexIx(i as u32))
    }

    /// Renders a stored value as text (the token for discrete values).
    pub fn format_value(&self, value: Value) -> String {
        match value {
            Value::Discrete(s) => self.symbol(s).to_owned(),
            Value::Continuous(x) => x.to_string(),
        }
    }

    /// Checks every structural invariant. An empty report means the graph
    /// is consistent.
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();

        for (i, t) in self.vertex_types.iter().enumerate() {
            if self.vertex_type_names.get(&t.name) != Some(&VertexTypeIx(i as u32)) {
                out.push(Violation::DuplicateTypeName(t.name.clone()));
            }
            for (j, a) in t.attributes.iter().enumerate() {
                if t.attributes[..j].iter().any(|b| b.name == a.name) {
                    out.push(Violation::DuplicateAttribute {
                        ty: t.name.clone(),
                        attribute: a.name.clone(),
                    });
                }
            }
        }
        for (i, t) in self.edge_types.iter().enumerate() {
            if self.edge_type_names.get(&t.name) != Some(&EdgeTypeIx(i as u32)) {
                out.push(Violation::DuplicateTypeName(t.name.clone()));
            }
            if t.arity == 0 {
                out.push(Violation::ZeroArity(t.name.clone()));
            }
            if let Some(p) = &t.position_types {
                if p.len() != t.arity {
                    out.push(Violation::PositionTypeCount(t.name.clone()));
                }
            }
        }

        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertex_ids.get(&v.id) != Some(&VertexIx(i as u32)) {
                out.push(Violation::DuplicateVertexId(v.id.clone()));
            }
            let Some(ty) = self.vertex_types.get(v.ty.index()) else {
                out.push(Violation::UntypedVertex(v.id.clone()));
                continue;
            };
            if v.values.len() != ty.attributes.len() {
                out.push(Violation::ValueCount {
                    vertex: v.id.clone(),
                    expected: ty.attributes.len(),
                    found: v.values.len(),
                });
                continue;
            }
            for (schema, value) in ty.attributes.iter().zip(&v.values) {
                let ok = match (schema.kind, value) {
                    (_, None) => true,
                    (AttributeKind::Discrete, Some(Value::Discrete(s))) => {
                        s.index() < self.symbols.len()
                    }
                    (AttributeKind::Continuous, Some(Value::Continuous(x))) => x.is_finite(),
                    _ => false,
                };
                if !ok {
                    out.push(Violation::BadValue {
                        vertex: v.id.clone(),
                        attribute: schema.name.clone(),
                    });
                }
            }
        }
        if self.incidence.len() != self.vertices.len() {
            out.push(Violation::IncidenceLength {
                expected: self.vertices.len(),
                found: self.incidence.len(),
            });
        }

        let mut expected_total = 0usize;
        for (i, e) in self.edges.iter().enumerate() {
            let eix = EdgeIx(i as u32);
            let Some(et) = self.edge_types.get(e.ty.index()) else {
                out.push(Violation::UntypedEdge(i));
                continue;
            };
            if e.members.len() != et.arity {
                out.push(Violation::EdgeArity {
                    edge: i,
                    ty: et.name.clone(),
                });
            }
            for (p, &m) in e.members.iter().enumerate() {
                expected_total += 1;
                let Some(vertex) = self.vertices.get(m.index()) else {
                    out.push(Violation::DanglingMember {
                        edge: i,
                        position: p + 1,
                    });
                    continue;
                };
                if let Some(types) = &et.position_types {
                    let found = self.vertex_types.get(vertex.ty.index()).map(|t| &t.name);
                    if types.get(p) != found {
                        out.push(Violation::PositionType {
                            edge: i,
                            position: p + 1,
                            vertex: vertex.id.clone(),
                        });
                    }
                }
                let entry = Incidence {
                    edge: eix,
                    position: p as u32 + 1,
                };
                let hits = self
                    .incidence
                    .get(m.index())
                    .map_or(0, |inc| inc.iter().filter(|&&x| x == entry).count());
                if hits != 1 {
                    out.push(Violation::IncidenceMismatch {
                        vertex: vertex.id.clone(),
                        edge: i,
                        position: p + 1,
                        entries: hits,
                    });
                }
            }
        }
        for (v, entries) in self.incidence.iter().enumerate() {
            for inc in entries {
                let ok = self
                    .edges
                    .get(inc.edge.index())
                    .and_then(|e| e.members.get((inc.position as usize).wrapping_sub(1)))
                    .is_some_and(|&m| m.index() == v);
                if !ok {
                    let vertex = self
                        .vertices
                        .get(v)
                        .map_or_else(|| format!("#{v}"), |x| x.id.clone());
                    out.push(Violation::StrayIncidence {
                        vertex,
                        edge: inc.edge.index(),
                        position: inc.position as usize,
                    });
                }
            }
        }
        let found_total: usize = self.incidence.iter().map(Vec::len).sum();
        if found_total != expected_total {
            out.push(Violation::IncidenceTotal {
                expected: expected_total,
                found: found_total,
            });
        }
        ValidationReport { violations: out }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateTypeName(String),
    DuplicateAttribute {
        ty: String,
        attribute: String,
    },
    ZeroArity(String),
    PositionTypeCount(String),
    DuplicateVertexId(String),
    UntypedVertex(String),
    ValueCount {
        vertex: String,
        expected: usize,
        found: usize,
    },
    BadValue {
        vertex: String,
        attribute: String,
    },
    IncidenceLength {
        expected: usize,
        found: usize,
    },
    UntypedEdge(usize),
    EdgeArity {
        edge: usize,
        ty: String,
    },
    DanglingMember {
        edge: usize,
        position: usize,
    },
    PositionType {
        edge: usize,
        position: usize,
        vertex: String,
    },
    IncidenceMismatch {
        vertex: String,
        edge: usize,
        position: usize,
        entries: usize,
    },
    StrayIncidence {
        vertex: String,
        edge: usize,
        position: usize,
    },
    IncidenceTotal {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateTypeName(t) => write!(f, "type name `{t}` is not unique"),
            Violation::DuplicateAttribute { ty, attribute } => {
                write!(f, "type `{ty}` declares attribute `{attribute}` twice")
            }
            Violation::ZeroArity(t) => write!(f, "edge type `{t}` has arity 0"),
            Violation::PositionTypeCount(t) => {
                write!(f, "edge type `{t}` position types do not match its arity")
            }
            Violation::DuplicateVertexId(v) => write!(f, "vertex id `{v}` is not unique"),
            Violation::UntypedVertex(v) => write!(f, "vertex `{v}` has an undeclared type"),
            Violation::ValueCount {
                vertex,
                expected,
                found,
            } => write!(f, "vertex `{vertex}` has {found} value slots, schema has {expected}"),
            Violation::BadValue { vertex, attribute } => write!(
                f,
                "vertex `{vertex}` attribute `{attribute}` does not conform to its kind"
            ),
            Violation::IncidenceLength { expected, found } => {
                write!(f, "incidence index has {found} rows, expected {expected}")
            }
            Violation::UntypedEdge(e) => write!(f, "edge #{e} has an undeclared type"),
            Violation::EdgeArity { edge, ty } => {
                write!(f, "edge #{edge} does not match the arity of `{ty}`")
            }
            Violation::DanglingMember { edge, position } => {
                write!(f, "edge #{edge} position {position} names no vertex")
            }
            Violation::PositionType {
                edge,
                position,
                vertex,
            } => write!(
                f,
                "edge #{edge} position {position} holds `{vertex}` of the wrong type"
            ),
            Violation::IncidenceMismatch {
                vertex,
                edge,
                position,
                entries,
            } => write!(
                f,
                "vertex `{vertex}` has {entries} incidence entries for edge #{edge} position {position}, expected 1"
            ),
            Violation::StrayIncidence {
                vertex,
                edge,
                position,
            } => write!(
                f,
                "vertex `{vertex}` lists edge #{edge} position {position} which it does not occupy"
            ),
            Violation::IncidenceTotal { expected, found } => write!(
                f,
                "incidence index holds {found} entries, hyperedges occupy {expected} positions"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}
