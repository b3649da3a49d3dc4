//! Neighbourhood trees.
//!
//! A tree rooted at vertex `v` is summarised level by level: the multiset
//! of vertices at each depth, their per-type restriction, the attribute
//! values observed per `(type, attribute)`, and the `(edge type, parent
//! position)` labels of the hyperedges traversed to reach the level.
//!
//! Expansion rules:
//! * traversing hyperedge `e` from a vertex at position `p` adds every
//!   member occurrence of `e` except position `p` itself and except any
//!   occurrence of the root;
//! * every distinct vertex of level `l` is expanded once to build level
//!   `l + 1`, while level multisets keep their multiplicities;
//! * a vertex other than the root may reappear (and be expanded again) at a
//!   deeper level;
//! * each traversal of a hyperedge contributes exactly one edge label to
//!   the level it produces.

use thiserror::Error;

use crate::hypergraph::{
    AttributeKind, EdgeTypeIx, Hypergraph, Symbol, Value, VertexIx, VertexTypeIx,
};
use crate::multiset::Multiset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("depth must be >= 1, got {0}")]
    InvalidDepth(usize),
    #[error("level {level} is outside 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("unknown vertex type `{0}`")]
    UnknownType(String),
    #[error("type `{ty}` has no attribute `{attribute}`")]
    UnknownAttribute { ty: String, attribute: String },
}

/// Label of a tree edge: the hyperedge type and the position the parent
/// vertex occupies in it (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel {
    pub edge_type: EdgeTypeIx,
    pub parent_position: u32,
}

/// Values of one continuous attribute observed at one level, in ascending
/// order, with their population mean and standard deviation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContinuousBag {
    values: Vec<f64>,
    mean: f64,
    std_dev: f64,
}

impl ContinuousBag {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        if values.is_empty() {
            return Self::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Self {
            values,
            mean,
            std_dev: var.sqrt(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.is_empty()).then_some(self.mean)
    }

    pub fn std_dev(&self) -> Option<f64> {
        (!self.is_empty()).then_some(self.std_dev)
    }
}

/// Observed values of one attribute at one level.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeBag {
    Discrete(Multiset<Symbol>),
    Continuous(ContinuousBag),
}

impl AttributeBag {
    pub fn len(&self) -> usize {
        match self {
            AttributeBag::Discrete(m) => m.total() as usize,
            AttributeBag::Continuous(c) => c.values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Level {
    pub(crate) vertices: Multiset<VertexIx>,
    /// `vertices` split by vertex type, indexed by `VertexTypeIx`.
    pub(crate) by_type: Vec<Multiset<VertexIx>>,
    /// `[type][attribute]`.
    pub(crate) attributes: Vec<Vec<AttributeBag>>,
    pub(crate) edges: Multiset<EdgeLabel>,
}

impl Level {
    fn assemble(
        graph: &Hypergraph,
        vertices: Multiset<VertexIx>,
        edges: Multiset<EdgeLabel>,
    ) -> Self {
        let types = graph.vertex_types();
        let mut by_type: Vec<Vec<(VertexIx, u32)>> = vec![Vec::new(); types.len()];
        let mut discrete: Vec<Vec<Vec<(Symbol, u32)>>> = types
            .iter()
            .map(|t| vec![Vec::new(); t.attributes.len()])
            .collect();
        let mut continuous: Vec<Vec<Vec<f64>>> = types
            .iter()
            .map(|t| vec![Vec::new(); t.attributes.len()])
            .collect();

        for &(v, n) in vertices.entries() {
            let vertex = graph.vertex(v);
            let t = vertex.ty.index();
            by_type[t].push((v, n));
            for (a, value) in vertex.values.iter().enumerate() {
                match value {
                    Some(Value::Discrete(s)) => discrete[t][a].push((*s, n)),
                    Some(Value::Continuous(x)) => {
                        continuous[t][a].extend(std::iter::repeat_n(*x, n as usize))
                    }
                    None => {}
                }
            }
        }

        let attributes = types
            .iter()
            .enumerate()
            .map(|(t, ty)| {
                ty.attributes
                    .iter()
                    .enumerate()
                    .map(|(a, schema)| match schema.kind {
                        AttributeKind::Discrete => AttributeBag::Discrete(Multiset::from_counts(
                            std::mem::take(&mut discrete[t][a]),
                        )),
                        AttributeKind::Continuous => AttributeBag::Continuous(
                            ContinuousBag::from_values(std::mem::take(&mut continuous[t][a])),
                        ),
                    })
                    .collect()
            })
            .collect();

        Level {
            // entries of `vertices` are sorted, so each per-type slice is too
            by_type: by_type.into_iter().map(Multiset::from_counts).collect(),
            vertices,
            attributes,
            edges,
        }
    }
}

/// Per-level multisets describing the neighbourhood of one root vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighbourhoodTree {
    root: VertexIx,
    depth: usize,
    /// Index 0 holds the root alone; 1..=depth are the expanded levels.
    levels: Vec<Level>,
    /// For every vertex `w`, the number of distinct hyperedges whose members
    /// contain both the root and `w` (the root itself counts when an edge
    /// holds it at two or more positions).
    links: Multiset<VertexIx>,
}

impl NeighbourhoodTree {
    pub fn build(graph: &Hypergraph, root: VertexIx, depth: usize) -> Result<Self, TreeError> {
        if root.index() >= graph.vertex_count() {
            return Err(TreeError::UnknownVertex(format!("#{}", root.0)));
        }
        if depth < 1 {
            return Err(TreeError::InvalidDepth(depth));
        }

        let mut levels = Vec::with_capacity(depth + 1);
        levels.push(Level::assemble(
            graph,
            Multiset::from_elements([root]),
            Multiset::new(),
        ));

        let mut frontier = vec![root];
        for _ in 1..=depth {
            let mut reached = Vec::new();
            let mut labels = Vec::new();
            for &u in &frontier {
                for inc in graph.incidence(u) {
                    let edge = graph.edge(inc.edge);
                    labels.push(EdgeLabel {
                        edge_type: edge.ty,
                        parent_position: inc.position,
                    });
                    for (q, &w) in edge.members.iter().enumerate() {
                        if q as u32 + 1 != inc.position && w != root {
                            reached.push(w);
                        }
                    }
                }
            }
            let level = Level::assemble(
                graph,
                Multiset::from_elements(reached),
                Multiset::from_elements(labels),
            );
            frontier = level.vertices.support().collect();
            levels.push(level);
        }

        let mut shared = Vec::new();
        let mut edges: Vec<_> = graph.incidence(root).iter().map(|i| i.edge).collect();
        edges.sort_unstable();
        edges.dedup();
        for e in edges {
            let mut members = graph.edge(e).members.clone();
            members.sort_unstable();
            let root_count = members.iter().filter(|&&m| m == root).count();
            members.dedup();
            for m in members {
                if m != root || root_count >= 2 {
                    shared.push(m);
                }
            }
        }

        Ok(Self {
            root,
            depth,
            levels,
            links: Multiset::from_elements(shared),
        })
    }

    pub fn build_by_id(graph: &Hypergraph, id: &str, depth: usize) -> Result<Self, TreeError> {
        let root = graph
            .vertex_ix(id)
            .ok_or_else(|| TreeError::UnknownVertex(id.to_owned()))?;
        Self::build(graph, root, depth)
    }

    pub fn root(&self) -> VertexIx {
        self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn level(&self, l: usize) -> Result<&Level, TreeError> {
        if l == 0 || l > self.depth {
            return Err(TreeError::LevelOutOfRange {
                level: l,
                depth: self.depth,
            });
        }
        Ok(&self.levels[l])
    }

    pub(crate) fn level_unchecked(&self, l: usize) -> &Level {
        &self.levels[l]
    }

    /// Vertex multiset at level `l` (1-based).
    pub fn level_vertices(&self, l: usize) -> Result<&Multiset<VertexIx>, TreeError> {
        Ok(&self.level(l)?.vertices)
    }

    pub fn level_vertices_of_type(
        &self,
        l: usize,
        ty: VertexTypeIx,
    ) -> Result<&Multiset<VertexIx>, TreeError> {
        self.level(l)?
            .by_type
            .get(ty.index())
            .ok_or_else(|| TreeError::UnknownType(format!("#{}", ty.0)))
    }

    pub fn level_edge_labels(&self, l: usize) -> Result<&Multiset<EdgeLabel>, TreeError> {
        Ok(&self.level(l)?.edges)
    }

    /// Attribute values of type-`ty` vertices at level `l`. Level 0 is the
    /// root's own values. Missing values are omitted.
    pub fn level_attribute_values(
        &self,
        l: usize,
        ty: VertexTypeIx,
        attribute: usize,
    ) -> Result<&AttributeBag, TreeError> {
        if l > self.depth {
            return Err(TreeError::LevelOutOfRange {
                level: l,
                depth: self.depth,
            });
        }
        let per_type = self.levels[l]
            .attributes
            .get(ty.index())
            .ok_or_else(|| TreeError::UnknownType(format!("#{}", ty.0)))?;
        per_type
            .get(attribute)
            .ok_or_else(|| TreeError::UnknownAttribute {
                ty: format!("#{}", ty.0),
                attribute: format!("#{attribute}"),
            })
    }

    /// Name-based variant of [`Self::level_attribute_values`].
    pub fn attribute_values_by_name<'a>(
        &'a self,
        graph: &Hypergraph,
        l: usize,
        ty: &str,
        attribute: &str,
    ) -> Result<&'a AttributeBag, TreeError> {
        let t = graph
            .vertex_type_ix(ty)
            .ok_or_else(|| TreeError::UnknownType(ty.to_owned()))?;
        let a = graph
            .vertex_type(t)
            .attribute_index(attribute)
            .ok_or_else(|| TreeError::UnknownAttribute {
                ty: ty.to_owned(),
                attribute: attribute.to_owned(),
            })?;
        self.level_attribute_values(l, t, a)
    }
}

/// Number of hyperedges containing both roots, each edge counted once.
pub fn root_link_count(g: &NeighbourhoodTree, h: &NeighbourhoodTree) -> u32 {
    g.links.count(&h.root)
}
