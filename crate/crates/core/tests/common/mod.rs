#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relsim::hypergraph::{AttributeKind, Hypergraph, Value};
use relsim::matrix::Matrix;
use relsim::Dataset;

/// Objects A, B with attributes; elements C, D, E; R(A,C), R(A,D), R(B,E),
/// F(A,B,D).
pub const FIGURE: &str = "\
vertex_type object Attr1:discrete Attr2:continuous
vertex_type element
edge_type R 2
edge_type F 3
target object
v object A Attr1=X Attr2=1.5
v object B Attr1=Y Attr2=4
v element C
v element D
v element E
e R A C
e R A D
e R B E
e F A B D
";

pub fn figure() -> Dataset {
    relsim::parse_dataset(FIGURE).unwrap()
}

/// Declarations and facts of a random dataset, as separate line lists.
pub struct RandomText {
    pub declarations: Vec<String>,
    pub facts: Vec<String>,
}

impl RandomText {
    pub fn text(&self) -> String {
        let mut s = self.declarations.join("\n");
        s.push('\n');
        s.push_str(&self.facts.join("\n"));
        s.push('\n');
        s
    }

    pub fn shuffled(&self, rng: &mut impl Rng) -> String {
        let mut facts = self.facts.clone();
        facts.shuffle(rng);
        let mut s = self.declarations.join("\n");
        s.push('\n');
        s.push_str(&facts.join("\n"));
        s.push('\n');
        s
    }
}

/// Random dataset with at most `max_vertices` vertices and `max_edges`
/// hyperedges of arity 1..3. At least two vertices are of the target type.
pub fn random_text(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> RandomText {
    let declarations = vec![
        "vertex_type T colour:discrete size:continuous".to_string(),
        "vertex_type U shape:discrete weight:continuous".to_string(),
        "edge_type Solo 1".to_string(),
        "edge_type Pair 2".to_string(),
        "edge_type Pair2 2".to_string(),
        "edge_type Triple 3".to_string(),
        "target T".to_string(),
    ];
    let n = rng.gen_range(2..=max_vertices.max(2));
    let mut facts = Vec::new();
    let mut ids = Vec::new();
    for i in 0..n {
        let id = format!("v{i}");
        let target = i < 2 || rng.gen_bool(0.6);
        let (ty, d, c) = if target {
            ("T", "colour", "size")
        } else {
            ("U", "shape", "weight")
        };
        let mut line = format!("v {ty} {id}");
        if rng.gen_bool(0.8) {
            line.push_str(&format!(" {d}={}", ["p", "q", "r"][rng.gen_range(0..3)]));
        }
        if rng.gen_bool(0.8) {
            // a few repeated values so ties and zero spreads occur
            let x = (rng.gen_range(0..8) as f64) * 0.5;
            line.push_str(&format!(" {c}={x}"));
        }
        facts.push(line);
        ids.push(id);
    }
    let m = rng.gen_range(0..=max_edges);
    for _ in 0..m {
        let (ty, arity) =
            [("Solo", 1), ("Pair", 2), ("Pair2", 2), ("Triple", 3)][rng.gen_range(0..4)];
        let members: Vec<&str> = (0..arity)
            .map(|_| ids[rng.gen_range(0..n)].as_str())
            .collect();
        facts.push(format!("e {ty} {}", members.join(" ")));
    }
    RandomText {
        declarations,
        facts,
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One level of a brute-force neighbourhood tree, keyed by vertex index
/// and by `(edge type index, position)`.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct BruteLevel {
    pub vertices: BTreeMap<usize, u32>,
    pub labels: BTreeMap<(usize, u32), u32>,
}

/// Level-by-level expansion by scanning the edge list. Level 0 holds the
/// root alone.
pub fn brute_levels(g: &Hypergraph, root: usize, depth: usize) -> Vec<BruteLevel> {
    let mut levels = vec![BruteLevel {
        vertices: BTreeMap::from([(root, 1)]),
        labels: BTreeMap::new(),
    }];
    let mut frontier: Vec<usize> = vec![root];
    for _ in 1..=depth {
        let mut level = BruteLevel::default();
        for &u in &frontier {
            for e in g.edges() {
                let members: Vec<usize> = e.members.iter().map(|m| m.index()).collect();
                for (p, &x) in members.iter().enumerate() {
                    if x != u {
                        continue;
                    }
                    *level
                        .labels
                        .entry((e.ty.index(), p as u32 + 1))
                        .or_default() += 1;
                    for (q, &y) in members.iter().enumerate() {
                        if q != p && y != root {
                            *level.vertices.entry(y).or_default() += 1;
                        }
                    }
                }
            }
        }
        frontier = level.vertices.keys().copied().collect();
        levels.push(level);
    }
    levels
}

/// Observed values of attribute `a` of type `t` at one brute-force level.
#[derive(Debug, Clone, PartialEq)]
pub enum Bag {
    Discrete(BTreeMap<String, u32>),
    Continuous(Vec<f64>),
}

pub fn brute_bag(g: &Hypergraph, level: &BruteLevel, t: usize, a: usize) -> Bag {
    let kind = g.vertex_types()[t].attributes[a].kind;
    let mut discrete = BTreeMap::new();
    let mut continuous = Vec::new();
    for (&v, &count) in &level.vertices {
        let vx = &g.vertices()[v];
        if vx.ty.index() != t {
            continue;
        }
        match vx.values[a] {
            Some(Value::Discrete(s)) => {
                *discrete.entry(g.symbol(s).to_string()).or_default() += count
            }
            Some(Value::Continuous(x)) => continuous.extend(std::iter::repeat_n(x, count as usize)),
            None => {}
        }
    }
    match kind {
        AttributeKind::Discrete => Bag::Discrete(discrete),
        AttributeKind::Continuous => {
            continuous.sort_by(f64::total_cmp);
            Bag::Continuous(continuous)
        }
    }
}

/// χ² between two count maps over relative frequencies.
pub fn chi2<K: Ord + Clone>(a: &BTreeMap<K, u32>, b: &BTreeMap<K, u32>) -> f64 {
    let ta: u32 = a.values().sum();
    let tb: u32 = b.values().sum();
    if ta == 0 && tb == 0 {
        return 0.0;
    }
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut s = 0.0;
    for k in keys {
        let fa = if ta == 0 {
            0.0
        } else {
            *a.get(k).unwrap_or(&0) as f64 / ta as f64
        };
        let fb = if tb == 0 {
            0.0
        } else {
            *b.get(k).unwrap_or(&0) as f64 / tb as f64
        };
        if fa + fb > 0.0 {
            s += (fa - fb) * (fa - fb) / (fa + fb);
        }
    }
    s
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    (m, v.sqrt())
}

/// Five raw components for every target pair from brute-force trees, with
/// aggregate ranges over all levels of all target trees.
pub fn brute_raw(ds: &Dataset, depth: usize) -> [Matrix; 5] {
    let g = ds.hypergraph();
    let targets: Vec<usize> = ds.targets().iter().map(|v| v.index()).collect();
    let n = targets.len();
    let trees: Vec<Vec<BruteLevel>> = targets.iter().map(|&r| brute_levels(g, r, depth)).collect();
    let types = g.vertex_types();

    // (type, attr) -> [(min, max) of mean, (min, max) of std]
    let mut ranges: BTreeMap<(usize, usize), [(f64, f64); 2]> = BTreeMap::new();
    for tree in &trees {
        for level in tree {
            for (t, vt) in types.iter().enumerate() {
                for a in 0..vt.attributes.len() {
                    if let Bag::Continuous(xs) = brute_bag(g, level, t, a) {
                        if xs.is_empty() {
                            continue;
                        }
                        let (m, s) = mean_std(&xs);
                        let r = ranges
                            .entry((t, a))
                            .or_insert([(f64::INFINITY, f64::NEG_INFINITY); 2]);
                        r[0] = (r[0].0.min(m), r[0].1.max(m));
                        r[1] = (r[1].0.min(s), r[1].1.max(s));
                    }
                }
            }
        }
    }
    let attr_distance = |x: &BruteLevel, y: &BruteLevel| -> f64 {
        let mut s = 0.0;
        for (t, vt) in types.iter().enumerate() {
            for a in 0..vt.attributes.len() {
                match (brute_bag(g, x, t, a), brute_bag(g, y, t, a)) {
                    (Bag::Discrete(p), Bag::Discrete(q)) => s += chi2(&p, &q),
                    (Bag::Continuous(p), Bag::Continuous(q)) => {
                        if p.is_empty() || q.is_empty() {
                            continue;
                        }
                        let (mp, sp) = mean_std(&p);
                        let (mq, sq) = mean_std(&q);
                        let r = ranges[&(t, a)];
                        let (rm, rs) = (r[0].1 - r[0].0, r[1].1 - r[1].0);
                        if rm > 0.0 {
                            s += (mp - mq).abs() / rm;
                        }
                        if rs > 0.0 {
                            s += (sp - sq).abs() / rs;
                        }
                    }
                    _ => unreachable!(),
                }
            }
        }
        s
    };
    let by_type = |level: &BruteLevel, t: usize| -> BTreeMap<usize, u32> {
        level
            .vertices
            .iter()
            .filter(|(&v, _)| g.vertices()[v].ty.index() == t)
            .map(|(&v, &c)| (v, c))
            .collect()
    };

    let mut out: [Matrix; 5] = std::array::from_fn(|_| Matrix::zeros(n));
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (&trees[i], &trees[j]);
            let ad = attr_distance(&x[0], &y[0]);
            let mut nad = 0.0;
            let mut nd = 0.0;
            let mut ed = 0.0;
            for l in 1..=depth {
                nad += attr_distance(&x[l], &y[l]);
                for t in 0..types.len() {
                    nd += chi2(&by_type(&x[l], t), &by_type(&y[l], t));
                }
                ed += chi2(&x[l].labels, &y[l].labels);
            }
            let (ri, rj) = (targets[i], targets[j]);
            let cd = g
                .edges()
                .iter()
                .filter(|e| {
                    let m: Vec<usize> = e.members.iter().map(|v| v.index()).collect();
                    if ri == rj {
                        m.iter().filter(|&&v| v == ri).count() >= 2
                    } else {
                        m.contains(&ri) && m.contains(&rj)
                    }
                })
                .count() as f64;
            for (c, value) in [ad, nad, cd, nd, ed].into_iter().enumerate() {
                out[c].set(i, j, value);
            }
        }
    }
    out
}

/// Normalisation and combination written out from the definitions.
pub fn brute_distance(raw: &[Matrix; 5], w: [f64; 5]) -> Matrix {
    let n = raw[0].dim();
    let maxima: Vec<f64> = raw
        .iter()
        .map(|m| {
            let mut best = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        best = best.max(m.get(i, j));
                    }
                }
            }
            best
        })
        .collect();
    Matrix::from_fn(n, |i, j| {
        let mut s = 0.0;
        for c in 0..5 {
            let x = raw[c].get(i, j);
            let norm = if c == 2 {
                if maxima[c] > 0.0 {
                    1.0 - (x / maxima[c]).min(1.0)
                } else {
                    1.0
                }
            } else if maxima[c] > 0.0 {
                (x / maxima[c]).min(1.0)
            } else {
                0.0
            };
            s += w[c] * norm;
        }
        s.clamp(0.0, 1.0)
    })
}
