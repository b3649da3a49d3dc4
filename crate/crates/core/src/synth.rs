//! Seeded synthetic datasets with known structure.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::hypergraph::{AttributeKind, AttributeSchema, Hypergraph};

fn id(prefix: &str, i: usize) -> String {
    format!("{prefix}{i:04}")
}

fn finish(h: Hypergraph, target: &str, labels: BTreeMap<String, String>) -> Dataset {
    Dataset::new(h, target, labels).expect("generator builds a consistent dataset")
}

/// `n` targets in two equal classes. Class membership is carried only by
/// the discrete attribute `kind`; `noise` is uniform in `[0, 1)` and every
/// target links to three random `Item` vertices, independent of class.
pub fn attribute_classes(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Hypergraph::new();
    h.add_vertex_type(
        "Entity",
        vec![
            AttributeSchema::new("kind", AttributeKind::Discrete),
            AttributeSchema::new("noise", AttributeKind::Continuous),
        ],
    )
    .unwrap();
    h.add_vertex_type(
        "Item",
        vec![
            AttributeSchema::new("colour", AttributeKind::Discrete),
            AttributeSchema::new("weight", AttributeKind::Continuous),
        ],
    )
    .unwrap();
    h.add_edge_type("Has", 2, None).unwrap();

    let items = (n / 5).max(4);
    for i in 0..items {
        let colour = ["red", "green", "blue"]
            .choose(&mut rng)
            .unwrap()
            .to_string();
        let weight = format!("{}", rng.gen_range(0.0..10.0));
        h.add_vertex(
            "Item",
            &id("i", i),
            &[("colour", &colour), ("weight", &weight)],
        )
        .unwrap();
    }
    let mut labels = BTreeMap::new();
    for i in 0..n {
        let class = if i % 2 == 0 { "left" } else { "right" };
        let noise = format!("{}", rng.gen::<f64>());
        let v = id("e", i);
        h.add_vertex("Entity", &v, &[("kind", class), ("noise", &noise)])
            .unwrap();
        labels.insert(v, class.to_string());
    }
    for i in 0..n {
        for _ in 0..3 {
            let item = id("i", rng.gen_range(0..items));
            h.add_hyperedge("Has", &[&id("e", i), &item]).unwrap();
        }
    }
    finish(h, "Entity", labels)
}

/// Two blocks of `half` targets. Within a block each pair is linked with
/// probability `p`, in both directions so edge-label distributions carry no
/// signal; nothing links across blocks. Attributes are random.
pub fn connectivity_blocks(half: usize, p: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Hypergraph::new();
    h.add_vertex_type(
        "Node",
        vec![
            AttributeSchema::new("tag", AttributeKind::Discrete),
            AttributeSchema::new("score", AttributeKind::Continuous),
        ],
    )
    .unwrap();
    h.add_edge_type("Link", 2, None).unwrap();

    let n = 2 * half;
    let mut labels = BTreeMap::new();
    for i in 0..n {
        let tag = ["x", "y", "z"].choose(&mut rng).unwrap().to_string();
        let score = format!("{}", rng.gen_range(-1.0..1.0));
        let v = id("n", i);
        h.add_vertex("Node", &v, &[("tag", &tag), ("score", &score)])
            .unwrap();
        labels.insert(v, if i < half { "b0" } else { "b1" }.to_string());
    }
    for block in 0..2 {
        let lo = block * half;
        for i in lo..lo + half {
            // keep every vertex connected
            let ring = lo + (i - lo + 1) % half;
            for j in i + 1..lo + half {
                if j == ring || rng.gen_bool(p) {
                    let (a, b) = (id("n", i), id("n", j));
                    h.add_hyperedge("Link", &[&a, &b]).unwrap();
                    h.add_hyperedge("Link", &[&b, &a]).unwrap();
                }
            }
            if ring < i {
                let (a, b) = (id("n", i), id("n", ring));
                h.add_hyperedge("Link", &[&a, &b]).unwrap();
                h.add_hyperedge("Link", &[&b, &a]).unwrap();
            }
        }
    }
    finish(h, "Node", labels)
}

/// `n` targets, each the first member of exactly `degree` `Link` edges to
/// distinct random other targets. Attributes are random; no labels.
pub fn constant_degree(n: usize, degree: usize, seed: u64) -> Dataset {
    assert!(degree < n, "degree must be below the vertex count");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Hypergraph::new();
    h.add_vertex_type(
        "Node",
        vec![
            AttributeSchema::new("tag", AttributeKind::Discrete),
            AttributeSchema::new("score", AttributeKind::Continuous),
        ],
    )
    .unwrap();
    h.add_edge_type("Link", 2, None).unwrap();
    for i in 0..n {
        let tag = ["x", "y", "z", "w"].choose(&mut rng).unwrap().to_string();
        let score = format!("{}", rng.gen_range(0.0..100.0));
        h.add_vertex("Node", &id("n", i), &[("tag", &tag), ("score", &score)])
            .unwrap();
    }
    let others: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let picks: Vec<usize> = others
            .choose_multiple(&mut rng, degree + 1)
            .copied()
            .filter(|&j| j != i)
            .take(degree)
            .collect();
        for j in picks {
            h.add_hyperedge("Link", &[&id("n", i), &id("n", j)])
                .unwrap();
        }
    }
    finish(h, "Node", BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let a = attribute_classes(20, 1);
        assert_eq!(a.targets().len(), 20);
        assert_eq!(a.labels().len(), 20);
        assert!(a.hypergraph().validate().is_empty());

        let b = connectivity_blocks(10, 0.3, 1);
        assert_eq!(b.targets().len(), 20);
        let h = b.hypergraph();
        for e in h.edges() {
            let (x, y) = (e.members[0].index(), e.members[1].index());
            assert_eq!(x < 10, y < 10, "edge crosses blocks");
        }

        let c = constant_degree(50, 5, 2);
        for v in c.targets() {
            let out = c
                .hypergraph()
                .incidence(v)
                .iter()
                .filter(|inc| inc.position == 1)
                .count();
            assert_eq!(out, 5);
        }
    }

    #[test]
    fn seeded() {
        let a = crate::ingest::write_dataset(&attribute_classes(30, 9));
        let b = crate::ingest::write_dataset(&attribute_classes(30, 9));
        assert_eq!(a, b);
    }
}
