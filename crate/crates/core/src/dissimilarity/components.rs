use rayon::prelude::*;

use super::distribution::{chi2_distance, continuous_distance, AggregateRange};
use super::{DissimilarityConfig, DissimilarityError};
use crate::tree::{root_link_count, AttributeBag, Level, NeighbourhoodTree};

/// Aggregate spreads per `(vertex type, attribute)`, taken over every level
/// of every tree. Discrete attributes keep an unused default entry.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AttributeRanges {
    per_type: Vec<Vec<AggregateRange>>,
}

impl AttributeRanges {
    pub fn get(&self, ty: usize, attribute: usize) -> AggregateRange {
        self.per_type
            .get(ty)
            .and_then(|t| t.get(attribute))
            .copied()
            .unwrap_or_default()
    }

    fn observe_level(&mut self, level: &Level) {
        if self.per_type.len() < level.attributes.len() {
            self.per_type.resize(level.attributes.len(), Vec::new());
        }
        for (t, bags) in level.attributes.iter().enumerate() {
            let slot = &mut self.per_type[t];
            if slot.len() < bags.len() {
                slot.resize(bags.len(), AggregateRange::default());
            }
            for (a, bag) in bags.iter().enumerate() {
                if let AttributeBag::Continuous(c) = bag {
                    slot[a].observe(c);
                }
            }
        }
    }

    fn merge(mut self, other: AttributeRanges) -> AttributeRanges {
        if self.per_type.len() < other.per_type.len() {
            self.per_type.resize(other.per_type.len(), Vec::new());
        }
        for (t, row) in other.per_type.into_iter().enumerate() {
            let slot = &mut self.per_type[t];
            if slot.len() < row.len() {
                slot.resize(row.len(), AggregateRange::default());
            }
            for (a, r) in row.into_iter().enumerate() {
                slot[a] = slot[a].merge(r);
            }
        }
        self
    }
}

/// Collects aggregate spreads over all levels (including the roots) of all
/// trees. Min/max reduction is order independent, so the parallel fold is
/// exact.
pub fn aggregate_ranges(trees: &[NeighbourhoodTree]) -> AttributeRanges {
    trees
        .par_iter()
        .fold(AttributeRanges::default, |mut acc, t| {
            for l in 0..=t.depth() {
                acc.observe_level(t.level_unchecked(l));
            }
            acc
        })
        .reduce(AttributeRanges::default, AttributeRanges::merge)
}

fn attribute_distance(
    g: &Level,
    h: &Level,
    ranges: &AttributeRanges,
    cfg: &DissimilarityConfig,
) -> f64 {
    let mut sum = 0.0;
    for (t, (bg, bh)) in g.attributes.iter().zip(&h.attributes).enumerate() {
        for (a, pair) in bg.iter().zip(bh).enumerate() {
            sum += match pair {
                (AttributeBag::Discrete(x), AttributeBag::Discrete(y)) => chi2_distance(x, y),
                (AttributeBag::Continuous(x), AttributeBag::Continuous(y)) => {
                    continuous_distance(x, y, &ranges.get(t, a), &cfg.aggregates)
                }
                _ => unreachable!("bags follow the shared schema"),
            };
        }
    }
    sum
}

/// Un-normalised `[ad, nad, cd_raw, nd, ed]` for one pair of trees, where
/// `cd_raw` is the number of hyperedges containing both roots.
pub fn raw_components(
    g: &NeighbourhoodTree,
    h: &NeighbourhoodTree,
    ranges: &AttributeRanges,
    cfg: &DissimilarityConfig,
) -> Result<[f64; 5], DissimilarityError> {
    for t in [g, h] {
        if t.depth() != cfg.depth {
            return Err(DissimilarityError::DepthMismatch {
                tree: t.depth(),
                config: cfg.depth,
            });
        }
    }
    let ad = attribute_distance(g.level_unchecked(0), h.level_unchecked(0), ranges, cfg);
    let mut nad = 0.0;
    let mut nd = 0.0;
    let mut ed = 0.0;
    for l in 1..=cfg.depth {
        let (lg, lh) = (g.level_unchecked(l), h.level_unchecked(l));
        nad += attribute_distance(lg, lh, ranges, cfg);
        for (x, y) in lg.by_type.iter().zip(&lh.by_type) {
            nd += chi2_distance(x, y);
        }
        ed += chi2_distance(&lg.edges, &lh.edges);
    }
    let cd = root_link_count(g, h) as f64;
    Ok([ad, nad, cd, nd, ed])
}
