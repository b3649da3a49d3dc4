//! Distances between multisets of observed values.

use serde::{Deserialize, Serialize};

use crate::multiset::Multiset;
use crate::tree::ContinuousBag;

/// χ² distance between the relative-frequency distributions of two
/// multisets. Symmetric, in `[0, 2]`, zero when both are empty.
///
/// Terms are accumulated in ascending element order so the result does not
/// depend on how the multisets were built.
pub fn chi2_distance<K: Ord + Copy>(a: &Multiset<K>, b: &Multiset<K>) -> f64 {
    let ta = a.total();
    let tb = b.total();
    match (ta, tb) {
        (0, 0) => return 0.0,
        (0, _) | (_, 0) => return 1.0,
        _ => {}
    }
    let (ta, tb) = (ta as f64, tb as f64);
    let term = |ca: u32, cb: u32| {
        let fa = ca as f64 / ta;
        let fb = cb as f64 / tb;
        (fa - fb) * (fa - fb) / (fa + fb)
    };

    let (ea, eb) = (a.entries(), b.entries());
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < ea.len() || j < eb.len() {
        match (ea.get(i), eb.get(j)) {
            (Some(&(ka, ca)), Some(&(kb, cb))) if ka == kb => {
                sum += term(ca, cb);
                i += 1;
                j += 1;
            }
            (Some(&(ka, ca)), Some(&(kb, _))) if ka < kb => {
                sum += term(ca, 0);
                i += 1;
            }
            (Some(_), Some(&(_, cb))) => {
                sum += term(0, cb);
                j += 1;
            }
            (Some(&(_, ca)), None) => {
                sum += term(ca, 0);
                i += 1;
            }
            (None, Some(&(_, cb))) => {
                sum += term(0, cb);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    // disjoint supports can round a few ulps past 2
    sum.min(2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    Mean,
    StandardDeviation,
}

impl Aggregate {
    pub const ALL: [Aggregate; 2] = [Aggregate::Mean, Aggregate::StandardDeviation];

    pub fn apply(self, bag: &ContinuousBag) -> Option<f64> {
        match self {
            Aggregate::Mean => bag.mean(),
            Aggregate::StandardDeviation => bag.std_dev(),
        }
    }

    pub fn slot(self) -> usize {
        match self {
            Aggregate::Mean => 0,
            Aggregate::StandardDeviation => 1,
        }
    }
}

/// Spread `max - min` of each aggregate over every observed multiset of one
/// attribute. Indexed by [`Aggregate::slot`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AggregateRange {
    min: [f64; 2],
    max: [f64; 2],
    seen: bool,
}

impl AggregateRange {
    pub fn observe(&mut self, bag: &ContinuousBag) {
        let (Some(mean), Some(sd)) = (bag.mean(), bag.std_dev()) else {
            return;
        };
        let vals = [mean, sd];
        if !self.seen {
            self.min = vals;
            self.max = vals;
            self.seen = true;
        } else {
            for (k, v) in vals.into_iter().enumerate() {
                self.min[k] = self.min[k].min(v);
                self.max[k] = self.max[k].max(v);
            }
        }
    }

    pub fn merge(mut self, other: AggregateRange) -> AggregateRange {
        if !other.seen {
            return self;
        }
        if !self.seen {
            return other;
        }
        for k in 0..2 {
            self.min[k] = self.min[k].min(other.min[k]);
            self.max[k] = self.max[k].max(other.max[k]);
        }
        self
    }

    pub fn from_spreads(mean: f64, std_dev: f64) -> Self {
        Self {
            min: [0.0, 0.0],
            max: [mean, std_dev],
            seen: true,
        }
    }

    pub fn spread(&self, f: Aggregate) -> f64 {
        if !self.seen {
            return 0.0;
        }
        self.max[f.slot()] - self.min[f.slot()]
    }
}

/// Aggregate-based distance between two continuous multisets:
/// `Σ_f |f(A) − f(B)| / r_f`. Pairs with an empty side contribute 0, as do
/// aggregates whose spread is 0.
pub fn continuous_distance(
    a: &ContinuousBag,
    b: &ContinuousBag,
    range: &AggregateRange,
    aggregates: &[Aggregate],
) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for &f in aggregates {
        let r = range.spread(f);
        if r > 0.0 {
            if let (Some(x), Some(y)) = (f.apply(a), f.apply(b)) {
                sum += (x - y).abs() / r;
            }
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(items: &[char]) -> Multiset<char> {
        Multiset::from_elements(items.iter().copied())
    }

    #[test]
    fn chi2_examples() {
        let a = ms(&['a', 'b', 'b', 'c']);
        assert_eq!(chi2_distance(&a, &a), 0.0);
        assert_eq!(chi2_distance(&ms(&['a']), &ms(&['b'])), 2.0);
        assert_eq!(chi2_distance(&ms(&[]), &ms(&['a', 'a'])), 1.0);
        assert_eq!(chi2_distance(&ms(&[]), &ms(&[])), 0.0);
    }

    #[test]
    fn chi2_hand_value() {
        // f_A = {a:.25, b:.5, c:.25}, f_B = {b:.5, d:.5}
        // a: .25, b: 0, c: .25, d: .5  -> 1.0
        let a = ms(&['a', 'b', 'b', 'c']);
        let b = ms(&['b', 'd']);
        assert!((chi2_distance(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(chi2_distance(&a, &b), chi2_distance(&b, &a));
    }

    #[test]
    fn continuous_hand_value() {
        let a = ContinuousBag::from_values(vec![2.0]);
        let b = ContinuousBag::from_values(vec![4.0]);
        let r = AggregateRange::from_spreads(10.0, 1.0);
        let d = continuous_distance(&a, &b, &r, &Aggregate::ALL);
        assert!((d - 0.2).abs() < 1e-15);
        assert_eq!(continuous_distance(&a, &a, &r, &Aggregate::ALL), 0.0);
    }

    #[test]
    fn continuous_empty_and_zero_range() {
        let a = ContinuousBag::from_values(vec![2.0, 3.0]);
        let empty = ContinuousBag::from_values(vec![]);
        let r = AggregateRange::from_spreads(10.0, 1.0);
        assert_eq!(continuous_distance(&a, &empty, &r, &Aggregate::ALL), 0.0);
        let flat = AggregateRange::from_spreads(0.0, 0.0);
        let b = ContinuousBag::from_values(vec![7.0]);
        assert_eq!(continuous_distance(&a, &b, &flat, &Aggregate::ALL), 0.0);
    }

    #[test]
    fn population_std() {
        let bag = ContinuousBag::from_values(vec![5.0]);
        assert_eq!(bag.std_dev(), Some(0.0));
        let bag = ContinuousBag::from_values(vec![1.0, 3.0]);
        assert_eq!(bag.std_dev(), Some(1.0));
        assert_eq!(bag.mean(), Some(2.0));
    }

    #[test]
    fn range_tracks_min_and_max() {
        let mut r = AggregateRange::default();
        assert_eq!(r.spread(Aggregate::Mean), 0.0);
        r.observe(&ContinuousBag::from_values(vec![1.0, 3.0]));
        r.observe(&ContinuousBag::from_values(vec![10.0]));
        r.observe(&ContinuousBag::from_values(vec![]));
        assert_eq!(r.spread(Aggregate::Mean), 8.0);
        assert_eq!(r.spread(Aggregate::StandardDeviation), 1.0);
    }
}
