/// A finite multiset stored as `(element, multiplicity)` pairs sorted by
/// element. Multiplicities are always positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multiset<K> {
    entries: Vec<(K, u32)>,
}

impl<K> Default for Multiset<K> {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
        }
    }
}

impl<K: Ord + Copy> Multiset<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_elements(items: impl IntoIterator<Item = K>) -> Self {
        let mut items: Vec<K> = items.into_iter().collect();
        items.sort_unstable();
        let mut entries: Vec<(K, u32)> = Vec::new();
        for k in items {
            match entries.last_mut() {
                Some((last, n)) if *last == k => *n += 1,
                _ => entries.push((k, 1)),
            }
        }
        Self { entries }
    }

    /// Builds from `(element, count)` pairs in any order; counts of equal
    /// elements are added and zero counts dropped.
    pub fn from_counts(items: impl IntoIterator<Item = (K, u32)>) -> Self {
        let mut items: Vec<(K, u32)> = items.into_iter().filter(|(_, n)| *n > 0).collect();
        #[allow(clippy::unnecessary_sort_by)] // K need not be Copy
        items.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut entries: Vec<(K, u32)> = Vec::with_capacity(items.len());
        for (k, n) in items {
            match entries.last_mut() {
                Some((last, m)) if *last == k => *m += n,
                _ => entries.push((k, n)),
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(K, u32)] {
        &self.entries
    }

    pub fn count(&self, k: &K) -> u32 {
        self.entries
            .binary_search_by(|(x, _)| x.cmp(k))
            .map_or(0, |i| self.entries[i].1)
    }

    /// Number of elements counted with multiplicity.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, n)| n as u64).sum()
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = K> + '_ {
        self.entries.iter().map(|&(k, _)| k)
    }

    /// Relative frequency of `k`; zero for the empty multiset.
    pub fn frequency(&self, k: &K) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.count(k) as f64 / total as f64
        }
    }

    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|(k, _)| keep(k))
                .collect(),
        }
    }
}
