use std::ops::Range;

/// A subset of the domain stored as sorted, disjoint, non-adjacent runs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSet {
    runs: Vec<Range<usize>>,
}

impl IndexSet {
    pub fn from_ranges(ranges: impl IntoIterator<Item = Range<usize>>) -> Self {
        let mut rs: Vec<Range<usize>> = ranges.into_iter().filter(|r| r.start < r.end).collect();
        rs.sort_by_key(|r| r.start);
        let mut runs: Vec<Range<usize>> = Vec::with_capacity(rs.len());
        for r in rs {
            match runs.last_mut() {
                Some(last) if r.start <= last.end => last.end = last.end.max(r.end),
                _ => runs.push(r),
            }
        }
        IndexSet { runs }
    }

    pub fn interval(r: Range<usize>) -> Self {
        Self::from_ranges([r])
    }

    pub fn singleton(i: usize) -> Self {
        Self::interval(i..i + 1)
    }

    pub fn pair(x: usize, y: usize) -> Self {
        Self::from_ranges([x..x + 1, y..y + 1])
    }

    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Self {
        Self::from_ranges(idx.into_iter().map(|i| i..i + 1))
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        Self::from_ranges(self.runs.iter().chain(&other.runs).cloned())
    }

    pub fn runs(&self) -> &[Range<usize>] {
        &self.runs
    }

    pub(crate) fn pairs(&self) -> Vec<(usize, usize)> {
        self.runs.iter().map(|r| (r.start, r.end)).collect()
    }

    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.end - r.start).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn max(&self) -> Option<usize> {
        self.runs.last().map(|r| r.end - 1)
    }

    pub fn contains(&self, i: usize) -> bool {
        let k = self.runs.partition_point(|r| r.end <= i);
        k < self.runs.len() && self.runs[k].start <= i
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.runs.iter().all(|r| {
            let k = other.runs.partition_point(|o| o.end <= r.start);
            k < other.runs.len() && other.runs[k].start <= r.start && r.end <= other.runs[k].end
        })
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.union(other).len() == self.len() + other.len()
    }
}
