//! Finite totally ordered index sets: intervals, segmentations, partitions,
//! order-preserving surjections and almost disjoint interval families.
//!
//! Elements are opaque [`Label`]s. Order is always positional inside the
//! owning [`FiniteOrderedSet`], never derived from the label text.

use std::fmt;

use crate::error::{Error, Result};

/// Opaque element token.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub String);

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label(v.to_string())
    }
}

impl From<&str> for Label {
    fn from(v: &str) -> Self {
        Label(v.to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Non-empty list of distinct labels in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteOrderedSet {
    elems: Vec<Label>,
}

impl FiniteOrderedSet {
    pub fn new(elems: Vec<Label>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::invalid("ordered set must be non-empty"));
        }
        for i in 0..elems.len() {
            for j in i + 1..elems.len() {
                if elems[i] == elems[j] {
                    return Err(Error::invalid(format!("duplicate label {}", elems[i])));
                }
            }
        }
        Ok(FiniteOrderedSet { elems })
    }

    /// `[1, n]` with integer labels.
    pub fn range(n: usize) -> Self {
        FiniteOrderedSet { elems: (1..=n as i64).map(Label::from).collect() }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.elems
    }

    pub fn label(&self, pos: usize) -> &Label {
        &self.elems[pos]
    }

    pub fn position(&self, l: &Label) -> Option<usize> {
        self.elems.iter().position(|e| e == l)
    }

    pub fn lt(&self, a: &Label, b: &Label) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(x), Some(y)) => x < y,
            _ => false,
        }
    }

    pub fn whole(&self) -> Interval {
        Interval { lo: 0, hi: self.len() - 1 }
    }
}

/// Contiguous slice `[lo, hi]` of positions of a parent set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn init(&self) -> usize {
        self.lo
    }

    pub fn term(&self) -> usize {
        self.hi
    }

    pub fn contains(&self, p: usize) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn is_interior(&self, p: usize) -> bool {
        self.lo < p && p < self.hi
    }

    pub fn positions(&self) -> Vec<usize> {
        (self.lo..=self.hi).collect()
    }

    pub fn interior(&self) -> Vec<usize> {
        if self.len() < 2 {
            return Vec::new();
        }
        (self.lo + 1..self.hi).collect()
    }

    pub fn intersection_len(&self, other: &Interval) -> usize {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            0
        } else {
            hi - lo + 1
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Segmentation of `parent` at the cut points `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub parent: Interval,
    pub sigma: Vec<usize>,
    pub pieces: Vec<Interval>,
}

/// Disjoint decomposition of `parent` into sub-intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub parent: Interval,
    pub blocks: Vec<Interval>,
}

impl Partition {
    /// Cut positions: the `lo` of every block but the first.
    pub fn cuts(&self) -> Vec<usize> {
        self.blocks.iter().skip(1).map(|b| b.lo).collect()
    }

    pub fn block_of(&self, p: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(p))
    }
}

fn sorted_unique(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Pieces `[i_{k-1}, i_k]` of `parent` cut at the points of `sigma`.
pub fn segment(parent: Interval, sigma: &[usize]) -> Result<Vec<Interval>> {
    if parent.len() < 2 {
        return Err(Error::invalid("segmentation needs an interval with at least two elements"));
    }
    let s = sorted_unique(sigma);
    if let Some(bad) = s.iter().find(|&&p| !parent.is_interior(p)) {
        return Err(Error::invalid(format!("cut point {bad} is not interior to {parent}")));
    }
    let mut cuts = vec![parent.lo];
    cuts.extend(s);
    cuts.push(parent.hi);
    Ok(cuts.windows(2).map(|w| Interval { lo: w[0], hi: w[1] }).collect())
}

pub fn segmentation(parent: Interval, sigma: &[usize]) -> Result<Segmentation> {
    let pieces = segment(parent, sigma)?;
    Ok(Segmentation { parent, sigma: sorted_unique(sigma), pieces })
}

/// Maximal runs inside `p` and singletons outside it, covering `parent`.
pub fn partition_from_subset(parent: Interval, p: &[usize]) -> Result<Partition> {
    let s = sorted_unique(p);
    if let Some(bad) = s.iter().find(|&&x| !parent.contains(x)) {
        return Err(Error::invalid(format!("{bad} lies outside {parent}")));
    }
    let mut blocks = Vec::new();
    let mut i = parent.lo;
    while i <= parent.hi {
        if s.binary_search(&i).is_ok() {
            let start = i;
            while i < parent.hi && s.binary_search(&(i + 1)).is_ok() {
                i += 1;
            }
            blocks.push(Interval { lo: start, hi: i });
        } else {
            blocks.push(Interval { lo: i, hi: i });
        }
        i += 1;
    }
    Ok(Partition { parent, blocks })
}

/// Order-preserving surjection between finite ordered sets, stored as the
/// position table `assignment[source_pos] = target_pos`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedSurjection {
    pub source: FiniteOrderedSet,
    pub target: FiniteOrderedSet,
    pub assignment: Vec<usize>,
}

impl OrderedSurjection {
    pub fn new(source: FiniteOrderedSet, target: FiniteOrderedSet, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::invalid("assignment length differs from source size"));
        }
        if assignment.iter().any(|&t| t >= target.len()) {
            return Err(Error::invalid("assignment leaves the target"));
        }
        if assignment.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("map is not order preserving"));
        }
        let mut hit = vec![false; target.len()];
        for &t in &assignment {
            hit[t] = true;
        }
        if hit.iter().any(|h| !h) {
            return Err(Error::invalid("map is not surjective"));
        }
        Ok(OrderedSurjection { source, target, assignment })
    }

    pub fn identity(set: FiniteOrderedSet) -> Self {
        let n = set.len();
        OrderedSurjection { source: set.clone(), target: set, assignment: (0..n).collect() }
    }

    pub fn apply(&self, p: usize) -> usize {
        self.assignment[p]
    }

    pub fn fiber(&self, t: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&s| self.assignment[s] == t).collect()
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &OrderedSurjection) -> Result<OrderedSurjection> {
        if self.target != other.source {
            return Err(Error::invalid("composable maps must share the middle set"));
        }
        let assignment = self.assignment.iter().map(|&t| other.assignment[t]).collect();
        OrderedSurjection::new(self.source.clone(), other.target.clone(), assignment)
    }
}

/// Sub-intervals of a common parent with pairwise intersections of size at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlmostDisjointFamily {
    pub parent: Interval,
    pub intervals: Vec<Interval>,
}

impl AlmostDisjointFamily {
    pub fn new(parent: Interval, intervals: Vec<Interval>) -> Result<Self> {
        for iv in &intervals {
            if iv.len() < 2 {
                return Err(Error::invalid(format!("member {iv} has fewer than two elements")));
            }
            if iv.lo < parent.lo || iv.hi > parent.hi {
                return Err(Error::invalid(format!("member {iv} is not inside {parent}")));
            }
        }
        for i in 0..intervals.len() {
            for j in i + 1..intervals.len() {
                if intervals[i].intersection_len(&intervals[j]) > 1 {
                    return Err(Error::invalid(format!(
                        "members {} and {} overlap in more than one element",
                        intervals[i], intervals[j]
                    )));
                }
            }
        }
        Ok(AlmostDisjointFamily { parent, intervals })
    }

    pub fn is_ordered(&self) -> bool {
        self.intervals.windows(2).all(|w| w[0].hi <= w[1].lo)
    }

    fn require_ordered(&self) -> Result<()> {
        if self.is_ordered() {
            Ok(())
        } else {
            Err(Error::invalid("family is not ordered"))
        }
    }
}

/// Partition of the member index set `[0, r)` into maximal runs of members
/// that share endpoints with their successor.
pub fn associated_partition(fam: &AlmostDisjointFamily) -> Result<Partition> {
    fam.require_ordered()?;
    let r = fam.intervals.len();
    if r == 0 {
        return Err(Error::invalid("empty family"));
    }
    let mut blocks = Vec::new();
    let mut start = 0;
    for j in 0..r {
        let joined = j + 1 < r && fam.intervals[j].hi == fam.intervals[j + 1].lo;
        if !joined {
            blocks.push(Interval { lo: start, hi: j });
            start = j + 1;
        }
    }
    Ok(Partition { parent: Interval { lo: 0, hi: r - 1 }, blocks })
}

/// Whether consecutive members touch or are adjacent and the family reaches
/// both ends of the parent.
pub fn is_pseudo_segmentation(fam: &AlmostDisjointFamily) -> bool {
    if !fam.is_ordered() || fam.intervals.is_empty() {
        return false;
    }
    let first = fam.intervals[0];
    let last = fam.intervals[fam.intervals.len() - 1];
    if first.lo != fam.parent.lo || last.hi != fam.parent.hi {
        return false;
    }
    fam.intervals.windows(2).all(|w| w[0].hi == w[1].lo || w[0].hi + 1 == w[1].lo)
}

/// Which family a merged member came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    First(usize),
    Second(usize),
}

/// The merged index set of two families, ordered by initial elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergedOrder {
    pub order: Vec<Side>,
    pub set: FiniteOrderedSet,
    pub partition: Partition,
}

impl MergedOrder {
    pub fn block_labels(&self) -> Vec<Vec<Label>> {
        self.partition
            .blocks
            .iter()
            .map(|b| b.positions().into_iter().map(|p| self.set.label(p).clone()).collect())
            .collect()
    }
}

/// Orders `first ∪ second` by initial element; members of `first` are
/// labelled `1..r`, members of `second` are labelled `1'..t'`.
pub fn merged_order(first: &AlmostDisjointFamily, second: &AlmostDisjointFamily) -> Result<MergedOrder> {
    if first.parent != second.parent {
        return Err(Error::invalid("families live in different parents"));
    }
    let mut all: Vec<(Interval, Side)> = first
        .intervals
        .iter()
        .enumerate()
        .map(|(i, iv)| (*iv, Side::First(i)))
        .chain(second.intervals.iter().enumerate().map(|(i, iv)| (*iv, Side::Second(i))))
        .collect();
    AlmostDisjointFamily::new(first.parent, all.iter().map(|x| x.0).collect())?;
    all.sort_by_key(|x| x.0.lo);
    let merged = AlmostDisjointFamily { parent: first.parent, intervals: all.iter().map(|x| x.0).collect() };
    let partition = associated_partition(&merged)?;
    let labels = all
        .iter()
        .map(|(_, s)| match s {
            Side::First(i) => Label(format!("{}", i + 1)),
            Side::Second(i) => Label(format!("{}'", i + 1)),
        })
        .collect();
    Ok(MergedOrder { order: all.into_iter().map(|x| x.1).collect(), set: FiniteOrderedSet::new(labels)?, partition })
}

/// All subsets of `items`, each sorted, in a fixed order (by size, then lexicographic).
pub fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut out: Vec<Vec<usize>> = (0u64..(1u64 << n))
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| items[i]).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

pub fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|x| !b.contains(x)).copied().collect()
}

pub fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|x| b.contains(x)).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: usize, hi: usize) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn segment_examples() {
        assert_eq!(segment(iv(1, 5), &[2, 4]).unwrap(), vec![iv(1, 2), iv(2, 4), iv(4, 5)]);
        assert_eq!(segment(iv(1, 3), &[]).unwrap(), vec![iv(1, 3)]);
        assert_eq!(segment(iv(1, 4), &[2, 3]).unwrap(), vec![iv(1, 2), iv(2, 3), iv(3, 4)]);
        assert!(segment(iv(1, 4), &[1]).is_err());
        assert!(segment(iv(2, 2), &[]).is_err());
    }

    #[test]
    fn partition_examples() {
        let p = partition_from_subset(iv(1, 8), &[1, 2, 3, 6, 7]).unwrap();
        assert_eq!(p.blocks, vec![iv(1, 3), iv(4, 4), iv(5, 5), iv(6, 7), iv(8, 8)]);
        let p = partition_from_subset(iv(1, 3), &[]).unwrap();
        assert_eq!(p.blocks, vec![iv(1, 1), iv(2, 2), iv(3, 3)]);
        let p = partition_from_subset(iv(1, 4), &[1, 2, 3, 4]).unwrap();
        assert_eq!(p.blocks, vec![iv(1, 4)]);
    }

    #[test]
    fn associated_partition_examples() {
        let fam = AlmostDisjointFamily::new(
            iv(1, 14),
            vec![iv(1, 2), iv(2, 3), iv(5, 6), iv(8, 9), iv(9, 10)],
        )
        .unwrap();
        let p = associated_partition(&fam).unwrap();
        assert_eq!(p.blocks, vec![iv(0, 1), iv(2, 2), iv(3, 4)]);

        let fam = AlmostDisjointFamily::new(iv(1, 9), vec![iv(1, 2), iv(4, 5), iv(7, 8)]).unwrap();
        assert_eq!(associated_partition(&fam).unwrap().blocks.len(), 3);

        let fam = AlmostDisjointFamily::new(iv(1, 5), segment(iv(1, 5), &[2, 3]).unwrap()).unwrap();
        assert_eq!(associated_partition(&fam).unwrap().blocks, vec![iv(0, 2)]);

        let unordered = AlmostDisjointFamily::new(iv(1, 9), vec![iv(4, 5), iv(1, 2)]).unwrap();
        assert!(associated_partition(&unordered).is_err());
    }

    #[test]
    fn merged_order_figure() {
        let parent = iv(1, 12);
        let first = AlmostDisjointFamily::new(
            parent,
            vec![iv(1, 2), iv(2, 3), iv(5, 6), iv(9, 10), iv(10, 11)],
        )
        .unwrap();
        let second = AlmostDisjointFamily::new(parent, vec![iv(3, 4), iv(4, 5), iv(8, 9)]).unwrap();
        let m = merged_order(&first, &second).unwrap();
        let names: Vec<String> = m.set.labels().iter().map(|l| l.0.clone()).collect();
        assert_eq!(names, vec!["1", "2", "1'", "2'", "3", "3'", "4", "5"]);
        let blocks: Vec<Vec<String>> =
            m.block_labels().into_iter().map(|b| b.into_iter().map(|l| l.0).collect()).collect();
        assert_eq!(blocks, vec![vec!["1", "2", "1'", "2'", "3"], vec!["3'", "4", "5"]]);
    }

    #[test]
    fn merged_order_small_cases() {
        let parent = iv(1, 6);
        let first = AlmostDisjointFamily::new(parent, vec![iv(1, 2), iv(2, 4)]).unwrap();
        let empty = AlmostDisjointFamily::new(parent, vec![]).unwrap();
        let m = merged_order(&first, &empty).unwrap();
        assert_eq!(m.partition, {
            let mut p = associated_partition(&first).unwrap();
            p.parent = Interval { lo: 0, hi: 1 };
            p
        });
        let a = AlmostDisjointFamily::new(parent, vec![iv(1, 2)]).unwrap();
        let b = AlmostDisjointFamily::new(parent, vec![iv(4, 5)]).unwrap();
        let m = merged_order(&a, &b).unwrap();
        assert_eq!(m.partition.blocks, vec![iv(0, 0), iv(1, 1)]);
        let clash = AlmostDisjointFamily::new(parent, vec![iv(1, 3)]).unwrap();
        assert!(merged_order(&clash, &first).is_err());
    }

    #[test]
    fn pseudo_segmentation_examples() {
        let seg = AlmostDisjointFamily::new(iv(1, 5), segment(iv(1, 5), &[3]).unwrap()).unwrap();
        assert!(is_pseudo_segmentation(&seg));
        let gap = AlmostDisjointFamily::new(iv(1, 5), vec![iv(1, 2), iv(4, 5)]).unwrap();
        assert!(!is_pseudo_segmentation(&gap));
        let adj = AlmostDisjointFamily::new(iv(1, 5), vec![iv(1, 2), iv(3, 5)]).unwrap();
        assert!(is_pseudo_segmentation(&adj));
    }

    #[test]
    fn surjection_composition() {
        let s4 = FiniteOrderedSet::range(4);
        let s3 = FiniteOrderedSet::range(3);
        let s2 = FiniteOrderedSet::range(2);
        let f = OrderedSurjection::new(s4.clone(), s3.clone(), vec![0, 1, 1, 2]).unwrap();
        let g = OrderedSurjection::new(s3, s2, vec![0, 0, 1]).unwrap();
        let h = f.then(&g).unwrap();
        assert_eq!(h.assignment, vec![0, 0, 0, 1]);
        assert!(OrderedSurjection::new(s4.clone(), FiniteOrderedSet::range(2), vec![1, 0, 1, 1]).is_err());
        assert!(OrderedSurjection::new(s4, FiniteOrderedSet::range(3), vec![0, 0, 1, 1]).is_err());
    }
}
