//! Free graded ℤ-modules with named generators, differentials of degree +1,
//! and chain maps between them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::matrix::{canonical_vec, mul_i64, SparseMat, SparseVec};
use crate::error::{Error, Result};

/// Structured generator identifier. Tensor bases are `T(factors)`, so the
/// derived order is lexicographic in factor order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gid {
    N(i64),
    T(Vec<Gid>),
}

impl Gid {
    pub fn t(parts: impl IntoIterator<Item = Gid>) -> Gid {
        Gid::T(parts.into_iter().collect())
    }

    pub fn ns(parts: &[i64]) -> Gid {
        Gid::T(parts.iter().map(|&x| Gid::N(x)).collect())
    }

    pub fn parts(&self) -> &[Gid] {
        match self {
            Gid::T(v) => v,
            Gid::N(_) => std::slice::from_ref(self),
        }
    }

    pub fn num(&self) -> i64 {
        match self {
            Gid::N(x) => *x,
            Gid::T(_) => panic!("not a leaf generator id: {self:?}"),
        }
    }
}

impl fmt::Debug for Gid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gid::N(x) => write!(f, "{x}"),
            Gid::T(v) => {
                f.write_str("(")?;
                for (i, g) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{g:?}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Gid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub type Terms = Vec<(Gid, i64)>;

/// Sums repeated generators, drops zeros and sorts.
pub fn collect_terms(terms: impl IntoIterator<Item = (Gid, i64)>) -> Terms {
    let mut acc: std::collections::BTreeMap<Gid, i64> = std::collections::BTreeMap::new();
    for (g, v) in terms {
        let e = acc.entry(g).or_insert(0);
        *e = e.checked_add(v).expect("coefficient overflow");
    }
    acc.into_iter().filter(|(_, v)| *v != 0).collect()
}

/// A bounded complex of free ℤ-modules. Generators are kept sorted by
/// `(degree, id)`; the differential is one square matrix over all of them.
#[derive(Clone)]
pub struct FreeComplex {
    gens: Vec<(i64, Gid)>,
    index: HashMap<Gid, usize>,
    d: SparseMat,
}

impl fmt::Debug for FreeComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FreeComplex ({} generators)", self.gens.len())?;
        for (j, (p, g)) in self.gens.iter().enumerate() {
            write!(f, "  [{p}] {g:?} ->")?;
            for &(i, v) in self.d.col(j) {
                write!(f, " {v:+}*{:?}", self.gens[i as usize].1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl PartialEq for FreeComplex {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.d == other.d
    }
}

impl Eq for FreeComplex {}

fn sorted_gens(mut gens: Vec<(i64, Gid)>) -> Result<(Vec<(i64, Gid)>, HashMap<Gid, usize>)> {
    gens.sort();
    let mut index = HashMap::with_capacity(gens.len());
    for (i, (_, g)) in gens.iter().enumerate() {
        if index.insert(g.clone(), i).is_some() {
            return Err(Error::invalid(format!("duplicate generator {g:?}")));
        }
    }
    Ok((gens, index))
}

impl FreeComplex {
    pub fn zero() -> Self {
        FreeComplex { gens: Vec::new(), index: HashMap::new(), d: SparseMat::zeros(0, 0) }
    }

    /// Complex with zero differential.
    pub fn discrete(gens: Vec<(i64, Gid)>) -> Result<Self> {
        FreeComplex::from_fn(gens, |_| Vec::new())
    }

    /// Builds and validates a complex from the value of `d` on each generator.
    pub fn from_fn(gens: Vec<(i64, Gid)>, d: impl Fn(&Gid) -> Terms) -> Result<Self> {
        let c = FreeComplex::from_fn_unchecked(gens, d)?;
        c.validate()?;
        Ok(c)
    }

    /// Same as [`from_fn`](Self::from_fn) but skips the `dd = 0` check.
    /// Degrees and targets are still checked.
    pub fn from_fn_unchecked(gens: Vec<(i64, Gid)>, d: impl Fn(&Gid) -> Terms) -> Result<Self> {
        let (gens, index) = sorted_gens(gens)?;
        let n = gens.len();
        let mut cols = Vec::with_capacity(n);
        for (p, g) in &gens {
            let mut col = Vec::new();
            for (h, v) in d(g) {
                let Some(&i) = index.get(&h) else {
                    return Err(Error::invariant(format!("d({g:?}) hits unknown generator {h:?}")));
                };
                if v != 0 && gens[i].0 != p + 1 {
                    return Err(Error::invariant(format!(
                        "d({g:?}) hits {h:?} in degree {} from degree {p}",
                        gens[i].0
                    )));
                }
                col.push((i as u32, v));
            }
            cols.push(col);
        }
        Ok(FreeComplex { d: SparseMat::from_columns(n, cols), gens, index })
    }

    /// Checks `dd = 0`.
    pub fn validate(&self) -> Result<()> {
        let dd = self.d.mul(&self.d);
        if let Some(&(i, v)) = dd.columns().iter().flatten().next() {
            let j = dd.columns().iter().position(|c| !c.is_empty()).unwrap();
            return Err(Error::invariant(format!(
                "dd != 0: dd({:?}) has {v} on {:?}",
                self.gens[j].1, self.gens[i as usize].1
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[(i64, Gid)] {
        &self.gens
    }

    pub fn deg(&self, i: usize) -> i64 {
        self.gens[i].0
    }

    pub fn gid(&self, i: usize) -> &Gid {
        &self.gens[i].1
    }

    pub fn index_of(&self, g: &Gid) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn deg_of(&self, g: &Gid) -> Option<i64> {
        self.index_of(g).map(|i| self.gens[i].0)
    }

    pub fn contains(&self, g: &Gid) -> bool {
        self.index.contains_key(g)
    }

    pub fn differential(&self) -> &SparseMat {
        &self.d
    }

    /// Distinct degrees carrying generators, increasing.
    pub fn degrees(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.gens.iter().map(|g| g.0).collect();
        v.dedup();
        v
    }

    pub fn degree_range(&self, p: i64) -> std::ops::Range<usize> {
        let lo = self.gens.partition_point(|g| g.0 < p);
        let hi = self.gens.partition_point(|g| g.0 <= p);
        lo..hi
    }

    pub fn rank_in(&self, p: i64) -> usize {
        self.degree_range(p).len()
    }

    /// `d^p` as a matrix from degree `p` to degree `p + 1`.
    pub fn d_block(&self, p: i64) -> SparseMat {
        let rows: Vec<usize> = self.degree_range(p + 1).collect();
        let cols: Vec<usize> = self.degree_range(p).collect();
        self.d.select(&rows, &cols)
    }

    pub fn d_of(&self, g: &Gid) -> Terms {
        let j = self.index[g];
        self.d.col(j).iter().map(|&(i, v)| (self.gens[i as usize].1.clone(), v)).collect()
    }

    /// Vector in this basis from generator terms.
    pub fn vector(&self, terms: &[(Gid, i64)]) -> Result<SparseVec> {
        let mut v = Vec::with_capacity(terms.len());
        for (g, x) in terms {
            let i = self.index_of(g).ok_or_else(|| Error::invalid(format!("unknown generator {g:?}")))?;
            v.push((i as u32, *x));
        }
        Ok(canonical_vec(v))
    }

    pub fn terms(&self, v: &[(u32, i64)]) -> Terms {
        v.iter().map(|&(i, x)| (self.gens[i as usize].1.clone(), x)).collect()
    }

    /// `K[k]`: `(K[k])^p = K^{p+k}` with differential `(-1)^k d`.
    pub fn shift(&self, k: i64) -> FreeComplex {
        let gens = self.gens.iter().map(|(p, g)| (p - k, g.clone())).collect();
        let s = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        FreeComplex { gens, index: self.index.clone(), d: self.d.scale(s) }
    }

    /// Relabels generators; `f` must be injective.
    pub fn map_gids(&self, f: impl Fn(&Gid) -> Gid) -> Result<FreeComplex> {
        let back: HashMap<Gid, Gid> = self.gens.iter().map(|(_, g)| (f(g), g.clone())).collect();
        if back.len() != self.gens.len() {
            return Err(Error::invalid("relabeling is not injective"));
        }
        let gens = self.gens.iter().map(|(p, g)| (*p, f(g))).collect();
        FreeComplex::from_fn_unchecked(gens, |h| self.d_of(&back[h]).into_iter().map(|(x, v)| (f(&x), v)).collect())
    }

    /// Subcomplex on the generators satisfying `keep`; fails unless closed
    /// under `d`.
    pub fn sub(&self, keep: impl Fn(&Gid) -> bool) -> Result<FreeComplex> {
        let gens: Vec<(i64, Gid)> = self.gens.iter().filter(|(_, g)| keep(g)).cloned().collect();
        for (_, g) in &gens {
            for (h, _) in self.d_of(g) {
                if !keep(&h) {
                    return Err(Error::invariant(format!("not closed under d: d({g:?}) involves {h:?}")));
                }
            }
        }
        FreeComplex::from_fn_unchecked(gens, |g| self.d_of(g))
    }

    /// Quotient by the span of the generators failing `keep`, which must be
    /// a subcomplex.
    pub fn quotient(&self, keep: impl Fn(&Gid) -> bool) -> Result<FreeComplex> {
        for (_, g) in &self.gens {
            if !keep(g) {
                for (h, _) in self.d_of(g) {
                    if keep(&h) {
                        return Err(Error::invariant(format!("dropped part not a subcomplex: d({g:?}) involves {h:?}")));
                    }
                }
            }
        }
        let gens: Vec<(i64, Gid)> = self.gens.iter().filter(|(_, g)| keep(g)).cloned().collect();
        FreeComplex::from_fn_unchecked(gens, |g| self.d_of(g).into_iter().filter(|(h, _)| keep(h)).collect())
    }

    /// `⊕ parts`, generator of part `k` tagged as `(tag_k, g)`.
    pub fn direct_sum(parts: &[(Gid, &FreeComplex)]) -> Result<FreeComplex> {
        let mut gens = Vec::new();
        for (t, c) in parts {
            gens.extend(c.gens.iter().map(|(p, g)| (*p, Gid::t([t.clone(), g.clone()]))));
        }
        let lookup: HashMap<Gid, usize> = parts.iter().enumerate().map(|(k, (t, _))| (t.clone(), k)).collect();
        FreeComplex::from_fn_unchecked(gens, |g| {
            let t = &g.parts()[0];
            let c = parts[lookup[t]].1;
            c.d_of(&g.parts()[1]).into_iter().map(|(h, v)| (Gid::t([t.clone(), h]), v)).collect()
        })
    }

    /// `A ⊗ B` with `d(x⊗y) = (-1)^{deg y} dx⊗y + x⊗dy`.
    pub fn tensor(a: &FreeComplex, b: &FreeComplex) -> FreeComplex {
        FreeComplex::tensor_many(&[a, b])
    }

    /// `A_1 ⊗ … ⊗ A_n` with generators `(x_1, …, x_n)` and
    /// `d = Σ_i (-1)^{Σ_{j>i} deg x_j} (…dx_i…)`.
    pub fn tensor_many(factors: &[&FreeComplex]) -> FreeComplex {
        let mut gens: Vec<(i64, Vec<Gid>)> = vec![(0, Vec::new())];
        for f in factors {
            let mut next = Vec::with_capacity(gens.len() * f.len());
            for (p, g) in &gens {
                for (q, h) in &f.gens {
                    let mut t = g.clone();
                    t.push(h.clone());
                    next.push((p + q, t));
                }
            }
            gens = next;
        }
        let gens: Vec<(i64, Gid)> = gens.into_iter().map(|(p, t)| (p, Gid::T(t))).collect();
        FreeComplex::from_fn_unchecked(gens, |g| tensor_d(factors, g.parts())).expect("tensor product is well formed")
    }
}

/// Differential of a tensor generator under the reversed sign rule.
pub fn tensor_d(factors: &[&FreeComplex], parts: &[Gid]) -> Terms {
    let degs: Vec<i64> = factors.iter().zip(parts).map(|(f, g)| f.deg_of(g).expect("factor generator")).collect();
    let mut out = Vec::new();
    let mut after: i64 = degs.iter().sum();
    for (i, f) in factors.iter().enumerate() {
        after -= degs[i];
        let s = if after.rem_euclid(2) == 0 { 1 } else { -1 };
        for (h, v) in f.d_of(&parts[i]) {
            let mut t = parts.to_vec();
            t[i] = h;
            out.push((Gid::T(t), mul_i64(s, v)));
        }
    }
    out
}

/// A map of graded modules raising degree by `shift`, validated to commute
/// with the differentials.
#[derive(Clone)]
pub struct ChainMap {
    src: Arc<FreeComplex>,
    tgt: Arc<FreeComplex>,
    shift: i64,
    m: SparseMat,
}

impl fmt::Debug for ChainMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ChainMap shift {} ({} -> {})", self.shift, self.src.len(), self.tgt.len())?;
        for (j, (_, g)) in self.src.gens.iter().enumerate() {
            if self.m.col(j).is_empty() {
                continue;
            }
            write!(f, "  {g:?} ->")?;
            for &(i, v) in self.m.col(j) {
                write!(f, " {v:+}*{:?}", self.tgt.gens[i as usize].1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl ChainMap {
    /// Builds from matrix data and checks degrees and `d f = f d`.
    pub fn new(src: Arc<FreeComplex>, tgt: Arc<FreeComplex>, shift: i64, m: SparseMat) -> Result<Self> {
        let f = ChainMap::unchecked(src, tgt, shift, m)?;
        f.validate()?;
        Ok(f)
    }

    /// Checks shape and degrees only.
    pub fn unchecked(src: Arc<FreeComplex>, tgt: Arc<FreeComplex>, shift: i64, m: SparseMat) -> Result<Self> {
        if m.rows() != tgt.len() || m.cols() != src.len() {
            return Err(Error::invalid(format!(
                "map matrix {}x{} does not fit {} -> {}",
                m.rows(),
                m.cols(),
                src.len(),
                tgt.len()
            )));
        }
        for (j, c) in m.columns().iter().enumerate() {
            for &(i, _) in c {
                if tgt.deg(i as usize) != src.deg(j) + shift {
                    return Err(Error::invariant(format!(
                        "map sends {:?} (degree {}) to {:?} (degree {})",
                        src.gid(j),
                        src.deg(j),
                        tgt.gid(i as usize),
                        tgt.deg(i as usize)
                    )));
                }
            }
        }
        Ok(ChainMap { src, tgt, shift, m })
    }

    pub fn from_fn(
        src: Arc<FreeComplex>,
        tgt: Arc<FreeComplex>,
        shift: i64,
        f: impl Fn(&Gid) -> Terms,
    ) -> Result<Self> {
        let m = ChainMap::matrix_of(&src, &tgt, f)?;
        ChainMap::new(src, tgt, shift, m)
    }

    pub fn from_fn_unchecked(
        src: Arc<FreeComplex>,
        tgt: Arc<FreeComplex>,
        shift: i64,
        f: impl Fn(&Gid) -> Terms,
    ) -> Result<Self> {
        let m = ChainMap::matrix_of(&src, &tgt, f)?;
        ChainMap::unchecked(src, tgt, shift, m)
    }

    fn matrix_of(src: &FreeComplex, tgt: &FreeComplex, f: impl Fn(&Gid) -> Terms) -> Result<SparseMat> {
        let mut cols = Vec::with_capacity(src.len());
        for (_, g) in &src.gens {
            let mut col = Vec::new();
            for (h, v) in f(g) {
                let i = tgt
                    .index_of(&h)
                    .ok_or_else(|| Error::invariant(format!("image of {g:?} involves unknown {h:?}")))?;
                col.push((i as u32, v));
            }
            cols.push(col);
        }
        Ok(SparseMat::from_columns(tgt.len(), cols))
    }

    pub fn identity(c: Arc<FreeComplex>) -> Self {
        let n = c.len();
        ChainMap { src: c.clone(), tgt: c, shift: 0, m: SparseMat::identity(n) }
    }

    pub fn zero(src: Arc<FreeComplex>, tgt: Arc<FreeComplex>, shift: i64) -> Self {
        let m = SparseMat::zeros(tgt.len(), src.len());
        ChainMap { src, tgt, shift, m }
    }

    /// Commutation defect `d f - f d`; the map is a chain map iff zero.
    pub fn defect(&self) -> SparseMat {
        self.tgt.d.mul(&self.m).sub(&self.m.mul(&self.src.d))
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.defect();
        if let Some(j) = e.columns().iter().position(|c| !c.is_empty()) {
            let (i, v) = e.col(j)[0];
            return Err(Error::invariant(format!(
                "not a chain map: (df - fd)({:?}) has {v} on {:?}",
                self.src.gid(j),
                self.tgt.gid(i as usize)
            )));
        }
        Ok(())
    }

    pub fn src(&self) -> &Arc<FreeComplex> {
        &self.src
    }

    pub fn tgt(&self) -> &Arc<FreeComplex> {
        &self.tgt
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn matrix(&self) -> &SparseMat {
        &self.m
    }

    pub fn image_of(&self, g: &Gid) -> Terms {
        let j = self.src.index[g];
        self.tgt.terms(self.m.col(j))
    }

    pub fn apply(&self, v: &[(u32, i64)]) -> SparseVec {
        self.m.apply(v)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        if !Arc::ptr_eq(&self.tgt, &other.src) && *self.tgt != *other.src {
            return Err(Error::invalid("composition of maps with mismatched complexes"));
        }
        Ok(ChainMap {
            src: self.src.clone(),
            tgt: other.tgt.clone(),
            shift: self.shift + other.shift,
            m: other.m.mul(&self.m),
        })
    }

    fn same_ends(&self, other: &ChainMap) -> Result<()> {
        if self.shift != other.shift || *self.src != *other.src || *self.tgt != *other.tgt {
            return Err(Error::invalid("maps between different complexes"));
        }
        Ok(())
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        self.same_ends(other)?;
        Ok(ChainMap { m: self.m.add(&other.m), ..self.clone() })
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        self.same_ends(other)?;
        Ok(ChainMap { m: self.m.sub(&other.m), ..self.clone() })
    }

    pub fn scale(&self, s: i64) -> ChainMap {
        ChainMap { m: self.m.scale(s), ..self.clone() }
    }

    /// Exact equality of matrices on equal complexes.
    pub fn same_as(&self, other: &ChainMap) -> bool {
        self.same_ends(other).is_ok() && self.m == other.m
    }

    /// First generator where the two maps differ, for reports.
    pub fn first_difference(&self, other: &ChainMap) -> Option<(Gid, Gid, i64, i64)> {
        let (i, j, a, b) = self.m.first_difference(&other.m)?;
        if i == usize::MAX {
            return Some((Gid::N(-1), Gid::N(-1), 0, 0));
        }
        Some((self.src.gid(j).clone(), self.tgt.gid(i).clone(), a, b))
    }

    /// `f ⊗ g` on tensor generators, for degree-preserving maps.
    pub fn tensor(f: &ChainMap, g: &ChainMap) -> Result<ChainMap> {
        let src = Arc::new(FreeComplex::tensor(&f.src, &g.src));
        let tgt = Arc::new(FreeComplex::tensor(&f.tgt, &g.tgt));
        ChainMap::from_fn(src, tgt, f.shift + g.shift, |x| {
            let p = x.parts();
            let mut out = Vec::new();
            for (a, u) in f.image_of(&p[0]) {
                for (b, v) in g.image_of(&p[1]) {
                    out.push((Gid::t([a.clone(), b]), mul_i64(u, v)));
                }
            }
            out
        })
    }
}

/// `Cone(f)^p = A^{p+1} ⊕ B^p`, `d(a, b) = (-da, f a + db)`. Generators are
/// `(0, a)` and `(1, b)`.
pub fn cone(f: &ChainMap) -> Result<FreeComplex> {
    if f.shift != 0 {
        return Err(Error::invalid("cone needs a degree preserving map"));
    }
    let a = &f.src;
    let b = &f.tgt;
    let mut gens = Vec::with_capacity(a.len() + b.len());
    gens.extend(a.gens.iter().map(|(p, g)| (p - 1, Gid::t([Gid::N(0), g.clone()]))));
    gens.extend(b.gens.iter().map(|(p, g)| (*p, Gid::t([Gid::N(1), g.clone()]))));
    FreeComplex::from_fn(gens, |g| {
        let p = g.parts();
        let x = &p[1];
        if p[0] == Gid::N(0) {
            let mut out: Terms = a.d_of(x).into_iter().map(|(h, v)| (Gid::t([Gid::N(0), h]), -v)).collect();
            out.extend(f.image_of(x).into_iter().map(|(h, v)| (Gid::t([Gid::N(1), h]), v)));
            out
        } else {
            b.d_of(x).into_iter().map(|(h, v)| (Gid::t([Gid::N(1), h]), v)).collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: i64) -> Gid {
        Gid::N(x)
    }

    fn interval() -> FreeComplex {
        // ℤ² → ℤ, a ↦ c, b ↦ c
        FreeComplex::from_fn(vec![(0, n(0)), (0, n(1)), (1, n(2))], |g| match g.num() {
            0 | 1 => vec![(n(2), 1)],
            _ => vec![],
        })
        .unwrap()
    }

    #[test]
    fn rejects_non_differential() {
        let r = FreeComplex::from_fn(vec![(0, n(0)), (1, n(1)), (2, n(2))], |g| match g.num() {
            0 => vec![(n(1), 1)],
            1 => vec![(n(2), 1)],
            _ => vec![],
        });
        assert!(r.is_err());
        let r = FreeComplex::from_fn(vec![(0, n(0)), (0, n(1))], |g| match g.num() {
            0 => vec![(n(1), 1)],
            _ => vec![],
        });
        assert!(r.is_err());
    }

    #[test]
    fn reversed_tensor_sign() {
        let x = FreeComplex::from_fn(vec![(0, n(0)), (1, n(1))], |g| if g.num() == 0 { vec![(n(1), 1)] } else { vec![] })
            .unwrap();
        let y = x.clone();
        let t = FreeComplex::tensor(&x, &y);
        // x in degree 0, y in degree 1: d(x⊗y) = -dx⊗y + x⊗dy, dy = 0
        let d = t.d_of(&Gid::t([n(0), n(1)]));
        assert_eq!(d, vec![(Gid::t([n(1), n(1)]), -1)]);
        let d = t.d_of(&Gid::t([n(0), n(0)]));
        assert_eq!(d.len(), 2);
        assert!(d.contains(&(Gid::t([n(1), n(0)]), 1)));
        assert!(d.contains(&(Gid::t([n(0), n(1)]), 1)));
        t.validate().unwrap();
    }

    #[test]
    fn shift_negates_odd() {
        let c = interval();
        let s = c.shift(1);
        assert_eq!(s.deg_of(&n(0)), Some(-1));
        assert_eq!(s.d_of(&n(0)), vec![(n(2), -1)]);
        assert_eq!(c.shift(2).d_of(&n(0)), vec![(n(2), 1)]);
    }

    #[test]
    fn cone_of_identity_is_valid() {
        let c = Arc::new(interval());
        let k = cone(&ChainMap::identity(c)).unwrap();
        assert_eq!(k.len(), 6);
        k.validate().unwrap();
    }

    #[test]
    fn chain_map_validation() {
        let c = Arc::new(interval());
        let bad = ChainMap::from_fn(c.clone(), c.clone(), 0, |g| if g.num() == 0 { vec![(n(0), 1)] } else { vec![] });
        assert!(bad.is_err());
        let ok = ChainMap::from_fn(c.clone(), c.clone(), 0, |g| match g.num() {
            0 => vec![(n(1), 1)],
            1 => vec![(n(0), 1)],
            _ => vec![(n(2), 1)],
        });
        assert!(ok.is_ok());
    }

    #[test]
    fn subcomplex_and_quotient() {
        let c = interval();
        assert!(c.sub(|g| g.num() == 2).is_ok());
        assert!(c.sub(|g| g.num() == 0).is_err());
        let q = c.quotient(|g| g.num() != 2).unwrap();
        assert!(q.differential().is_zero());
        assert!(c.quotient(|g| g.num() == 2).is_err());
    }
}
