//! Exact integer elimination: Smith invariants, ranks and rational kernels.
//!
//! Work starts in checked `i64`; if any intermediate overflows the same
//! elimination is rerun with `BigInt` coefficients.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::{SparseMat, SparseVec};
use crate::error::{Error, Result};

pub trait Coef: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero_c(&self) -> bool;
    fn is_unit_c(&self) -> bool;
    /// `|self| < |other|`
    fn abs_lt(&self, other: &Self) -> bool;
    /// `self - q * x`, `None` on overflow.
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self>;
    fn mul_c(&self, x: &Self) -> Option<Self>;
    /// Quotient truncated toward zero.
    fn quot(&self, d: &Self) -> Self;
    fn gcd_c(&self, other: &Self) -> Self;
    fn to_big(&self) -> BigInt;
}

impl Coef for i64 {
    fn zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_zero_c(&self) -> bool {
        *self == 0
    }
    fn is_unit_c(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        q.checked_mul(*x).and_then(|p| self.checked_sub(p))
    }
    fn mul_c(&self, x: &Self) -> Option<Self> {
        self.checked_mul(*x)
    }
    fn quot(&self, d: &Self) -> Self {
        self / d
    }
    fn gcd_c(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coef for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero_c(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit_c(&self) -> bool {
        self.abs().is_one()
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.abs() < other.abs()
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        Some(self - q * x)
    }
    fn mul_c(&self, x: &Self) -> Option<Self> {
        Some(self * x)
    }
    fn quot(&self, d: &Self) -> Self {
        self / d
    }
    fn gcd_c(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Rank and non-unit invariant factors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
}

struct Elim<C: Coef> {
    rows: Vec<Vec<(u32, C)>>,
    cols: Vec<HashSet<u32>>,
}

impl<C: Coef> Elim<C> {
    fn new(m: &SparseMat) -> Self {
        let mut rows: Vec<Vec<(u32, C)>> = vec![Vec::new(); m.rows()];
        let mut cols = vec![HashSet::new(); m.cols()];
        for (j, c) in m.columns().iter().enumerate() {
            for &(i, v) in c {
                rows[i as usize].push((j as u32, C::from_i64(v)));
                cols[j].insert(i);
            }
        }
        Elim { rows, cols }
    }

    fn entry(&self, r: u32, c: u32) -> C {
        let row = &self.rows[r as usize];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(k) => row[k].1.clone(),
            Err(_) => C::zero(),
        }
    }

    /// `row_x -= q * row_r`
    fn row_op(&mut self, x: u32, r: u32, q: &C) -> Option<()> {
        let rx = std::mem::take(&mut self.rows[x as usize]);
        let rr = &self.rows[r as usize];
        let mut out = Vec::with_capacity(rx.len() + rr.len());
        let (mut a, mut b) = (0, 0);
        while a < rx.len() || b < rr.len() {
            let ca = rx.get(a).map(|e| e.0);
            let cb = rr.get(b).map(|e| e.0);
            match (ca, cb) {
                (Some(i), Some(j)) if i == j => {
                    let v = rx[a].1.sub_mul(q, &rr[b].1)?;
                    if v.is_zero_c() {
                        self.cols[i as usize].remove(&x);
                    } else {
                        out.push((i, v));
                    }
                    a += 1;
                    b += 1;
                }
                (Some(i), Some(j)) if i < j => {
                    out.push(rx[a].clone());
                    a += 1;
                }
                (Some(_), None) => {
                    out.push(rx[a].clone());
                    a += 1;
                }
                (_, Some(j)) => {
                    let v = C::zero().sub_mul(q, &rr[b].1)?;
                    if !v.is_zero_c() {
                        out.push((j, v));
                        self.cols[j as usize].insert(x);
                    }
                    b += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        self.rows[x as usize] = out;
        Some(())
    }

    fn run(mut self) -> Option<Vec<C>> {
        let ncols = self.cols.len();
        let mut order: Vec<usize> = (0..ncols).collect();
        order.sort_by_key(|&j| self.cols[j].len());
        let mut queue: VecDeque<usize> = order.into_iter().collect();
        let mut divisors = Vec::new();
        while let Some(start) = queue.pop_front() {
            let mut p = start;
            loop {
                if self.cols[p].is_empty() {
                    break;
                }
                let r = *self.cols[p]
                    .iter()
                    .min_by(|&&a, &&b| {
                        let va = self.entry(a, p as u32);
                        let vb = self.entry(b, p as u32);
                        if va.abs_lt(&vb) {
                            std::cmp::Ordering::Less
                        } else if vb.abs_lt(&va) {
                            std::cmp::Ordering::Greater
                        } else {
                            self.rows[a as usize].len().cmp(&self.rows[b as usize].len()).then(a.cmp(&b))
                        }
                    })
                    .unwrap();
                let v = self.entry(r, p as u32);
                let mut others: Vec<u32> = self.cols[p].iter().copied().filter(|&x| x != r).collect();
                others.sort_unstable();
                let mut remainder = false;
                for x in others {
                    let w = self.entry(x, p as u32);
                    let q = w.quot(&v);
                    if !q.is_zero_c() {
                        self.row_op(x, r, &q)?;
                    }
                    if !self.entry(x, p as u32).is_zero_c() {
                        remainder = true;
                    }
                }
                if remainder {
                    continue;
                }
                // column p is now {r}; clear row r with column operations
                let row = std::mem::take(&mut self.rows[r as usize]);
                let mut kept = Vec::with_capacity(1);
                let mut smallest: Option<(u32, C)> = None;
                for (c, w) in row {
                    if c as usize == p {
                        kept.push((c, w));
                        continue;
                    }
                    let q = w.quot(&v);
                    let rem = w.sub_mul(&q, &v)?;
                    if rem.is_zero_c() {
                        self.cols[c as usize].remove(&r);
                    } else {
                        if smallest.as_ref().is_none_or(|s| rem.abs_lt(&s.1)) {
                            smallest = Some((c, rem.clone()));
                        }
                        kept.push((c, rem));
                    }
                }
                kept.sort_by_key(|e| e.0);
                self.rows[r as usize] = kept;
                if let Some((c, _)) = smallest {
                    queue.push_back(p);
                    p = c as usize;
                    continue;
                }
                divisors.push(v);
                self.rows[r as usize].clear();
                self.cols[p].clear();
                break;
            }
        }
        debug_assert!(self.cols.iter().all(|c| c.is_empty()));
        Some(divisors)
    }
}

fn normalize(divisors: Vec<BigInt>) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = divisors.into_iter().map(|x| x.abs()).filter(|x| !x.is_one()).collect();
    d.sort();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = &d[i] / &g * &d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d.retain(|x| !x.is_one());
    d
}

/// Rank and invariant factors, by sparse elimination with minimal pivots.
pub fn smith(m: &SparseMat) -> Smith {
    let divs: Vec<BigInt> = match Elim::<i64>::new(m).run() {
        Some(d) => d.iter().map(|x| x.to_big()).collect(),
        None => Elim::<BigInt>::new(m).run().expect("bigint elimination cannot overflow"),
    };
    let rank = divs.len();
    Smith { rank, torsion: normalize(divs) }
}

pub fn rank(m: &SparseMat) -> usize {
    smith(m).rank
}

/// Column echelon reduction on lowest nonzero rows, fraction free.
/// Returns the reduced columns and, when `track`, the transforms.
fn column_reduce<C: Coef>(m: &SparseMat, track: bool) -> Option<(Vec<Vec<(u32, C)>>, Vec<Vec<(u32, C)>>)> {
    let n = m.cols();
    let mut red: Vec<Vec<(u32, C)>> = Vec::with_capacity(n);
    let mut trans: Vec<Vec<(u32, C)>> = Vec::with_capacity(n);
    let mut pivot_of: HashMap<u32, usize> = HashMap::new();
    for j in 0..n {
        let mut col: Vec<(u32, C)> = m.col(j).iter().map(|&(i, v)| (i, C::from_i64(v))).collect();
        let mut tr: Vec<(u32, C)> = if track { vec![(j as u32, C::from_i64(1))] } else { Vec::new() };
        while let Some(&(low, ref b)) = col.last() {
            let Some(&p) = pivot_of.get(&low) else { break };
            let a = red[p].last().unwrap().1.clone();
            let b = b.clone();
            let g = a.gcd_c(&b);
            let sa = a.quot(&g);
            let sb = b.quot(&g);
            col = combine(&col, &sa, &red[p], &sb)?;
            if track {
                tr = combine(&tr, &sa, &trans[p], &sb)?;
            }
            let content = col.iter().chain(tr.iter()).fold(C::zero(), |acc, e| acc.gcd_c(&e.1));
            if !content.is_zero_c() && !content.is_unit_c() {
                for e in col.iter_mut().chain(tr.iter_mut()) {
                    e.1 = e.1.quot(&content);
                }
            }
        }
        if let Some(&(low, _)) = col.last() {
            pivot_of.insert(low, j);
        }
        red.push(col);
        trans.push(tr);
    }
    Some((red, trans))
}

/// `sa * x - sb * y` on sorted sparse vectors.
fn combine<C: Coef>(x: &[(u32, C)], sa: &C, y: &[(u32, C)], sb: &C) -> Option<Vec<(u32, C)>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut a, mut b) = (0, 0);
    while a < x.len() || b < y.len() {
        let ia = x.get(a).map(|e| e.0);
        let ib = y.get(b).map(|e| e.0);
        let (idx, v) = match (ia, ib) {
            (Some(i), Some(j)) if i == j => {
                let v = x[a].1.mul_c(sa)?.sub_mul(sb, &y[b].1)?;
                a += 1;
                b += 1;
                (i, v)
            }
            (Some(i), Some(j)) if i < j => {
                let v = x[a].1.mul_c(sa)?;
                a += 1;
                (i, v)
            }
            (Some(i), None) => {
                let v = x[a].1.mul_c(sa)?;
                a += 1;
                (i, v)
            }
            (_, Some(j)) => {
                let v = C::zero().sub_mul(sb, &y[b].1)?;
                b += 1;
                (j, v)
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero_c() {
            out.push((idx, v));
        }
    }
    Some(out)
}

fn to_i64_vecs(v: Vec<Vec<(u32, BigInt)>>) -> Result<Vec<SparseVec>> {
    v.into_iter()
        .map(|c| {
            c.into_iter()
                .map(|(i, x)| x.to_i64().map(|y| (i, y)).ok_or_else(|| Error::Overflow("kernel vector".into())))
                .collect()
        })
        .collect()
}

/// Primitive integer vectors spanning the rational kernel of `m`.
pub fn kernel_basis(m: &SparseMat) -> Result<Vec<SparseVec>> {
    if let Some((red, tr)) = column_reduce::<i64>(m, true) {
        return Ok(red.iter().zip(tr).filter(|(r, _)| r.is_empty()).map(|(_, t)| t).collect());
    }
    let (red, tr) = column_reduce::<BigInt>(m, true).expect("bigint reduction cannot overflow");
    to_i64_vecs(red.iter().zip(tr).filter(|(r, _)| r.is_empty()).map(|(_, t)| t).collect())
}

/// Indices of the columns of `extra` that are independent of the columns of
/// `base` and of the earlier kept columns, over the rationals.
pub fn independent_columns(base: &SparseMat, extra: &SparseMat) -> Vec<usize> {
    let both = SparseMat::hstack(&[base, extra]);
    let nb = base.cols();
    let nonzero: Vec<bool> = match column_reduce::<i64>(&both, false) {
        Some((red, _)) => red.iter().map(|c| !c.is_empty()).collect(),
        None => {
            let (red, _) = column_reduce::<BigInt>(&both, false).expect("bigint reduction cannot overflow");
            red.iter().map(|c| !c.is_empty()).collect()
        }
    };
    (0..extra.cols()).filter(|&j| nonzero[nb + j]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn times_two() {
        let s = smith(&SparseMat::from_dense(&[vec![2]]));
        assert_eq!(s, Smith { rank: 1, torsion: big(&[2]) });
    }

    #[test]
    fn classic_invariants() {
        let m = SparseMat::from_dense(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&m);
        assert_eq!(s.rank, 3);
        assert_eq!(s.torsion, big(&[2, 6, 12]));
        let m = SparseMat::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(smith(&m).torsion, big(&[6]));
    }

    #[test]
    fn rank_deficient() {
        let m = SparseMat::from_dense(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rank(&m), 2);
        let k = kernel_basis(&m).unwrap();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2;
        let m = SparseMat::from_dense(&[vec![big, big - 1], vec![big - 1, big - 2], vec![3, 5]]);
        let s = smith(&m);
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn independent_modulo_base() {
        let base = SparseMat::from_dense(&[vec![1], vec![1], vec![0]]);
        let extra = SparseMat::from_dense(&[vec![2, 1, 0], vec![2, 0, 0], vec![0, 0, 1]]);
        assert_eq!(independent_columns(&base, &extra), vec![1, 2]);
    }
}
