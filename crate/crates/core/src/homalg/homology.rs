//! Homology by Smith normal form, quasi-isomorphism tests, comparison of
//! induced maps, and exactness of sequences over ℤ.

use std::sync::Arc;

use num_bigint::BigInt;

use super::complex::{cone, ChainMap, FreeComplex};
use super::matrix::{SparseMat, SparseVec};
use super::snf::{independent_columns, kernel_basis, smith};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyRecord {
    pub degree: i64,
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyRecord {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

/// `H^p(C)`.
pub fn homology(c: &FreeComplex, p: i64) -> HomologyRecord {
    let out = smith(&c.d_block(p));
    let inc = smith(&c.d_block(p - 1));
    HomologyRecord { degree: p, betti: c.rank_in(p) - out.rank - inc.rank, torsion: inc.torsion }
}

/// Homology in every degree carrying generators.
pub fn homology_all(c: &FreeComplex) -> Vec<HomologyRecord> {
    let degs = c.degrees();
    let mut ranks = std::collections::HashMap::new();
    for &p in &degs {
        ranks.insert(p, smith(&c.d_block(p)));
    }
    degs.iter()
        .map(|&p| {
            let r_out = ranks[&p].rank;
            let (r_in, tors) = ranks.get(&(p - 1)).map_or((0, Vec::new()), |s| (s.rank, s.torsion.clone()));
            HomologyRecord { degree: p, betti: c.rank_in(p) - r_out - r_in, torsion: tors }
        })
        .collect()
}

/// Zero homology over ℤ in all degrees. The whole differential is a direct
/// sum of its degree blocks, so one elimination suffices.
pub fn is_acyclic(c: &FreeComplex) -> bool {
    let s = smith(c.differential());
    s.torsion.is_empty() && 2 * s.rank == c.len()
}

/// Degree of the first nonzero homology group, for reports.
pub fn first_homology(c: &FreeComplex) -> Option<HomologyRecord> {
    homology_all(c).into_iter().find(|h| !h.is_zero())
}

pub fn is_quasi_iso(f: &ChainMap) -> Result<bool> {
    Ok(is_acyclic(&cone(f)?))
}

/// Cycles representing a rational basis of `H(C)`, each homogeneous.
pub fn homology_reps(c: &FreeComplex) -> Result<Vec<SparseVec>> {
    let z = kernel_basis(c.differential())?;
    let zm = SparseMat::from_columns(c.len(), z.clone());
    let keep = independent_columns(c.differential(), &zm);
    Ok(keep.into_iter().map(|j| z[j].clone()).collect())
}

fn has_torsion(c: &FreeComplex) -> bool {
    !smith(c.differential()).torsion.is_empty()
}

/// Outcome of comparing two maps on homology.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomologyVerdict {
    /// Equal on integral homology.
    Equal,
    /// Equal after tensoring with ℚ; the target homology has torsion so the
    /// integral statement was not decided.
    EqualRational,
    Different,
}

impl HomologyVerdict {
    pub fn holds(self) -> bool {
        self != HomologyVerdict::Different
    }
}

/// The zig-zag `C --x--> T <--r-- V --pi--> W` with `r` a quasi-isomorphism,
/// read on homology as `pi ∘ r⁻¹ ∘ x`.
pub struct ZigZag<'a> {
    pub x: &'a ChainMap,
    pub r: &'a ChainMap,
    pub pi: &'a ChainMap,
}

/// Compares `f` and `g` on homology in every degree: `(f - g)(Z) ⊂ B`.
pub fn equal_on_homology(f: &ChainMap, g: &ChainMap) -> Result<HomologyVerdict> {
    let diff = f.sub(g)?;
    let reps = homology_reps(f.src())?;
    let tgt = f.tgt();
    let imgs: Vec<SparseVec> = reps.iter().map(|z| diff.apply(z)).collect();
    let b = SparseMat::from_columns(tgt.len(), imgs);
    if !independent_columns(tgt.differential(), &b).is_empty() {
        return Ok(HomologyVerdict::Different);
    }
    Ok(if has_torsion(tgt) { HomologyVerdict::EqualRational } else { HomologyVerdict::Equal })
}

/// Compares `y: C → W` with the zig-zag `pi ∘ r⁻¹ ∘ x` on homology.
///
/// For each cycle `z` representing a homology class of `C` this asks for
/// `v, t, w` with `r v + d t = x z`, `pi v + d w = y z`, `d v = 0`; since `r` is
/// a quasi-isomorphism the class of `v` is forced, so solvability for all `z`
/// is equality of the induced maps.
pub fn zigzag_equal_on_homology(z: &ZigZag<'_>, y: &ChainMap) -> Result<HomologyVerdict> {
    let (x, r, pi) = (z.x, z.r, z.pi);
    if *r.tgt().as_ref() != *x.tgt().as_ref() || *r.src().as_ref() != *pi.src().as_ref() {
        return Err(Error::invalid("zig-zag maps do not compose"));
    }
    if *y.src().as_ref() != *x.src().as_ref() || *y.tgt().as_ref() != *pi.tgt().as_ref() {
        return Err(Error::invalid("compared map has the wrong ends"));
    }
    if !is_quasi_iso(r)? {
        return Err(Error::invalid("the inverted map is not a quasi-isomorphism"));
    }
    let t: &Arc<FreeComplex> = r.tgt();
    let v: &Arc<FreeComplex> = r.src();
    let w: &Arc<FreeComplex> = pi.tgt();
    let (nt, nv, nw) = (t.len(), v.len(), w.len());
    let m = SparseMat::block(
        &[nt, nw, nv],
        &[nv, nt, nw],
        &[
            vec![Some(r.matrix()), Some(t.differential()), None],
            vec![Some(pi.matrix()), None, Some(w.differential())],
            vec![Some(v.differential()), None, None],
        ],
    );
    let reps = homology_reps(x.src())?;
    let rhs: Vec<SparseVec> = reps
        .iter()
        .map(|c| {
            let mut col = x.apply(c);
            col.extend(y.apply(c).into_iter().map(|(i, a)| (i + nt as u32, a)));
            col
        })
        .collect();
    let b = SparseMat::from_columns(nt + nw + nv, rhs);
    if !independent_columns(&m, &b).is_empty() {
        return Ok(HomologyVerdict::Different);
    }
    Ok(if has_torsion(w) { HomologyVerdict::EqualRational } else { HomologyVerdict::Equal })
}

/// Exactness of `M_0 --g_0--> M_1 --g_1--> … --g_{k-1}--> M_k` at each inner
/// term, over ℤ. Returns the index of the first failing term.
///
/// At `M_i`: `g_i g_{i-1} = 0`, `rank g_{i-1} + rank g_i = rank M_i`, and
/// `g_{i-1}` has all invariant factors 1, so its image is a direct summand of
/// the same rank as the kernel that contains it.
pub fn first_non_exact(maps: &[SparseMat]) -> Option<usize> {
    let info: Vec<_> = maps.iter().map(smith).collect();
    for i in 1..maps.len() {
        let (a, b) = (&maps[i - 1], &maps[i]);
        if a.rows() != b.cols() {
            return Some(i);
        }
        if !b.mul(a).is_zero() {
            return Some(i);
        }
        if info[i - 1].rank + info[i].rank != a.rows() || !info[i - 1].torsion.is_empty() {
            return Some(i);
        }
    }
    None
}
