//! Multicomplexes in both sign conventions, partial totalization, and the
//! tensor product of quoted double complexes.

use std::collections::HashMap;
use std::sync::Arc;

use super::complex::{ChainMap, FreeComplex, Gid, Terms};
use super::matrix::{mul_i64, SparseMat};
use crate::error::{Error, Result};
use crate::ordsets::OrderedSurjection;

/// `Commuting` is the quoted convention (`d_k d_l = d_l d_k`),
/// `Anticommuting` the plain one (`d_k d_l + d_l d_k = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Commuting,
    Anticommuting,
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug)]
pub struct MultiComplex {
    conv: Convention,
    arity: usize,
    gens: Vec<(Vec<i64>, Gid)>,
    index: HashMap<Gid, usize>,
    ds: Vec<SparseMat>,
}

impl PartialEq for MultiComplex {
    fn eq(&self, other: &Self) -> bool {
        self.conv == other.conv && self.arity == other.arity && self.gens == other.gens && self.ds == other.ds
    }
}

impl MultiComplex {
    /// Builds from the value of each `d_k` on each generator and validates
    /// degrees, `d_k d_k = 0`, and the pairwise relation of `conv`.
    pub fn new(
        arity: usize,
        conv: Convention,
        gens: Vec<(Vec<i64>, Gid)>,
        d: impl Fn(usize, &Gid) -> Terms,
    ) -> Result<Self> {
        let mut gens = gens;
        gens.sort();
        let mut index = HashMap::with_capacity(gens.len());
        for (i, (deg, g)) in gens.iter().enumerate() {
            if deg.len() != arity {
                return Err(Error::invalid(format!("generator {g:?} has {} degrees, arity {arity}", deg.len())));
            }
            if index.insert(g.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate generator {g:?}")));
            }
        }
        let mut ds = Vec::with_capacity(arity);
        for k in 0..arity {
            let mut cols = Vec::with_capacity(gens.len());
            for (deg, g) in &gens {
                let mut col = Vec::new();
                for (h, v) in d(k, g) {
                    let i = *index
                        .get(&h)
                        .ok_or_else(|| Error::invariant(format!("d_{k}({g:?}) involves unknown {h:?}")))?;
                    let mut want = deg.clone();
                    want[k] += 1;
                    if v != 0 && gens[i].0 != want {
                        return Err(Error::invariant(format!("d_{k}({g:?}) hits {h:?} of degree {:?}", gens[i].0)));
                    }
                    col.push((i as u32, v));
                }
                cols.push(col);
            }
            ds.push(SparseMat::from_columns(gens.len(), cols));
        }
        let m = MultiComplex { conv, arity, gens, index, ds };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..self.arity {
            if !self.ds[k].mul(&self.ds[k]).is_zero() {
                return Err(Error::invariant(format!("d_{k} d_{k} != 0")));
            }
            for l in k + 1..self.arity {
                let a = self.ds[k].mul(&self.ds[l]);
                let b = self.ds[l].mul(&self.ds[k]);
                let rel = match self.conv {
                    Convention::Commuting => a.sub(&b),
                    Convention::Anticommuting => a.add(&b),
                };
                if !rel.is_zero() {
                    return Err(Error::invariant(format!("d_{k} and d_{l} violate the {:?} relation", self.conv)));
                }
            }
        }
        Ok(())
    }

    /// Quoted n-fold tensor product: `d_k` acts on factor `k` without sign.
    pub fn from_factors(factors: &[&FreeComplex]) -> Result<Self> {
        let mut gens: Vec<(Vec<i64>, Vec<Gid>)> = vec![(Vec::new(), Vec::new())];
        for f in factors {
            let mut next = Vec::new();
            for (d, g) in &gens {
                for (p, h) in f.gens() {
                    let mut d2 = d.clone();
                    d2.push(*p);
                    let mut g2 = g.clone();
                    g2.push(h.clone());
                    next.push((d2, g2));
                }
            }
            gens = next;
        }
        let gens = gens.into_iter().map(|(d, g)| (d, Gid::T(g))).collect();
        MultiComplex::new(factors.len(), Convention::Commuting, gens, |k, g| {
            factors[k]
                .d_of(&g.parts()[k])
                .into_iter()
                .map(|(h, v)| {
                    let mut t = g.parts().to_vec();
                    t[k] = h;
                    (Gid::T(t), v)
                })
                .collect()
        })
    }

    /// A complex seen as a 1-fold multicomplex.
    pub fn from_complex(c: &FreeComplex) -> Result<Self> {
        MultiComplex::new(1, Convention::Commuting, c.gens().iter().map(|(p, g)| (vec![*p], g.clone())).collect(), |_, g| {
            c.d_of(g)
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn convention(&self) -> Convention {
        self.conv
    }

    pub fn gens(&self) -> &[(Vec<i64>, Gid)] {
        &self.gens
    }

    pub fn multideg(&self, g: &Gid) -> Option<&[i64]> {
        self.index.get(g).map(|&i| self.gens[i].0.as_slice())
    }

    pub fn d_k(&self, k: usize) -> &SparseMat {
        &self.ds[k]
    }

    pub fn d_k_of(&self, k: usize, g: &Gid) -> Terms {
        let j = self.index[g];
        self.ds[k].col(j).iter().map(|&(i, v)| (self.gens[i as usize].1.clone(), v)).collect()
    }

    /// Sign applied to `d_k` when the coordinates in `group` are summed:
    /// `(-1)^{Σ deg_j}` over `j ∈ group` before `k` (after `k` if `reversed`).
    fn group_sign(&self, deg: &[i64], group: &[usize], k: usize, reversed: bool) -> i64 {
        if self.conv == Convention::Anticommuting {
            return 1;
        }
        let e: i64 = group.iter().filter(|&&j| if reversed { j > k } else { j < k }).map(|&j| deg[j]).sum();
        sign(e)
    }

    /// `Tot^f`, summing the coordinates in each fiber of `f`. For the quoted
    /// convention, `d_k` is corrected by `(-1)^{α_k}` where `α_k` sums the
    /// degrees of earlier coordinates of the same fiber (later ones if
    /// `reversed`, the order used by tensor products).
    pub fn totalize(&self, f: &OrderedSurjection, reversed: bool) -> Result<MultiComplex> {
        if f.source.len() != self.arity {
            return Err(Error::invalid(format!("surjection on {} coordinates, arity {}", f.source.len(), self.arity)));
        }
        self.totalize_by(&f.assignment, f.target.len(), reversed)
    }

    pub fn totalize_by(&self, assignment: &[usize], m: usize, reversed: bool) -> Result<MultiComplex> {
        if assignment.len() != self.arity
            || assignment.windows(2).any(|w| w[0] > w[1])
            || (0..m).any(|t| !assignment.contains(&t))
            || assignment.iter().any(|&t| t >= m)
        {
            return Err(Error::invalid("grouping is not an order preserving surjection"));
        }
        let groups: Vec<Vec<usize>> = (0..m).map(|t| (0..self.arity).filter(|&k| assignment[k] == t).collect()).collect();
        let gens = self
            .gens
            .iter()
            .map(|(deg, g)| (groups.iter().map(|gr| gr.iter().map(|&k| deg[k]).sum()).collect(), g.clone()))
            .collect();
        let out = MultiComplex::new(m, self.conv, gens, |t, g| {
            let deg = self.multideg(g).unwrap();
            let mut out = Vec::new();
            for &k in &groups[t] {
                let s = self.group_sign(deg, &groups[t], k, reversed);
                out.extend(self.d_k_of(k, g).into_iter().map(|(h, v)| (h, mul_i64(s, v))));
            }
            out
        });
        out.map_err(|e| Error::invariant(format!("totalization broke the {:?} relation: {e}", self.conv)))
    }

    /// Plain convention version of a quoted complex: `d_k ↦ (-1)^{α_k} d_k`.
    pub fn to_anticommuting(&self, reversed: bool) -> Result<MultiComplex> {
        if self.conv == Convention::Anticommuting {
            return Ok(self.clone());
        }
        let all: Vec<usize> = (0..self.arity).collect();
        let conv = MultiComplex { conv: Convention::Commuting, ..self.clone() };
        MultiComplex::new(self.arity, Convention::Anticommuting, self.gens.clone(), |k, g| {
            let s = conv.group_sign(conv.multideg(g).unwrap(), &all, k, reversed);
            self.d_k_of(k, g).into_iter().map(|(h, v)| (h, mul_i64(s, v))).collect()
        })
    }

    fn to_free(&self) -> FreeComplex {
        assert_eq!(self.arity, 1);
        let gens = self.gens.iter().map(|(d, g)| (d[0], g.clone())).collect();
        FreeComplex::from_fn_unchecked(gens, |g| self.d_k_of(0, g)).expect("one-fold multicomplex is a complex")
    }

    /// Total complex, coordinates summed in order.
    pub fn total(&self) -> FreeComplex {
        self.total_with(false)
    }

    pub fn total_with(&self, reversed: bool) -> FreeComplex {
        let c = self.totalize_by(&vec![0; self.arity], 1, reversed).expect("totalization of a valid multicomplex");
        c.to_free()
    }
}

fn require_double(a: &MultiComplex) -> Result<()> {
    if a.arity != 2 || a.conv != Convention::Commuting {
        return Err(Error::invalid("expected a quoted double complex"));
    }
    Ok(())
}

/// `A × B`: `E^{c,r} = ⊕ A^{a,p} ⊗ B^{b,q}` with
/// `d' = (-1)^b d'_A⊗1 + 1⊗d'_B` and `d'' = (-1)^q d''_A⊗1 + 1⊗d''_B`.
pub fn dtimes(a: &MultiComplex, b: &MultiComplex) -> Result<MultiComplex> {
    require_double(a)?;
    require_double(b)?;
    let mut gens = Vec::with_capacity(a.gens.len() * b.gens.len());
    for (da, x) in &a.gens {
        for (db, y) in &b.gens {
            gens.push((vec![da[0] + db[0], da[1] + db[1]], Gid::t([x.clone(), y.clone()])));
        }
    }
    MultiComplex::new(2, Convention::Commuting, gens, |k, g| {
        let (x, y) = (&g.parts()[0], &g.parts()[1]);
        let s = sign(b.multideg(y).unwrap()[k]);
        let mut out: Terms = a.d_k_of(k, x).into_iter().map(|(h, v)| (Gid::t([h, y.clone()]), s * v)).collect();
        out.extend(b.d_k_of(k, y).into_iter().map(|(h, v)| (Gid::t([x.clone(), h]), v)));
        out
    })
}

/// `u: Tot(A) ⊗ Tot(B) → Tot(A × B)`, `(-1)^{aq}` on `A^{a,p} ⊗ B^{b,q}`.
pub fn u_iso(a: &MultiComplex, b: &MultiComplex) -> Result<ChainMap> {
    let src = Arc::new(FreeComplex::tensor(&a.total(), &b.total()));
    let tgt = Arc::new(dtimes(a, b)?.total());
    ChainMap::from_fn(src, tgt, 0, |g| {
        let (x, y) = (&g.parts()[0], &g.parts()[1]);
        let e = a.multideg(x).unwrap()[0] * b.multideg(y).unwrap()[1];
        vec![(g.clone(), sign(e))]
    })
}

/// Whether a chain map is a signed permutation of generators.
pub fn is_signed_permutation(f: &ChainMap) -> bool {
    let n = f.src().len();
    if f.tgt().len() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for j in 0..n {
        match f.matrix().col(j) {
            [(i, v)] if v.abs() == 1 && !hit[*i as usize] => hit[*i as usize] = true,
            _ => return false,
        }
    }
    true
}

/// `((x, y), z) ↦ (x, (y, z))`.
fn regroup(g: &Gid) -> Gid {
    let p = g.parts();
    let xy = p[0].parts();
    Gid::t([xy[0].clone(), Gid::t([xy[1].clone(), p[1].clone()])])
}

fn left_flat(g: &Gid) -> Gid {
    let p = g.parts();
    let xy = p[0].parts();
    Gid::t([xy[0].clone(), xy[1].clone(), p[1].clone()])
}

fn right_flat(g: &Gid) -> Gid {
    let p = g.parts();
    let yz = p[1].parts();
    Gid::t([p[0].clone(), yz[0].clone(), yz[1].clone()])
}

fn flat_terms(t: Terms, f: fn(&Gid) -> Gid) -> Terms {
    let mut v: Terms = t.iter().map(|(g, c)| (f(g), *c)).collect();
    v.sort();
    v
}

/// Checks that each `u` is an invertible chain map, that `(A × B) × C` and
/// `A × (B × C)` agree after regrouping, and that
/// `u (u ⊗ 1) = u (1 ⊗ u)` on `Tot(A) ⊗ Tot(B) ⊗ Tot(C)`. Returns the first
/// violation.
pub fn u_coherence(a: &MultiComplex, b: &MultiComplex, c: &MultiComplex) -> Result<Option<String>> {
    let ab = dtimes(a, b)?;
    let bc = dtimes(b, c)?;
    let abc = dtimes(&ab, c)?;
    let abc2 = dtimes(a, &bc)?;
    let u_ab = u_iso(a, b)?;
    let u_bc = u_iso(b, c)?;
    let u_ab_c = u_iso(&ab, c)?;
    let u_a_bc = u_iso(a, &bc)?;
    for (name, u) in [("A,B", &u_ab), ("B,C", &u_bc), ("A×B,C", &u_ab_c), ("A,B×C", &u_a_bc)] {
        if !is_signed_permutation(u) {
            return Ok(Some(format!("u_{{{name}}} is not invertible")));
        }
    }
    if abc.gens.len() != abc2.gens.len() {
        return Ok(Some("(A×B)×C and A×(B×C) differ in size".into()));
    }
    for (deg, g) in &abc.gens {
        let h = regroup(g);
        if abc2.multideg(&h) != Some(deg.as_slice()) {
            return Ok(Some(format!("{g:?} has no regrouped partner of bidegree {deg:?}")));
        }
        for k in 0..2 {
            if flat_terms(abc.d_k_of(k, g), left_flat) != flat_terms(abc2.d_k_of(k, &h), right_flat) {
                return Ok(Some(format!("d_{k} differs on {g:?} after regrouping")));
            }
        }
    }
    let left = ChainMap::tensor(&u_ab, &ChainMap::identity(Arc::new(c.total())))?.then(&u_ab_c)?;
    let right = ChainMap::tensor(&ChainMap::identity(Arc::new(a.total())), &u_bc)?.then(&u_a_bc)?;
    for (_, g) in left.src().gens() {
        let h = regroup(g);
        if flat_terms(left.image_of(g), left_flat) != flat_terms(right.image_of(&h), right_flat) {
            return Ok(Some(format!("the square differs on {:?}", left_flat(g))));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordsets::FiniteOrderedSet;

    fn n(x: i64) -> Gid {
        Gid::N(x)
    }

    /// Square a → b, a → c, b → e, c → e with both differentials +1.
    fn square() -> MultiComplex {
        let gens = vec![(vec![0, 0], n(0)), (vec![1, 0], n(1)), (vec![0, 1], n(2)), (vec![1, 1], n(3))];
        MultiComplex::new(2, Convention::Commuting, gens, |k, g| match (k, g.num()) {
            (0, 0) => vec![(n(1), 1)],
            (1, 0) => vec![(n(2), 1)],
            (1, 1) => vec![(n(3), 1)],
            (0, 2) => vec![(n(3), 1)],
            _ => vec![],
        })
        .unwrap()
    }

    #[test]
    fn rejects_bad_relation() {
        let gens = vec![(vec![0, 0], n(0)), (vec![1, 0], n(1)), (vec![0, 1], n(2)), (vec![1, 1], n(3))];
        let bad = MultiComplex::new(2, Convention::Anticommuting, gens, |k, g| match (k, g.num()) {
            (0, 0) => vec![(n(1), 1)],
            (1, 0) => vec![(n(2), 1)],
            (1, 1) => vec![(n(3), 1)],
            (0, 2) => vec![(n(3), 1)],
            _ => vec![],
        });
        assert!(bad.is_err());
    }

    #[test]
    fn total_of_square_is_acyclic() {
        let t = square().total();
        t.validate().unwrap();
        assert!(crate::homalg::homology::is_acyclic(&t));
        // the quoted correction puts the sign on d'' from (1,0)
        assert_eq!(t.d_of(&n(1)), vec![(n(3), -1)]);
    }

    #[test]
    fn identity_totalization() {
        let s = square();
        let set = FiniteOrderedSet::range(2);
        let id = OrderedSurjection::identity(set);
        assert_eq!(s.totalize(&id, false).unwrap(), s);
    }

    #[test]
    fn plain_conversion_has_same_total() {
        let s = square();
        let p = s.to_anticommuting(false).unwrap();
        assert_eq!(p.convention(), Convention::Anticommuting);
        assert_eq!(p.total(), s.total());
    }

    #[test]
    fn u_sign_on_odd_pair() {
        let a = square();
        let u = u_iso(&a, &a).unwrap();
        let g = Gid::t([n(1), n(2)]);
        assert_eq!(u.image_of(&g), vec![(g.clone(), -1)]);
        let g = Gid::t([n(2), n(1)]);
        assert_eq!(u.image_of(&g), vec![(g.clone(), 1)]);
    }

    #[test]
    fn three_factor_square_commutes() {
        let a = square();
        assert_eq!(u_coherence(&a, &a, &a).unwrap(), None);
    }
}
