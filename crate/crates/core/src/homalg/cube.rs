//! Total complex of a commutative cube of complexes indexed by the subsets
//! of a finite ordered set.
//!
//! The summand for `S` sits in first degree `|S| + offset`. The edge map
//! `S → S ∪ {k}` carries `(-1)^{#{s ∈ S : s > k}}`, and the internal
//! differential on the summand for `S` is multiplied by `(-1)^{|S| + offset}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::complex::{ChainMap, FreeComplex, Gid, Terms};
use super::homology::{is_acyclic, is_quasi_iso};
use super::matrix::mul_i64;
use crate::error::{Error, Result};
use crate::ordsets::{subsets, union};

pub fn subset_tag(s: &[usize]) -> Gid {
    Gid::T(s.iter().map(|&k| Gid::N(k as i64)).collect())
}

pub fn tag_subset(g: &Gid) -> Vec<usize> {
    g.parts().iter().map(|x| x.num() as usize).collect()
}

/// Cube generator `(S, g)`.
pub fn cube_gid(s: &[usize], g: Gid) -> Gid {
    Gid::t([subset_tag(s), g])
}

pub fn split_cube_gid(g: &Gid) -> (Vec<usize>, &Gid) {
    let p = g.parts();
    (tag_subset(&p[0]), &p[1])
}

pub fn edge_sign(s: &[usize], k: usize) -> i64 {
    if s.iter().filter(|&&x| x > k).count() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub struct Cube {
    items: Vec<usize>,
    offset: i64,
    complexes: BTreeMap<Vec<usize>, Arc<FreeComplex>>,
    maps: HashMap<(Vec<usize>, usize), ChainMap>,
}

impl Cube {
    /// `complex(S)` for every `S ⊆ items`, `map(S, k)` from `S` to `S ∪ {k}`.
    /// Checks ends and that every square commutes.
    pub fn new(
        items: Vec<usize>,
        offset: i64,
        complex: impl Fn(&[usize]) -> Result<Arc<FreeComplex>>,
        map: impl Fn(&[usize], usize) -> Result<ChainMap>,
    ) -> Result<Self> {
        let mut complexes = BTreeMap::new();
        for s in subsets(&items) {
            let c = complex(&s)?;
            complexes.insert(s, c);
        }
        let mut maps = HashMap::new();
        for s in complexes.keys() {
            for &k in items.iter().filter(|k| !s.contains(k)) {
                let f = map(s, k)?;
                let t = union(s, &[k]);
                if f.shift() != 0 || **f.src() != *complexes[s] || **f.tgt() != *complexes[&t] {
                    return Err(Error::invalid(format!("edge map {s:?} + {k} has the wrong ends")));
                }
                maps.insert((s.clone(), k), f);
            }
        }
        let cube = Cube { items, offset, complexes, maps };
        cube.check_squares()?;
        Ok(cube)
    }

    fn check_squares(&self) -> Result<()> {
        for s in self.complexes.keys() {
            let out: Vec<usize> = self.items.iter().copied().filter(|k| !s.contains(k)).collect();
            for (a, &k) in out.iter().enumerate() {
                for &l in &out[a + 1..] {
                    let sk = union(s, &[k]);
                    let sl = union(s, &[l]);
                    let p = self.maps[&(s.clone(), k)].then(&self.maps[&(sk, l)])?;
                    let q = self.maps[&(s.clone(), l)].then(&self.maps[&(sl, k)])?;
                    if !p.same_as(&q) {
                        return Err(Error::invariant(format!("square at {s:?} with {k}, {l} does not commute")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn vertex(&self, s: &[usize]) -> &Arc<FreeComplex> {
        &self.complexes[s]
    }

    pub fn edge(&self, s: &[usize], k: usize) -> &ChainMap {
        &self.maps[&(s.to_vec(), k)]
    }

    /// First degree of the summand for `S`.
    pub fn outer_degree(&self, s: &[usize]) -> i64 {
        s.len() as i64 + self.offset
    }

    pub fn total(&self) -> Result<FreeComplex> {
        let mut gens = Vec::new();
        for (s, c) in &self.complexes {
            let a = self.outer_degree(s);
            gens.extend(c.gens().iter().map(|(p, g)| (a + p, cube_gid(s, g.clone()))));
        }
        FreeComplex::from_fn(gens, |g| self.total_d(g))
    }

    fn total_d(&self, g: &Gid) -> Terms {
        let (s, x) = split_cube_gid(g);
        let a = self.outer_degree(&s);
        let inner = if a.rem_euclid(2) == 0 { 1 } else { -1 };
        let mut out: Terms = self.complexes[&s].d_of(x).into_iter().map(|(h, v)| (cube_gid(&s, h), inner * v)).collect();
        for &k in self.items.iter().filter(|k| !s.contains(k)) {
            let e = edge_sign(&s, k);
            let t = union(&s, &[k]);
            out.extend(self.maps[&(s.clone(), k)].image_of(x).into_iter().map(|(h, v)| (cube_gid(&t, h), mul_i64(e, v))));
        }
        out
    }

    /// Whether every edge map is a quasi-isomorphism.
    pub fn edges_are_quasi_isos(&self) -> Result<bool> {
        for f in self.maps.values() {
            if !is_quasi_iso(f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// With nonempty `items` and quasi-isomorphic edges the total complex is
    /// acyclic; returns `(edges quasi-iso, total acyclic)`.
    pub fn acyclicity(&self) -> Result<(bool, bool)> {
        Ok((self.edges_are_quasi_isos()?, is_acyclic(&self.total()?)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point() -> Arc<FreeComplex> {
        Arc::new(FreeComplex::discrete(vec![(0, Gid::N(0))]).unwrap())
    }

    fn scaled_cube(items: Vec<usize>, k: i64) -> Cube {
        let p = point();
        Cube::new(items, 1, |_| Ok(p.clone()), |_, _| Ok(ChainMap::identity(p.clone()).scale(k))).unwrap()
    }

    #[test]
    fn identity_cube_is_acyclic() {
        for m in 1..4 {
            let c = scaled_cube((0..m).collect(), 1);
            assert_eq!(c.acyclicity().unwrap(), (true, true));
        }
    }

    #[test]
    fn non_quasi_iso_edges_can_fail() {
        let c = scaled_cube(vec![0], 2);
        assert_eq!(c.acyclicity().unwrap(), (false, false));
    }

    #[test]
    fn empty_cube_is_the_vertex() {
        let c = scaled_cube(vec![], 1);
        let t = c.total().unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.deg(0), 1);
    }

    #[test]
    fn rejects_noncommuting_square() {
        let p = point();
        let r = Cube::new(vec![0, 1], 0, |_| Ok(p.clone()), |s, k| {
            let sc = if s.is_empty() && k == 0 { -1 } else { 1 };
            Ok(ChainMap::identity(p.clone()).scale(sc))
        });
        assert!(r.is_err());
    }
}
