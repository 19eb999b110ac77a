//! Čech cycle complexes of open coverings, their functorialities, products,
//! restricted tensor products and distinguished subcomplexes.
//!
//! A space is represented by its cycle complex. An open set is the set of
//! generators supported in it; the generators outside form a subcomplex (the
//! cycles of the closed complement), so restriction is the projection.
//! Generators of `Z(M, 𝒰)` are `(chain, x)` with `chain` a strictly increasing
//! list of covering indices (possibly empty) and `x` supported in `U_chain`.
//! The generator sits in degree `|chain| + deg x` and
//! `d = δ + (-1)^{|chain|} ∂` with `δ` the alternating Čech coboundary.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geomodel::{GeometryModel, Part};
use crate::homalg::cube::{cube_gid, split_cube_gid};
use crate::homalg::{collect_terms, ChainMap, FreeComplex, Gid, Terms};
use crate::ordsets::subsets;

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Checks that the generators outside `keep` span a subcomplex.
fn check_open(base: &FreeComplex, keep: &HashSet<Gid>, what: &str) -> Result<()> {
    for (_, g) in base.gens() {
        if !keep.contains(g) && base.d_of(g).iter().any(|(h, _)| keep.contains(h)) {
            return Err(Error::invalid(format!("{what}: complement is not closed under the boundary at {g:?}")));
        }
    }
    for g in keep {
        if !base.contains(g) {
            return Err(Error::invalid(format!("{what}: {g:?} is not a generator of the space")));
        }
    }
    Ok(())
}

/// An open covering `{U_i}` of the open set `U` of a space.
#[derive(Clone, Debug)]
pub struct Covering {
    base: Arc<FreeComplex>,
    union: HashSet<Gid>,
    opens: Vec<HashSet<Gid>>,
}

impl Covering {
    /// Fails unless every open is a valid open set and `∪ U_i = U`.
    pub fn new(base: Arc<FreeComplex>, union: HashSet<Gid>, opens: Vec<HashSet<Gid>>) -> Result<Self> {
        check_open(&base, &union, "covered open set")?;
        let mut got: HashSet<Gid> = HashSet::new();
        for (i, o) in opens.iter().enumerate() {
            check_open(&base, o, &format!("open {i}"))?;
            got.extend(o.iter().cloned());
        }
        if got != union {
            return Err(Error::invalid("the union of the covering differs from the covered open set"));
        }
        Ok(Covering { base, union, opens })
    }

    /// Covering whose union is whatever the opens cover.
    pub fn of_opens(base: Arc<FreeComplex>, opens: Vec<HashSet<Gid>>) -> Result<Self> {
        let union = opens.iter().flatten().cloned().collect();
        Covering::new(base, union, opens)
    }

    pub fn base(&self) -> &Arc<FreeComplex> {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.opens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opens.is_empty()
    }

    pub fn open(&self, i: usize) -> &HashSet<Gid> {
        &self.opens[i]
    }

    pub fn union(&self) -> &HashSet<Gid> {
        &self.union
    }

    /// Whether `x` is supported in `U_chain`; the empty chain is the space.
    pub fn contains(&self, chain: &[usize], x: &Gid) -> bool {
        chain.iter().all(|&i| self.opens[i].contains(x))
    }

    /// `Z(A)` for the closed complement `A = M − U`.
    pub fn closed_part(&self) -> Result<FreeComplex> {
        self.base.sub(|g| !self.union.contains(g))
    }
}

/// `Z(M, 𝒰)` together with its covering.
#[derive(Clone, Debug)]
pub struct CechComplex {
    cover: Covering,
    complex: Arc<FreeComplex>,
}

pub fn cech_gid(chain: &[usize], x: Gid) -> Gid {
    cube_gid(chain, x)
}

pub fn split_cech_gid(g: &Gid) -> (Vec<usize>, &Gid) {
    split_cube_gid(g)
}

impl CechComplex {
    pub fn new(cover: Covering) -> Result<Self> {
        let idx: Vec<usize> = (0..cover.len()).collect();
        let chains = subsets(&idx);
        let mut gens = Vec::new();
        for c in &chains {
            for (q, x) in cover.base.gens() {
                if cover.contains(c, x) {
                    gens.push((c.len() as i64 + q, cech_gid(c, x.clone())));
                }
            }
        }
        let base = cover.base.clone();
        let complex = FreeComplex::from_fn(gens, |g| {
            let (c, x) = split_cech_gid(g);
            let mut out = Vec::new();
            for k in (0..cover.len()).filter(|k| !c.contains(k) && cover.opens[*k].contains(x)) {
                let pos = c.iter().filter(|&&i| i < k).count() as i64;
                let mut ck = c.clone();
                ck.push(k);
                ck.sort_unstable();
                out.push((cech_gid(&ck, x.clone()), sign(pos)));
            }
            let s = sign(c.len() as i64);
            for (h, v) in base.d_of(x) {
                if cover.contains(&c, &h) {
                    out.push((cech_gid(&c, h), s * v));
                }
            }
            out
        })?;
        Ok(CechComplex { cover, complex: Arc::new(complex) })
    }

    pub fn complex(&self) -> &Arc<FreeComplex> {
        &self.complex
    }

    pub fn cover(&self) -> &Covering {
        &self.cover
    }

    /// `ι: Z(A) → Z(M, 𝒰)`, `x ↦ (∅, x)`.
    pub fn iota(&self) -> Result<ChainMap> {
        let a = Arc::new(self.cover.closed_part()?);
        ChainMap::from_fn(a, self.complex.clone(), 0, |x| vec![(cech_gid(&[], x.clone()), 1)])
    }
}

/// Map of coverings: `tgt` covers an open set of an open subspace `M′ ⊆ M`
/// (generators of `Z(M′)` are generators of `Z(M)`), `lambda[j]` is the
/// index of the source open containing `V_j`. Sends `(c, x)` to the sum of
/// `(c′, x)` over chains `c′` mapped bijectively onto `c`.
pub fn restrict(src: &CechComplex, tgt: &CechComplex, lambda: &[usize]) -> Result<ChainMap> {
    let (u, v) = (&src.cover, &tgt.cover);
    if lambda.len() != v.len() {
        return Err(Error::invalid("the index map must be defined on every target index"));
    }
    if lambda.windows(2).any(|w| w[0] > w[1]) || lambda.iter().any(|&i| i >= u.len()) {
        return Err(Error::invalid("the index map must be order preserving into the source indices"));
    }
    let keep: HashSet<Gid> = v.base.gens().iter().map(|(_, g)| g.clone()).collect();
    check_open(&u.base, &keep, "target space")?;
    if *v.base != u.base.quotient(|g| keep.contains(g))? {
        return Err(Error::invalid("target space is not an open subspace of the source space"));
    }
    for (j, &i) in lambda.iter().enumerate() {
        if !v.opens[j].is_subset(&u.opens[i]) {
            return Err(Error::invalid(format!("target open {j} is not contained in source open {i}")));
        }
    }
    let idx: Vec<usize> = (0..v.len()).collect();
    let chains: Vec<Vec<usize>> = subsets(&idx)
        .into_iter()
        .filter(|c| c.windows(2).all(|w| lambda[w[0]] < lambda[w[1]]))
        .collect();
    ChainMap::from_fn(src.complex.clone(), tgt.complex.clone(), 0, |g| {
        let (c, x) = split_cech_gid(g);
        if !keep.contains(x) {
            return Vec::new();
        }
        chains
            .iter()
            .filter(|c2| c2.len() == c.len() && c2.iter().zip(&c).all(|(&j, &i)| lambda[j] == i) && v.contains(c2, x))
            .map(|c2| (cech_gid(c2, x.clone()), 1))
            .collect()
    })
}

/// `p_*: Z(M, p⁻¹𝒱) → Z(N, 𝒱)` from the pushforward `p_*: Z(M) → Z(N)`.
pub fn push(src: &CechComplex, tgt: &CechComplex, p: &ChainMap, projective: bool) -> Result<ChainMap> {
    if !projective {
        return Err(Error::invalid("pushforward needs a projective map"));
    }
    along(src, tgt, p)
}

/// `p^*: Z(N, 𝒱) → Z(M, p⁻¹𝒱)` from the pullback `p^*: Z(N) → Z(M)`.
pub fn pull(src: &CechComplex, tgt: &CechComplex, p: &ChainMap, smooth: bool) -> Result<ChainMap> {
    if !smooth {
        return Err(Error::invalid("pullback needs a smooth map"));
    }
    along(src, tgt, p)
}

fn along(src: &CechComplex, tgt: &CechComplex, p: &ChainMap) -> Result<ChainMap> {
    if src.cover.len() != tgt.cover.len() {
        return Err(Error::invalid("coverings must share the index set"));
    }
    if **p.src() != *src.cover.base || **p.tgt() != *tgt.cover.base || p.shift() != 0 {
        return Err(Error::invalid("map of spaces has the wrong ends"));
    }
    ChainMap::from_fn(src.complex.clone(), tgt.complex.clone(), 0, |g| {
        let (c, x) = split_cech_gid(g);
        p.image_of(x).into_iter().map(|(y, v)| (cech_gid(&c, y), v)).collect()
    })
}

/// `(c, x) ⊗ (c′, x′) ↦ (-1)^{|c|·deg(c′, x′)} (c ⨿ c′, x∘x′)`, where `tgt`
/// is indexed by `I ⨿ I′` (second indices shifted by `|I|`) and `mul` is the
/// product of cycles, itself a chain map for the reversed tensor sign.
pub fn cech_product(
    a: &CechComplex,
    b: &CechComplex,
    tgt: &CechComplex,
    mul: impl Fn(&Gid, &Gid) -> Terms,
) -> Result<ChainMap> {
    if tgt.cover.len() != a.cover.len() + b.cover.len() {
        return Err(Error::invalid("product covering must be indexed by the disjoint union"));
    }
    let src = Arc::new(FreeComplex::tensor(&a.complex, &b.complex));
    let off = a.cover.len();
    let bc = b.complex.clone();
    ChainMap::from_fn(src, tgt.complex.clone(), 0, |g| {
        let p = g.parts();
        let (c, x) = split_cech_gid(&p[0]);
        let (c2, y) = split_cech_gid(&p[1]);
        let s = sign(c.len() as i64 * bc.deg_of(&p[1]).expect("factor generator"));
        let chain: Vec<usize> = c.iter().copied().chain(c2.iter().map(|i| i + off)).collect();
        mul(x, y).into_iter().map(|(z, v)| (cech_gid(&chain, z), s * v)).collect()
    })
}

/// `⊗̂_i Z(M_{b_i})` for consecutive blocks of a geometry model, as a
/// subcomplex of the tensor product generated by proper tuples.
pub fn restricted_tensor(model: &dyn GeometryModel, blocks: &[(usize, usize)]) -> Result<(FreeComplex, FreeComplex)> {
    check_consecutive(blocks)?;
    let factors: Vec<Arc<FreeComplex>> = blocks.iter().map(|&(lo, hi)| model.cycles(lo, hi)).collect::<Result<_>>()?;
    let refs: Vec<&FreeComplex> = factors.iter().map(|f| f.as_ref()).collect();
    let full = FreeComplex::tensor_many(&refs);
    let hat = full.sub(|g| model.proper(&as_parts(blocks, g)).unwrap_or(false))?;
    Ok((hat, full))
}

fn check_consecutive(blocks: &[(usize, usize)]) -> Result<()> {
    if blocks.is_empty() || blocks.iter().any(|b| b.0 > b.1) || blocks.windows(2).any(|w| w[1].0 != w[0].1 + 1) {
        return Err(Error::invalid("blocks must be non-empty and consecutive"));
    }
    Ok(())
}

fn as_parts(blocks: &[(usize, usize)], g: &Gid) -> Vec<Part> {
    blocks.iter().zip(g.parts()).map(|(&(lo, hi), x)| Part::new(lo, hi, x.clone())).collect()
}

/// `ρ(I_1, …, I_r)`: from `⊗̂` over `blocks` to `⊗̂` over the merged blocks,
/// `groups[a]` listing the consecutive block indices merged into the `a`-th
/// factor. Returns the map between the restricted tensors.
pub fn rho(model: &dyn GeometryModel, blocks: &[(usize, usize)], groups: &[Vec<usize>]) -> Result<ChainMap> {
    let flat: Vec<usize> = groups.iter().flatten().copied().collect();
    if flat != (0..blocks.len()).collect::<Vec<_>>() || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::invalid("groups must cut the blocks into consecutive non-empty runs"));
    }
    let merged: Vec<(usize, usize)> = groups.iter().map(|g| (blocks[g[0]].0, blocks[*g.last().unwrap()].1)).collect();
    let (src, _) = restricted_tensor(model, blocks)?;
    let (tgt, _) = restricted_tensor(model, &merged)?;
    let tgt = Arc::new(tgt);
    let tc = tgt.clone();
    ChainMap::from_fn(Arc::new(src), tgt, 0, |g| {
        let parts = as_parts(blocks, g);
        let mut acc: Vec<(Vec<Gid>, i64)> = vec![(Vec::new(), 1)];
        for grp in groups {
            let run: Vec<Part> = grp.iter().map(|&i| parts[i].clone()).collect();
            let val = model.product(&run).expect("product of a proper run");
            let mut next = Vec::new();
            for (t, k) in &acc {
                for (z, v) in &val {
                    let mut u = t.clone();
                    u.push(z.clone());
                    next.push((u, k * v));
                }
            }
            acc = next;
        }
        let out = collect_terms(acc.into_iter().map(|(t, k)| (Gid::T(t), k)));
        debug_assert!(out.iter().all(|(h, _)| tc.contains(h)), "product left the restricted tensor");
        out
    })
}

/// One condition of constraint: tensor factors sit at model blocks; the
/// ambient sequence is cut at `cuts` (a run of adjacent blocks may not cross
/// position `k − 1 | k` for `k ∈ cuts`); `p` selects the factors that must
/// intersect properly together with the fixed elements.
#[derive(Clone, Debug, Default)]
pub struct SingleConstraint {
    pub cuts: Vec<usize>,
    pub p: Vec<usize>,
    pub fixed: Vec<((usize, usize), Terms)>,
}

/// Splits a tuple of elements sorted by block at the cuts.
fn split_at_cuts(mut items: Vec<((usize, usize), Terms)>, cuts: &[usize]) -> Vec<Vec<((usize, usize), Terms)>> {
    items.sort_by_key(|(b, _)| *b);
    let mut out: Vec<Vec<((usize, usize), Terms)>> = Vec::new();
    for it in items {
        let new_group = match out.last().and_then(|g| g.last()) {
            None => true,
            Some((prev, _)) => cuts.iter().any(|&k| prev.1 < k && k <= it.0 .0),
        };
        if new_group {
            out.push(vec![it]);
        } else {
            out.last_mut().unwrap().push(it);
        }
    }
    out
}

fn overlap(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

impl SingleConstraint {
    pub fn validate(&self, model: &dyn GeometryModel, factors: &[(usize, usize)]) -> Result<()> {
        if self.p.iter().any(|&i| i >= factors.len()) {
            return Err(Error::load("constraint selects a factor that does not exist"));
        }
        let mut blocks: Vec<(usize, usize)> = factors.to_vec();
        for (b, t) in &self.fixed {
            if b.0 > b.1 || b.1 >= model.len() {
                return Err(Error::load(format!("fixed element on bad block {b:?}")));
            }
            if blocks.iter().any(|&c| overlap(c, *b)) {
                return Err(Error::load(format!("fixed element on block {b:?} overlaps another block")));
            }
            let c = model.cycles(b.0, b.1)?;
            for (g, _) in t {
                if !c.contains(g) {
                    return Err(Error::load(format!("fixed element uses unknown generator {g:?}")));
                }
            }
            blocks.push(*b);
        }
        for group in split_at_cuts(self.fixed.clone(), &self.cuts) {
            if !model.proper_elements(&group)? {
                return Err(Error::load("fixed elements are not properly intersecting"));
            }
        }
        Ok(())
    }

    /// Whether the generator tuple (one entry per factor) satisfies the
    /// condition.
    pub fn admits(&self, model: &dyn GeometryModel, factors: &[(usize, usize)], parts: &[Gid]) -> Result<bool> {
        let mut items: Vec<((usize, usize), Terms)> = self.p.iter().map(|&i| (factors[i], vec![(parts[i].clone(), 1)])).collect();
        items.extend(self.fixed.iter().cloned());
        for group in split_at_cuts(items, &self.cuts) {
            if !model.proper_elements(&group)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `[⊗ Z(M_{b_i})]_C`: generator tuples admitted by every single constraint.
/// Factors are model blocks in increasing order, not necessarily adjacent.
pub fn distinguished(model: &dyn GeometryModel, factors: &[(usize, usize)], constraints: &[SingleConstraint]) -> Result<FreeComplex> {
    if factors.windows(2).any(|w| w[0].1 >= w[1].0) {
        return Err(Error::invalid("factor blocks must be disjoint and increasing"));
    }
    for c in constraints {
        c.validate(model, factors)?;
    }
    let cx: Vec<Arc<FreeComplex>> = factors.iter().map(|&(lo, hi)| model.cycles(lo, hi)).collect::<Result<_>>()?;
    let refs: Vec<&FreeComplex> = cx.iter().map(|f| f.as_ref()).collect();
    let full = FreeComplex::tensor_many(&refs);
    let mut err = None;
    let mut keep = |g: &Gid| {
        constraints.iter().all(|c| match c.admits(model, factors, g.parts()) {
            Ok(b) => b,
            Err(e) => {
                err.get_or_insert(e);
                false
            }
        })
    };
    let gens: Vec<Gid> = full.gens().iter().map(|(_, g)| g.clone()).filter(|g| keep(g)).collect();
    if let Some(e) = err {
        return Err(e);
    }
    let set: HashSet<Gid> = gens.into_iter().collect();
    full.sub(|g| set.contains(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomodel::{point_cycles, pull_points, push_points, PointFibering};
    use crate::homalg::{homology_all, is_quasi_iso};

    fn pts(n: i64) -> Arc<FreeComplex> {
        Arc::new(point_cycles((0..n).map(Gid::N)).unwrap())
    }

    fn set(v: &[i64]) -> HashSet<Gid> {
        v.iter().map(|&x| Gid::N(x)).collect()
    }

    #[test]
    fn union_must_match() {
        assert!(Covering::new(pts(3), set(&[0, 1]), vec![set(&[0])]).is_err());
        assert!(Covering::new(pts(3), set(&[0, 1]), vec![set(&[0]), set(&[1, 0])]).is_ok());
    }

    #[test]
    fn two_point_fiber_example() {
        // X1 = {a1, b1}, X2 = {a2, b2} over {s, t}; points of X1 × X2 as 2*i + j
        let m = pts(4);
        let a = set(&[0, 3]);
        let u: HashSet<Gid> = (0..4).map(Gid::N).filter(|g| !a.contains(g)).collect();
        let cov = Covering::new(m, u.clone(), vec![u]).unwrap();
        let z = CechComplex::new(cov).unwrap();
        let hs = homology_all(z.complex());
        assert_eq!(hs[0].degree, 0);
        assert_eq!(hs[0].betti, 2);
        assert!(hs[0].torsion.is_empty());
        assert!(hs[1].is_zero());
        assert!(is_quasi_iso(&z.iota().unwrap()).unwrap());
    }

    #[test]
    fn iota_on_three_opens() {
        let cov = Covering::of_opens(pts(5), vec![set(&[0, 1]), set(&[1, 2]), set(&[2, 0, 3])]).unwrap();
        let z = CechComplex::new(cov).unwrap();
        assert!(is_quasi_iso(&z.iota().unwrap()).unwrap());
    }

    #[test]
    fn identity_restriction() {
        let cov = Covering::of_opens(pts(3), vec![set(&[0, 1]), set(&[1, 2])]).unwrap();
        let z = CechComplex::new(cov).unwrap();
        let r = restrict(&z, &z, &[0, 1]).unwrap();
        assert!(r.same_as(&ChainMap::identity(z.complex().clone())));
    }

    #[test]
    fn refinement_factors() {
        let m = pts(4);
        let u = CechComplex::new(Covering::of_opens(m.clone(), vec![set(&[0, 1, 2]), set(&[2, 3])]).unwrap()).unwrap();
        // λ*𝒰 on J = {0, 1, 2} with λ = (0, 0, 1)
        let pulled = CechComplex::new(Covering::of_opens(m.clone(), vec![set(&[0, 1, 2]), set(&[0, 1, 2]), set(&[2, 3])]).unwrap()).unwrap();
        let v = CechComplex::new(Covering::of_opens(m, vec![set(&[0]), set(&[1, 2]), set(&[3])]).unwrap()).unwrap();
        let direct = restrict(&u, &v, &[0, 0, 1]).unwrap();
        let two = restrict(&u, &pulled, &[0, 0, 1]).unwrap().then(&restrict(&pulled, &v, &[0, 1, 2]).unwrap()).unwrap();
        assert!(direct.same_as(&two));
        assert!(restrict(&v, &u, &[0, 1]).is_err());
    }

    #[test]
    fn restriction_to_open_subspace_commutes_with_iota() {
        let m = pts(4);
        let u = CechComplex::new(Covering::of_opens(m, vec![set(&[0, 1])]).unwrap()).unwrap();
        let sub = pts(3);
        let v = CechComplex::new(Covering::of_opens(sub, vec![set(&[0])]).unwrap()).unwrap();
        let r = restrict(&u, &v, &[0]).unwrap();
        let lhs = u.iota().unwrap().then(&r).unwrap();
        let a = u.cover().closed_part().unwrap();
        let b = Arc::new(v.cover().closed_part().unwrap());
        let inc = ChainMap::from_fn(Arc::new(a), b, 0, |g| if g.num() < 3 { vec![(g.clone(), 1)] } else { vec![] }).unwrap();
        assert!(lhs.same_as(&inc.then(&v.iota().unwrap()).unwrap()));
    }

    #[test]
    fn push_pull_collapse() {
        let m = pts(2);
        let n = pts(1);
        let f = |_: &Gid| Gid::N(0);
        let pf = push_points(m.clone(), n.clone(), |g| Some(f(g))).unwrap();
        let pb = pull_points(n.clone(), m.clone(), f).unwrap();
        let zn = CechComplex::new(Covering::of_opens(n, vec![set(&[0])]).unwrap()).unwrap();
        let zm = CechComplex::new(Covering::of_opens(m, vec![set(&[0, 1])]).unwrap()).unwrap();
        let up = pull(&zn, &zm, &pb, true).unwrap();
        let down = push(&zm, &zn, &pf, true).unwrap();
        assert!(up.then(&down).unwrap().same_as(&ChainMap::identity(zn.complex().clone()).scale(2)));
        assert!(push(&zm, &zn, &pf, false).is_err());
    }

    #[test]
    fn product_is_a_chain_map() {
        // M = {0,1,2}, M′ = {0,1}, both over a point; product space is M × M′
        let a = CechComplex::new(Covering::of_opens(pts(3), vec![set(&[0, 1]), set(&[1, 2])]).unwrap()).unwrap();
        let b = CechComplex::new(Covering::of_opens(pts(2), vec![set(&[0]), set(&[1])]).unwrap()).unwrap();
        let mm = pts(6);
        let lift = |s: &HashSet<Gid>, left: bool| -> HashSet<Gid> {
            (0..6)
                .filter(|k| if left { s.contains(&Gid::N(k / 2)) } else { s.contains(&Gid::N(k % 2)) })
                .map(Gid::N)
                .collect()
        };
        let opens = vec![lift(a.cover().open(0), true), lift(a.cover().open(1), true), lift(b.cover().open(0), false), lift(b.cover().open(1), false)];
        let t = CechComplex::new(Covering::of_opens(mm, opens).unwrap()).unwrap();
        let p = cech_product(&a, &b, &t, |x, y| vec![(Gid::N(2 * x.num() + y.num()), 1)]).unwrap();
        assert!(p.validate().is_ok());
    }

    #[test]
    fn point_restricted_tensor_is_full() {
        let f = PointFibering::new(vec![2, 2, 1], vec![vec![0, 1], vec![0, 0]], vec![vec![0, 1], vec![0]]).unwrap();
        let (hat, full) = restricted_tensor(&f, &[(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(hat, full);
        let r = rho(&f, &[(0, 0), (1, 1), (2, 2)], &[vec![0, 1], vec![2]]).unwrap();
        // 8 generator tuples, 2 of which are compatible at the first seam
        assert_eq!(r.matrix().nnz(), 2);
        let single = SingleConstraint { cuts: vec![], p: vec![0, 1, 2], fixed: vec![] };
        let d = distinguished(&f, &[(0, 0), (1, 1), (2, 2)], &[single]).unwrap();
        assert_eq!(d, hat);
    }
}
