//! The complexes attached to a sequence of varieties over a base in the point
//! model: partial compactifications and their coverings, the Čech complexes
//! `ℱ(I, 𝒥)`, the tensor layers `ℱ(I, 𝒥|Σ)`, the cube totals `ℱ(I)`, and the
//! bar-type complexes `F(I|S)`, with their structure maps.
//!
//! A sequence is a slice of variety indices. Positions inside a sequence are
//! relative to it (0 is the initial point, `len − 1` the terminal one); the
//! sets `𝒥`, `Σ`, `S`, `K` are sorted lists of interior positions.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::cech::{cech_product, push, restrict, CechComplex, Covering};
use crate::error::{Error, Result};
use crate::geomodel::{point_cycles, push_points, PointModel};
use crate::homalg::bar::{bar_gid, pieces, split_bar_gid};
use crate::homalg::cube::{cube_gid, split_cube_gid};
use crate::homalg::matrix::mul_i64;
use crate::homalg::{
    collect_terms, first_non_exact, is_quasi_iso, zigzag_equal_on_homology, BarSystem, ChainMap, Cube, FreeComplex,
    Gid, HomologyVerdict, SparseMat, Terms, ZigZag,
};
use crate::ordsets::{intersect, is_subset, minus, subsets, union};

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn interior(m: usize) -> Vec<usize> {
    (1..m.saturating_sub(1)).collect()
}

/// Closed segments of `[0, m−1]` cut at `cuts`.
pub fn segments(m: usize, cuts: &[usize]) -> Vec<(usize, usize)> {
    pieces(0, m - 1, cuts)
}

/// Positions of `set` after deleting the positions in `removed`.
pub fn reindex(set: &[usize], removed: &[usize]) -> Vec<usize> {
    set.iter()
        .filter(|x| !removed.contains(x))
        .map(|&x| x - removed.iter().filter(|&&k| k < x).count())
        .collect()
}

pub fn remove_positions(v: &[usize], removed: &[usize]) -> Vec<usize> {
    v.iter().enumerate().filter(|(i, _)| !removed.contains(i)).map(|(_, &x)| x).collect()
}

/// `set ∩ (lo, hi)`, shifted so that `lo` becomes 0.
pub(crate) fn local(set: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    set.iter().filter(|&&x| x > lo && x < hi).map(|&x| x - lo).collect()
}

pub(crate) fn check_interior(m: usize, set: &[usize], what: &str) -> Result<()> {
    if set.windows(2).any(|w| w[0] >= w[1]) || set.iter().any(|&x| x == 0 || x + 1 >= m) {
        return Err(Error::invalid(format!("{what} {set:?} is not a sorted subset of the interior of [0, {}]", m - 1)));
    }
    Ok(())
}

pub(crate) fn check_disjoint(a: &[usize], b: &[usize], what: &str) -> Result<()> {
    if !intersect(a, b).is_empty() {
        return Err(Error::invalid(format!("{what}: {a:?} meets {b:?}")));
    }
    Ok(())
}

pub fn point_gid(coords: &[usize]) -> Gid {
    Gid::T(coords.iter().map(|&c| Gid::N(c as i64)).collect())
}

pub(crate) fn coords(g: &Gid) -> Vec<usize> {
    g.parts().iter().map(|x| x.num() as usize).collect()
}

/// Multiplies out a tensor generator factor by factor.
fn tensor_terms(parts: &[Gid], per: impl Fn(usize, &Gid) -> Terms) -> Terms {
    let mut acc: Vec<(Vec<Gid>, i64)> = vec![(Vec::new(), 1)];
    for (i, x) in parts.iter().enumerate() {
        let img = per(i, x);
        let mut next = Vec::with_capacity(acc.len() * img.len());
        for (t, k) in &acc {
            for (y, v) in &img {
                let mut u = t.clone();
                u.push(y.clone());
                next.push((u, mul_i64(*k, *v)));
            }
        }
        acc = next;
    }
    collect_terms(acc.into_iter().map(|(t, k)| (Gid::T(t), k)))
}

/// The sequence data: varieties by position and the step dimensions `a_i`.
#[derive(Clone, Debug)]
pub struct VarietySequence {
    pub vars: Vec<usize>,
    pub dims_a: Vec<i64>,
}

impl VarietySequence {
    pub fn new(model: &PointModel, vars: Vec<usize>, dims_a: Vec<i64>) -> Result<Self> {
        if vars.len() < 2 {
            return Err(Error::invalid("a sequence needs at least two varieties"));
        }
        if let Some(&i) = vars.iter().find(|&&i| i >= model.len()) {
            return Err(Error::invalid(format!("unknown variety {i}")));
        }
        if dims_a.len() != vars.len() - 1 {
            return Err(Error::invalid(format!("need {} step dimensions, got {}", vars.len() - 1, dims_a.len())));
        }
        Ok(VarietySequence { vars, dims_a })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `a_I` for `I = [lo, hi]`: the step dimensions minus the dimensions of
    /// the interior varieties.
    pub fn a_interval(&self, model: &PointModel, lo: usize, hi: usize) -> i64 {
        let steps: i64 = self.dims_a[lo..hi].iter().sum();
        let inner: i64 = (lo + 1..hi).map(|i| model.variety(self.vars[i]).dim).sum();
        steps - inner
    }

    /// The sequence on the positions outside `k`, with the induced steps.
    pub fn without(&self, model: &PointModel, k: &[usize]) -> Result<VarietySequence> {
        check_interior(self.len(), k, "removed positions")?;
        let keep: Vec<usize> = (0..self.len()).filter(|i| !k.contains(i)).collect();
        let dims = keep.windows(2).map(|w| self.a_interval(model, w[0], w[1])).collect();
        VarietySequence::new(model, remove_positions(&self.vars, k), dims)
    }
}

type LayerKey = (Vec<usize>, Vec<usize>, Vec<usize>);
type Cache<K, V> = Mutex<HashMap<K, Arc<V>>>;

/// Builds and caches the point-model complexes for every sequence of
/// varieties of one model.
pub struct Fcal<'m> {
    model: &'m PointModel,
    cech: Cache<(Vec<usize>, Vec<usize>), CechComplex>,
    layers: Cache<LayerKey, FreeComplex>,
    totals: Cache<Vec<usize>, FreeComplex>,
    products: Cache<(Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>), ChainMap>,
    bundles: Cache<Vec<usize>, BundleData>,
}

impl<'m> Fcal<'m> {
    pub fn new(model: &'m PointModel) -> Self {
        Fcal {
            model,
            cech: Mutex::default(),
            layers: Mutex::default(),
            totals: Mutex::default(),
            products: Mutex::default(),
            bundles: Mutex::default(),
        }
    }

    pub fn model(&self) -> &'m PointModel {
        self.model
    }

    fn check_seq(&self, v: &[usize]) -> Result<()> {
        if v.len() < 2 {
            return Err(Error::invalid("a sequence needs at least two varieties"));
        }
        if let Some(&i) = v.iter().find(|&&i| i >= self.model.len()) {
            return Err(Error::invalid(format!("unknown variety {i}")));
        }
        Ok(())
    }

    /// Factors of `X^𝒥`: interior positions outside `𝒥` are compactified.
    pub fn factors(&self, v: &[usize], j: &[usize]) -> Vec<(usize, bool)> {
        let m = v.len();
        v.iter().enumerate().map(|(i, &x)| (x, i > 0 && i + 1 < m && !j.contains(&i))).collect()
    }

    /// Points of `X^𝒥` whose coordinates on `positions` share an image in `S̄`.
    pub fn closed_points(&self, v: &[usize], j: &[usize], positions: &[usize]) -> Vec<Vec<usize>> {
        let f = self.factors(v, j);
        self.model.product_points(&f).into_iter().filter(|p| self.model.same_image(&f, p, positions)).collect()
    }

    /// The covering `𝒰(𝒥) = {U_{J^k}}` of `U_I ⊂ X^𝒥`.
    pub fn covering(&self, v: &[usize], j: &[usize]) -> Result<Covering> {
        self.check_seq(v)?;
        check_interior(v.len(), j, "𝒥")?;
        let f = self.factors(v, j);
        let pts = self.model.product_points(&f);
        let gids: Vec<Gid> = pts.iter().map(|p| point_gid(p)).collect();
        let base = Arc::new(point_cycles(gids.iter().cloned())?);
        let opens = segments(v.len(), j)
            .into_iter()
            .map(|(lo, hi)| {
                let pos: Vec<usize> = (lo..=hi).collect();
                pts.iter()
                    .zip(&gids)
                    .filter(|(p, _)| !self.model.same_image(&f, p, &pos))
                    .map(|(_, g)| g.clone())
                    .collect()
            })
            .collect();
        Covering::of_opens(base, opens)
    }

    /// `ℱ(I, 𝒥) = Z(X^𝒥_I, 𝒰(𝒥))`.
    pub fn fcal(&self, v: &[usize], j: &[usize]) -> Result<Arc<CechComplex>> {
        let key = (v.to_vec(), j.to_vec());
        if let Some(c) = self.cech.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let c = Arc::new(CechComplex::new(self.covering(v, j)?)?);
        self.cech.lock().unwrap().insert(key, c.clone());
        Ok(c)
    }

    /// `ι: Z(A_I) → ℱ(I, 𝒥)`.
    pub fn iota(&self, v: &[usize], j: &[usize]) -> Result<ChainMap> {
        self.fcal(v, j)?.iota()
    }

    /// `r_{𝒥,𝒥′}`: restriction to `X^{𝒥′}` followed by refinement.
    pub fn restrict_map(&self, v: &[usize], j: &[usize], j2: &[usize]) -> Result<ChainMap> {
        check_interior(v.len(), j2, "𝒥′")?;
        if !is_subset(j, j2) {
            return Err(Error::invalid(format!("restriction needs {j:?} ⊆ {j2:?}")));
        }
        let lambda: Vec<usize> =
            segments(v.len(), j2).iter().map(|&(lo, _)| j.iter().filter(|&&e| e <= lo).count()).collect();
        restrict(&*self.fcal(v, j)?, &*self.fcal(v, j2)?, &lambda)
    }

    /// `π_K: ℱ(I, 𝒥) → ℱ(I − K, 𝒥)`: restriction to the covering by the
    /// `U_{J^i − K}`, then pushforward dropping the coordinates in `K`.
    pub fn project(&self, v: &[usize], j: &[usize], k: &[usize]) -> Result<ChainMap> {
        check_interior(v.len(), k, "K")?;
        check_disjoint(k, j, "projection")?;
        let src = self.fcal(v, j)?;
        let w = remove_positions(v, k);
        let tgt = self.fcal(&w, &reindex(j, k))?;
        let f = self.factors(v, j);
        let base = src.cover().base().clone();
        let segs = segments(v.len(), j);
        let opens = segs
            .iter()
            .map(|&(lo, hi)| {
                let pos: Vec<usize> = (lo..=hi).filter(|p| !k.contains(p)).collect();
                base.gens()
                    .iter()
                    .filter(|(_, g)| !self.model.same_image(&f, &coords(g), &pos))
                    .map(|(_, g)| g.clone())
                    .collect()
            })
            .collect();
        let mid = CechComplex::new(Covering::of_opens(base.clone(), opens)?)?;
        let first = restrict(&src, &mid, &(0..segs.len()).collect::<Vec<_>>())?;
        let drop = push_points(base, tgt.cover().base().clone(), |x| Some(point_gid(&remove_positions(&coords(x), k))))?;
        first.then(&push(&mid, &tgt, &drop, true)?)
    }

    /// The product `ℱ(I′, 𝒥′) ⊗ ℱ(I″, 𝒥″) → ℱ(I, 𝒥′ ∪ {k} ∪ 𝒥″)` for the
    /// segmentation of `v` at `k`.
    pub fn product(&self, v: &[usize], k: usize, j1: &[usize], j2: &[usize]) -> Result<Arc<ChainMap>> {
        let key = (v[..=k].to_vec(), j1.to_vec(), v[k..].to_vec(), j2.to_vec());
        if let Some(c) = self.products.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let a = self.fcal(&v[..=k], j1)?;
        let b = self.fcal(&v[k..], j2)?;
        let mut j = j1.to_vec();
        j.push(k);
        j.extend(j2.iter().map(|x| x + k));
        let tgt = self.fcal(v, &j)?;
        let f = cech_product(&a, &b, &tgt, |x, y| {
            let (x, y) = (coords(x), coords(y));
            if x.last() != y.first() {
                return Vec::new();
            }
            let mut z = x.clone();
            z.extend_from_slice(&y[1..]);
            vec![(point_gid(&z), 1)]
        })?;
        let f = Arc::new(f);
        self.products.lock().unwrap().insert(key, f.clone());
        Ok(f)
    }

    // -- layers ℱ(I, 𝒥|Σ) -------------------------------------------------

    fn layer_parts(&self, v: &[usize], j: &[usize], sigma: &[usize]) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
        self.check_seq(v)?;
        check_interior(v.len(), j, "𝒥")?;
        check_interior(v.len(), sigma, "Σ")?;
        check_disjoint(j, sigma, "layer")?;
        Ok(segments(v.len(), sigma).into_iter().map(|(lo, hi)| (v[lo..=hi].to_vec(), local(j, lo, hi))).collect())
    }

    /// `ℱ(I, 𝒥|Σ) = ⊗ ℱ(I_i, 𝒥_i)` over the segmentation by `Σ`; generators
    /// are `T(parts)`.
    pub fn layer(&self, v: &[usize], j: &[usize], sigma: &[usize]) -> Result<Arc<FreeComplex>> {
        let key = (v.to_vec(), j.to_vec(), sigma.to_vec());
        if let Some(c) = self.layers.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let parts = self.layer_parts(v, j, sigma)?;
        let fs: Vec<Arc<CechComplex>> = parts.iter().map(|(w, jj)| self.fcal(w, jj)).collect::<Result<_>>()?;
        let refs: Vec<&FreeComplex> = fs.iter().map(|c| c.complex().as_ref()).collect();
        let c = Arc::new(FreeComplex::tensor_many(&refs));
        self.layers.lock().unwrap().insert(key, c.clone());
        Ok(c)
    }

    fn per_factor(&self, src: Arc<FreeComplex>, tgt: Arc<FreeComplex>, maps: &[ChainMap]) -> Result<ChainMap> {
        ChainMap::from_fn(src, tgt, 0, |g| tensor_terms(g.parts(), |i, x| maps[i].image_of(x)))
    }

    /// `r_{𝒥,𝒥′}` on `ℱ(I, 𝒥|Σ)`, factor by factor.
    pub fn layer_restrict(&self, v: &[usize], j: &[usize], j2: &[usize], sigma: &[usize]) -> Result<ChainMap> {
        let a = self.layer_parts(v, j, sigma)?;
        let b = self.layer_parts(v, j2, sigma)?;
        let maps: Vec<ChainMap> =
            a.iter().zip(&b).map(|((w, x), (_, y))| self.restrict_map(w, x, y)).collect::<Result<_>>()?;
        self.per_factor(self.layer(v, j, sigma)?, self.layer(v, j2, sigma)?, &maps)
    }

    /// `π_K: ℱ(I, 𝒥|Σ) → ℱ(I − K, 𝒥|Σ)`, factor by factor.
    pub fn layer_project(&self, v: &[usize], j: &[usize], sigma: &[usize], k: &[usize]) -> Result<ChainMap> {
        check_disjoint(k, sigma, "projection")?;
        let segs = segments(v.len(), sigma);
        let parts = self.layer_parts(v, j, sigma)?;
        let maps: Vec<ChainMap> = parts
            .iter()
            .zip(&segs)
            .map(|((w, jj), &(lo, hi))| self.project(w, jj, &local(k, lo, hi)))
            .collect::<Result<_>>()?;
        let w = remove_positions(v, k);
        self.per_factor(self.layer(v, j, sigma)?, self.layer(&w, &reindex(j, k), &reindex(sigma, k))?, &maps)
    }

    /// `ρ_k: ℱ(I, 𝒥|Σ) → ℱ(I, 𝒥 ∪ {k}|Σ − {k})`.
    pub fn layer_rho(&self, v: &[usize], j: &[usize], sigma: &[usize], k: usize) -> Result<ChainMap> {
        if !sigma.contains(&k) {
            return Err(Error::invalid(format!("ρ_{k} needs {k} ∈ Σ = {sigma:?}")));
        }
        let segs = segments(v.len(), sigma);
        let parts = self.layer_parts(v, j, sigma)?;
        let t = segs.iter().position(|s| s.1 == k).expect("k ends a segment");
        let (lo, hi) = (segs[t].0, segs[t + 1].1);
        let prod = self.product(&v[lo..=hi], k - lo, &parts[t].1, &parts[t + 1].1)?;
        let sigma2 = minus(sigma, &[k]);
        let tgt = self.layer(v, &union(j, &[k]), &sigma2)?;
        ChainMap::from_fn(self.layer(v, j, sigma)?, tgt, 0, |g| {
            let p = g.parts();
            let mid = prod.image_of(&Gid::t([p[t].clone(), p[t + 1].clone()]));
            mid.into_iter()
                .map(|(z, c)| {
                    let mut q = p[..t].to_vec();
                    q.push(z);
                    q.extend_from_slice(&p[t + 2..]);
                    (Gid::T(q), c)
                })
                .collect()
        })
    }

    /// `ρ_K`, composed in increasing order of `K`.
    pub fn layer_rho_set(&self, v: &[usize], j: &[usize], sigma: &[usize], k: &[usize]) -> Result<ChainMap> {
        self.layer_rho_ordered(v, j, sigma, k)
    }

    /// `ρ_K` composed in the given order.
    pub fn layer_rho_ordered(&self, v: &[usize], j: &[usize], sigma: &[usize], order: &[usize]) -> Result<ChainMap> {
        let mut f = ChainMap::identity(self.layer(v, j, sigma)?);
        let (mut jj, mut ss) = (j.to_vec(), sigma.to_vec());
        for &k in order {
            f = f.then(&self.layer_rho(v, &jj, &ss, k)?)?;
            jj = union(&jj, &[k]);
            ss = minus(&ss, &[k]);
        }
        Ok(f)
    }

    /// The target of `ι_{Σ/T}`: `⊗ ℱ(I_i, 𝒥_i|Σ_i)` over the segmentation by `T`.
    pub fn layer_split(&self, v: &[usize], j: &[usize], sigma: &[usize], t: &[usize]) -> Result<Arc<FreeComplex>> {
        if !is_subset(t, sigma) {
            return Err(Error::invalid(format!("T = {t:?} is not inside Σ = {sigma:?}")));
        }
        let fs: Vec<Arc<FreeComplex>> = segments(v.len(), t)
            .into_iter()
            .map(|(lo, hi)| self.layer(&v[lo..=hi], &local(j, lo, hi), &local(sigma, lo, hi)))
            .collect::<Result<_>>()?;
        let refs: Vec<&FreeComplex> = fs.iter().map(|c| c.as_ref()).collect();
        Ok(Arc::new(FreeComplex::tensor_many(&refs)))
    }

    /// `ι_{Σ/T}`: regrouping of the tensor factors along `T`.
    pub fn layer_iota(&self, v: &[usize], j: &[usize], sigma: &[usize], t: &[usize]) -> Result<ChainMap> {
        let tgt = self.layer_split(v, j, sigma, t)?;
        let sizes: Vec<usize> = segments(v.len(), t).iter().map(|&(lo, hi)| local(sigma, lo, hi).len() + 1).collect();
        ChainMap::from_fn(self.layer(v, j, sigma)?, tgt, 0, |g| {
            let p = g.parts();
            let mut at = 0;
            let groups: Vec<Gid> = sizes
                .iter()
                .map(|&s| {
                    let grp = Gid::T(p[at..at + s].to_vec());
                    at += s;
                    grp
                })
                .collect();
            vec![(Gid::T(groups), 1)]
        })
    }

    /// The zig-zag `ψ_K`: `ρ_K`, then `r_{∅,K}` inverted, then `π_K`, from
    /// `ℱ(I, ∅|Σ)` to `ℱ(I − K, ∅|Σ − K)`.
    pub fn psi(&self, v: &[usize], sigma: &[usize], k: &[usize]) -> Result<Psi> {
        if !is_subset(k, sigma) {
            return Err(Error::invalid(format!("ψ_K needs K = {k:?} ⊆ Σ = {sigma:?}")));
        }
        let rest = minus(sigma, k);
        Ok(Psi {
            rho: self.layer_rho_set(v, &[], sigma, k)?,
            r: self.layer_restrict(v, &[], k, &rest)?,
            pi: self.layer_project(v, &[], &rest, k)?,
        })
    }

    // -- cube totals ℱ(I) ---------------------------------------------------

    /// The cube `𝒥 ↦ ℱ(I, 𝒥)` over the interior with the restriction maps.
    pub fn cube(&self, v: &[usize]) -> Result<Cube> {
        self.check_seq(v)?;
        Cube::new(interior(v.len()), 1, |s| Ok(self.fcal(v, s)?.complex().clone()), |s, k| {
            self.restrict_map(v, s, &union(s, &[k]))
        })
    }

    /// `ℱ(I)`: summand `ℱ(I, 𝒥)` in first degree `|𝒥| + 1`, differential
    /// `r + (-1)^a ∂`. Generators are `cube_gid(𝒥, x)`.
    pub fn total(&self, v: &[usize]) -> Result<Arc<FreeComplex>> {
        if let Some(c) = self.totals.lock().unwrap().get(v) {
            return Ok(c.clone());
        }
        let c = Arc::new(self.cube(v)?.total()?);
        self.totals.lock().unwrap().insert(v.to_vec(), c.clone());
        Ok(c)
    }

    /// `ρ: ℱ(I′) ⊗ ℱ(I″) → ℱ(I)` at the cut `k`,
    /// `u ⊗ w ↦ (-1)^{a q} u∘w` for `u` in first degree `a`, `w` of Čech degree `q`.
    pub fn total_product(&self, v: &[usize], k: usize) -> Result<ChainMap> {
        let (left, right) = (&v[..=k], &v[k..]);
        let src = Arc::new(FreeComplex::tensor(&*self.total(left)?, &*self.total(right)?));
        ChainMap::from_fn(src, self.total(v)?, 0, |g| {
            let p = g.parts();
            let (j1, x) = split_cube_gid(&p[0]);
            let (j2, y) = split_cube_gid(&p[1]);
            let a = j1.len() as i64 + 1;
            let prod = self.product(v, k, &j1, &j2).expect("product of Čech complexes");
            let q = self.fcal(right, &j2).expect("Čech complex").complex().deg_of(y).expect("factor generator");
            let mut j = j1.clone();
            j.push(k);
            j.extend(j2.iter().map(|e| e + k));
            let s = sign(a * q);
            prod.image_of(&Gid::t([x.clone(), y.clone()])).into_iter().map(|(z, c)| (cube_gid(&j, z), s * c)).collect()
        })
    }

    /// `π_K: ℱ(I) → ℱ(I − K)`: `π_K` on summands with `𝒥 ∩ K = ∅`, zero elsewhere.
    pub fn total_project(&self, v: &[usize], k: &[usize]) -> Result<ChainMap> {
        check_interior(v.len(), k, "K")?;
        let w = remove_positions(v, k);
        let mut maps: HashMap<Vec<usize>, ChainMap> = HashMap::new();
        for j in subsets(&minus(&interior(v.len()), k)) {
            let f = self.project(v, &j, k)?;
            maps.insert(j, f);
        }
        ChainMap::from_fn(self.total(v)?, self.total(&w)?, 0, |g| {
            let (j, x) = split_cube_gid(g);
            match maps.get(&j) {
                None => Vec::new(),
                Some(f) => {
                    let j2 = reindex(&j, k);
                    f.image_of(x).into_iter().map(|(y, c)| (cube_gid(&j2, y), c)).collect()
                }
            }
        })
    }

    /// `ℱ(I‖Σ) = ⊗ ℱ(I_i)` with the tensor differential.
    pub fn total_layer(&self, v: &[usize], sigma: &[usize]) -> Result<FreeComplex> {
        check_interior(v.len(), sigma, "Σ")?;
        let fs: Vec<Arc<FreeComplex>> =
            segments(v.len(), sigma).into_iter().map(|(lo, hi)| self.total(&v[lo..=hi])).collect::<Result<_>>()?;
        let refs: Vec<&FreeComplex> = fs.iter().map(|c| c.as_ref()).collect();
        Ok(FreeComplex::tensor_many(&refs))
    }

    /// Checks the partial-compactification identities on `v`: intersection of
    /// closed sets over overlapping sub-intervals, the full closed set as the
    /// fiber product, and monotonicity of the open sets. Returns violations.
    pub fn compactification_laws(&self, v: &[usize]) -> Vec<String> {
        let m = v.len();
        let mut errs = Vec::new();
        for j in subsets(&interior(m)) {
            let f = self.factors(v, &j);
            let pts = self.model.product_points(&f);
            let closed = |lo: usize, hi: usize, p: &[usize]| self.model.same_image(&f, p, &(lo..=hi).collect::<Vec<_>>());
            for p in &pts {
                for lo in 0..m {
                    for hi in lo + 1..m {
                        for lo2 in lo..hi {
                            for hi2 in (hi).max(lo2 + 1)..m {
                                let both = closed(lo, hi, p) && closed(lo2, hi2, p);
                                if both != closed(lo, hi2, p) {
                                    errs.push(format!("𝒥 = {j:?}: closed sets over [{lo},{hi}] and [{lo2},{hi2}] do not intersect to [{lo},{hi2}] at {p:?}"));
                                }
                            }
                        }
                        for lo2 in 0..=lo {
                            for hi2 in hi..m {
                                if !closed(lo, hi, p) && closed(lo2, hi2, p) {
                                    errs.push(format!("𝒥 = {j:?}: open set over [{lo},{hi}] not inside the one over [{lo2},{hi2}] at {p:?}"));
                                }
                            }
                        }
                    }
                }
            }
            let full = self.closed_points(v, &j, &(0..m).collect::<Vec<_>>());
            let fiber = self.closed_points(v, &interior(m), &(0..m).collect::<Vec<_>>());
            if full != fiber {
                errs.push(format!("𝒥 = {j:?}: the closed set over the whole interval is not the fiber product"));
            }
        }
        errs
    }
}

/// `ψ_K` as a zig-zag of chain maps.
pub struct Psi {
    pub rho: ChainMap,
    pub r: ChainMap,
    pub pi: ChainMap,
}

impl Psi {
    pub fn zigzag(&self) -> ZigZag<'_> {
        ZigZag { x: &self.rho, r: &self.r, pi: &self.pi }
    }
}

/// `Tot(C_S)` for a functor on the subsets of `items`; non-commuting input
/// is rejected as an invalid argument.
pub fn lemma_tot(
    items: Vec<usize>,
    complex: impl Fn(&[usize]) -> Result<Arc<FreeComplex>>,
    map: impl Fn(&[usize], usize) -> Result<ChainMap>,
) -> Result<FreeComplex> {
    let cube = Cube::new(items, 0, complex, map).map_err(|e| match e {
        Error::Invariant(m) => Error::InvalidArgument(m),
        other => other,
    })?;
    cube.total()
}

// -- F(I|S) ------------------------------------------------------------------

/// `F(I)` for a sequence: the bar-type complex over the system `I ↦ ℱ(I)`
/// with the signed products, and its quotients and structure maps.
/// Cheap to create: the bar system and the complexes built from it are
/// shared through the `Fcal` cache.
pub struct FBundle<'a, 'm> {
    fc: &'a Fcal<'m>,
    vars: Vec<usize>,
    data: Arc<BundleData>,
}

struct BundleData {
    bar: BarSystem,
    complexes: Cache<(usize, usize, Vec<usize>), FreeComplex>,
    splits: Cache<(Vec<usize>, Vec<usize>), FreeComplex>,
}

impl<'a, 'm> FBundle<'a, 'm> {
    pub fn new(fc: &'a Fcal<'m>, vars: &[usize]) -> Result<Self> {
        fc.check_seq(vars)?;
        if let Some(data) = fc.bundles.lock().unwrap().get(vars) {
            return Ok(FBundle { fc, vars: vars.to_vec(), data: data.clone() });
        }
        let bar = BarSystem::new(
            vars.len(),
            |lo, hi| fc.total(&vars[lo..=hi]),
            |lo, mid, hi| fc.total_product(&vars[lo..=hi], mid - lo),
        )?;
        let data = Arc::new(BundleData { bar, complexes: Mutex::default(), splits: Mutex::default() });
        let data = fc.bundles.lock().unwrap().entry(vars.to_vec()).or_insert(data).clone();
        Ok(FBundle { fc, vars: vars.to_vec(), data })
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn fcal(&self) -> &'a Fcal<'m> {
        self.fc
    }

    pub fn bar(&self) -> &BarSystem {
        &self.data.bar
    }

    fn last(&self) -> usize {
        self.vars.len() - 1
    }

    /// `F([lo, hi]|S)` with positions of the whole sequence.
    pub fn complex_on(&self, lo: usize, hi: usize, s: &[usize]) -> Result<Arc<FreeComplex>> {
        let key = (lo, hi, s.to_vec());
        if let Some(c) = self.data.complexes.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let c = Arc::new(self.data.bar.complex(lo, hi, s)?);
        Ok(self.data.complexes.lock().unwrap().entry(key).or_insert(c).clone())
    }

    /// `F(I|S)` for the whole sequence.
    pub fn complex(&self, s: &[usize]) -> Result<Arc<FreeComplex>> {
        self.complex_on(0, self.last(), s)
    }

    /// `(ℱ(I|Σ), d̄) = ℱ(I|Σ)^shift`.
    pub fn stratum(&self, sigma: &[usize]) -> Result<Arc<FreeComplex>> {
        Ok(Arc::new(self.data.bar.stratum(0, self.last(), sigma)?))
    }

    /// `σ_{S,S′}: F(I|S) → F(I|S′)`.
    pub fn sigma(&self, s: &[usize], s2: &[usize]) -> Result<ChainMap> {
        if !is_subset(s, s2) {
            return Err(Error::invalid(format!("σ needs {s:?} ⊆ {s2:?}")));
        }
        let tgt = self.complex(s2)?;
        let t2 = tgt.clone();
        ChainMap::from_fn(self.complex(s)?, tgt, 0, move |g| if t2.contains(g) { vec![(g.clone(), 1)] } else { vec![] })
    }

    /// The quotient `F(I|S) → ℱ(I|Σ)^shift` onto the stratum for `Σ`.
    pub fn to_stratum(&self, s: &[usize], sigma: &[usize]) -> Result<ChainMap> {
        let tgt = self.stratum(sigma)?;
        let t2 = tgt.clone();
        ChainMap::from_fn(self.complex(s)?, tgt, 0, move |g| if t2.contains(g) { vec![(g.clone(), 1)] } else { vec![] })
    }

    /// `⊗ F(I_i|S_i)` over the segmentation by `T`.
    pub fn split(&self, s: &[usize], t: &[usize]) -> Result<Arc<FreeComplex>> {
        if !is_subset(t, s) {
            return Err(Error::invalid(format!("T = {t:?} is not inside S = {s:?}")));
        }
        let key = (s.to_vec(), t.to_vec());
        if let Some(c) = self.data.splits.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let fs: Vec<Arc<FreeComplex>> = pieces(0, self.last(), t)
            .into_iter()
            .map(|(lo, hi)| self.complex_on(lo, hi, &local(s, lo, hi).iter().map(|x| x + lo).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let refs: Vec<&FreeComplex> = fs.iter().map(|c| c.as_ref()).collect();
        let c = Arc::new(FreeComplex::tensor_many(&refs));
        Ok(self.data.splits.lock().unwrap().entry(key).or_insert(c).clone())
    }

    /// `ι_{S/T}: F(I|S) → ⊗ F(I_i|S_i)`.
    pub fn iota(&self, s: &[usize], t: &[usize]) -> Result<ChainMap> {
        let tgt = self.split(s, t)?;
        let segs = pieces(0, self.last(), t);
        ChainMap::from_fn(self.complex(s)?, tgt, 0, |g| {
            let (sigma, parts) = split_bar_gid(g);
            let mut at = 0;
            let groups: Vec<Gid> = segs
                .iter()
                .map(|&(lo, hi)| {
                    let sg: Vec<usize> = sigma.iter().copied().filter(|&x| x > lo && x < hi).collect();
                    let n = sg.len() + 1;
                    let b = bar_gid(&sg, parts[at..at + n].to_vec());
                    at += n;
                    b
                })
                .collect();
            vec![(Gid::T(groups), 1)]
        })
    }

    /// `F(I‖S) = ⊗ F(I_i)` over the segmentation by `S`.
    pub fn split_full(&self, s: &[usize]) -> Result<Arc<FreeComplex>> {
        check_interior(self.len(), s, "S")?;
        // no cut of S falls strictly inside a piece of its own segmentation
        self.split(s, s)
    }

    /// `τ_{S,S′}: F(I‖S) → F(I‖S′)`, the tensor product of `ι_{S′_i} σ_{∅,S′_i}`
    /// on each factor, with the result flattened to the `S′`-segmentation.
    pub fn tau(&self, s: &[usize], s2: &[usize]) -> Result<ChainMap> {
        if !is_subset(s, s2) {
            return Err(Error::invalid(format!("τ needs {s:?} ⊆ {s2:?}")));
        }
        let tgt = self.split_full(s2)?;
        let segs = pieces(0, self.last(), s);
        ChainMap::from_fn(self.split_full(s)?, tgt, 0, |g| {
            let mut factors: Vec<Gid> = Vec::new();
            for (b, &(lo, hi)) in g.parts().iter().zip(&segs) {
                let (sigma, parts) = split_bar_gid(b);
                let cuts: Vec<usize> = s2.iter().copied().filter(|&x| x > lo && x < hi).collect();
                if !is_subset(&cuts, &sigma) {
                    return Vec::new();
                }
                let mut at = 0;
                for (a, z) in pieces(lo, hi, &cuts) {
                    let sg: Vec<usize> = sigma.iter().copied().filter(|&x| x > a && x < z).collect();
                    let n = sg.len() + 1;
                    factors.push(bar_gid(&sg, parts[at..at + n].to_vec()));
                    at += n;
                }
            }
            vec![(Gid::T(factors), 1)]
        })
    }

    /// `φ_K: F(I|S) → F(I − K|S)`; `other` is the bundle of the sequence
    /// without the positions in `K`.
    pub fn phi(&self, other: &FBundle<'_, '_>, s: &[usize], k: &[usize]) -> Result<ChainMap> {
        check_interior(self.len(), k, "K")?;
        check_disjoint(k, s, "φ")?;
        if other.vars != remove_positions(&self.vars, k) {
            return Err(Error::invalid("φ_K needs the bundle of the sequence without K"));
        }
        let mut proj: HashMap<(usize, usize), ChainMap> = HashMap::new();
        for lo in 0..self.len() {
            for hi in lo + 1..self.len() {
                let kk = local(k, lo, hi);
                proj.insert((lo, hi), self.fc.total_project(&self.vars[lo..=hi], &kk)?);
            }
        }
        ChainMap::from_fn(self.complex(s)?, other.complex(&reindex(s, k))?, 0, |g| {
            let (sigma, parts) = split_bar_gid(g);
            if !intersect(&sigma, k).is_empty() {
                return Vec::new();
            }
            let ps = pieces(0, self.last(), &sigma);
            let sigma2 = reindex(&sigma, k);
            tensor_terms(parts, |i, x| proj[&ps[i]].image_of(x))
                .into_iter()
                .map(|(t, c)| (bar_gid(&sigma2, t.parts().to_vec()), c))
                .collect()
        })
    }

    /// Whether `F(I|S) → ℱ(I|∘I)^shift` is a quasi-isomorphism.
    pub fn top_quotient_is_quasi_iso(&self, s: &[usize]) -> Result<bool> {
        is_quasi_iso(&self.to_stratum(s, &interior(self.len()))?)
    }
}

/// The canonical surjection `F(I) → ℱ(I|∘I)^shift`, read in the Čech layer
/// `ℱ(I, ∅|∘I)`: the two carry the same differential.
fn top_quotient(fb: &FBundle<'_, '_>) -> Result<ChainMap> {
    let fc = fb.fcal();
    let inner = interior(fb.len());
    let tgt = fc.layer(fb.vars(), &[], &inner)?;
    ChainMap::from_fn(fb.complex(&[])?, tgt, 0, |g| {
        let (sigma, parts) = split_bar_gid(g);
        if sigma != inner {
            return Vec::new();
        }
        let mut xs = Vec::with_capacity(parts.len());
        for p in parts {
            let (j, x) = split_cube_gid(p);
            debug_assert!(j.is_empty());
            xs.push(x.clone());
        }
        vec![(Gid::T(xs), 1)]
    })
}

/// Compares `F(I) → F(I − K) → ℱ(I − K|∘)` with `ψ_K` after
/// `F(I) → ℱ(I|∘I)` on homology.
pub fn check_prop_phi_psi(fc: &Fcal<'_>, vars: &[usize], k: &[usize]) -> Result<HomologyVerdict> {
    let (x, psi, y) = phi_psi_square(fc, vars, k)?;
    zigzag_equal_on_homology(&ZigZag { x: &x, r: &psi.r, pi: &psi.pi }, &y)
}

/// The two sides of the square: `(x, ψ, y)` with `x` the surjection followed
/// by `ρ_K` and `y` the surjection after `φ_K`.
pub fn phi_psi_square(fc: &Fcal<'_>, vars: &[usize], k: &[usize]) -> Result<(ChainMap, Psi, ChainMap)> {
    let m = vars.len();
    check_interior(m, k, "K")?;
    let fb = FBundle::new(fc, vars)?;
    let w = remove_positions(vars, k);
    let fb2 = FBundle::new(fc, &w)?;
    let phi = fb.phi(&fb2, &[], k)?;
    let y = phi.then(&top_quotient(&fb2)?)?;
    let p = top_quotient(&fb)?;
    let psi = fc.psi(vars, &interior(m), k)?;
    let x = p.then(&psi.rho)?;
    Ok((x, psi, y))
}

/// The sequence `F(I|R) → ⊕_{|S|=1} F(I|R ∪ S) → … → F(I|R ∪ J) → 0` of
/// alternating sums of the quotient maps, as matrices.
pub fn sigma_sequence(fb: &FBundle<'_, '_>, r: &[usize], j: &[usize]) -> Result<Vec<SparseMat>> {
    check_interior(fb.len(), r, "R")?;
    check_interior(fb.len(), j, "J")?;
    check_disjoint(r, j, "exactness")?;
    if j.is_empty() {
        return Err(Error::invalid("J must be non-empty"));
    }
    let levels: Vec<Vec<Vec<usize>>> =
        (0..=j.len()).map(|t| subsets(j).into_iter().filter(|s| s.len() == t).collect()).collect();
    let mut terms: Vec<Vec<Arc<FreeComplex>>> = Vec::new();
    for lv in &levels {
        terms.push(lv.iter().map(|s| fb.complex(&union(r, s))).collect::<Result<_>>()?);
    }
    let mut maps = Vec::new();
    for t in 0..j.len() {
        let rows: usize = terms[t + 1].iter().map(|c| c.len()).sum();
        let cols: usize = terms[t].iter().map(|c| c.len()).sum();
        let mut entries = Vec::new();
        let mut col_off = 0;
        for (a, s) in levels[t].iter().enumerate() {
            let src = &terms[t][a];
            let mut row_off = 0;
            for (b, s2) in levels[t + 1].iter().enumerate() {
                let tgt = &terms[t + 1][b];
                if is_subset(s, s2) {
                    let new = minus(s2, s)[0];
                    let e = sign(s.iter().filter(|&&x| x < new).count() as i64);
                    for (i, (_, g)) in src.gens().iter().enumerate() {
                        if let Some(r2) = tgt.index_of(g) {
                            entries.push((row_off + r2, col_off + i, e));
                        }
                    }
                }
                row_off += tgt.len();
            }
            col_off += src.len();
        }
        maps.push(SparseMat::from_triplets(rows, cols, entries));
    }
    let last: usize = terms[j.len()].iter().map(|c| c.len()).sum();
    maps.push(SparseMat::zeros(0, last));
    Ok(maps)
}

/// Index of the first term where the σ-sequence fails to be exact, if any.
pub fn check_sigma_exactness(fb: &FBundle<'_, '_>, r: &[usize], j: &[usize]) -> Result<Option<usize>> {
    Ok(first_non_exact(&sigma_sequence(fb, r, j)?))
}

// -- structure-map laws -------------------------------------------------------

fn expect_same(errs: &mut Vec<String>, what: String, a: &ChainMap, b: &ChainMap) {
    if a.same_as(b) {
        return;
    }
    match a.first_difference(b) {
        Some((g, h, x, y)) if g != Gid::N(-1) => errs.push(format!("{what}: {g:?} → {h:?} is {x}, expected {y}")),
        _ => errs.push(format!("{what}: the two sides have different ends")),
    }
}

fn chains(set: &[usize]) -> Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for c in subsets(set) {
        for b in subsets(&c) {
            for a in subsets(&b) {
                out.push((a, b.clone(), c.clone()));
            }
        }
    }
    out
}

/// The laws of `r`, `π` and `ρ` on `ℱ(I, 𝒥)` and its layers, over every
/// admissible choice of subsets. Returns violations.
pub fn check_cech_laws(fc: &Fcal<'_>, v: &[usize]) -> Result<Vec<String>> {
    let m = v.len();
    let inner = interior(m);
    let mut errs = Vec::new();
    for (a, b, c) in chains(&inner) {
        if a == b {
            let id = ChainMap::identity(fc.fcal(v, &a)?.complex().clone());
            expect_same(&mut errs, format!("r_{{{a:?},{a:?}}} = id"), &fc.restrict_map(v, &a, &a)?, &id);
        }
        let two = fc.restrict_map(v, &a, &b)?.then(&fc.restrict_map(v, &b, &c)?)?;
        expect_same(&mut errs, format!("r transitive on {a:?} ⊆ {b:?} ⊆ {c:?}"), &two, &fc.restrict_map(v, &a, &c)?);
    }
    for j in subsets(&inner) {
        let free = minus(&inner, &j);
        let id = ChainMap::identity(fc.fcal(v, &j)?.complex().clone());
        expect_same(&mut errs, format!("π_∅ = id on 𝒥 = {j:?}"), &fc.project(v, &j, &[])?, &id);
        for k in subsets(&free) {
            let whole = fc.project(v, &j, &k)?;
            for k1 in subsets(&k) {
                let w = remove_positions(v, &k1);
                let k2 = reindex(&minus(&k, &k1), &k1);
                let two = fc.project(v, &j, &k1)?.then(&fc.project(&w, &reindex(&j, &k1), &k2)?)?;
                expect_same(&mut errs, format!("π transitive on {k1:?} ⊆ {k:?}, 𝒥 = {j:?}"), &two, &whole);
            }
            let w = remove_positions(v, &k);
            for j2 in subsets(&minus(&inner, &k)).into_iter().filter(|j2| is_subset(&j, j2)) {
                let x = fc.restrict_map(v, &j, &j2)?.then(&fc.project(v, &j2, &k)?)?;
                let y = whole.then(&fc.restrict_map(&w, &reindex(&j, &k), &reindex(&j2, &k))?)?;
                expect_same(&mut errs, format!("π_{k:?} r_{{{j:?},{j2:?}}}"), &x, &y);
            }
        }
    }
    for j in subsets(&inner) {
        for sigma in subsets(&minus(&inner, &j)) {
            let base = fc.layer_rho_ordered(v, &j, &sigma, &sigma)?;
            for order in permutations(&sigma) {
                let f = fc.layer_rho_ordered(v, &j, &sigma, &order)?;
                expect_same(&mut errs, format!("ρ in order {order:?} on 𝒥 = {j:?}"), &f, &base);
            }
            for &k in &sigma {
                let rest = minus(&sigma, &[k]);
                for j2 in subsets(&minus(&inner, &sigma)).into_iter().filter(|j2| is_subset(&j, j2)) {
                    let x = fc.layer_restrict(v, &j, &j2, &sigma)?.then(&fc.layer_rho(v, &j2, &sigma, k)?)?;
                    let y = fc
                        .layer_rho(v, &j, &sigma, k)?
                        .then(&fc.layer_restrict(v, &union(&j, &[k]), &union(&j2, &[k]), &rest)?)?;
                    expect_same(&mut errs, format!("ρ_{k} r_{{{j:?},{j2:?}}} on Σ = {sigma:?}"), &x, &y);
                }
                for kk in subsets(&minus(&minus(&inner, &sigma), &j)).into_iter().filter(|x| !x.is_empty()) {
                    let w = remove_positions(v, &kk);
                    let x = fc.layer_rho(v, &j, &sigma, k)?.then(&fc.layer_project(v, &union(&j, &[k]), &rest, &kk)?)?;
                    let y = fc.layer_project(v, &j, &sigma, &kk)?.then(&fc.layer_rho(
                        &w,
                        &reindex(&j, &kk),
                        &reindex(&sigma, &kk),
                        reindex(&[k], &kk)[0],
                    )?)?;
                    expect_same(&mut errs, format!("ρ_{k} π_{kk:?} on 𝒥 = {j:?}, Σ = {sigma:?}"), &x, &y);
                }
            }
        }
    }
    Ok(errs)
}

fn permutations(set: &[usize]) -> Vec<Vec<usize>> {
    if set.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in set.iter().enumerate() {
        let mut rest = set.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// The laws of `σ`, `τ`, `ι` and `φ` on `F(I|S)`, over every admissible
/// choice of subsets. Returns violations.
pub fn check_bundle_laws(fc: &Fcal<'_>, vars: &[usize]) -> Result<Vec<String>> {
    let fb = FBundle::new(fc, vars)?;
    let inner = interior(vars.len());
    let mut errs = Vec::new();
    for (a, b, c) in chains(&inner) {
        if a == b {
            let id = ChainMap::identity(fb.complex(&a)?);
            expect_same(&mut errs, format!("σ_{{{a:?},{a:?}}} = id"), &fb.sigma(&a, &a)?, &id);
        }
        let two = fb.sigma(&a, &b)?.then(&fb.sigma(&b, &c)?)?;
        expect_same(&mut errs, format!("σ transitive on {a:?} ⊆ {b:?} ⊆ {c:?}"), &two, &fb.sigma(&a, &c)?);
        let two = fb.tau(&a, &b)?.then(&fb.tau(&b, &c)?)?;
        expect_same(&mut errs, format!("τ transitive on {a:?} ⊆ {b:?} ⊆ {c:?}"), &two, &fb.tau(&a, &c)?);
        if b == c {
            let x = fb.sigma(&a, &b)?.then(&fb.iota(&b, &b)?)?;
            let y = fb.iota(&a, &a)?.then(&fb.tau(&a, &b)?)?;
            expect_same(&mut errs, format!("ι σ = τ ι on {a:?} ⊆ {b:?}"), &x, &y);
        }
    }
    for k in subsets(&inner).into_iter().filter(|k| !k.is_empty()) {
        let w = remove_positions(vars, &k);
        let fbk = FBundle::new(fc, &w)?;
        for k1 in subsets(&k).into_iter().filter(|k1| !k1.is_empty() && *k1 != k) {
            let w1 = remove_positions(vars, &k1);
            let fb1 = FBundle::new(fc, &w1)?;
            let k2 = reindex(&minus(&k, &k1), &k1);
            for s in subsets(&minus(&inner, &k)) {
                let two = fb.phi(&fb1, &s, &k1)?.then(&fb1.phi(&fbk, &reindex(&s, &k1), &k2)?)?;
                expect_same(&mut errs, format!("φ transitive on {k1:?} ⊆ {k:?}, S = {s:?}"), &two, &fb.phi(&fbk, &s, &k)?);
            }
        }
        for (s, s2, _) in chains(&minus(&inner, &k)).into_iter().filter(|t| t.1 == t.2) {
            let x = fb.sigma(&s, &s2)?.then(&fb.phi(&fbk, &s2, &k)?)?;
            let y = fb.phi(&fbk, &s, &k)?.then(&fbk.sigma(&reindex(&s, &k), &reindex(&s2, &k))?)?;
            expect_same(&mut errs, format!("φ_{k:?} σ_{{{s:?},{s2:?}}}"), &x, &y);
        }
    }
    Ok(errs)
}

// -- distinguished subcomplexes --------------------------------------------

/// One factor of a generator of `F([lo, hi])`: a point of `X^𝒥` on the
/// piece `[lo, hi]` with its Čech chain. Positions are absolute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub lo: usize,
    pub hi: usize,
    pub j: Vec<usize>,
    pub chain: Vec<usize>,
    pub point: Vec<usize>,
}

/// The pieces of a generator of `F([lo, hi]|S)`.
pub fn leaves(g: &Gid, lo: usize, hi: usize) -> Vec<Leaf> {
    let (sigma, parts) = split_bar_gid(g);
    pieces(lo, hi, &sigma)
        .into_iter()
        .zip(parts)
        .map(|((a, b), p)| {
            let (j, x) = split_cube_gid(p);
            let (chain, pt) = split_cube_gid(x);
            Leaf { lo: a, hi: b, j: j.iter().map(|e| e + a).collect(), chain, point: coords(pt) }
        })
        .collect()
}

/// Proper intersection of a family of leaves. Answers must be stable under
/// the differential for the distinguished sets to be subcomplexes.
pub trait LeafOracle {
    fn proper(&self, leaves: &[Leaf]) -> bool;
}

/// The point model: every family is proper.
pub struct AllProper;

impl LeafOracle for AllProper {
    fn proper(&self, _: &[Leaf]) -> bool {
        true
    }
}

/// A condition of constraint on a family of intervals: the members listed in
/// `p` meet every generator of each fixed element `f_k ∈ F(J_k)` properly.
#[derive(Clone, Debug, Default)]
pub struct FConstraint {
    pub p: Vec<usize>,
    pub fixed: Vec<((usize, usize), Terms)>,
}

fn almost_disjoint(ivs: &[(usize, usize)]) -> bool {
    ivs.iter().enumerate().all(|(a, x)| ivs[a + 1..].iter().all(|y| x.1 <= y.0 || y.1 <= x.0))
}

/// `[⊗ F(I_j|S_j)]_C`: the tensor product over the family cut down to the
/// tuples that are proper among themselves and against each constraint.
/// `family` lists `(lo, hi, S_j)` with absolute positions.
pub fn f_distinguished(
    fb: &FBundle<'_, '_>,
    family: &[(usize, usize, Vec<usize>)],
    constraints: &[FConstraint],
    oracle: &dyn LeafOracle,
) -> Result<FreeComplex> {
    let last = fb.len() - 1;
    let mut ivs = Vec::new();
    for (lo, hi, s) in family {
        if lo >= hi || *hi > last {
            return Err(Error::load(format!("member [{lo}, {hi}] is not an interval of [0, {last}]")));
        }
        if s.iter().any(|x| x <= lo || x >= hi) {
            return Err(Error::load(format!("S = {s:?} is not interior to [{lo}, {hi}]")));
        }
        ivs.push((*lo, *hi));
    }
    let mut fixed: Vec<Vec<Vec<Leaf>>> = Vec::new();
    for (i, c) in constraints.iter().enumerate() {
        if let Some(&q) = c.p.iter().find(|&&q| q >= family.len()) {
            return Err(Error::load(format!("constraint {i}: no member {q}")));
        }
        let mut per = Vec::new();
        for &((lo, hi), ref f) in &c.fixed {
            let cx = fb.complex_on(lo, hi, &[])?;
            ivs.push((lo, hi));
            for (g, _) in f {
                if !cx.contains(g) {
                    return Err(Error::load(format!("constraint {i}: {g:?} is not a generator of F([{lo}, {hi}])")));
                }
                let l = leaves(g, lo, hi);
                if !oracle.proper(&l) {
                    return Err(Error::load(format!("constraint {i}: {g:?} is not proper")));
                }
                per.push(l);
            }
        }
        fixed.push(per);
    }
    if !almost_disjoint(&ivs) {
        return Err(Error::load(format!("{ivs:?} is not almost disjoint")));
    }
    let fs: Vec<Arc<FreeComplex>> = family.iter().map(|(lo, hi, s)| fb.complex_on(*lo, *hi, s)).collect::<Result<_>>()?;
    let refs: Vec<&FreeComplex> = fs.iter().map(|c| c.as_ref()).collect();
    FreeComplex::tensor_many(&refs).sub(|g| {
        let per: Vec<Vec<Leaf>> =
            g.parts().iter().zip(family).map(|(x, (lo, hi, _))| leaves(x, *lo, *hi)).collect();
        if !oracle.proper(&per.concat()) {
            return false;
        }
        constraints.iter().zip(&fixed).all(|(c, fl)| {
            let mine: Vec<Leaf> = c.p.iter().flat_map(|&q| per[q].iter().cloned()).collect();
            fl.iter().all(|l| {
                let mut all = mine.clone();
                all.extend(l.iter().cloned());
                oracle.proper(&all)
            })
        })
    })
}

/// `F(I_1) ⊗̂ ⋯ ⊗̂ F(I_r) = F(I|S)` for the segmentation by `S`, compared as
/// generator sets through `ι_{S/S}`.
pub fn segmentation_identity(fb: &FBundle<'_, '_>, s: &[usize], oracle: &dyn LeafOracle) -> Result<bool> {
    let family: Vec<(usize, usize, Vec<usize>)> =
        pieces(0, fb.len() - 1, s).into_iter().map(|(lo, hi)| (lo, hi, Vec::new())).collect();
    let hat = f_distinguished(fb, &family, &[], oracle)?;
    let iota = fb.iota(s, s)?;
    let mut image = Vec::with_capacity(hat.len());
    for (_, g) in iota.src().gens() {
        match iota.image_of(g).as_slice() {
            [(h, 1)] => image.push(h.clone()),
            _ => return Ok(false),
        }
    }
    image.sort();
    let mut gens: Vec<Gid> = hat.gens().iter().map(|(_, g)| g.clone()).collect();
    gens.sort();
    Ok(image == gens)
}

/// For a constraint with one fixed `f ∈ F([n, m])` against the single member
/// `F([0, n]|S)`, the first generator `u` of the distinguished subcomplex
/// for which some `u ⊗ g`, `g` in the support of `f`, is not a generator of
/// `F([0, m]|S ∪ {n})`.
pub fn external_product_escape(
    fb: &FBundle<'_, '_>,
    n: usize,
    s: &[usize],
    f: &Terms,
    oracle: &dyn LeafOracle,
) -> Result<Option<Gid>> {
    let last = fb.len() - 1;
    let c = FConstraint { p: vec![0], fixed: vec![((n, last), f.clone())] };
    let sub = f_distinguished(fb, &[(0, n, s.to_vec())], &[c], oracle)?;
    let mut s2 = s.to_vec();
    s2.push(n);
    let tgt = fb.complex(&s2)?;
    for (_, u) in sub.gens() {
        let (su, pu) = split_bar_gid(&u.parts()[0]);
        for (g, _) in f {
            let (sg, pg) = split_bar_gid(g);
            let mut sigma = su.clone();
            sigma.push(n);
            sigma.extend(sg);
            let mut parts = pu.to_vec();
            parts.extend_from_slice(pg);
            if !tgt.contains(&bar_gid(&sigma, parts)) {
                return Ok(Some(u.clone()));
            }
        }
    }
    Ok(None)
}

// -- symbols ---------------------------------------------------------------

/// A formal sum of pairs `(variety, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol(pub Vec<(usize, i64)>);

/// One component of `F(K_1, …, K_n)`: a sequence with its step dimensions
/// `dim X_{i+1} − r_{i+1} + r_i`.
pub fn symbol_components(model: &PointModel, symbols: &[Symbol]) -> Result<Vec<VarietySequence>> {
    if symbols.len() < 2 {
        return Err(Error::invalid("need at least two symbols"));
    }
    let mut acc: Vec<Vec<(usize, i64)>> = vec![Vec::new()];
    for s in symbols {
        let mut next = Vec::new();
        for a in &acc {
            for &term in &s.0 {
                let mut b = a.clone();
                b.push(term);
                next.push(b);
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|choice| {
            let vars: Vec<usize> = choice.iter().map(|c| c.0).collect();
            if let Some(&i) = vars.iter().find(|&&i| i >= model.len()) {
                return Err(Error::invalid(format!("unknown variety {i}")));
            }
            let dims = choice.windows(2).map(|w| model.variety(w[1].0).dim - w[1].1 + w[0].1).collect();
            VarietySequence::new(model, vars, dims)
        })
        .collect()
}

/// `F(K_1, …, K_n|S)` as the direct sum of its components, tagged by index.
pub fn symbol_complex(fc: &Fcal<'_>, symbols: &[Symbol], s: &[usize]) -> Result<FreeComplex> {
    let comps = symbol_components(fc.model(), symbols)?;
    let mut parts = Vec::new();
    for seq in &comps {
        parts.push(FBundle::new(fc, &seq.vars)?.complex(s)?);
    }
    let tagged: Vec<(Gid, &FreeComplex)> = parts.iter().enumerate().map(|(i, c)| (Gid::N(i as i64), c.as_ref())).collect();
    FreeComplex::direct_sum(&tagged)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geomodel::{BaseSpec, PointSpec, VarietySpec};
    use crate::homalg::{homology_all, is_acyclic};

    fn pt(label: &str, s: &str) -> PointSpec {
        PointSpec { label: label.into(), to_s: s.into() }
    }

    /// `S = {s, t}`, `S̄ − S = {∞}`; each variety has points over both base
    /// points and one boundary point.
    pub(crate) fn model() -> PointModel {
        let base = BaseSpec { s: vec!["s".into(), "t".into()], sbar: vec!["inf".into()] };
        let vars = vec![
            VarietySpec { name: "X".into(), points: vec![pt("p", "s"), pt("q", "t")], bar_points: vec![pt("e", "inf")], dim: 1 },
            VarietySpec { name: "Y".into(), points: vec![pt("a", "s"), pt("b", "s")], bar_points: vec![pt("c", "inf")], dim: 2 },
        ];
        PointModel::from_spec(&base, &vars).unwrap()
    }

    fn fiber_count(m: &PointModel, v: &[usize]) -> usize {
        let fc = Fcal::new(m);
        fc.closed_points(v, &interior(v.len()), &(0..v.len()).collect::<Vec<_>>()).len()
    }

    #[test]
    fn singleton_covering_for_empty_j() {
        let m = model();
        let fc = Fcal::new(&m);
        let c = fc.covering(&[0, 1, 0], &[]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(fc.covering(&[0, 1, 0], &[1]).unwrap().len(), 2);
        assert!(fc.covering(&[0, 1, 0], &[0]).is_err());
    }

    #[test]
    fn homology_is_the_fiber_product() {
        let m = model();
        let fc = Fcal::new(&m);
        for v in [vec![0, 1], vec![0, 1, 0], vec![0, 0, 1, 0]] {
            let want = fiber_count(&m, &v);
            for j in subsets(&interior(v.len())) {
                let c = fc.fcal(&v, &j).unwrap();
                let h = homology_all(c.complex());
                let total: usize = h.iter().map(|r| r.betti).sum();
                assert_eq!(total, want, "{v:?} {j:?}");
                assert!(h.iter().all(|r| r.torsion.is_empty() && (r.betti == 0 || r.degree == 0)));
                assert!(is_quasi_iso(&c.iota().unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn restriction_is_transitive_and_quasi_iso() {
        let m = model();
        let fc = Fcal::new(&m);
        let v = [0, 1, 0, 1];
        let inner = interior(4);
        for a in subsets(&inner) {
            assert!(fc.restrict_map(&v, &a, &a).unwrap().same_as(&ChainMap::identity(fc.fcal(&v, &a).unwrap().complex().clone())));
            for b in subsets(&inner).into_iter().filter(|b| is_subset(&a, b)) {
                let r = fc.restrict_map(&v, &a, &b).unwrap();
                assert!(is_quasi_iso(&r).unwrap());
                for c in subsets(&inner).into_iter().filter(|c| is_subset(&b, c)) {
                    let two = r.then(&fc.restrict_map(&v, &b, &c).unwrap()).unwrap();
                    assert!(two.same_as(&fc.restrict_map(&v, &a, &c).unwrap()));
                }
            }
        }
    }

    #[test]
    fn projection_is_transitive() {
        let m = model();
        let fc = Fcal::new(&m);
        let v = [0, 1, 0, 1];
        let id = fc.project(&v, &[], &[]).unwrap();
        assert!(id.same_as(&ChainMap::identity(fc.fcal(&v, &[]).unwrap().complex().clone())));
        let both = fc.project(&v, &[], &[1, 2]).unwrap();
        let first = fc.project(&v, &[], &[1]).unwrap();
        let then = fc.project(&[0, 0, 1], &[], &[1]).unwrap();
        assert!(first.then(&then).unwrap().same_as(&both));
        let first = fc.project(&v, &[], &[2]).unwrap();
        let then = fc.project(&[0, 1, 1], &[], &[1]).unwrap();
        assert!(first.then(&then).unwrap().same_as(&both));
        assert!(fc.project(&v, &[1], &[1]).is_err());
    }

    #[test]
    fn totals_are_acyclic_from_three_points() {
        let m = model();
        let fc = Fcal::new(&m);
        let two = fc.total(&[0, 1]).unwrap();
        assert_eq!(homology_all(&two).iter().map(|r| (r.degree, r.betti)).filter(|x| x.1 > 0).collect::<Vec<_>>(), vec![(1, fiber_count(&m, &[0, 1]))]);
        for v in [vec![0, 1, 0], vec![1, 0, 0], vec![0, 1, 0, 1]] {
            assert!(is_acyclic(&fc.total(&v).unwrap()), "{v:?}");
        }
    }

    #[test]
    fn layer_maps_commute() {
        let m = model();
        let fc = Fcal::new(&m);
        let v = [0, 1, 0, 1];
        let a = fc.layer_rho_ordered(&v, &[], &[1, 2], &[1, 2]).unwrap();
        let b = fc.layer_rho_ordered(&v, &[], &[1, 2], &[2, 1]).unwrap();
        assert!(a.same_as(&b));
        // ρ and r
        let up = fc.layer_restrict(&v, &[], &[1], &[2]).unwrap().then(&fc.layer_rho(&v, &[1], &[2], 2).unwrap()).unwrap();
        let across = fc.layer_rho(&v, &[], &[2], 2).unwrap().then(&fc.layer_restrict(&v, &[2], &[1, 2], &[]).unwrap()).unwrap();
        assert!(up.same_as(&across));
        // ρ and π
        let x = fc.layer_rho(&v, &[], &[2], 2).unwrap().then(&fc.layer_project(&v, &[2], &[], &[1]).unwrap()).unwrap();
        let y = fc.layer_project(&v, &[], &[2], &[1]).unwrap().then(&fc.layer_rho(&[0, 0, 1], &[], &[1], 1).unwrap()).unwrap();
        assert!(x.same_as(&y));
    }

    #[test]
    fn iota_regroups() {
        let m = model();
        let fc = Fcal::new(&m);
        let v = [0, 1, 0, 1];
        let f = fc.layer_iota(&v, &[], &[1, 2], &[2]).unwrap();
        assert_eq!(f.matrix().nnz(), f.src().len());
        let id = fc.layer_iota(&v, &[], &[1, 2], &[]).unwrap();
        assert_eq!(id.tgt().len(), id.src().len());
    }

    #[test]
    fn bundle_laws_on_three_points() {
        let m = model();
        let fc = Fcal::new(&m);
        let fb = FBundle::new(&fc, &[0, 1, 0]).unwrap();
        assert_eq!(*fb.complex(&[1]).unwrap(), *fb.stratum(&[1]).unwrap());
        assert!(fb.sigma(&[], &[]).unwrap().same_as(&ChainMap::identity(fb.complex(&[]).unwrap())));
        assert!(is_quasi_iso(&fb.sigma(&[], &[1]).unwrap()).unwrap());
        assert!(fb.top_quotient_is_quasi_iso(&[]).unwrap());
        assert!(fb.tau(&[], &[1]).is_ok());
        assert!(fb.iota(&[1], &[1]).is_ok());
    }

    #[test]
    fn phi_psi_commutes_on_homology() {
        let m = model();
        let fc = Fcal::new(&m);
        assert!(check_prop_phi_psi(&fc, &[0, 1, 0], &[]).unwrap().holds());
        assert!(check_prop_phi_psi(&fc, &[0, 1, 0], &[1]).unwrap().holds());
        for k in [vec![1], vec![2], vec![1, 2]] {
            assert_eq!(check_prop_phi_psi(&fc, &[0, 1, 0, 1], &k).unwrap(), HomologyVerdict::Equal, "{k:?}");
        }
        let (x, psi, y) = phi_psi_square(&fc, &[0, 1, 0], &[1]).unwrap();
        let z = ZigZag { x: &x, r: &psi.r, pi: &psi.pi };
        assert_eq!(zigzag_equal_on_homology(&z, &y.scale(-1)).unwrap(), HomologyVerdict::Different);
        assert_eq!(zigzag_equal_on_homology(&z, &y.scale(0)).unwrap(), HomologyVerdict::Different);
    }

    #[test]
    fn sigma_sequence_is_exact() {
        let m = model();
        let fc = Fcal::new(&m);
        let fb = FBundle::new(&fc, &[0, 1, 0, 1]).unwrap();
        assert_eq!(check_sigma_exactness(&fb, &[], &[1, 2]).unwrap(), None);
        assert_eq!(check_sigma_exactness(&fb, &[1], &[2]).unwrap(), None);
    }

    #[test]
    fn step_dimensions() {
        let m = model();
        let seq = VarietySequence::new(&m, vec![0, 1, 0], vec![3, 4]).unwrap();
        assert_eq!(seq.a_interval(&m, 0, 1), 3);
        assert_eq!(seq.a_interval(&m, 0, 2), 3 + 4 - 2);
        let w = seq.without(&m, &[1]).unwrap();
        assert_eq!(w.dims_a, vec![5]);
        let comps = symbol_components(&m, &[Symbol(vec![(0, 1)]), Symbol(vec![(1, 2), (0, 0)])]).unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].dims_a, vec![2 - 2 + 1]);
        assert_eq!(comps[1].dims_a, vec![1 - 0 + 1]);
    }

    /// Members meeting a fixed leaf at a shared position must sit at another
    /// point there.
    struct AvoidAtSeams;

    impl LeafOracle for AvoidAtSeams {
        fn proper(&self, leaves: &[Leaf]) -> bool {
            leaves.iter().enumerate().all(|(a, x)| {
                leaves[a + 1..].iter().all(|y| {
                    let shared = |p: usize| x.lo <= p && p <= x.hi && y.lo <= p && p <= y.hi;
                    (x.lo..=x.hi)
                        .filter(|&p| shared(p) && (x.hi == y.lo || y.hi == x.lo))
                        .all(|p| x.point[p - x.lo] != y.point[p - y.lo])
                })
            })
        }
    }

    #[test]
    fn distinguished_without_constraints_is_the_tensor() {
        let m = model();
        let fc = Fcal::new(&m);
        let fb = FBundle::new(&fc, &[0, 1, 0, 1]).unwrap();
        let fam = vec![(0, 1, vec![]), (1, 3, vec![2])];
        let full = f_distinguished(&fb, &fam, &[], &AllProper).unwrap();
        let a = fb.complex_on(0, 1, &[]).unwrap();
        let b = fb.complex_on(1, 3, &[2]).unwrap();
        assert_eq!(full, FreeComplex::tensor(&a, &b));
        assert!(f_distinguished(&fb, &[(0, 2, vec![]), (1, 3, vec![])], &[], &AllProper).is_err());
        assert!(f_distinguished(&fb, &[(0, 2, vec![2])], &[], &AllProper).is_err());
    }

    #[test]
    fn segmentation_gives_the_quotient() {
        let m = model();
        let fc = Fcal::new(&m);
        let fb = FBundle::new(&fc, &[0, 1, 0, 1]).unwrap();
        for s in subsets(&interior(4)) {
            assert!(segmentation_identity(&fb, &s, &AllProper).unwrap(), "{s:?}");
        }
    }

    #[test]
    fn external_factor_lands_in_the_bigger_complex() {
        let m = model();
        let fc = Fcal::new(&m);
        let fb = FBundle::new(&fc, &[0, 1, 0, 1]).unwrap();
        let f: Terms = fb.complex_on(2, 3, &[]).unwrap().gens().iter().take(1).map(|(_, g)| (g.clone(), 1)).collect();
        for oracle in [&AllProper as &dyn LeafOracle, &AvoidAtSeams] {
            for s in [vec![], vec![1]] {
                assert_eq!(external_product_escape(&fb, 2, &s, &f, oracle).unwrap(), None);
            }
        }
        let c = FConstraint { p: vec![0], fixed: vec![((2, 3), f.clone())] };
        let cut = f_distinguished(&fb, &[(0, 2, vec![])], &[c], &AvoidAtSeams).unwrap();
        let all = f_distinguished(&fb, &[(0, 2, vec![])], &[], &AvoidAtSeams).unwrap();
        assert!(cut.len() < all.len() && !cut.is_empty());
        let bad = FConstraint { p: vec![3], fixed: vec![] };
        assert!(f_distinguished(&fb, &[(0, 2, vec![])], &[bad], &AllProper).is_err());
    }

    #[test]
    fn compactification_laws_hold() {
        let m = model();
        let fc = Fcal::new(&m);
        assert!(fc.compactification_laws(&[0, 1, 0]).is_empty());
    }

    #[test]
    fn structure_laws_hold() {
        let m = model();
        let fc = Fcal::new(&m);
        for v in [vec![0, 1], vec![0, 1, 0], vec![0, 1, 0, 1]] {
            assert_eq!(check_cech_laws(&fc, &v).unwrap(), Vec::<String>::new(), "{v:?}");
            assert_eq!(check_bundle_laws(&fc, &v).unwrap(), Vec::<String>::new(), "{v:?}");
        }
    }
}
