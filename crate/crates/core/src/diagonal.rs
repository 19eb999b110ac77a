//! Diagonal cycles on constant sequences and the diagonal extension maps
//! `F(I) → F(I′)` along order-preserving surjections `λ: I′ → I`.
//!
//! Positions follow `funcx`: a sequence is a slice of variety indices on
//! `[0, n)`. A surjection is stored as the image of each source position, so
//! the copies of a collapsed position are consecutive source positions.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::cech::{cech_gid, split_cech_gid};
use crate::error::{Error, Result};
use crate::funcx::{check_interior, coords, interior, local, point_gid, reindex, remove_positions, FBundle, Fcal};
use crate::geomodel::PointModel;
use crate::homalg::bar::{bar_gid, pieces, split_bar_gid};
use crate::homalg::cube::{cube_gid, split_cube_gid};
use crate::homalg::matrix::mul_i64;
use crate::homalg::{collect_terms, ChainMap, FreeComplex, Gid, Terms};
use crate::ordsets::{intersect, minus, subsets};

/// An order-preserving surjection `[0, m) → [0, n)` with `m, n ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surjection {
    map: Vec<usize>,
}

impl Surjection {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        if map.len() < 2 || map[0] != 0 {
            return Err(Error::invalid(format!("{map:?} does not start at 0 on at least two points")));
        }
        if map.windows(2).any(|w| w[1] != w[0] && w[1] != w[0] + 1) {
            return Err(Error::invalid(format!("{map:?} is not an order-preserving surjection")));
        }
        if map[map.len() - 1] == 0 {
            return Err(Error::invalid("the target needs at least two points"));
        }
        Ok(Surjection { map })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Surjection::new((0..n).collect())
    }

    /// Position `k` of `[0, n)` repeated `m` times.
    pub fn elementary(n: usize, k: usize, m: usize) -> Result<Self> {
        if k >= n || m == 0 {
            return Err(Error::invalid(format!("cannot repeat {k} of [0, {n}) {m} times")));
        }
        Surjection::new((0..n).flat_map(|i| std::iter::repeat_n(i, if i == k { m } else { 1 })).collect())
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn source_len(&self) -> usize {
        self.map.len()
    }

    pub fn target_len(&self) -> usize {
        self.map[self.map.len() - 1] + 1
    }

    pub fn at(&self, p: usize) -> usize {
        self.map[p]
    }

    pub fn fiber(&self, i: usize) -> Vec<usize> {
        (0..self.map.len()).filter(|&p| self.map[p] == i).collect()
    }

    pub fn is_bijective(&self) -> bool {
        self.source_len() == self.target_len()
    }

    /// At most one fiber with more than one point.
    pub fn is_elementary(&self) -> bool {
        self.source_len() - self.target_len() == self.collapsed().map_or(0, |(_, m)| m - 1)
    }

    /// The first position with a fiber of size `> 1`, with that size.
    fn collapsed(&self) -> Option<(usize, usize)> {
        (0..self.target_len()).map(|i| (i, self.fiber(i).len())).find(|&(_, m)| m > 1)
    }

    /// `λ μ` for `μ` onto the source of `λ`.
    pub fn after(&self, inner: &Surjection) -> Result<Surjection> {
        if inner.target_len() != self.source_len() {
            return Err(Error::invalid("composition of surjections with mismatched ends"));
        }
        Surjection::new(inner.map.iter().map(|&p| self.map[p]).collect())
    }

    /// `λ^* X`.
    pub fn pull(&self, vars: &[usize]) -> Result<Vec<usize>> {
        if vars.len() != self.target_len() {
            return Err(Error::invalid(format!("sequence of length {} on a target of {}", vars.len(), self.target_len())));
        }
        Ok(self.map.iter().map(|&i| vars[i]).collect())
    }

    /// Elementary factors `λ = λ_1 λ_2 ⋯ λ_r`, `λ_1` onto `[0, n)`; the
    /// extension map is `λ_r^* ⋯ λ_1^*`.
    pub fn steps(&self) -> Vec<Surjection> {
        let n = self.target_len();
        let mut out = Vec::new();
        let mut len = n;
        for k in (0..n).rev() {
            let m = self.fiber(k).len();
            if m > 1 {
                out.push(Surjection::elementary(len, k, m).expect("valid elementary step"));
                len += m - 1;
            }
        }
        out
    }

    /// The induced surjection on `I′ − {ℓ}`: onto `I − {λ(ℓ)}` when `ℓ` is
    /// alone in its fiber, onto `I` otherwise.
    pub fn without(&self, ell: usize) -> Result<Surjection> {
        let i = self.map[ell];
        let alone = self.fiber(i).len() == 1;
        Surjection::new(
            self.map
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != ell)
                .map(|(_, &x)| if alone && x > i { x - 1 } else { x })
                .collect(),
        )
    }

    /// The restriction to the source segment `[a, b]`, onto `[λ(a), λ(b)]`.
    pub fn restrict(&self, a: usize, b: usize) -> Result<Surjection> {
        Surjection::new(self.map[a..=b].iter().map(|&x| x - self.map[a]).collect())
    }
}

fn constant(vars: &[usize]) -> Result<usize> {
    match vars.first() {
        Some(&x) if vars.len() >= 2 && vars.iter().all(|&y| y == x) => Ok(x),
        _ => Err(Error::invalid(format!("diagonal needs a constant sequence of length ≥ 2, got {vars:?}"))),
    }
}

fn cartesian(lists: &[Terms]) -> Vec<(Vec<Gid>, i64)> {
    let mut acc: Vec<(Vec<Gid>, i64)> = vec![(Vec::new(), 1)];
    for list in lists {
        let mut next = Vec::with_capacity(acc.len() * list.len());
        for (t, k) in &acc {
            for (g, v) in list {
                let mut u = t.clone();
                u.push(g.clone());
                next.push((u, mul_i64(*k, *v)));
            }
        }
        acc = next;
    }
    acc
}

fn boundary(c: &FreeComplex, t: &Terms) -> Result<Terms> {
    let mut out = Vec::new();
    for (g, v) in t {
        if !c.contains(g) {
            return Err(Error::invariant(format!("{g:?} is not a generator")));
        }
        out.extend(c.d_of(g).into_iter().map(|(h, w)| (h, mul_i64(*v, w))));
    }
    Ok(collect_terms(out))
}

fn apply(f: &ChainMap, t: &Terms) -> Result<Terms> {
    let mut out = Vec::new();
    for (g, v) in t {
        if !f.src().contains(g) {
            return Err(Error::invariant(format!("{g:?} is not in the source")));
        }
        out.extend(f.image_of(g).into_iter().map(|(h, w)| (h, mul_i64(*v, w))));
    }
    Ok(collect_terms(out))
}

fn mismatch(what: &str, lhs: &Terms, rhs: &Terms) -> Option<String> {
    let diff = collect_terms(lhs.iter().cloned().chain(rhs.iter().map(|(g, v)| (g.clone(), -v))));
    diff.first().map(|(g, v)| format!("{what}: differs at {g:?} by {v}"))
}

fn shift_bar(g: &Gid, by: isize) -> Gid {
    let (sigma, parts) = split_bar_gid(g);
    let moved: Vec<usize> = sigma.iter().map(|&x| (x as isize + by) as usize).collect();
    bar_gid(&moved, parts.to_vec())
}

// -- diagonal cycles ---------------------------------------------------------

/// `Δ` on `len` copies of variety `x`: the diagonal points, in the `Z(X^∅)`
/// part of `ℱ(I, ∅)`.
pub fn diagonal_cycle(model: &PointModel, x: usize, len: usize) -> Terms {
    (0..model.variety(x).open).map(|p| (cech_gid(&[], point_gid(&vec![p; len])), 1)).collect()
}

/// `Δ(I|Σ) = Δ(I_1) ⊗ ⋯ ⊗ Δ(I_c)` in `ℱ(I, ∅|Σ)`.
pub fn delta_layer(fc: &Fcal<'_>, vars: &[usize], sigma: &[usize]) -> Result<Terms> {
    let x = constant(vars)?;
    check_interior(vars.len(), sigma, "Σ")?;
    let lists: Vec<Terms> =
        pieces(0, vars.len() - 1, sigma).iter().map(|&(lo, hi)| diagonal_cycle(fc.model(), x, hi - lo + 1)).collect();
    Ok(collect_terms(cartesian(&lists).into_iter().map(|(p, c)| (Gid::T(p), c))))
}

/// `𝚫([lo, hi]) = (Δ([lo, hi]|Σ))_Σ` in `F([lo, hi])`, with the positions of
/// the whole sequence.
pub fn delta_on(fb: &FBundle<'_, '_>, lo: usize, hi: usize) -> Result<Terms> {
    let x = constant(&fb.vars()[lo..=hi])?;
    let model = fb.fcal().model();
    let inner: Vec<usize> = (lo + 1..hi).collect();
    let mut out = Vec::new();
    for sigma in subsets(&inner) {
        let lists: Vec<Terms> = pieces(lo, hi, &sigma)
            .iter()
            .map(|&(a, b)| diagonal_cycle(model, x, b - a + 1).into_iter().map(|(g, c)| (cube_gid(&[], g), c)).collect())
            .collect();
        out.extend(cartesian(&lists).into_iter().map(|(p, c)| (bar_gid(&sigma, p), c)));
    }
    Ok(collect_terms(out))
}

/// `𝚫(I) ∈ F(I)^0`.
pub fn delta_element(fb: &FBundle<'_, '_>) -> Result<Terms> {
    delta_on(fb, 0, fb.len() - 1)
}

/// `ρ_k Δ(I|Σ) = r_k Δ(I|Σ − {k})`, `π_K Δ(I|Σ) = Δ(I − K|Σ)` and closedness
/// of every `Δ(I|Σ)`, over all `Σ`, `k`, `K`. Returns the failures.
pub fn check_delta_layers(fc: &Fcal<'_>, vars: &[usize]) -> Result<Vec<String>> {
    constant(vars)?;
    let inner = interior(vars.len());
    let mut bad = Vec::new();
    for sigma in subsets(&inner) {
        let d = delta_layer(fc, vars, &sigma)?;
        if let Some((g, _)) = boundary(&*fc.layer(vars, &[], &sigma)?, &d)?.first() {
            bad.push(format!("Δ(I|{sigma:?}) is not closed: {g:?}"));
        }
        for &k in &sigma {
            let rest = minus(&sigma, &[k]);
            let lhs = apply(&fc.layer_rho(vars, &[], &sigma, k)?, &d)?;
            let rhs = apply(&fc.layer_restrict(vars, &[], &[k], &rest)?, &delta_layer(fc, vars, &rest)?)?;
            bad.extend(mismatch(&format!("ρ_{k} Δ(I|{sigma:?}) = r_{k} Δ(I|{rest:?})"), &lhs, &rhs));
        }
        for kk in subsets(&minus(&inner, &sigma)).into_iter().filter(|kk| !kk.is_empty()) {
            let w = remove_positions(vars, &kk);
            let lhs = apply(&fc.layer_project(vars, &[], &sigma, &kk)?, &d)?;
            let rhs = delta_layer(fc, &w, &reindex(&sigma, &kk))?;
            bad.extend(mismatch(&format!("π_{kk:?} Δ(I|{sigma:?})"), &lhs, &rhs));
        }
    }
    Ok(bad)
}

/// `𝚫(I)` is a `d_F`-cocycle of degree 0, `τ_S 𝚫(I) = ⊗ 𝚫(I_j)` and
/// `φ_K 𝚫(I) = 𝚫(I − K)`. Returns the failures.
pub fn check_delta_props(fc: &Fcal<'_>, vars: &[usize], s: &[usize], k: &[usize]) -> Result<Vec<String>> {
    constant(vars)?;
    let m = vars.len();
    check_interior(m, s, "S")?;
    check_interior(m, k, "K")?;
    let fb = FBundle::new(fc, vars)?;
    let f = fb.complex(&[])?;
    let delta = delta_element(&fb)?;
    let mut bad = Vec::new();
    if let Some((g, _)) = delta.iter().find(|(g, _)| f.deg_of(g) != Some(0)) {
        bad.push(format!("𝚫(I) has {g:?} outside degree 0"));
    }
    if let Some((g, v)) = boundary(&f, &delta)?.first() {
        bad.push(format!("d_F 𝚫(I) ≠ 0 at {g:?} ({v})"));
    }
    let wrapped: Terms = delta.iter().map(|(g, v)| (Gid::T(vec![g.clone()]), *v)).collect();
    let lhs = apply(&fb.tau(&[], s)?, &wrapped)?;
    let lists: Vec<Terms> = pieces(0, m - 1, s).iter().map(|&(lo, hi)| delta_on(&fb, lo, hi)).collect::<Result<_>>()?;
    let rhs = collect_terms(cartesian(&lists).into_iter().map(|(p, c)| (Gid::T(p), c)));
    bad.extend(mismatch(&format!("τ_{s:?} 𝚫(I) = ⊗ 𝚫(I_j)"), &lhs, &rhs));
    let fb2 = FBundle::new(fc, &remove_positions(vars, k))?;
    let lhs = apply(&fb.phi(&fb2, &[], k)?, &delta)?;
    bad.extend(mismatch(&format!("φ_{k:?} 𝚫(I) = 𝚫(I − K)"), &lhs, &delta_element(&fb2)?));
    Ok(bad)
}

// -- δ_* and Δ(Σ, Σ′) ---------------------------------------------------------

/// Whether `(𝒥′, Σ′)` matches `(𝒥, Σ)` under an elementary `λ`: `λ` is a
/// bijection `𝒥′ → 𝒥` and `Σ′ − {k_j} → Σ − {k}`, and for an interior
/// collapsed `k`, `Σ′` meets the copies exactly when `k ∈ Σ`.
pub fn admissible(lam: &Surjection, j: &[usize], sigma: &[usize], j2: &[usize], sigma2: &[usize]) -> bool {
    if !intersect(j, sigma).is_empty() || !intersect(j2, sigma2).is_empty() {
        return false;
    }
    let image = |set: &[usize]| -> Option<Vec<usize>> {
        let v: Vec<usize> = set.iter().map(|&p| lam.at(p)).collect();
        if v.windows(2).any(|w| w[0] == w[1]) {
            None
        } else {
            Some(v)
        }
    };
    if image(j2).as_deref() != Some(j) {
        return false;
    }
    let Some((k, _)) = lam.collapsed() else {
        return image(sigma2).as_deref() == Some(sigma);
    };
    let copies = lam.fiber(k);
    let rest: Vec<usize> = sigma.iter().copied().filter(|&x| x != k).collect();
    if image(&minus(sigma2, &copies)).as_deref() != Some(&rest[..]) {
        return false;
    }
    let hits = !intersect(sigma2, &copies).is_empty();
    if k > 0 && k + 1 < lam.target_len() {
        hits == sigma.contains(&k)
    } else {
        !sigma.contains(&k)
    }
}

/// Images of a tuple of Čech generators on the `Σ`-segments: `δ_*` on the
/// `Σ′`-segments mapping onto a `Σ`-segment, `Δ` on those collapsed to a
/// point.
fn push_parts(model: &PointModel, lam: &Surjection, pulled: &[usize], sigma: &[usize], sigma2: &[usize], parts: &[Gid]) -> Vec<(Vec<Gid>, i64)> {
    let src = pieces(0, lam.target_len() - 1, sigma);
    let lists: Vec<Terms> = pieces(0, lam.source_len() - 1, sigma2)
        .into_iter()
        .map(|(a, b)| {
            let (la, lb) = (lam.at(a), lam.at(b));
            if la == lb {
                return diagonal_cycle(model, pulled[a], b - a + 1);
            }
            let i = src.iter().position(|&s| s == (la, lb)).expect("segments correspond under λ");
            let (chain, x) = split_cech_gid(&parts[i]);
            let c = coords(x);
            let y: Vec<usize> = (a..=b).map(|p| c[lam.at(p) - la]).collect();
            vec![(cech_gid(&chain, point_gid(&y)), 1)]
        })
        .collect();
    cartesian(&lists)
}

/// `δ_*` or `Δ(Σ, Σ′)`: `ℱ(I, 𝒥|Σ) → ℱ(I′, 𝒥′|Σ′)` for an elementary `λ`.
pub fn delta_push(
    fc: &Fcal<'_>,
    vars: &[usize],
    lam: &Surjection,
    (j, sigma): (&[usize], &[usize]),
    (j2, sigma2): (&[usize], &[usize]),
) -> Result<ChainMap> {
    if !lam.is_elementary() {
        return Err(Error::invalid(format!("{:?} collapses more than one fiber", lam.map())));
    }
    let pulled = lam.pull(vars)?;
    check_interior(lam.target_len(), j, "𝒥")?;
    check_interior(lam.target_len(), sigma, "Σ")?;
    check_interior(lam.source_len(), j2, "𝒥′")?;
    check_interior(lam.source_len(), sigma2, "Σ′")?;
    if !admissible(lam, j, sigma, j2, sigma2) {
        return Err(Error::invalid(format!("({j2:?}, {sigma2:?}) does not match ({j:?}, {sigma:?}) under λ")));
    }
    let model = fc.model();
    ChainMap::from_fn(fc.layer(vars, j, sigma)?, fc.layer(&pulled, j2, sigma2)?, 0, |g| {
        collect_terms(push_parts(model, lam, &pulled, sigma, sigma2, g.parts()).into_iter().map(|(p, c)| (Gid::T(p), c)))
    })
}

/// `λ^*: F(I) → F(I′)` for an elementary `λ`: the sum of the blocks `δ_*`,
/// `Δ(Σ, Σ′)` over matching `(𝒥, Σ)`, `(𝒥′, Σ′)`, zero elsewhere.
fn diag_step(src: &FBundle<'_, '_>, tgt: &FBundle<'_, '_>, lam: &Surjection) -> Result<ChainMap> {
    diag_step_with(src, tgt, lam, |_| true)
}

fn diag_step_with(
    src: &FBundle<'_, '_>,
    tgt: &FBundle<'_, '_>,
    lam: &Surjection,
    keep: impl Fn(&[usize]) -> bool,
) -> Result<ChainMap> {
    let (n, m) = (lam.target_len(), lam.source_len());
    if tgt.vars() != lam.pull(src.vars())? {
        return Err(Error::invalid("target bundle is not on λ^*X"));
    }
    let model = src.fcal().model();
    let inner = interior(m);
    type LayerIndex = (Vec<usize>, Vec<usize>);
    type Blocks = Vec<LayerIndex>;
    let cache: RefCell<HashMap<LayerIndex, Blocks>> = RefCell::default();
    let blocks = |j: &[usize], sigma: &[usize]| -> Blocks {
        cache
            .borrow_mut()
            .entry((j.to_vec(), sigma.to_vec()))
            .or_insert_with(|| {
                let mut out = Vec::new();
                for s2 in subsets(&inner) {
                    for j2 in subsets(&minus(&inner, &s2)) {
                        if keep(&s2) && admissible(lam, j, sigma, &j2, &s2) {
                            out.push((j2, s2.clone()));
                        }
                    }
                }
                out
            })
            .clone()
    };
    ChainMap::from_fn_unchecked(src.complex(&[])?, tgt.complex(&[])?, 0, |g| {
        let (sigma, parts) = split_bar_gid(g);
        let mut j = Vec::new();
        let mut cech = Vec::with_capacity(parts.len());
        for (&(lo, _), p) in pieces(0, n - 1, &sigma).iter().zip(parts) {
            let (jt, x) = split_cube_gid(p);
            j.extend(jt.iter().map(|e| e + lo));
            cech.push(x.clone());
        }
        let mut out = Vec::new();
        for (j2, s2) in blocks(&j, &sigma) {
            let segs = pieces(0, m - 1, &s2);
            for (ps, c) in push_parts(model, lam, tgt.vars(), &sigma, &s2, &cech) {
                let wrapped = ps.into_iter().zip(&segs).map(|(x, &(a, b))| cube_gid(&local(&j2, a, b), x)).collect();
                out.push((bar_gid(&s2, wrapped), c));
            }
        }
        collect_terms(out)
    })
}

/// `λ^* = diag(I, I′): F(I) → F(I′)`, composed from the elementary steps of
/// `λ`. Not validated; `ChainMap::validate` checks it against `d_F`.
pub fn diag(fc: &Fcal<'_>, vars: &[usize], lam: &Surjection) -> Result<ChainMap> {
    lam.pull(vars)?;
    let mut fb = FBundle::new(fc, vars)?;
    let mut acc = ChainMap::identity(fb.complex(&[])?);
    for step in lam.steps() {
        let next = FBundle::new(fc, &step.pull(fb.vars())?)?;
        acc = acc.then(&diag_step(&fb, &next, &step)?)?;
        fb = next;
    }
    Ok(acc)
}

/// Compatibility of `λ^*` with `φ_ℓ` and `τ_ℓ` for `ℓ ∈ ∘I′`. Returns the
/// failures.
pub fn check_diag_compat(fc: &Fcal<'_>, vars: &[usize], lam: &Surjection, ell: usize) -> Result<Vec<String>> {
    let (n, m) = (lam.target_len(), lam.source_len());
    check_interior(m, &[ell], "ℓ")?;
    let pulled = lam.pull(vars)?;
    let fb = FBundle::new(fc, vars)?;
    let fb2 = FBundle::new(fc, &pulled)?;
    let top = diag(fc, vars, lam)?;
    let mut bad = Vec::new();

    let i = lam.at(ell);
    let shrunk = lam.without(ell)?;
    let fb2l = FBundle::new(fc, &remove_positions(&pulled, &[ell]))?;
    let lhs = top.then(&fb2.phi(&fb2l, &[], &[ell])?)?;
    let rhs = if lam.fiber(i).len() == 1 {
        let w = remove_positions(vars, &[i]);
        let fbl = FBundle::new(fc, &w)?;
        fb.phi(&fbl, &[], &[i])?.then(&diag(fc, &w, &shrunk)?)?
    } else {
        diag(fc, vars, &shrunk)?
    };
    if let Some(d) = lhs.first_difference(&rhs) {
        bad.push(format!("φ_{ell} λ^* vs the induced map: {d:?}"));
    }

    let tau2 = fb2.tau(&[], &[ell])?;
    let tgt = tau2.tgt().clone();
    let lhs = ChainMap::from_fn_unchecked(fb.complex(&[])?, tgt.clone(), 0, |g| {
        let mut out = Vec::new();
        for (h, c) in top.image_of(g) {
            out.extend(tau2.image_of(&Gid::T(vec![h])).into_iter().map(|(x, v)| (x, mul_i64(c, v))));
        }
        collect_terms(out)
    })?;
    let rhs = if i > 0 && i + 1 < n {
        let tau = fb.tau(&[], &[i])?;
        let left = diag(fc, &vars[..=i], &lam.restrict(0, ell)?)?;
        let right = diag(fc, &vars[i..], &lam.restrict(ell, m - 1)?)?;
        ChainMap::from_fn_unchecked(fb.complex(&[])?, tgt, 0, |g| {
            let mut out = Vec::new();
            for (t, c) in tau.image_of(&Gid::T(vec![g.clone()])) {
                let p = t.parts();
                for (a, u) in left.image_of(&p[0]) {
                    for (b, v) in right.image_of(&shift_bar(&p[1], -(i as isize))) {
                        out.push((Gid::T(vec![a.clone(), shift_bar(&b, ell as isize)]), mul_i64(c, mul_i64(u, v))));
                    }
                }
            }
            collect_terms(out)
        })?
    } else if i == 0 {
        let rest = diag(fc, vars, &lam.restrict(ell, m - 1)?)?;
        let delta = delta_on(&fb2, 0, ell)?;
        ChainMap::from_fn_unchecked(fb.complex(&[])?, tgt, 0, |g| {
            let mut out = Vec::new();
            for (b, v) in rest.image_of(g) {
                for (a, u) in &delta {
                    out.push((Gid::T(vec![a.clone(), shift_bar(&b, ell as isize)]), mul_i64(*u, v)));
                }
            }
            collect_terms(out)
        })?
    } else {
        let rest = diag(fc, vars, &lam.restrict(0, ell)?)?;
        let delta = delta_on(&fb2, ell, m - 1)?;
        ChainMap::from_fn_unchecked(fb.complex(&[])?, tgt, 0, |g| {
            let mut out = Vec::new();
            for (a, u) in rest.image_of(g) {
                for (b, v) in &delta {
                    out.push((Gid::T(vec![a.clone(), b.clone()]), mul_i64(u, *v)));
                }
            }
            collect_terms(out)
        })?
    };
    if let Some(d) = lhs.first_difference(&rhs) {
        bad.push(format!("τ_{ell} λ^* vs the split map: {d:?}"));
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcx::tests::model;

    const X: usize = 0;
    const Y: usize = 1;

    fn assert_clean(bad: Vec<String>) {
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn surjection_factoring() {
        let lam = Surjection::new(vec![0, 0, 1, 2, 2, 2]).unwrap();
        assert_eq!((lam.source_len(), lam.target_len()), (6, 3));
        assert!(!lam.is_elementary());
        let steps = lam.steps();
        assert_eq!(steps.len(), 2);
        let mut acc = steps[0].clone();
        for s in &steps[1..] {
            acc = acc.after(s).unwrap();
        }
        assert_eq!(acc, lam);
        assert!(Surjection::new(vec![0, 2]).is_err());
        assert!(Surjection::new(vec![0, 1, 0]).is_err());
        assert_eq!(lam.without(2).unwrap().map(), &[0, 0, 1, 1, 1]);
        assert_eq!(lam.without(3).unwrap().map(), &[0, 0, 1, 2, 2]);
    }

    #[test]
    fn two_point_diagonal() {
        let m = model();
        let fc = Fcal::new(&m);
        let fb = FBundle::new(&fc, &[X, X]).unwrap();
        let d = delta_element(&fb).unwrap();
        let p = |a: usize| bar_gid(&[], vec![cube_gid(&[], cech_gid(&[], point_gid(&[a, a])))]);
        assert_eq!(d, collect_terms(vec![(p(0), 1), (p(1), 1)]));
        assert!(check_delta_props(&fc, &[X, X, Y], &[], &[]).is_err());
    }

    #[test]
    fn delta_cocycle_and_props() {
        let m = model();
        let fc = Fcal::new(&m);
        for n in 3..=4 {
            let v = vec![X; n];
            assert_clean(check_delta_layers(&fc, &v).unwrap());
            let inner = interior(n);
            for s in subsets(&inner) {
                assert_clean(check_delta_props(&fc, &v, &s, &[]).unwrap());
            }
            for k in subsets(&inner) {
                assert_clean(check_delta_props(&fc, &v, &[], &k).unwrap());
            }
        }
    }

    #[test]
    fn bijective_push_is_identity() {
        let m = model();
        let fc = Fcal::new(&m);
        let lam = Surjection::identity(3).unwrap();
        let f = delta_push(&fc, &[X, Y, X], &lam, (&[1], &[]), (&[1], &[])).unwrap();
        assert!(f.same_as(&ChainMap::identity(fc.layer(&[X, Y, X], &[1], &[]).unwrap())));
        let g = diag(&fc, &[X, Y, X], &lam).unwrap();
        assert!(g.same_as(&ChainMap::identity(FBundle::new(&fc, &[X, Y, X]).unwrap().complex(&[]).unwrap())));
    }

    #[test]
    fn push_squares() {
        let m = model();
        let fc = Fcal::new(&m);
        let v = [X, Y, X];
        let lam = Surjection::elementary(3, 1, 3).unwrap();
        let w = lam.pull(&v).unwrap();
        let push = |a: (&[usize], &[usize]), b: (&[usize], &[usize])| delta_push(&fc, &v, &lam, a, b).unwrap();
        let empty: &[usize] = &[];
        // r_{k_j} δ_* = (δ_j)_* r_k
        let base = push((empty, empty), (empty, empty));
        for kj in 1..=3 {
            let lhs = base.then(&fc.layer_restrict(&w, &[], &[kj], &[]).unwrap()).unwrap();
            let rhs = fc.layer_restrict(&v, &[], &[1], &[]).unwrap().then(&push((&[1], empty), (&[kj], empty))).unwrap();
            assert!(lhs.same_as(&rhs), "r_{kj}");
        }
        // r_{k_j′} (δ_j)_* = r_{k_j} (δ_j′)_*
        for a in 1..=3 {
            for b in a + 1..=3 {
                let lhs = push((&[1], empty), (&[a], empty)).then(&fc.layer_restrict(&w, &[a], &[a, b], &[]).unwrap()).unwrap();
                let rhs = push((&[1], empty), (&[b], empty)).then(&fc.layer_restrict(&w, &[b], &[a, b], &[]).unwrap()).unwrap();
                assert!(lhs.same_as(&rhs), "anti-square {a} {b}");
            }
        }
        // ρ_{k_j} Δ(Σ, Σ′) = (δ_j)_* ρ_k
        for kj in 1..=3 {
            let lhs = push((empty, &[1]), (empty, &[kj])).then(&fc.layer_rho(&w, &[], &[kj], kj).unwrap()).unwrap();
            let rhs = fc.layer_rho(&v, &[], &[1], 1).unwrap().then(&push((&[1], empty), (&[kj], empty))).unwrap();
            assert!(lhs.same_as(&rhs), "ρ_{kj}");
        }
        // ρ_{k′} Δ(Σ, Σ′) = r_{k′} Δ(Σ, Σ′ − {k′})
        for s2 in [vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]] {
            for &kp in &s2 {
                let rest = minus(&s2, &[kp]);
                let lhs = push((empty, &[1]), (empty, &s2)).then(&fc.layer_rho(&w, &[], &s2, kp).unwrap()).unwrap();
                let rhs = push((empty, &[1]), (empty, &rest)).then(&fc.layer_restrict(&w, &[], &[kp], &rest).unwrap()).unwrap();
                assert!(lhs.same_as(&rhs), "{s2:?} {kp}");
            }
        }
    }

    #[test]
    fn endpoint_push_inserts_diagonals() {
        let m = model();
        let fc = Fcal::new(&m);
        let lam = Surjection::elementary(2, 0, 2).unwrap();
        let f = delta_push(&fc, &[X, Y], &lam, (&[], &[]), (&[], &[1])).unwrap();
        let u = Gid::T(vec![cech_gid(&[], point_gid(&[0, 1]))]);
        let want = collect_terms((0..2).map(|x| {
            (Gid::T(vec![cech_gid(&[], point_gid(&[x, x])), cech_gid(&[], point_gid(&[0, 1]))]), 1)
        }));
        assert_eq!(f.image_of(&u), want);
        assert!(delta_push(&fc, &[X, Y], &lam, (&[], &[]), (&[1], &[])).is_err());
    }

    #[test]
    fn diag_is_a_chain_map() {
        let m = model();
        let fc = Fcal::new(&m);
        for (v, map) in [(vec![X, Y], vec![0, 1, 1]), (vec![X, Y], vec![0, 0, 1]), (vec![Y, X, Y], vec![0, 1, 1, 2])] {
            let lam = Surjection::new(map).unwrap();
            diag(&fc, &v, &lam).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn dropping_diagonal_blocks_breaks_the_chain_map() {
        let m = model();
        let fc = Fcal::new(&m);
        let lam = Surjection::new(vec![0, 1, 1, 2]).unwrap();
        let src = FBundle::new(&fc, &[X, Y, X]).unwrap();
        let tgt = FBundle::new(&fc, &lam.pull(&[X, Y, X]).unwrap()).unwrap();
        let full = diag_step(&src, &tgt, &lam).unwrap();
        assert!(full.matrix().nnz() > 0);
        full.validate().unwrap();
        let partial = diag_step_with(&src, &tgt, &lam, |s2| !(s2.contains(&1) && s2.contains(&2))).unwrap();
        assert!(partial.validate().is_err());
    }

    #[test]
    fn diag_is_functorial() {
        let m = model();
        let fc = Fcal::new(&m);
        let v = [X, Y];
        let lam = Surjection::new(vec![0, 1, 1]).unwrap();
        let inner = Surjection::new(vec![0, 1, 1, 2]).unwrap();
        let whole = lam.after(&inner).unwrap();
        let two = diag(&fc, &v, &lam).unwrap().then(&diag(&fc, &lam.pull(&v).unwrap(), &inner).unwrap()).unwrap();
        let one = diag(&fc, &v, &whole).unwrap();
        assert!(one.same_as(&two), "{:?}", one.first_difference(&two));
    }

    #[test]
    fn diag_compatibilities() {
        let m = model();
        let fc = Fcal::new(&m);
        let lam = Surjection::new(vec![0, 1, 1, 2]).unwrap();
        for ell in 1..=2 {
            assert_clean(check_diag_compat(&fc, &[X, Y, X], &lam, ell).unwrap());
        }
        let lam = Surjection::new(vec![0, 0, 1]).unwrap();
        assert_clean(check_diag_compat(&fc, &[X, Y], &lam, 1).unwrap());
        let lam = Surjection::new(vec![0, 1, 2, 2]).unwrap();
        assert_clean(check_diag_compat(&fc, &[X, Y, X], &lam, 1).unwrap());
        assert_clean(check_diag_compat(&fc, &[X, Y, X], &lam, 2).unwrap());
    }
}
