//! Bar complex of a system of complexes on the sub-intervals of `[0, n)`
//! with associative products.
//!
//! Positions are `0..n`; a sub-interval is `(lo, hi)` with `lo < hi`, and its
//! interior is `lo+1..hi`. A subset `Σ` of the interior cuts it into pieces
//! `I_1, …, I_c`; the summand for `Σ` is `A(I_1) ⊗ … ⊗ A(I_c)` with
//! generators `(Σ, (x_1, …, x_c))`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::complex::{ChainMap, FreeComplex, Gid, Terms};
use super::matrix::mul_i64;
use crate::error::{Error, Result};
use crate::ordsets::{is_subset, subsets};

/// Where the sign exponent of the product term starts. With `FromSecond`
/// the product of `α_{i-1}` and `α_i` carries `(-1)^{Σ_{j≥i} ε_j}`; with
/// `FromFirst` the sum also includes `ε_{i-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoReading {
    FromSecond,
    FromFirst,
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn bar_gid(sigma: &[usize], parts: Vec<Gid>) -> Gid {
    Gid::t([Gid::T(sigma.iter().map(|&k| Gid::N(k as i64)).collect()), Gid::T(parts)])
}

/// `(Σ, parts)` of a bar generator.
pub fn split_bar_gid(g: &Gid) -> (Vec<usize>, &[Gid]) {
    let p = g.parts();
    (p[0].parts().iter().map(|x| x.num() as usize).collect(), p[1].parts())
}

/// Cut points `lo, Σ…, hi` as consecutive pieces.
pub fn pieces(lo: usize, hi: usize, sigma: &[usize]) -> Vec<(usize, usize)> {
    let mut cuts = vec![lo];
    cuts.extend_from_slice(sigma);
    cuts.push(hi);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

pub struct BarSystem {
    n: usize,
    parts: BTreeMap<(usize, usize), Arc<FreeComplex>>,
    products: HashMap<(usize, usize, usize), ChainMap>,
}

impl BarSystem {
    /// `a(lo, hi)` is `A([lo, hi])`; `rho(lo, mid, hi)` must be a chain map
    /// `A([lo, mid]) ⊗ A([mid, hi]) → A([lo, hi])`. Products are checked to be
    /// chain maps between the right complexes and to be associative.
    pub fn new(
        n: usize,
        a: impl Fn(usize, usize) -> Result<Arc<FreeComplex>>,
        rho: impl Fn(usize, usize, usize) -> Result<ChainMap>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("bar system needs at least two points"));
        }
        let mut parts = BTreeMap::new();
        for lo in 0..n {
            for hi in lo + 1..n {
                parts.insert((lo, hi), a(lo, hi)?);
            }
        }
        let mut products = HashMap::new();
        for lo in 0..n {
            for hi in lo + 2..n {
                for mid in lo + 1..hi {
                    let f = rho(lo, mid, hi)?;
                    let want = FreeComplex::tensor(&parts[&(lo, mid)], &parts[&(mid, hi)]);
                    if **f.src() != want || **f.tgt() != *parts[&(lo, hi)] || f.shift() != 0 {
                        return Err(Error::invalid(format!("product on ({lo},{mid},{hi}) has the wrong ends")));
                    }
                    f.validate()?;
                    products.insert((lo, mid, hi), f);
                }
            }
        }
        let s = BarSystem { n, parts, products };
        s.check_associative()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn piece(&self, lo: usize, hi: usize) -> &Arc<FreeComplex> {
        &self.parts[&(lo, hi)]
    }

    pub fn product(&self, lo: usize, mid: usize, hi: usize) -> &ChainMap {
        &self.products[&(lo, mid, hi)]
    }

    pub fn multiply(&self, lo: usize, mid: usize, hi: usize, x: &Gid, y: &Gid) -> Terms {
        self.products[&(lo, mid, hi)].image_of(&Gid::t([x.clone(), y.clone()]))
    }

    fn check_associative(&self) -> Result<()> {
        for lo in 0..self.n {
            for hi in lo + 3..self.n {
                for m1 in lo + 1..hi {
                    for m2 in m1 + 1..hi {
                        self.check_triple(lo, m1, m2, hi)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn check_triple(&self, lo: usize, m1: usize, m2: usize, hi: usize) -> Result<()> {
        let (a, b, c) = (self.piece(lo, m1), self.piece(m1, m2), self.piece(m2, hi));
        for (_, x) in a.gens() {
            for (_, y) in b.gens() {
                let xy = self.multiply(lo, m1, m2, x, y);
                for (_, z) in c.gens() {
                    let yz = self.multiply(m1, m2, hi, y, z);
                    let mut left = Vec::new();
                    for (w, u) in &xy {
                        left.extend(self.multiply(lo, m2, hi, w, z).into_iter().map(|(h, v)| (h, mul_i64(*u, v))));
                    }
                    let mut right = Vec::new();
                    for (w, u) in &yz {
                        right.extend(self.multiply(lo, m1, hi, x, w).into_iter().map(|(h, v)| (h, mul_i64(*u, v))));
                    }
                    let tgt = self.piece(lo, hi);
                    if tgt.vector(&left)? != tgt.vector(&right)? {
                        return Err(Error::invariant(format!(
                            "products not associative on ({x:?}, {y:?}, {z:?}) over ({lo},{m1},{m2},{hi})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `A(I|Σ)` with `d̄` only: generators `(Σ, parts)` in degree `Σ(deg − 1)`.
    pub fn stratum(&self, lo: usize, hi: usize, sigma: &[usize]) -> Result<FreeComplex> {
        let ps = pieces(lo, hi, sigma);
        let factors: Vec<&FreeComplex> = ps.iter().map(|p| self.piece(p.0, p.1).as_ref()).collect();
        let gens = self.stratum_gens(&ps, sigma);
        FreeComplex::from_fn(gens, |g| self.dbar(&factors, g))
    }

    fn stratum_gens(&self, ps: &[(usize, usize)], sigma: &[usize]) -> Vec<(i64, Gid)> {
        let mut acc: Vec<(i64, Vec<Gid>)> = vec![(0, Vec::new())];
        for p in ps {
            let f = self.piece(p.0, p.1);
            let mut next = Vec::with_capacity(acc.len() * f.len());
            for (d, g) in &acc {
                for (q, h) in f.gens() {
                    let mut t = g.clone();
                    t.push(h.clone());
                    next.push((d + q - 1, t));
                }
            }
            acc = next;
        }
        acc.into_iter().map(|(d, t)| (d, bar_gid(sigma, t))).collect()
    }

    fn eps(&self, ps: &[(usize, usize)], parts: &[Gid]) -> Vec<i64> {
        ps.iter().zip(parts).map(|(p, g)| self.piece(p.0, p.1).deg_of(g).expect("bar factor") - 1).collect()
    }

    fn dbar(&self, factors: &[&FreeComplex], g: &Gid) -> Terms {
        let (sigma, parts) = split_bar_gid(g);
        let eps: Vec<i64> = factors.iter().zip(parts).map(|(f, x)| f.deg_of(x).unwrap() - 1).collect();
        let mut out = Vec::new();
        for i in 0..parts.len() {
            let s = -sign(eps[i + 1..].iter().sum());
            for (h, v) in factors[i].d_of(&parts[i]) {
                let mut t = parts.to_vec();
                t[i] = h;
                out.push((bar_gid(&sigma, t), mul_i64(s, v)));
            }
        }
        out
    }

    /// `ρ̄_k` for every `k ∈ Σ` outside `keep`.
    fn rhobar(&self, lo: usize, hi: usize, g: &Gid, keep: &[usize], reading: RhoReading) -> Terms {
        let (sigma, parts) = split_bar_gid(g);
        let ps = pieces(lo, hi, &sigma);
        let eps = self.eps(&ps, parts);
        let mut out = Vec::new();
        for i in 1..parts.len() {
            let k = ps[i - 1].1;
            if keep.contains(&k) {
                continue;
            }
            let from = match reading {
                RhoReading::FromSecond => i,
                RhoReading::FromFirst => i - 1,
            };
            let s = sign(eps[from..].iter().sum());
            let sigma2: Vec<usize> = sigma.iter().copied().filter(|&x| x != k).collect();
            for (h, v) in self.multiply(ps[i - 1].0, k, ps[i].1, &parts[i - 1], &parts[i]) {
                let mut t: Vec<Gid> = parts[..i - 1].to_vec();
                t.push(h);
                t.extend_from_slice(&parts[i + 1..]);
                out.push((bar_gid(&sigma2, t), mul_i64(s, v)));
            }
        }
        out
    }

    /// `B(I|S) = ⊕_{Σ ⊇ S} A(I|Σ)` with `d̄ + ρ̄`, not checked for `dd = 0`.
    pub fn complex_with(&self, lo: usize, hi: usize, s: &[usize], reading: RhoReading) -> Result<FreeComplex> {
        let interior: Vec<usize> = (lo + 1..hi).collect();
        if !is_subset(s, &interior) {
            return Err(Error::invalid(format!("{s:?} is not interior to [{lo},{hi}]")));
        }
        let mut gens = Vec::new();
        for sigma in subsets(&interior) {
            if is_subset(s, &sigma) {
                gens.extend(self.stratum_gens(&pieces(lo, hi, &sigma), &sigma));
            }
        }
        FreeComplex::from_fn_unchecked(gens, |g| {
            let (sigma, _) = split_bar_gid(g);
            let ps = pieces(lo, hi, &sigma);
            let factors: Vec<&FreeComplex> = ps.iter().map(|p| self.piece(p.0, p.1).as_ref()).collect();
            let mut out = self.dbar(&factors, g);
            out.extend(self.rhobar(lo, hi, g, s, reading));
            out
        })
    }

    /// `B(I|S)`, validated.
    pub fn complex(&self, lo: usize, hi: usize, s: &[usize]) -> Result<FreeComplex> {
        let c = self.complex_with(lo, hi, s, RhoReading::FromSecond)?;
        c.validate()?;
        Ok(c)
    }

    /// `B(I) = B(I|∅)`.
    pub fn bar_complex(&self, lo: usize, hi: usize) -> Result<FreeComplex> {
        self.complex(lo, hi, &[])
    }

    /// The quotient `τ_{S,S'}: B(I|S) → B(I|S')` for `S ⊆ S'`.
    pub fn tau(&self, lo: usize, hi: usize, s: &[usize], s2: &[usize]) -> Result<ChainMap> {
        if !is_subset(s, s2) {
            return Err(Error::invalid("tau needs S ⊆ S'"));
        }
        let src = Arc::new(self.complex(lo, hi, s)?);
        let tgt = Arc::new(self.complex(lo, hi, s2)?);
        let t2 = tgt.clone();
        ChainMap::from_fn(src, tgt, 0, move |g| if t2.contains(g) { vec![(g.clone(), 1)] } else { vec![] })
    }

    /// Generators of `B(I)` lying in `F^k`, i.e. with `|Σ| ≥ k`.
    pub fn in_filtration(g: &Gid, k: usize) -> bool {
        split_bar_gid(g).0.len() >= k
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::homalg::homology::is_acyclic;

    /// Cochains of an ordered simplicial complex, with the opposite cup
    /// product `a ∘ b = b ∪ a`, which obeys `d(a∘b) = (-1)^{|b|} da∘b + a∘db`.
    pub(crate) fn cochains(simplices: &[Vec<i64>]) -> Arc<FreeComplex> {
        let gens = simplices.iter().map(|s| (s.len() as i64 - 1, Gid::ns(s))).collect();
        let all: Vec<Vec<i64>> = simplices.to_vec();
        Arc::new(
            FreeComplex::from_fn(gens, |g| {
                let s: Vec<i64> = g.parts().iter().map(|x| x.num()).collect();
                let mut out = Vec::new();
                for t in &all {
                    if t.len() == s.len() + 1 && s.iter().all(|v| t.contains(v)) {
                        let pos = t.iter().position(|v| !s.contains(v)).unwrap();
                        out.push((Gid::ns(t), if pos % 2 == 0 { 1 } else { -1 }));
                    }
                }
                out
            })
            .unwrap(),
        )
    }

    pub(crate) fn opposite_cup(a: &Arc<FreeComplex>) -> ChainMap {
        let src = Arc::new(FreeComplex::tensor(a, a));
        let all: Vec<Gid> = a.gens().iter().map(|g| g.1.clone()).collect();
        ChainMap::from_fn(src, a.clone(), 0, |g| {
            let x: Vec<i64> = g.parts()[0].parts().iter().map(|v| v.num()).collect();
            let y: Vec<i64> = g.parts()[1].parts().iter().map(|v| v.num()).collect();
            // y ∪ x is nonzero when y ends where x starts
            if y.last() != x.first() {
                return vec![];
            }
            let mut u = y.clone();
            u.extend_from_slice(&x[1..]);
            let id = Gid::ns(&u);
            if all.contains(&id) {
                vec![(id, 1)]
            } else {
                vec![]
            }
        })
        .unwrap()
    }

    pub(crate) fn constant_system(n: usize, a: Arc<FreeComplex>) -> BarSystem {
        let rho = opposite_cup(&a);
        BarSystem::new(n, |_, _| Ok(a.clone()), |_, _, _| Ok(rho.clone())).unwrap()
    }

    fn triangle() -> Vec<Vec<i64>> {
        vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
    }

    #[test]
    fn zero_pieces_give_zero_complex() {
        let z = Arc::new(FreeComplex::zero());
        let s = BarSystem::new(
            4,
            |_, _| Ok(z.clone()),
            |_, _, _| Ok(ChainMap::zero(Arc::new(FreeComplex::tensor(&z, &z)), z.clone(), 0)),
        )
        .unwrap();
        assert!(s.bar_complex(0, 3).unwrap().is_empty());
    }

    #[test]
    fn integers_in_degree_zero() {
        let s = constant_system(4, cochains(&[vec![0]]));
        let b3 = s.bar_complex(0, 2).unwrap();
        assert_eq!(b3.gens().iter().map(|g| g.0).collect::<Vec<_>>(), vec![-2, -1]);
        assert!(is_acyclic(&b3));
        let b4 = s.bar_complex(0, 3).unwrap();
        assert_eq!(b4.rank_in(-3), 1);
        assert_eq!(b4.rank_in(-2), 2);
        assert_eq!(b4.rank_in(-1), 1);
    }

    #[test]
    fn first_reading_is_a_differential() {
        let s = constant_system(4, cochains(&triangle()));
        for lo in 0..4 {
            for hi in lo + 1..4 {
                s.complex_with(lo, hi, &[], RhoReading::FromSecond).unwrap().validate().unwrap();
            }
        }
    }

    #[test]
    fn other_reading_fails() {
        let s = constant_system(3, cochains(&triangle()));
        assert!(s.complex_with(0, 2, &[], RhoReading::FromFirst).unwrap().validate().is_err());
    }

    #[test]
    fn tau_is_transitive() {
        let s = constant_system(5, cochains(&[vec![0], vec![1], vec![0, 1]]));
        let a = s.tau(0, 4, &[], &[2]).unwrap();
        let b = s.tau(0, 4, &[2], &[1, 2]).unwrap();
        let c = s.tau(0, 4, &[], &[1, 2]).unwrap();
        assert!(a.then(&b).unwrap().same_as(&c));
    }

    #[test]
    fn rejects_nonassociative_products() {
        let a = Arc::new(FreeComplex::discrete(vec![(0, Gid::N(0))]).unwrap());
        let src = Arc::new(FreeComplex::tensor(&a, &a));
        let f = |k: i64| ChainMap::from_fn(src.clone(), a.clone(), 0, move |_| vec![(Gid::N(0), k)]).unwrap();
        let r = BarSystem::new(4, |_, _| Ok(a.clone()), |lo, _, _| Ok(if lo == 0 { f(2) } else { f(1) }));
        assert!(r.is_err());
    }
}
