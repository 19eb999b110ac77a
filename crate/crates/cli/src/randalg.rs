//! Seeded random complexes: single complexes, quasi-isomorphic cube
//! functors and quoted double complexes.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use relcx_core::homalg::{ChainMap, Convention, FreeComplex, Gid, MultiComplex, Terms};
use relcx_core::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// A complex on generators `0..degs.len()` with `d[i][j]` the coefficient of
/// generator `i` in `d(j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dense {
    pub degs: Vec<i64>,
    pub d: Vec<Vec<i64>>,
}

fn zeros(r: usize, c: usize) -> Vec<Vec<i64>> {
    vec![vec![0; c]; r]
}

fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (r, k, c) = (a.len(), b.len(), b.first().map_or(0, |x| x.len()));
    let mut out = zeros(r, c);
    for i in 0..r {
        for t in 0..k {
            if a[i][t] != 0 {
                for j in 0..c {
                    out[i][j] += a[i][t] * b[t][j];
                }
            }
        }
    }
    out
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

/// A random unimodular matrix preserving the grading, with its inverse.
fn change_of_basis(rng: &mut ChaCha8Rng, grade: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = grade.len();
    let (mut g, mut gi) = (identity(n), identity(n));
    for _ in 0..2 * n {
        let (i, j) = (rng.gen_range(0..n.max(1)), rng.gen_range(0..n.max(1)));
        if n == 0 || i == j || grade[i] != grade[j] {
            continue;
        }
        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
        // g ← (1 + c E_ij) g, gi ← gi (1 − c E_ij)
        for t in 0..n {
            g[i][t] += c * g[j][t];
        }
        for row in gi.iter_mut() {
            row[j] -= c * row[i];
        }
    }
    (g, gi)
}

/// Sum of pieces `ℤ` and `ℤ -c-> ℤ` with total rank at most `max_rank`,
/// degrees in `[-1, 2]`; `acyclic` keeps only `c = ±1` pieces.
pub fn random_pieces(rng: &mut ChaCha8Rng, max_rank: usize, acyclic: bool) -> Dense {
    let target = if acyclic || max_rank == 0 { rng.gen_range(0..=max_rank) } else { rng.gen_range(1..=max_rank) };
    let mut degs = Vec::new();
    let mut arrows = Vec::new();
    while degs.len() < target {
        let p = rng.gen_range(-1..=1);
        let room = target - degs.len();
        if acyclic && room < 2 {
            break;
        }
        if acyclic || (room >= 2 && rng.gen_bool(0.6)) {
            let c = if acyclic { [1, -1][rng.gen_range(0..2)] } else { [1, -1, 2, 3][rng.gen_range(0..4)] };
            arrows.push((degs.len(), degs.len() + 1, c));
            degs.push(p);
            degs.push(p + 1);
        } else {
            degs.push(rng.gen_range(-1..=2));
        }
    }
    let mut d = zeros(degs.len(), degs.len());
    for (s, t, c) in arrows {
        d[t][s] = c;
    }
    Dense { degs, d }
}

fn conjugate(rng: &mut ChaCha8Rng, c: &Dense) -> (Dense, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let grade: Vec<Vec<i64>> = c.degs.iter().map(|&p| vec![p]).collect();
    let (g, gi) = change_of_basis(rng, &grade);
    let d = mul(&mul(&g, &c.d), &gi);
    (Dense { degs: c.degs.clone(), d }, g, gi)
}

pub fn random_complex(rng: &mut ChaCha8Rng, max_rank: usize, acyclic: bool) -> Dense {
    let c = random_pieces(rng, max_rank, acyclic);
    conjugate(rng, &c).0
}

fn column(d: &[Vec<i64>], j: usize) -> Terms {
    d.iter().enumerate().filter(|(_, r)| r[j] != 0).map(|(i, r)| (Gid::N(i as i64), r[j])).collect()
}

impl Dense {
    pub fn len(&self) -> usize {
        self.degs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degs.is_empty()
    }

    pub fn to_complex(&self) -> Result<FreeComplex> {
        let gens = self.degs.iter().enumerate().map(|(i, &p)| (p, Gid::N(i as i64))).collect();
        FreeComplex::from_fn(gens, |g| column(&self.d, g.num() as usize))
    }
}

/// A functor from the subsets of `[0, t)` to complexes whose every map is a
/// quasi-isomorphism: `C_S = B ⊕ Z_S` with `Z_S` acyclic, maps
/// `(b, z) ↦ (b, h_{S′} b)` for null-homotopic `h_{S′}: B → Z_{S′}`, each
/// vertex in a random basis.
pub struct RandomCube {
    pub t: usize,
    pub vertices: Vec<Dense>,
    /// `maps[S][k]` for `k ∉ S`: matrix from `C_S` to `C_{S ∪ {k}}`.
    maps: Vec<Vec<Option<Vec<Vec<i64>>>>>,
}

fn mask(s: &[usize]) -> usize {
    s.iter().map(|&k| 1 << k).sum()
}

impl RandomCube {
    /// `t ≤ 3`, each vertex of total rank at most `max_rank`. With
    /// `broken`, the maps forget `B` and the functor is no longer a
    /// quasi-isomorphism wherever `B` has homology.
    pub fn generate(rng: &mut ChaCha8Rng, t: usize, max_rank: usize, broken: bool) -> RandomCube {
        let b = random_complex(rng, max_rank / 2, false);
        let nb = b.len();
        let mut raw = Vec::new();
        for _ in 0..(1usize << t) {
            let z = random_pieces(rng, max_rank - nb, true);
            let n = nb + z.len();
            let mut degs = b.degs.clone();
            degs.extend(&z.degs);
            let mut d = zeros(n, n);
            for i in 0..nb {
                d[i][..nb].copy_from_slice(&b.d[i]);
            }
            for i in 0..z.len() {
                d[nb + i][nb..].copy_from_slice(&z.d[i]);
            }
            // null-homotopic h = d_Z k + k d_B, k: B → Z of degree −1
            let mut k = zeros(z.len(), nb);
            for (i, row) in k.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    if z.degs[i] == b.degs[j] - 1 && rng.gen_bool(0.3) {
                        *x = [1, -1][rng.gen_range(0..2)];
                    }
                }
            }
            let h = {
                let a = mul(&z.d, &k);
                let c = mul(&k, &b.d);
                a.iter().zip(&c).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect::<Vec<Vec<i64>>>()
            };
            raw.push((Dense { degs, d }, h));
        }
        let mut vertices = Vec::new();
        let mut bases = Vec::new();
        for (c, _) in &raw {
            let (v, g, gi) = conjugate(rng, c);
            vertices.push(v);
            bases.push((g, gi));
        }
        let mut maps = vec![vec![None; t]; 1 << t];
        for (s, row) in maps.iter_mut().enumerate() {
            for (k, slot) in row.iter_mut().enumerate() {
                if s & (1 << k) != 0 {
                    continue;
                }
                let s2 = s | (1 << k);
                let (n1, n2) = (raw[s].0.len(), raw[s2].0.len());
                let mut f = zeros(n2, n1);
                if !broken {
                    for i in 0..nb {
                        f[i][i] = 1;
                    }
                    for (i, hrow) in raw[s2].1.iter().enumerate() {
                        f[nb + i][..nb].copy_from_slice(hrow);
                    }
                }
                *slot = Some(mul(&mul(&bases[s2].0, &f), &bases[s].1));
            }
        }
        RandomCube { t, vertices, maps }
    }

    pub fn total_rank(&self) -> usize {
        self.vertices.iter().map(|v| v.len()).sum()
    }

    /// `Tot` through the core cube totalization.
    pub fn total(&self) -> Result<FreeComplex> {
        let cx: Vec<Arc<FreeComplex>> = self.vertices.iter().map(|v| v.to_complex().map(Arc::new)).collect::<Result<_>>()?;
        relcx_core::funcx::lemma_tot(
            (0..self.t).collect(),
            |s| Ok(cx[mask(s)].clone()),
            |s, k| {
                let m = self.maps[mask(s)][k].as_ref().ok_or_else(|| Error::invalid("edge leaves the cube"))?;
                let (a, b) = (cx[mask(s)].clone(), cx[mask(s) | (1 << k)].clone());
                ChainMap::from_fn(a, b, 0, |g| column(m, g.num() as usize))
            },
        )
    }
}

/// A quoted double complex of total rank at most `max_rank`: a sum of
/// products `P ⊠ Q` with `d′ = d_P ⊗ 1`, `d″ = 1 ⊗ d_Q`, in a random basis
/// preserving bidegrees.
pub fn random_double(rng: &mut ChaCha8Rng, max_rank: usize) -> Result<MultiComplex> {
    let mut degs: Vec<Vec<i64>> = Vec::new();
    let mut blocks: Vec<(usize, Dense, Dense)> = Vec::new();
    while degs.len() < max_rank {
        let room = max_rank - degs.len();
        let p = random_complex(rng, 3.min(room), false);
        let q = random_complex(rng, (room / p.len().max(1)).min(3), false);
        if p.is_empty() || q.is_empty() || p.len() * q.len() > room {
            break;
        }
        let at = degs.len();
        for a in &p.degs {
            for b in &q.degs {
                degs.push(vec![*a, *b]);
            }
        }
        blocks.push((at, p, q));
        if rng.gen_bool(0.4) {
            break;
        }
    }
    let n = degs.len();
    let (mut d1, mut d2) = (zeros(n, n), zeros(n, n));
    for (at, p, q) in &blocks {
        let w = q.len();
        for i in 0..p.len() {
            for j in 0..w {
                let src = at + i * w + j;
                for i2 in 0..p.len() {
                    d1[at + i2 * w + j][src] += p.d[i2][i];
                }
                for j2 in 0..w {
                    d2[at + i * w + j2][src] += q.d[j2][j];
                }
            }
        }
    }
    let (g, gi) = change_of_basis(rng, &degs);
    let d1 = mul(&mul(&g, &d1), &gi);
    let d2 = mul(&mul(&g, &d2), &gi);
    let gens = degs.iter().enumerate().map(|(i, dg)| (dg.clone(), Gid::N(i as i64))).collect();
    MultiComplex::new(2, Convention::Commuting, gens, |k, x| column(if k == 0 { &d1 } else { &d2 }, x.num() as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use relcx_core::homalg::is_acyclic;

    #[test]
    fn random_complexes_are_complexes() {
        let mut r = rng(1);
        for _ in 0..50 {
            let c = random_complex(&mut r, 10, false);
            c.to_complex().unwrap().validate().unwrap();
            let z = random_complex(&mut r, 10, true);
            assert!(is_acyclic(&z.to_complex().unwrap()));
        }
    }

    #[test]
    fn cube_maps_commute() {
        let mut r = rng(2);
        for t in 0..=3 {
            let c = RandomCube::generate(&mut r, t, 12, false);
            assert!(c.total().is_ok());
        }
    }

    #[test]
    fn doubles_are_quoted() {
        let mut r = rng(3);
        for _ in 0..20 {
            let a = random_double(&mut r, 12).unwrap();
            assert!(a.gens().len() <= 12);
        }
    }
}
