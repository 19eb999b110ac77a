//! Dense reference computations for cross-checking homology: rank over ℚ by
//! fraction-free elimination and elementary divisors by naive Smith
//! reduction. Both work on `BigInt` copies and share nothing with the
//! sparse engine.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use relcx_core::homalg::FreeComplex;

fn big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Rank over ℚ, by Bareiss elimination.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut a = big(rows);
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..m {
            for j in c + 1..n {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// Nonzero elementary divisors, increasing.
pub fn elementary_divisors(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a = big(rows);
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero() && best.is_none_or(|(p, q)| a[i][j].abs() < a[p][q].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((p, q)) = best else { break };
        a.swap(t, p);
        for row in a.iter_mut() {
            row.swap(t, q);
        }
        let mut clean = true;
        for i in t + 1..m {
            let f = &a[i][t] / &a[t][t];
            if !f.is_zero() {
                for j in t..n {
                    let v = &a[i][j] - &f * &a[t][j];
                    a[i][j] = v;
                }
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..n {
            let f = &a[t][j] / &a[t][t];
            if !f.is_zero() {
                for i in t..m {
                    let v = &a[i][j] - &f * &a[i][t];
                    a[i][j] = v;
                }
            }
            clean &= a[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        // the pivot must divide the rest; otherwise fold a row into it
        let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
        if let Some(i) = bad {
            for j in t..n {
                let v = &a[t][j] + &a[i][j];
                a[t][j] = v;
            }
            continue;
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRecord {
    pub degree: i64,
    pub betti: usize,
    /// Present when torsion was computed.
    pub torsion: Option<Vec<BigInt>>,
}

/// Homology in each degree carrying generators; torsion only when the
/// complex has at most `torsion_limit` generators.
pub fn homology(c: &FreeComplex, torsion_limit: usize) -> Vec<OracleRecord> {
    c.degrees()
        .into_iter()
        .map(|p| {
            let out = c.d_block(p).to_dense();
            let inc = c.d_block(p - 1).to_dense();
            let betti = c.rank_in(p) - rational_rank(&out) - rational_rank(&inc);
            let torsion = (c.len() <= torsion_limit)
                .then(|| elementary_divisors(&inc).into_iter().filter(|d| !d.is_one()).collect());
            OracleRecord { degree: p, betti, torsion }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(rational_rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rational_rank(&[vec![0, 0], vec![0, 3]]), 1);
        assert_eq!(rational_rank(&[vec![2, 0, 1], vec![0, 3, 1], vec![2, 3, 2]]), 2);
        assert_eq!(rational_rank(&[]), 0);
    }

    #[test]
    fn divisors() {
        let d = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(elementary_divisors(&[vec![2, 0], vec![0, 3]]), d(&[1, 6]));
        assert_eq!(elementary_divisors(&[vec![2, 4], vec![4, 8]]), d(&[2]));
        assert_eq!(elementary_divisors(&[vec![6, 0, 0], vec![0, 10, 0], vec![0, 0, 15]]), d(&[1, 30, 30]));
    }
}
