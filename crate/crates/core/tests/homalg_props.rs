//! Random complexes with known homology: sums of `ℤ[p]` and `ℤ -c-> ℤ`
//! pieces, hidden by a random unimodular change of basis.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use relcx_core::homalg::{cone, homology_all, is_acyclic, is_quasi_iso, ChainMap, FreeComplex, Gid, Terms};

#[derive(Clone, Debug)]
enum Piece {
    Free(i64),
    Arrow(i64, i64),
}

fn piece() -> impl Strategy<Value = Piece> {
    prop_oneof![
        (-2i64..=2).prop_map(Piece::Free),
        ((-2i64..=1), prop::sample::select(vec![1i64, -1, 2, -2, 3, 4, 6])).prop_map(|(p, c)| Piece::Arrow(p, c)),
    ]
}

/// Pieces and elementary row operations `(i, j, ±1)`.
fn spec(max: usize) -> impl Strategy<Value = (Vec<Piece>, Vec<(usize, usize, bool)>)> {
    (prop::collection::vec(piece(), 0..max), prop::collection::vec((0usize..16, 0usize..16, any::<bool>()), 0..24))
}

struct Built {
    plain: Arc<FreeComplex>,
    hidden: Arc<FreeComplex>,
    /// `plain → hidden`, the change of basis.
    iso: ChainMap,
}

fn column(m: &[Vec<i64>], j: usize) -> Terms {
    m.iter().enumerate().filter(|(_, r)| r[j] != 0).map(|(i, r)| (Gid::N(i as i64), r[j])).collect()
}

fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter().map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect()).collect()
}

fn build(pieces: &[Piece], ops: &[(usize, usize, bool)]) -> Built {
    let mut degs = Vec::new();
    let mut arrows = Vec::new();
    for p in pieces {
        match *p {
            Piece::Free(q) => degs.push(q),
            Piece::Arrow(q, c) => {
                arrows.push((degs.len(), degs.len() + 1, c));
                degs.extend([q, q + 1]);
            }
        }
    }
    let n = degs.len();
    let mut d = vec![vec![0i64; n]; n];
    for (s, t, c) in arrows {
        d[t][s] = c;
    }
    let id = |n: usize| (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect::<Vec<_>>()).collect::<Vec<_>>();
    let (mut g, mut gi) = (id(n), id(n));
    for &(i, j, plus) in ops {
        if n == 0 {
            break;
        }
        let (i, j) = (i % n, j % n);
        if i == j || degs[i] != degs[j] {
            continue;
        }
        let c = if plus { 1 } else { -1 };
        for t in 0..n {
            g[i][t] += c * g[j][t];
        }
        for row in gi.iter_mut() {
            row[j] -= c * row[i];
        }
    }
    let hd = mul(&mul(&g, &d), &gi);
    let gens: Vec<(i64, Gid)> = degs.iter().enumerate().map(|(i, &p)| (p, Gid::N(i as i64))).collect();
    let plain = Arc::new(FreeComplex::from_fn(gens.clone(), |x| column(&d, x.num() as usize)).unwrap());
    let hidden = Arc::new(FreeComplex::from_fn(gens, |x| column(&hd, x.num() as usize)).unwrap());
    let iso = ChainMap::from_fn(plain.clone(), hidden.clone(), 0, |x| column(&g, x.num() as usize)).unwrap();
    Built { plain, hidden, iso }
}

/// `(prime, exponent) → multiplicity` for a finite abelian group given by
/// cyclic orders.
fn primary(orders: impl IntoIterator<Item = u64>) -> BTreeMap<(u64, u32), usize> {
    let mut out = BTreeMap::new();
    for mut c in orders {
        let mut p = 2;
        while c > 1 {
            let mut e = 0;
            while c % p == 0 {
                c /= p;
                e += 1;
            }
            if e > 0 {
                *out.entry((p, e)).or_default() += 1;
            }
            p += 1;
        }
    }
    out
}

type Expected = BTreeMap<i64, (usize, BTreeMap<(u64, u32), usize>)>;

fn expected(pieces: &[Piece]) -> Expected {
    let mut out: Expected = BTreeMap::new();
    for p in pieces {
        match *p {
            Piece::Free(q) => out.entry(q).or_default().0 += 1,
            Piece::Arrow(q, c) => {
                let t = &mut out.entry(q + 1).or_default().1;
                for (k, m) in primary([c.unsigned_abs()]) {
                    *t.entry(k).or_default() += m;
                }
            }
        }
    }
    out.retain(|_, (b, t)| *b > 0 || !t.is_empty());
    out
}

fn observed(c: &FreeComplex) -> Expected {
    let mut out = Expected::new();
    for r in homology_all(c) {
        let t = primary(r.torsion.iter().map(|x| x.to_u64().unwrap()));
        if r.betti > 0 || !t.is_empty() {
            out.insert(r.degree, (r.betti, t));
        }
    }
    out
}

fn betti(c: &FreeComplex) -> BTreeMap<i64, usize> {
    homology_all(c).into_iter().filter(|r| r.betti > 0).map(|r| (r.degree, r.betti)).collect()
}

fn euler(c: &FreeComplex) -> i64 {
    c.gens().iter().map(|(p, _)| if p % 2 == 0 { 1 } else { -1 }).sum()
}

/// `((x, y), z) ↦ (x, y, z)` and `(x, (y, z)) ↦ (x, y, z)`.
fn flatten(g: &Gid) -> Gid {
    let mut out = Vec::new();
    for p in g.parts() {
        match p {
            Gid::T(inner) => out.extend(inner.iter().cloned()),
            leaf => out.push(leaf.clone()),
        }
    }
    Gid::T(out)
}

fn same_complex(a: &FreeComplex, b: &FreeComplex) -> bool {
    a.len() == b.len() && a.gens().iter().all(|(p, g)| b.deg_of(g) == Some(*p) && a.d_of(g) == b.d_of(g))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn homology_matches_the_pieces((pieces, ops) in spec(7)) {
        let b = build(&pieces, &ops);
        prop_assert_eq!(observed(&b.hidden), expected(&pieces));
        prop_assert_eq!(observed(&b.plain), expected(&pieces));
    }

    #[test]
    fn change_of_basis_is_a_quasi_isomorphism((pieces, ops) in spec(7)) {
        let b = build(&pieces, &ops);
        prop_assert!(b.iso.validate().is_ok());
        prop_assert!(is_quasi_iso(&b.iso).unwrap());
        prop_assert!(is_acyclic(&cone(&b.iso).unwrap()));
        prop_assert!(is_acyclic(&cone(&ChainMap::identity(b.hidden.clone())).unwrap()));
    }

    #[test]
    fn zero_map_is_a_quasi_isomorphism_only_on_acyclic((pieces, ops) in spec(5)) {
        let b = build(&pieces, &ops);
        let zero = ChainMap::zero(b.hidden.clone(), b.hidden.clone(), 0);
        prop_assert_eq!(is_quasi_iso(&zero).unwrap(), expected(&pieces).is_empty());
    }

    #[test]
    fn tensor_is_a_complex_with_kunneth_ranks((p1, o1) in spec(4), (p2, o2) in spec(4)) {
        let (a, b) = (build(&p1, &o1), build(&p2, &o2));
        let t = FreeComplex::tensor(&a.hidden, &b.hidden);
        prop_assert!(t.validate().is_ok());
        prop_assert_eq!(euler(&t), euler(&a.hidden) * euler(&b.hidden));
        let mut want: BTreeMap<i64, usize> = BTreeMap::new();
        for (p, x) in betti(&a.hidden) {
            for (q, y) in betti(&b.hidden) {
                *want.entry(p + q).or_default() += x * y;
            }
        }
        prop_assert_eq!(betti(&t), want);
    }

    #[test]
    fn tensor_is_associative((p1, o1) in spec(3), (p2, o2) in spec(3), (p3, o3) in spec(3)) {
        let (a, b, c) = (build(&p1, &o1), build(&p2, &o2), build(&p3, &o3));
        let flat = FreeComplex::tensor_many(&[&a.hidden, &b.hidden, &c.hidden]);
        let left = FreeComplex::tensor(&FreeComplex::tensor(&a.hidden, &b.hidden), &c.hidden);
        let right = FreeComplex::tensor(&a.hidden, &FreeComplex::tensor(&b.hidden, &c.hidden));
        prop_assert!(same_complex(&left.map_gids(flatten).unwrap(), &flat));
        prop_assert!(same_complex(&right.map_gids(flatten).unwrap(), &flat));
    }

    #[test]
    fn tensor_of_maps_is_a_chain_map((p1, o1) in spec(4), (p2, o2) in spec(4)) {
        let (a, b) = (build(&p1, &o1), build(&p2, &o2));
        let f = ChainMap::tensor(&a.iso, &b.iso).unwrap();
        prop_assert!(f.validate().is_ok());
        prop_assert!(is_quasi_iso(&f).unwrap());
    }
}

#[test]
fn tensor_sign_follows_the_right_factor() {
    let a = FreeComplex::from_fn(vec![(0, Gid::N(0)), (1, Gid::N(1))], |g| {
        if *g == Gid::N(0) { vec![(Gid::N(1), 1)] } else { vec![] }
    })
    .unwrap();
    let odd = FreeComplex::discrete(vec![(1, Gid::N(7))]).unwrap();
    let even = FreeComplex::discrete(vec![(2, Gid::N(7))]).unwrap();
    let x = Gid::ns(&[0, 7]);
    assert_eq!(FreeComplex::tensor(&a, &odd).d_of(&x), vec![(Gid::ns(&[1, 7]), -1)]);
    assert_eq!(FreeComplex::tensor(&a, &even).d_of(&x), vec![(Gid::ns(&[1, 7]), 1)]);
}

#[test]
fn a_non_complex_is_rejected() {
    // 0 → 1 → 2 with both maps the identity: d∘d ≠ 0
    let gens = vec![(0, Gid::N(0)), (1, Gid::N(1)), (2, Gid::N(2))];
    let r = FreeComplex::from_fn(gens, |g| match g.num() {
        0 => vec![(Gid::N(1), 1)],
        1 => vec![(Gid::N(2), 1)],
        _ => vec![],
    });
    assert!(r.is_err());
}
