//! The proposition suite: a fixed registry of checks run against a scenario.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use relcx_core::cech::{distinguished, restricted_tensor, SingleConstraint};
use relcx_core::diagonal::{check_delta_layers, check_delta_props, check_diag_compat, diag, Surjection};
use relcx_core::funcx::{
    check_bundle_laws, check_cech_laws, check_prop_phi_psi, check_sigma_exactness, interior, segmentation_identity,
    AllProper, FBundle, Fcal,
};
use relcx_core::geomodel::{GeometryModel, PointModel};
use relcx_core::homalg::{
    cone, homology_all, is_acyclic, is_quasi_iso, u_coherence, ChainMap, FreeComplex, Gid,
};
use relcx_core::ordsets::{minus, subsets};
use serde::Serialize;

use crate::oracle;
use crate::randalg::{random_double, rng, RandomCube};
use crate::scenario::{Model, Scenario};

pub struct CheckDef {
    pub id: &'static str,
    pub anchor: &'static str,
    pub about: &'static str,
}

pub const CHECKS: [CheckDef; 12] = [
    CheckDef { id: "dd", anchor: "d∘d=0", about: "every constructed complex squares to zero" },
    CheckDef { id: "iota", anchor: "cone(ι)≃0", about: "ι is a quasi-isomorphism onto the fiber product" },
    CheckDef { id: "fcal-acyclic", anchor: "H(ℱ(I))=0", about: "ℱ(I) is acyclic from three points on" },
    CheckDef { id: "tot-acyclic", anchor: "H(Tot)=0", about: "Tot of a quasi-isomorphic cube functor is acyclic" },
    CheckDef { id: "laws", anchor: "σ,τ,φ,r,π,ρ", about: "structure-map laws as matrix identities" },
    CheckDef { id: "sigma-exact", anchor: "σ-exact", about: "the alternating σ-sequence is exact" },
    CheckDef { id: "phi-psi", anchor: "φ≡ψ", about: "φ_K and ψ_K agree on homology" },
    CheckDef { id: "delta", anchor: "d𝚫=0", about: "the diagonal cocycle and its restrictions" },
    CheckDef { id: "diag", anchor: "λ*", about: "diagonal maps are functorial chain maps" },
    CheckDef { id: "u-coherence", anchor: "u∘(u⊗1)", about: "u is invertible and coherent on three factors" },
    CheckDef { id: "distinguished", anchor: "⊗̂", about: "restricted tensors and distinguished subcomplexes" },
    CheckDef { id: "oracle", anchor: "rank/SNF", about: "homology against dense reference computations" },
];

/// `"all"` or a comma-separated list of ids, returned in registry order.
pub fn select(spec: &str) -> Result<Vec<&'static CheckDef>, String> {
    if spec.trim() == "all" {
        return Ok(CHECKS.iter().collect());
    }
    let wanted: BTreeSet<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if let Some(bad) = wanted.iter().find(|w| !CHECKS.iter().any(|c| c.id == **w)) {
        return Err(format!("unknown check {bad:?}"));
    }
    if wanted.is_empty() {
        return Err("empty check selection".into());
    }
    Ok(CHECKS.iter().filter(|c| wanted.contains(c.id)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub anchor: String,
    #[serde(flatten)]
    pub status: Status,
    pub cases: usize,
    pub witnesses: Vec<String>,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub scenario: String,
    pub seed: u64,
    pub results: Vec<CheckResult>,
}

const MAX_WITNESSES: usize = 5;

impl CheckReport {
    /// Skipped checks do not count as failures.
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    /// One line per check; `timings: false` prints `-` for a byte-stable
    /// report.
    pub fn text(&self, timings: bool) -> String {
        let mut out = String::new();
        for r in &self.results {
            let ms = if timings { r.elapsed_ms.to_string() } else { "-".into() };
            match &r.status {
                Status::Pass => out.push_str(&format!("PASS {} {} {}\n", r.id, r.anchor, ms)),
                Status::Fail => {
                    out.push_str(&format!("FAIL {} {} {}\n", r.id, r.anchor, ms));
                    for w in &r.witnesses {
                        out.push_str(&format!("  witness: {w}\n"));
                    }
                }
                Status::Skipped { reason } => out.push_str(&format!("SKIP {} {} {} ({reason})\n", r.id, r.anchor, ms)),
            }
        }
        out
    }

    pub fn json(&self, timings: bool) -> String {
        let mut r = self.clone();
        if !timings {
            for x in &mut r.results {
                x.elapsed_ms = 0;
            }
        }
        let mut s = serde_json::to_string_pretty(&r).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Cases run and failures seen by one check.
#[derive(Default)]
pub struct Tally {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Tally {
    fn case(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn extend(&mut self, what: &str, errs: Vec<String>) {
        self.cases += 1;
        self.failures.extend(errs.into_iter().map(|e| format!("{what}: {e}")));
    }

    fn run(&mut self, what: impl std::fmt::Display, r: relcx_core::Result<bool>) {
        match r {
            Ok(ok) => self.case(ok, || what.to_string()),
            Err(e) => self.case(false, || format!("{what}: {e}")),
        }
    }
}

type Outcome = Result<Tally, String>;

/// Shared state for one scenario: the point model cache, if any.
pub struct Ctx<'a> {
    pub scenario: &'a Scenario,
    fc: Option<Fcal<'a>>,
}

impl<'a> Ctx<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let fc = match &scenario.model {
            Model::Point(p) => Some(Fcal::new(&p.model)),
            Model::Table(_) => None,
        };
        Ctx { scenario, fc }
    }

    fn point(&self) -> Result<(&Fcal<'a>, &'a PointModel, &'a [usize]), String> {
        match (&self.scenario.model, &self.fc) {
            (Model::Point(p), Some(fc)) => Ok((fc, &p.model, &p.vars)),
            _ => Err("needs a point model".into()),
        }
    }

    fn n(&self) -> usize {
        self.scenario.n
    }

    fn subsets_or(&self, chosen: &Option<Vec<Vec<usize>>>) -> Vec<Vec<usize>> {
        chosen.clone().unwrap_or_else(|| subsets(&interior(self.n())))
    }

    /// Disjoint `(R, J)` with `J ≠ ∅`: the chosen ones, all of them up to
    /// four points, a seeded sample beyond.
    fn rj_pairs(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let sel = &self.scenario.selection;
        let inner = interior(self.n());
        let mut pairs = Vec::new();
        for r in sel.r.clone().unwrap_or_else(|| subsets(&inner)) {
            for j in sel.j.clone().unwrap_or_else(|| subsets(&minus(&inner, &r))) {
                if !j.is_empty() && j.iter().all(|x| !r.contains(x)) {
                    pairs.push((r.clone(), j));
                }
            }
        }
        if self.n() > 4 && sel.r.is_none() && sel.j.is_none() {
            pairs.shuffle(&mut rng(self.scenario.seed ^ 0x5167));
            pairs.truncate(6);
            pairs.sort();
        }
        pairs
    }
}

fn windows(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for lo in 0..n {
        for hi in lo + 1..n {
            out.push((lo, hi));
        }
    }
    out
}

/// Every way of cutting `[0, n)` into consecutive blocks.
fn block_splits(n: usize) -> Vec<Vec<(usize, usize)>> {
    subsets(&(1..n).collect::<Vec<_>>())
        .into_iter()
        .map(|cuts| {
            let mut out = Vec::new();
            let mut lo = 0;
            for c in cuts {
                out.push((lo, c - 1));
                lo = c;
            }
            out.push((lo, n - 1));
            out
        })
        .collect()
}

/// Order-preserving surjections `[0, m) → [0, t)` with `2 ≤ t ≤ m ≤ 4` and
/// `t ≤ 3`.
fn small_surjections() -> Vec<Surjection> {
    let mut out = Vec::new();
    for m in 2..=4 {
        for steps in subsets(&(1..m).collect::<Vec<_>>()) {
            let t = steps.len() + 1;
            if !(2..=3).contains(&t) {
                continue;
            }
            let map: Vec<usize> = (0..m).map(|p| steps.iter().filter(|&&s| s <= p).count()).collect();
            out.push(Surjection::new(map).expect("order-preserving surjection"));
        }
    }
    out
}

fn validate(t: &mut Tally, what: impl std::fmt::Display, c: &FreeComplex) {
    let r = c.validate();
    t.case(r.is_ok(), || format!("{what}: {}", r.unwrap_err()));
}

fn describe(c: &FreeComplex) -> impl Fn(&Gid) -> String + '_ {
    move |g| match c.deg_of(g) {
        Some(p) => format!("{g:?} in degree {p}"),
        None => format!("{g:?}"),
    }
}

fn table_complexes(model: &dyn GeometryModel, n: usize) -> relcx_core::Result<Vec<(String, FreeComplex)>> {
    let mut out = Vec::new();
    for (lo, hi) in (0..n).flat_map(|lo| (lo..n).map(move |hi| (lo, hi))) {
        out.push((format!("Z[{}, {}]", lo + 1, hi + 1), (*model.cycles(lo, hi)?).clone()));
    }
    for blocks in block_splits(n).into_iter().filter(|b| b.len() > 1) {
        let (hat, full) = restricted_tensor(model, &blocks)?;
        out.push((format!("⊗̂ over {blocks:?}"), hat));
        out.push((format!("⊗ over {blocks:?}"), full));
    }
    Ok(out)
}

/// `(name, complex)` for the complexes built from a point scenario.
fn point_complexes(fc: &Fcal<'_>, vars: &[usize]) -> relcx_core::Result<Vec<(String, FreeComplex)>> {
    let mut out = Vec::new();
    for (lo, hi) in windows(vars.len()) {
        let w = &vars[lo..=hi];
        let inner = interior(w.len());
        for j in subsets(&inner) {
            out.push((format!("ℱ([{lo}, {hi}], {j:?})"), (**fc.fcal(w, &j)?.complex()).clone()));
            out.push((format!("cone ι on ([{lo}, {hi}], {j:?})"), cone(&fc.iota(w, &j)?)?));
            for sigma in subsets(&minus(&inner, &j)).into_iter().filter(|s| !s.is_empty()) {
                out.push((format!("ℱ([{lo}, {hi}], {j:?}|{sigma:?})"), (*fc.layer(w, &j, &sigma)?).clone()));
            }
        }
        out.push((format!("ℱ([{lo}, {hi}])"), (*fc.total(w)?).clone()));
    }
    let fb = FBundle::new(fc, vars)?;
    let inner = interior(vars.len());
    for s in subsets(&inner) {
        out.push((format!("F(I|{s:?})"), (*fb.complex(&s)?).clone()));
        if !s.is_empty() {
            out.push((format!("F(I‖{s:?})"), (*fb.split_full(&s)?).clone()));
        }
        out.push((format!("stratum {s:?}"), (*fb.stratum(&s)?).clone()));
    }
    Ok(out)
}

fn check_dd(ctx: &Ctx<'_>) -> Outcome {
    let mut t = Tally::default();
    let list = match &ctx.scenario.model {
        Model::Point(p) => point_complexes(ctx.fc.as_ref().unwrap(), &p.vars),
        Model::Table(m) => {
            for name in ctx.scenario.file.maps.iter().map(|m| &m.name) {
                if let Some(f) = m.map(name) {
                    let r = f.validate();
                    t.case(r.is_ok(), || format!("map {name}: {}", r.unwrap_err()));
                }
            }
            table_complexes(m, ctx.n())
        }
    };
    match list {
        Ok(l) => {
            for (name, c) in &l {
                validate(&mut t, name, c);
            }
        }
        Err(e) => t.case(false, || format!("construction: {e}")),
    }
    Ok(t)
}

fn check_iota(ctx: &Ctx<'_>) -> Outcome {
    let (fc, _, vars) = ctx.point()?;
    let mut t = Tally::default();
    for (lo, hi) in windows(vars.len()) {
        let w = &vars[lo..=hi];
        let all: Vec<usize> = (0..w.len()).collect();
        let fiber = fc.closed_points(w, &interior(w.len()), &all).len();
        for j in subsets(&interior(w.len())) {
            t.run(format!("cone ι on ([{lo}, {hi}], {j:?}) is not acyclic"), fc.iota(w, &j).and_then(|f| is_quasi_iso(&f)));
            match fc.fcal(w, &j) {
                Ok(c) => {
                    let h = homology_all(c.complex());
                    let ok = h.iter().all(|r| r.torsion.is_empty() && r.betti == if r.degree == 0 { fiber } else { 0 })
                        && (fiber == 0 || h.iter().any(|r| r.degree == 0));
                    t.case(ok, || format!("H(ℱ([{lo}, {hi}], {j:?})) = {h:?}, expected ℤ^{fiber} in degree 0"));
                }
                Err(e) => t.case(false, || format!("ℱ([{lo}, {hi}], {j:?}): {e}")),
            }
        }
    }
    Ok(t)
}

fn check_fcal_acyclic(ctx: &Ctx<'_>) -> Outcome {
    let (fc, _, vars) = ctx.point()?;
    let mut t = Tally::default();
    for (lo, hi) in windows(vars.len()) {
        let w = &vars[lo..=hi];
        let c = match fc.total(w) {
            Ok(c) => c,
            Err(e) => {
                t.case(false, || format!("ℱ([{lo}, {hi}]): {e}"));
                continue;
            }
        };
        if w.len() >= 3 {
            t.case(is_acyclic(&c), || {
                let h = homology_all(&c).into_iter().find(|r| !r.is_zero());
                format!("ℱ([{lo}, {hi}]) has homology {h:?}")
            });
        } else {
            let fiber = fc.closed_points(w, &[], &[0, 1]).len();
            let h = homology_all(&c);
            let ok = h.iter().all(|r| r.torsion.is_empty() && r.betti == if r.degree == 1 { fiber } else { 0 });
            t.case(ok, || format!("ℱ([{lo}, {hi}]) has homology {h:?}, expected ℤ^{fiber} in degree 1"));
        }
    }
    Ok(t)
}

pub const CUBES: usize = 50;

fn check_tot_acyclic(ctx: &Ctx<'_>) -> Outcome {
    let mut t = Tally::default();
    let mut r = rng(ctx.scenario.seed ^ 0x7070);
    for i in 0..CUBES {
        let cube = RandomCube::generate(&mut r, 1 + i % 3, 24, false);
        match cube.total() {
            Ok(c) => t.case(is_acyclic(&c), || {
                format!("cube {i} (|T| = {}, rank {}): Tot has homology {:?}", cube.t, cube.total_rank(), homology_all(&c))
            }),
            Err(e) => t.case(false, || format!("cube {i}: {e}")),
        }
    }
    Ok(t)
}

fn check_laws(ctx: &Ctx<'_>) -> Outcome {
    let (fc, _, vars) = ctx.point()?;
    let mut t = Tally::default();
    match check_cech_laws(fc, vars) {
        Ok(e) => t.extend("ℱ", e),
        Err(e) => t.case(false, || format!("ℱ laws: {e}")),
    }
    match check_bundle_laws(fc, vars) {
        Ok(e) => t.extend("F", e),
        Err(e) => t.case(false, || format!("F laws: {e}")),
    }
    t.extend("compactification", fc.compactification_laws(vars));
    Ok(t)
}

fn check_sigma_exact(ctx: &Ctx<'_>) -> Outcome {
    let (fc, _, vars) = ctx.point()?;
    let pairs = ctx.rj_pairs();
    if pairs.is_empty() {
        return Err("no interior points".into());
    }
    let fb = FBundle::new(fc, vars).map_err(|e| e.to_string())?;
    let mut t = Tally::default();
    for (r, j) in pairs {
        match check_sigma_exactness(&fb, &r, &j) {
            Ok(None) => t.case(true, String::new),
            Ok(Some(k)) => t.case(false, || format!("R = {r:?}, J = {j:?}: not exact at stage {k}")),
            Err(e) => t.case(false, || format!("R = {r:?}, J = {j:?}: {e}")),
        }
    }
    Ok(t)
}

fn check_phi_psi(ctx: &Ctx<'_>) -> Outcome {
    let (fc, _, vars) = ctx.point()?;
    let mut t = Tally::default();
    for k in ctx.subsets_or(&ctx.scenario.selection.k) {
        match check_prop_phi_psi(fc, vars, &k) {
            Ok(v) => t.case(v.holds(), || format!("K = {k:?}: {v:?}")),
            Err(e) => t.case(false, || format!("K = {k:?}: {e}")),
        }
    }
    Ok(t)
}

fn distinct(vars: &[usize]) -> Vec<usize> {
    vars.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

fn check_delta(ctx: &Ctx<'_>) -> Outcome {
    let (fc, _, vars) = ctx.point()?;
    let mut t = Tally::default();
    for x in distinct(vars) {
        for len in 2..=4 {
            let c = vec![x; len];
            match check_delta_layers(fc, &c) {
                Ok(e) => t.extend(&format!("X{x}^{len}"), e),
                Err(e) => t.case(false, || format!("X{x}^{len}: {e}")),
            }
            let inner = interior(len);
            for s in subsets(&inner) {
                for k in subsets(&inner) {
                    match check_delta_props(fc, &c, &s, &k) {
                        Ok(e) => t.extend(&format!("X{x}^{len}, S = {s:?}, K = {k:?}"), e),
                        Err(e) => t.case(false, || format!("X{x}^{len}, S = {s:?}, K = {k:?}: {e}")),
                    }
                }
            }
        }
    }
    Ok(t)
}

fn chain_map_case(t: &mut Tally, what: String, f: relcx_core::Result<ChainMap>) -> Option<ChainMap> {
    match f {
        Ok(f) => {
            let d = f.defect();
            let bad = d.triplets().first().map(|&(i, j, v)| {
                let src = f.src();
                format!("{what}: d∘f − f∘d is {v} at {} → {:?}", describe(src)(src.gid(j)), f.tgt().gid(i))
            });
            t.case(bad.is_none(), || bad.unwrap());
            Some(f)
        }
        Err(e) => {
            t.case(false, || format!("{what}: {e}"));
            None
        }
    }
}

fn check_diag(ctx: &Ctx<'_>) -> Outcome {
    let (fc, _, vars) = ctx.point()?;
    let lams: Vec<Surjection> = match &ctx.scenario.selection.surjections {
        Some(ls) => ls.iter().map(|l| Surjection::new(l.clone()).map_err(|e| e.to_string())).collect::<Result<_, _>>()?,
        None => small_surjections(),
    };
    let all = small_surjections();
    let mut t = Tally::default();
    for x in distinct(vars) {
        for lam in &lams {
            let v = vec![x; lam.target_len()];
            let what = format!("λ = {:?} on X{x}", lam.map());
            let Some(f) = chain_map_case(&mut t, what.clone(), diag(fc, &v, lam)) else { continue };
            if lam.is_bijective() {
                t.case(f.same_as(&ChainMap::identity(f.src().clone())), || format!("{what}: not the identity"));
            }
            for inner in all.iter().filter(|mu| mu.target_len() == lam.source_len()) {
                let whole = lam.after(inner).and_then(|w| diag(fc, &v, &w));
                let two = lam.pull(&v).and_then(|pv| diag(fc, &pv, inner)).and_then(|g| f.then(&g));
                match (whole, two) {
                    (Ok(a), Ok(b)) => t.case(a.same_as(&b), || {
                        let d = a.first_difference(&b);
                        format!("{what} after {:?}: (λμ)* ≠ μ*λ* at {d:?}", inner.map())
                    }),
                    (Err(e), _) | (_, Err(e)) => t.case(false, || format!("{what} after {:?}: {e}", inner.map())),
                }
            }
            for ell in 1..lam.source_len() - 1 {
                match check_diag_compat(fc, &v, lam, ell) {
                    Ok(e) => t.extend(&format!("{what}, ℓ = {ell}"), e),
                    Err(e) => t.case(false, || format!("{what}, ℓ = {ell}: {e}")),
                }
            }
        }
    }
    Ok(t)
}

pub const DOUBLES: usize = 20;

fn check_u(ctx: &Ctx<'_>) -> Outcome {
    let mut t = Tally::default();
    let mut r = rng(ctx.scenario.seed ^ 0xd0b1);
    for i in 0..DOUBLES {
        let abc: relcx_core::Result<Vec<_>> = (0..3).map(|_| random_double(&mut r, 12)).collect();
        match abc.and_then(|v| u_coherence(&v[0], &v[1], &v[2])) {
            Ok(None) => t.case(true, String::new),
            Ok(Some(w)) => t.case(false, || format!("triple {i}: {w}")),
            Err(e) => t.case(false, || format!("triple {i}: {e}")),
        }
    }
    Ok(t)
}

/// `⊗̂` against the single-constraint distinguished subcomplex, and the
/// inclusion into `⊗`.
fn restricted_cases(t: &mut Tally, model: &dyn GeometryModel, n: usize, chosen: &Option<Vec<Vec<(usize, usize)>>>) -> usize {
    let splits = chosen.clone().unwrap_or_else(|| block_splits(n).into_iter().filter(|b| b.len() > 1).collect());
    let mut strict = 0;
    for blocks in splits {
        let c = SingleConstraint { cuts: Vec::new(), p: (0..blocks.len()).collect(), fixed: Vec::new() };
        let res = restricted_tensor(model, &blocks).and_then(|(hat, full)| Ok((hat, full, distinguished(model, &blocks, &[c])?)));
        match res {
            Ok((hat, full, dist)) => {
                let a: BTreeSet<&Gid> = hat.gens().iter().map(|g| &g.1).collect();
                let b: BTreeSet<&Gid> = dist.gens().iter().map(|g| &g.1).collect();
                t.case(a == b, || format!("{blocks:?}: ⊗̂ and the distinguished subcomplex differ at {:?}", a.symmetric_difference(&b).next()));
                if hat.len() < full.len() {
                    strict += 1;
                }
                let (hat, full) = (Arc::new(hat), Arc::new(full));
                let inc = ChainMap::from_fn(hat, full, 0, |g| vec![(g.clone(), 1)]);
                t.run(format!("{blocks:?}: ⊗̂ → ⊗ is not a quasi-isomorphism"), inc.and_then(|f| is_quasi_iso(&f)));
            }
            Err(e) => t.case(false, || format!("{blocks:?}: {e}")),
        }
    }
    strict
}

fn check_distinguished(ctx: &Ctx<'_>) -> Outcome {
    let mut t = Tally::default();
    match &ctx.scenario.model {
        Model::Point(p) => {
            let fc = ctx.fc.as_ref().unwrap();
            let fb = FBundle::new(fc, &p.vars).map_err(|e| e.to_string())?;
            for s in ctx.subsets_or(&ctx.scenario.selection.s) {
                t.run(format!("S = {s:?}: ⊗̂ F(I_j) ≠ F(I|S)"), segmentation_identity(&fb, &s, &AllProper));
            }
            let fib = p.model.fibering(&fc.factors(&p.vars, &[]));
            restricted_cases(&mut t, &fib, ctx.n(), &ctx.scenario.selection.blocks);
        }
        Model::Table(m) => {
            // loading already ran the boundary-closure validator
            t.case(true, String::new);
            restricted_cases(&mut t, m, ctx.n(), &ctx.scenario.selection.blocks);
        }
    }
    Ok(t)
}

pub const ORACLE_RANK: usize = 64;
pub const ORACLE_TORSION_RANK: usize = 24;

fn check_oracle(ctx: &Ctx<'_>) -> Outcome {
    let list = match &ctx.scenario.model {
        Model::Point(p) => point_complexes(ctx.fc.as_ref().unwrap(), &p.vars),
        Model::Table(m) => table_complexes(m, ctx.n()),
    }
    .map_err(|e| e.to_string())?;
    let mut t = Tally::default();
    let mut seen = BTreeSet::new();
    for (name, c) in list {
        if c.is_empty() || c.len() > ORACLE_RANK || !seen.insert(format!("{c:?}")) {
            continue;
        }
        let ours = homology_all(&c);
        let theirs = oracle::homology(&c, ORACLE_TORSION_RANK);
        let agree = ours.len() == theirs.len()
            && ours.iter().zip(&theirs).all(|(a, b)| {
                let tors: Vec<_> = a.torsion.iter().filter(|x| **x != 1.into()).cloned().collect();
                a.degree == b.degree && a.betti == b.betti && b.torsion.as_ref().is_none_or(|bt| *bt == tors)
            });
        t.case(agree, || format!("{name}: engine {ours:?}, oracle {theirs:?}"));
    }
    Ok(t)
}

fn runner(id: &str) -> fn(&Ctx<'_>) -> Outcome {
    match id {
        "dd" => check_dd,
        "iota" => check_iota,
        "fcal-acyclic" => check_fcal_acyclic,
        "tot-acyclic" => check_tot_acyclic,
        "laws" => check_laws,
        "sigma-exact" => check_sigma_exact,
        "phi-psi" => check_phi_psi,
        "delta" => check_delta,
        "diag" => check_diag,
        "u-coherence" => check_u,
        "distinguished" => check_distinguished,
        "oracle" => check_oracle,
        _ => unreachable!("unknown check {id}"),
    }
}

pub fn run_one(ctx: &Ctx<'_>, def: &CheckDef) -> CheckResult {
    let start = Instant::now();
    let out = runner(def.id)(ctx);
    let elapsed_ms = start.elapsed().as_millis();
    let (status, cases, witnesses) = match out {
        Ok(t) if t.failures.is_empty() => (Status::Pass, t.cases, Vec::new()),
        Ok(t) => (Status::Fail, t.cases, t.failures.into_iter().take(MAX_WITNESSES).collect()),
        Err(reason) => (Status::Skipped { reason }, 0, Vec::new()),
    };
    CheckResult { id: def.id.into(), anchor: def.anchor.into(), status, cases, witnesses, elapsed_ms }
}

/// Runs the selection in parallel; results keep registry order.
pub fn run_checks(s: &Scenario, selection: &[&CheckDef]) -> CheckReport {
    let ctx = Ctx::new(s);
    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = selection.iter().map(|def| scope.spawn(|| run_one(&ctx, def))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    CheckReport { scenario: s.name.clone(), seed: s.seed, results }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        assert_eq!(select("all").unwrap().len(), CHECKS.len());
        let ids: Vec<&str> = select("oracle,dd").unwrap().iter().map(|c| c.id).collect();
        assert_eq!(ids, vec!["dd", "oracle"]);
        assert!(select("dd,nope").is_err());
        assert!(select("").is_err());
    }

    #[test]
    fn surjection_enumeration() {
        let all = small_surjections();
        // compositions of m into t parts, 2 ≤ t ≤ 3, 2 ≤ m ≤ 4: 1 + (2+1) + (3+3)
        assert_eq!(all.len(), 10);
        assert!(all.iter().all(|l| l.target_len() <= 3 && l.source_len() <= 4));
    }

    #[test]
    fn splits_of_three() {
        assert_eq!(block_splits(3).len(), 4);
        assert!(block_splits(3).contains(&vec![(0, 0), (1, 2)]));
    }
}
