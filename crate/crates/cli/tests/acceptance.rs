//! The acceptance run: the bundled fixtures plus 100 seeded random point
//! scenarios, summarized as one line per criterion
//! `PASS|FAIL <check-id> <anchor> <elapsed-ms>`. Details of failures go to
//! stderr.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use relcx::checks::{CheckReport, Status, CUBES};
use relcx::randalg::{rng, RandomCube};
use relcx::scenario::Model;
use relcx::{gen_scenario, load_scenario, parse_scenario, run_checks, select, LoadError, Scenario, Sizes, CHECKS};
use relcx_core::cech::restricted_tensor;
use relcx_core::funcx::Fcal;
use relcx_core::homalg::{homology_all, is_acyclic, is_quasi_iso, ChainMap};

const SEEDS: u64 = 50;
const FIVE_SEEDS: u64 = 3;

/// Criterion number, check id; in the order of the acceptance list.
const CRITERIA: [(u32, &str); 12] = [
    (1, "dd"),
    (2, "iota"),
    (3, "fcal-acyclic"),
    (4, "tot-acyclic"),
    (5, "laws"),
    (6, "sigma-exact"),
    (7, "phi-psi"),
    (8, "delta"),
    (9, "diag"),
    (10, "u-coherence"),
    (11, "distinguished"),
    (12, "oracle"),
];

#[derive(Default)]
struct Verdict {
    ms: u128,
    cases: usize,
    problems: Vec<String>,
}

impl Verdict {
    fn fail(&mut self, msg: String) {
        self.problems.push(msg);
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.problems.push(msg());
        }
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn fold(verdicts: &mut BTreeMap<&'static str, Verdict>, s: &Scenario, r: &CheckReport) {
    let table = matches!(s.model, Model::Table(_));
    for res in &r.results {
        let v = verdicts.get_mut(CRITERIA.iter().find(|c| c.1 == res.id).unwrap().1).unwrap();
        v.ms += res.elapsed_ms;
        v.cases += res.cases;
        match &res.status {
            Status::Pass => {}
            Status::Fail => v.fail(format!("{}: {}", s.name, res.witnesses.join("; "))),
            Status::Skipped { reason } if !table => v.fail(format!("{}: skipped on a point model: {reason}", s.name)),
            Status::Skipped { .. } => {}
        }
    }
}

fn timed(v: &mut Verdict, f: impl FnOnce(&mut Verdict)) {
    let start = Instant::now();
    f(v);
    v.ms += start.elapsed().as_millis();
}

/// The two-point fiber: `ℱ(I, ∅)` for `X ×_S Y` with two points has
/// homology `ℤ²` in degree 0 and nothing else.
fn two_point_fiber(v: &mut Verdict) {
    let text = r#"{"model": "point", "base": {"S": ["s"], "Sbar": []},
        "varieties": [{"name": "X", "points": [{"label": "p", "toS": "s"}], "bar_points": [], "dim": 0},
                      {"name": "Y", "points": [{"label": "a", "toS": "s"}, {"label": "b", "toS": "s"}], "bar_points": [], "dim": 0}],
        "sequence": ["X", "Y"]}"#;
    let s = match parse_scenario(text, "two-point fiber") {
        Ok(s) => s,
        Err(e) => return v.fail(format!("two-point fiber: {e}")),
    };
    let Model::Point(p) = &s.model else { unreachable!() };
    let fc = Fcal::new(&p.model);
    match fc.fcal(&p.vars, &[]) {
        Ok(c) => {
            let h: Vec<_> = homology_all(c.complex()).into_iter().filter(|r| !r.is_zero()).collect();
            let ok = h.len() == 1 && h[0].degree == 0 && h[0].betti == 2 && h[0].torsion.is_empty();
            v.require(ok, || format!("two-point fiber: homology {h:?}"));
        }
        Err(e) => v.fail(format!("two-point fiber: {e}")),
    }
}

/// Fifty quasi-isomorphic cubes are acyclic after totalization; the same
/// cubes with the maps broken are not, at least once.
fn cubes(v: &mut Verdict) {
    let mut r = rng(0xacce);
    let mut caught = 0;
    for i in 0..CUBES {
        let t = 1 + i % 3;
        let good = RandomCube::generate(&mut r, t, 24, false);
        match good.total() {
            Ok(c) => v.require(is_acyclic(&c), || format!("cube {i}: Tot is not acyclic")),
            Err(e) => v.fail(format!("cube {i}: {e}")),
        }
        let bad = RandomCube::generate(&mut r, t, 24, true);
        if bad.total().map(|c| !is_acyclic(&c)).unwrap_or(false) {
            caught += 1;
        }
    }
    v.require(caught > 0, || "no broken cube was detected".into());
}

fn n5_sigma(v: &mut Verdict) {
    let sel = select("sigma-exact").unwrap();
    for seed in 0..FIVE_SEEDS {
        match gen_scenario(5, Sizes::default(), seed) {
            Ok(s) => {
                let r = run_checks(&s, &sel);
                let res = &r.results[0];
                v.cases += res.cases;
                if res.status != Status::Pass {
                    v.fail(format!("{}: {:?} {}", s.name, res.status, res.witnesses.join("; ")));
                }
            }
            Err(e) => v.fail(format!("n = 5, seed {seed}: {e}")),
        }
    }
}

/// The validator accepts the shipped tables and rejects the broken one; on
/// the sample table `⊗̂` is a proper subcomplex whose inclusion is a
/// quasi-isomorphism.
fn tables(v: &mut Verdict) {
    match load_scenario(&fixture("table_broken.json")).err() {
        Some(LoadError::Invalid { problems, .. }) if problems.iter().any(|p| p.contains("boundary closure")) => {
            v.cases += 1
        }
        Some(e) => v.fail(format!("table_broken.json: wrong rejection: {e}")),
        None => v.fail("table_broken.json: accepted".into()),
    }
    let s = match load_scenario(&fixture("table_sample.json")) {
        Ok(s) => s,
        Err(e) => return v.fail(format!("table_sample.json: {e}")),
    };
    let Model::Table(m) = &s.model else { return v.fail("table_sample.json: not a table model".into()) };
    match restricted_tensor(m, &[(0, 0), (1, 1)]) {
        Ok((hat, full)) => {
            v.require(hat.len() < full.len(), || format!("⊗̂ has {} of {} generators", hat.len(), full.len()));
            let inc = ChainMap::from_fn(Arc::new(hat), Arc::new(full), 0, |g| vec![(g.clone(), 1)]);
            match inc.and_then(|f| is_quasi_iso(&f)) {
                Ok(ok) => v.require(ok, || "⊗̂ → ⊗ is not a quasi-isomorphism".into()),
                Err(e) => v.fail(format!("⊗̂ → ⊗: {e}")),
            }
        }
        Err(e) => v.fail(format!("restricted tensor: {e}")),
    }
}

fn main() {
    let start = Instant::now();
    let mut verdicts: BTreeMap<&'static str, Verdict> = CRITERIA.iter().map(|c| (c.1, Verdict::default())).collect();
    let all = select("all").unwrap();

    let mut corpus = Vec::new();
    for f in ["point_n3.json", "point_n4.json", "table_sample.json"] {
        match load_scenario(&fixture(f)) {
            Ok(s) => corpus.push(s),
            Err(e) => verdicts.get_mut("dd").unwrap().fail(format!("{f}: {e}")),
        }
    }
    for n in [3, 4] {
        for seed in 0..SEEDS {
            match gen_scenario(n, Sizes::default(), seed) {
                Ok(s) => corpus.push(s),
                Err(e) => verdicts.get_mut("dd").unwrap().fail(format!("n = {n}, seed {seed}: {e}")),
            }
        }
    }
    for s in &corpus {
        fold(&mut verdicts, s, &run_checks(s, &all));
    }

    timed(verdicts.get_mut("iota").unwrap(), two_point_fiber);
    timed(verdicts.get_mut("tot-acyclic").unwrap(), cubes);
    timed(verdicts.get_mut("sigma-exact").unwrap(), n5_sigma);
    timed(verdicts.get_mut("distinguished").unwrap(), tables);

    let mut failed = false;
    for (_, id) in CRITERIA {
        let def = CHECKS.iter().find(|c| c.id == id).unwrap();
        let v = &verdicts[id];
        let ok = v.problems.is_empty() && v.cases > 0;
        failed |= !ok;
        println!("{} {} {} {}", if ok { "PASS" } else { "FAIL" }, id, def.anchor, v.ms);
        if v.cases == 0 {
            eprintln!("  {id}: no cases ran");
        }
        for p in v.problems.iter().take(5) {
            eprintln!("  {id}: {p}");
        }
    }
    eprintln!("{} scenarios in {} ms", corpus.len(), start.elapsed().as_millis());
    if failed {
        std::process::exit(1);
    }
}
