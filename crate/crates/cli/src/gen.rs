//! Seeded random point scenarios.

use rand::Rng;
use relcx_core::geomodel::{BaseSpec, PointSpec, VarietySpec};
use relcx_core::{Error, Result};

use crate::randalg::rng;
use crate::scenario::{build, CheckSelection, ModelKind, Scenario, ScenarioFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sizes {
    /// Upper bound on the points of each `X̄_i`, boundary included.
    pub points: usize,
    /// Upper bound on `|S|`.
    pub base: usize,
    /// Upper bound on `|S̄ − S|`.
    pub boundary: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes { points: 3, base: 2, boundary: 1 }
    }
}

/// `n` varieties `X1, …, Xn` over a random base. Each point picks open or
/// boundary and then its image uniformly.
pub fn gen_scenario(n: usize, sizes: Sizes, seed: u64) -> Result<Scenario> {
    if !(2..=5).contains(&n) {
        return Err(Error::invalid(format!("n = {n} is outside [2, 5]")));
    }
    if sizes.points == 0 || sizes.points > 5 {
        return Err(Error::invalid(format!("{} points per variety is outside [1, 5]", sizes.points)));
    }
    if sizes.base == 0 || sizes.base > 3 {
        return Err(Error::invalid(format!("|S| ≤ {} is outside [1, 3]", sizes.base)));
    }
    if sizes.boundary > 2 {
        return Err(Error::invalid(format!("|S̄ − S| ≤ {} is larger than 2", sizes.boundary)));
    }
    let mut r = rng(seed);
    let s: Vec<String> = (0..r.gen_range(1..=sizes.base)).map(|i| format!("s{i}")).collect();
    let sbar: Vec<String> = (0..r.gen_range(0..=sizes.boundary)).map(|i| format!("b{i}")).collect();
    let mut varieties = Vec::new();
    for i in 1..=n {
        let count = r.gen_range(1..=sizes.points);
        let (mut points, mut bar_points) = (Vec::new(), Vec::new());
        for k in 0..count {
            if !sbar.is_empty() && r.gen_bool(0.3) {
                let to_s = sbar[r.gen_range(0..sbar.len())].clone();
                bar_points.push(PointSpec { label: format!("e{k}"), to_s });
            } else {
                let to_s = s[r.gen_range(0..s.len())].clone();
                points.push(PointSpec { label: format!("p{k}"), to_s });
            }
        }
        varieties.push(VarietySpec { name: format!("X{i}"), points, bar_points, dim: r.gen_range(0..=2) });
    }
    let file = ScenarioFile {
        model: ModelKind::Point,
        base: Some(BaseSpec { s, sbar }),
        varieties,
        sequence: None,
        n: Some(n),
        dims_a: None,
        checks: CheckSelection::default(),
        seed: Some(seed),
        complexes: Vec::new(),
        proper: Vec::new(),
        products: Vec::new(),
        maps: Vec::new(),
        compositions: Vec::new(),
        opens: Vec::new(),
    };
    build(file, &format!("gen-n{n}-seed{seed}")).map_err(|es| Error::invariant(format!("generated scenario is invalid: {es:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = gen_scenario(3, Sizes::default(), 0).unwrap().to_json();
        let b = gen_scenario(3, Sizes::default(), 0).unwrap().to_json();
        assert_eq!(a, b);
        assert_ne!(a, gen_scenario(3, Sizes::default(), 1).unwrap().to_json());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(gen_scenario(1, Sizes::default(), 0).is_err());
        assert!(gen_scenario(6, Sizes::default(), 0).is_err());
        assert!(gen_scenario(3, Sizes { points: 6, ..Sizes::default() }, 0).is_err());
        assert!(gen_scenario(3, Sizes { base: 4, ..Sizes::default() }, 0).is_err());
    }

    #[test]
    fn round_trips_through_the_loader() {
        let s = gen_scenario(4, Sizes::default(), 9).unwrap();
        let back = crate::scenario::parse_scenario(&s.to_json(), "x").unwrap();
        assert_eq!(back.file, s.file);
    }
}
