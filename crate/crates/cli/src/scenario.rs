//! Scenario files: schema, loading and validation.

use std::path::Path;

use relcx_core::funcx::VarietySequence;
use relcx_core::geomodel::{
    BaseSpec, ComplexSpec, CompositionSpec, MapSpec, OpenSpec, PointModel, ProductSpec, TableModel, TableSpec,
    VarietySpec,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Point,
    Table,
}

/// Named subsets for the checks. Positions are 1-based along the sequence;
/// an absent list means every admissible choice.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSelection {
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<Vec<usize>>>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<Vec<usize>>>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<Vec<usize>>>,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<Vec<usize>>>,
    /// `[λ(1), …, λ(m)]`, order-preserving onto `[1, n′]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surjections: Option<Vec<Vec<usize>>>,
    /// Consecutive 1-based blocks for the restricted tensor checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<(usize, usize)>>>,
}

/// The file as written. Point scenarios use `base`, `varieties`,
/// `sequence` and `dims_a`; table scenarios use `n` and the table sections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub varieties: Vec<VarietySpec>,
    /// Variety names along the sequence; defaults to `varieties` in order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims_a: Option<Vec<i64>>,
    #[serde(default)]
    pub checks: CheckSelection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub complexes: Vec<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub proper: Vec<Vec<(usize, usize, String)>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub products: Vec<ProductSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compositions: Vec<CompositionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub opens: Vec<OpenSpec>,
}

pub struct PointScenario {
    pub model: PointModel,
    /// Variety indices along the sequence.
    pub vars: Vec<usize>,
    pub dims_a: Vec<i64>,
}

pub enum Model {
    Point(PointScenario),
    Table(TableModel),
}

/// Selections converted to 0-based positions.
#[derive(Clone, Debug, Default)]
pub struct Selection {
    pub s: Option<Vec<Vec<usize>>>,
    pub k: Option<Vec<Vec<usize>>>,
    pub r: Option<Vec<Vec<usize>>>,
    pub j: Option<Vec<Vec<usize>>>,
    pub surjections: Option<Vec<Vec<usize>>>,
    pub blocks: Option<Vec<Vec<(usize, usize)>>>,
}

pub struct Scenario {
    pub name: String,
    pub file: ScenarioFile,
    pub model: Model,
    pub n: usize,
    pub selection: Selection,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: cannot read: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}:{line}:{column}: {msg}")]
    Schema { path: String, line: usize, column: usize, msg: String },
    #[error("{path}: {} problem(s)\n  {}", problems.len(), problems.join("\n  "))]
    Invalid { path: String, problems: Vec<String> },
}

pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io { path: name.clone(), msg: e.to_string() })?;
    parse_scenario(&text, &name)
}

pub fn parse_scenario(text: &str, name: &str) -> Result<Scenario, LoadError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| LoadError::Schema {
        path: name.into(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    build(file, name).map_err(|problems| LoadError::Invalid { path: name.into(), problems })
}

/// Validates everything and collects every problem.
pub fn build(file: ScenarioFile, name: &str) -> Result<Scenario, Vec<String>> {
    let mut errs = Vec::new();
    let (model, n) = match file.model {
        ModelKind::Point => match point(&file, &mut errs) {
            Some(p) => {
                let n = p.vars.len();
                (Some(Model::Point(p)), n)
            }
            None => (None, 0),
        },
        ModelKind::Table => table(&file, &mut errs),
    };
    let selection = selection(&file.checks, n, file.model, &mut errs);
    match model {
        Some(model) if errs.is_empty() => {
            let seed = file.seed.unwrap_or(0);
            Ok(Scenario { name: name.into(), file, model, n, selection, seed })
        }
        _ => Err(errs),
    }
}

fn point(file: &ScenarioFile, errs: &mut Vec<String>) -> Option<PointScenario> {
    for (field, present) in [
        ("complexes", !file.complexes.is_empty()),
        ("proper", !file.proper.is_empty()),
        ("products", !file.products.is_empty()),
        ("maps", !file.maps.is_empty()),
        ("compositions", !file.compositions.is_empty()),
        ("opens", !file.opens.is_empty()),
    ] {
        if present {
            errs.push(format!("{field}: only table scenarios take this section"));
        }
    }
    let Some(base) = &file.base else {
        errs.push("base: required for a point scenario".into());
        return None;
    };
    let model = match PointModel::from_spec(base, &file.varieties) {
        Ok(m) => Some(m),
        Err(es) => {
            errs.extend(es.into_iter().map(|e| format!("varieties: {e}")));
            None
        }
    };
    let names: Vec<&str> = match &file.sequence {
        Some(seq) => seq.iter().map(|s| s.as_str()).collect(),
        None => file.varieties.iter().map(|v| v.name.as_str()).collect(),
    };
    let mut vars = Vec::with_capacity(names.len());
    for (i, nm) in names.iter().enumerate() {
        match file.varieties.iter().position(|v| v.name == *nm) {
            Some(k) => vars.push(k),
            None => errs.push(format!("sequence[{i}]: no variety named {nm:?}")),
        }
    }
    if names.len() < 2 || names.len() > 5 {
        errs.push(format!("sequence: length {} is outside [2, 5]", names.len()));
    }
    if let Some(n) = file.n {
        if n != names.len() {
            errs.push(format!("n: {n} disagrees with a sequence of length {}", names.len()));
        }
    }
    let model = model?;
    if vars.len() != names.len() || !errs.is_empty() {
        return None;
    }
    let dims_a = match &file.dims_a {
        Some(a) => a.clone(),
        None => vars[1..].iter().map(|&i| model.variety(i).dim).collect(),
    };
    if let Err(e) = VarietySequence::new(&model, vars.clone(), dims_a.clone()) {
        errs.push(format!("dims_a: {e}"));
        return None;
    }
    Some(PointScenario { model, vars, dims_a })
}

fn table(file: &ScenarioFile, errs: &mut Vec<String>) -> (Option<Model>, usize) {
    for (field, present) in [
        ("base", file.base.is_some()),
        ("varieties", !file.varieties.is_empty()),
        ("sequence", file.sequence.is_some()),
        ("dims_a", file.dims_a.is_some()),
    ] {
        if present {
            errs.push(format!("{field}: only point scenarios take this field"));
        }
    }
    let Some(n) = file.n else {
        errs.push("n: required for a table scenario".into());
        return (None, 0);
    };
    let spec = TableSpec {
        n,
        complexes: file.complexes.clone(),
        proper: file.proper.clone(),
        products: file.products.clone(),
        maps: file.maps.clone(),
        compositions: file.compositions.clone(),
        opens: file.opens.clone(),
    };
    match TableModel::from_spec(&spec) {
        Ok(m) => (Some(Model::Table(m)), n),
        Err(es) => {
            errs.extend(es);
            (None, n)
        }
    }
}

fn selection(c: &CheckSelection, n: usize, kind: ModelKind, errs: &mut Vec<String>) -> Selection {
    let mut sets = |name: &str, lists: &Option<Vec<Vec<usize>>>, nonempty: bool| -> Option<Vec<Vec<usize>>> {
        let lists = lists.as_ref()?;
        let mut out = Vec::new();
        for (i, set) in lists.iter().enumerate() {
            if kind == ModelKind::Table {
                errs.push(format!("checks.{name}[{i}]: subsets apply to point scenarios"));
                continue;
            }
            if nonempty && set.is_empty() {
                errs.push(format!("checks.{name}[{i}]: must be non-empty"));
            }
            if set.windows(2).any(|w| w[0] >= w[1]) {
                errs.push(format!("checks.{name}[{i}]: {set:?} is not strictly increasing"));
            }
            if let Some(p) = set.iter().find(|&&p| p < 2 || p + 1 > n) {
                errs.push(format!("checks.{name}[{i}]: position {p} is not interior to [1, {n}]"));
            }
            out.push(set.iter().map(|p| p.saturating_sub(1)).collect());
        }
        Some(out)
    };
    let s = sets("S", &c.s, false);
    let k = sets("K", &c.k, false);
    let r = sets("R", &c.r, false);
    let j = sets("J", &c.j, true);
    let surjections = c.surjections.as_ref().map(|ls| {
        let mut out = Vec::new();
        for (i, l) in ls.iter().enumerate() {
            let ok = l.len() >= 2
                && l[0] == 1
                && l.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1)
                && *l.last().unwrap() >= 2;
            if !ok {
                errs.push(format!("checks.surjections[{i}]: {l:?} is not an order-preserving surjection onto [1, m] with m ≥ 2"));
            } else if l.len() > 5 {
                errs.push(format!("checks.surjections[{i}]: source longer than 5"));
            }
            out.push(l.iter().map(|x| x.saturating_sub(1)).collect());
        }
        out
    });
    let blocks = c.blocks.as_ref().map(|ls| {
        let mut out = Vec::new();
        for (i, bl) in ls.iter().enumerate() {
            let ok = !bl.is_empty()
                && bl.iter().all(|&(a, b)| a >= 1 && a <= b && b <= n)
                && bl.windows(2).all(|w| w[1].0 == w[0].1 + 1);
            if !ok {
                errs.push(format!("checks.blocks[{i}]: {bl:?} are not consecutive blocks inside [1, {n}]"));
            }
            out.push(bl.iter().map(|&(a, b)| (a.saturating_sub(1), b.saturating_sub(1))).collect());
        }
        out
    });
    Selection { s, k, r, j, surjections, blocks }
}

impl Scenario {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.file).expect("scenario serializes");
        s.push('\n');
        s
    }
}
