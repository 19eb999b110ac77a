//! Finite geometry models.
//!
//! [`PointModel`] realizes varieties as finite sets over a finite base, every
//! cycle complex being `ℤ[points]` in degree 0. [`TableModel`] takes cycle
//! complexes, properness and intersection products from explicit tables.
//! Both are seen through [`GeometryModel`], a sequence of fiberings indexed by
//! positions `0..len()` whose blocks `[lo, hi]` stand for the fiber products
//! `M_lo ⋄ … ⋄ M_hi`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homalg::{collect_terms, ChainMap, FreeComplex, Gid, SparseMat, Terms};

/// A generator of `Z(M_[lo, hi])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Part {
    pub lo: usize,
    pub hi: usize,
    pub gen: Gid,
}

impl Part {
    pub fn new(lo: usize, hi: usize, gen: Gid) -> Self {
        Part { lo, hi, gen }
    }

    pub fn block(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }
}

/// Splits a tuple with disjoint increasing blocks into maximal runs of
/// adjacent blocks.
pub fn runs(tuple: &[Part]) -> Vec<&[Part]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=tuple.len() {
        if i == tuple.len() || tuple[i].lo != tuple[i - 1].hi + 1 {
            if i > start {
                out.push(&tuple[start..i]);
            }
            start = i;
        }
    }
    out
}

fn check_blocks(tuple: &[Part], len: usize) -> Result<()> {
    for (i, p) in tuple.iter().enumerate() {
        if p.lo > p.hi || p.hi >= len {
            return Err(Error::invalid(format!("block [{}, {}] outside the sequence", p.lo, p.hi)));
        }
        if i > 0 && tuple[i - 1].hi >= p.lo {
            return Err(Error::invalid("tuple blocks must be disjoint and increasing"));
        }
    }
    Ok(())
}

/// A sequence of fiberings through its cycle complexes.
pub trait GeometryModel {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Z(M_[lo, hi])`.
    fn cycles(&self, lo: usize, hi: usize) -> Result<Arc<FreeComplex>>;

    /// Properness of a tuple over adjacent blocks.
    fn proper_run(&self, run: &[Part]) -> bool;

    /// Intersection product of a proper run of adjacent blocks, in
    /// `Z(M_[first.lo, last.hi])`.
    fn product(&self, run: &[Part]) -> Result<Terms>;

    /// Nominal dimension of `M_[lo, hi]`.
    fn dim(&self, lo: usize, hi: usize) -> i64;

    /// Properness of a tuple over disjoint increasing blocks: each maximal
    /// run of adjacent blocks must be proper.
    fn proper(&self, tuple: &[Part]) -> Result<bool> {
        check_blocks(tuple, self.len())?;
        Ok(runs(tuple).into_iter().all(|r| r.len() < 2 || self.proper_run(r)))
    }

    /// Properness of a tuple of elements: every choice of generators from
    /// the basis expansions must be proper. Zero entries are dropped.
    fn proper_elements(&self, tuple: &[((usize, usize), Terms)]) -> Result<bool> {
        let live: Vec<&((usize, usize), Terms)> = tuple.iter().filter(|(_, t)| !collect_terms(t.clone()).is_empty()).collect();
        let mut choices: Vec<Vec<Part>> = vec![Vec::new()];
        for ((lo, hi), t) in live {
            let gens: Vec<Gid> = collect_terms(t.clone()).into_iter().map(|(g, _)| g).collect();
            let mut next = Vec::with_capacity(choices.len() * gens.len());
            for c in &choices {
                for g in &gens {
                    let mut v = c.clone();
                    v.push(Part::new(*lo, *hi, g.clone()));
                    next.push(v);
                }
            }
            choices = next;
        }
        for c in choices {
            if !self.proper(&c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `ℤ[points]` in degree 0.
pub fn point_cycles(points: impl IntoIterator<Item = Gid>) -> Result<FreeComplex> {
    FreeComplex::discrete(points.into_iter().map(|g| (0, g)).collect())
}

/// Pushforward along a map of finite sets; points sent to `None` map to 0.
pub fn push_points(src: Arc<FreeComplex>, tgt: Arc<FreeComplex>, f: impl Fn(&Gid) -> Option<Gid>) -> Result<ChainMap> {
    ChainMap::from_fn(src, tgt, 0, |x| f(x).map(|y| vec![(y, 1)]).unwrap_or_default())
}

/// Pullback along `f: M → N` from `Z(N)` to `Z(M)`: `y ↦ Σ_{f(x) = y} x`.
pub fn pull_points(n: Arc<FreeComplex>, m: Arc<FreeComplex>, f: impl Fn(&Gid) -> Gid) -> Result<ChainMap> {
    let mut fibers: HashMap<Gid, Vec<Gid>> = HashMap::new();
    for (_, x) in m.gens() {
        fibers.entry(f(x)).or_default().push(x.clone());
    }
    for y in fibers.keys() {
        if !n.contains(y) {
            return Err(Error::invalid(format!("point {y:?} is not in the target")));
        }
    }
    ChainMap::from_fn(n, m, 0, |y| fibers.get(y).map(|v| v.iter().map(|x| (x.clone(), 1)).collect()).unwrap_or_default())
}

// ---------------------------------------------------------------------------
// Point model

/// A finite variety over the base: open points map to `S`, boundary points
/// of the compactification map to `S̄ − S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointVariety {
    pub name: String,
    pub labels: Vec<String>,
    /// Index into the compactified base, for every point (open points first).
    pub over: Vec<usize>,
    pub open: usize,
    pub dim: i64,
}

impl PointVariety {
    pub fn size(&self, compact: bool) -> usize {
        if compact {
            self.labels.len()
        } else {
            self.open
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointModel {
    /// Compactified base; the first `base_open` entries form `S`.
    pub base: Vec<String>,
    pub base_open: usize,
    pub varieties: Vec<PointVariety>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSpec {
    pub label: String,
    #[serde(rename = "toS")]
    pub to_s: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietySpec {
    pub name: String,
    #[serde(default)]
    pub points: Vec<PointSpec>,
    #[serde(default)]
    pub bar_points: Vec<PointSpec>,
    #[serde(default)]
    pub dim: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSpec {
    #[serde(rename = "S")]
    pub s: Vec<String>,
    #[serde(rename = "Sbar", default)]
    pub sbar: Vec<String>,
}

impl PointModel {
    /// Builds the model, collecting every violation. `sbar` may or may not
    /// repeat the elements of `S`.
    pub fn from_spec(base: &BaseSpec, varieties: &[VarietySpec]) -> std::result::Result<Self, Vec<String>> {
        let mut errs = Vec::new();
        let mut names: Vec<String> = Vec::new();
        for s in &base.s {
            if names.contains(s) {
                errs.push(format!("base: duplicate element {s}"));
            } else {
                names.push(s.clone());
            }
        }
        let base_open = names.len();
        for s in &base.sbar {
            if !names.contains(s) {
                names.push(s.clone());
            }
        }
        let mut vars = Vec::new();
        for v in varieties {
            let mut labels = Vec::new();
            let mut over = Vec::new();
            for (bar, list) in [(false, &v.points), (true, &v.bar_points)] {
                for p in list {
                    if labels.contains(&p.label) {
                        errs.push(format!("variety {}: duplicate point {}", v.name, p.label));
                    }
                    match names.iter().position(|s| *s == p.to_s) {
                        None => errs.push(format!("variety {}: point {} maps to unknown base element {}", v.name, p.label, p.to_s)),
                        Some(k) if !bar && k >= base_open => {
                            errs.push(format!("variety {}: point {} maps outside S", v.name, p.label))
                        }
                        Some(k) if bar && k < base_open => {
                            errs.push(format!("variety {}: boundary point {} maps into S", v.name, p.label))
                        }
                        Some(k) => over.push(k),
                    }
                    labels.push(p.label.clone());
                }
            }
            if over.len() == labels.len() {
                vars.push(PointVariety { name: v.name.clone(), labels, over, open: v.points.len(), dim: v.dim });
            }
        }
        if errs.is_empty() {
            Ok(PointModel { base: names, base_open, varieties: vars })
        } else {
            Err(errs)
        }
    }

    pub fn len(&self) -> usize {
        self.varieties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.varieties.is_empty()
    }

    pub fn variety(&self, i: usize) -> &PointVariety {
        &self.varieties[i]
    }

    /// Image in `S̄` of point `pt` of variety `i`.
    pub fn over(&self, i: usize, pt: usize) -> usize {
        self.varieties[i].over[pt]
    }

    /// Points of `∏ X′_f` for factors `(variety, compactified?)`, as
    /// coordinate lists in lexicographic order.
    pub fn product_points(&self, factors: &[(usize, bool)]) -> Vec<Vec<usize>> {
        let mut pts: Vec<Vec<usize>> = vec![Vec::new()];
        for &(i, c) in factors {
            let k = self.varieties[i].size(c);
            let mut next = Vec::with_capacity(pts.len() * k);
            for p in &pts {
                for x in 0..k {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
            pts = next;
        }
        pts
    }

    /// Whether the coordinates at `positions` of a point of `∏ X′_f` have a
    /// common image in `S̄`.
    pub fn same_image(&self, factors: &[(usize, bool)], point: &[usize], positions: &[usize]) -> bool {
        let mut it = positions.iter().map(|&k| self.over(factors[k].0, point[k]));
        match it.next() {
            None => true,
            Some(s) => it.all(|t| t == s),
        }
    }

    /// The constant sequence `M_i = X′_i` over `Y_i = S̄`.
    pub fn fibering(&self, factors: &[(usize, bool)]) -> PointFibering {
        let spaces = factors.iter().map(|&(i, c)| self.varieties[i].size(c)).collect();
        let maps: Vec<Vec<usize>> = factors.iter().map(|&(i, c)| self.varieties[i].over[..self.varieties[i].size(c)].to_vec()).collect();
        let k = factors.len();
        PointFibering {
            sizes: spaces,
            right: (0..k.saturating_sub(1)).map(|i| maps[i].clone()).collect(),
            left: (1..k).map(|i| maps[i].clone()).collect(),
        }
    }
}

/// Finite sets `M_i` with maps `M_i → Y_i ← M_{i+1}`; every map is smooth
/// and projective, so condition (*) holds trivially.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFibering {
    pub sizes: Vec<usize>,
    /// `right[i][x]`: image of `x ∈ M_i` in `Y_i`.
    pub right: Vec<Vec<usize>>,
    /// `left[i][x]`: image of `x ∈ M_{i+1}` in `Y_i`.
    pub left: Vec<Vec<usize>>,
}

impl PointFibering {
    pub fn new(sizes: Vec<usize>, right: Vec<Vec<usize>>, left: Vec<Vec<usize>>) -> Result<Self> {
        let n = sizes.len();
        if n == 0 || right.len() != n - 1 || left.len() != n - 1 {
            return Err(Error::invalid("fibering needs n spaces and n - 1 pairs of maps"));
        }
        for i in 0..n - 1 {
            if right[i].len() != sizes[i] || left[i].len() != sizes[i + 1] {
                return Err(Error::invalid(format!("maps at step {i} are not total")));
            }
        }
        Ok(PointFibering { sizes, right, left })
    }

    /// `M_[lo, hi]`: tuples agreeing under consecutive maps.
    pub fn fiber_space(&self, lo: usize, hi: usize) -> Result<Vec<Vec<usize>>> {
        if lo > hi || hi >= self.sizes.len() {
            return Err(Error::invalid(format!("[{lo}, {hi}] is not a sub-interval")));
        }
        let mut pts: Vec<Vec<usize>> = (0..self.sizes[lo]).map(|x| vec![x]).collect();
        for i in lo + 1..=hi {
            let mut next = Vec::new();
            for p in &pts {
                let y = self.right[i - 1][*p.last().unwrap()];
                for x in 0..self.sizes[i] {
                    if self.left[i - 1][x] == y {
                        let mut q = p.clone();
                        q.push(x);
                        next.push(q);
                    }
                }
            }
            pts = next;
        }
        Ok(pts)
    }

    /// The renumbered sequence `M′_a = M_{I_a}` for consecutive blocks.
    pub fn renumber(&self, blocks: &[(usize, usize)]) -> Result<(PointFibering, Vec<Vec<Vec<usize>>>)> {
        let spaces: Vec<Vec<Vec<usize>>> = blocks.iter().map(|&(a, b)| self.fiber_space(a, b)).collect::<Result<_>>()?;
        for w in blocks.windows(2) {
            if w[1].0 != w[0].1 + 1 {
                return Err(Error::invalid("blocks must be consecutive"));
            }
        }
        let right = (0..blocks.len().saturating_sub(1))
            .map(|a| spaces[a].iter().map(|p| self.right[blocks[a].1][*p.last().unwrap()]).collect())
            .collect();
        let left = (1..blocks.len())
            .map(|a| spaces[a].iter().map(|p| self.left[blocks[a].0 - 1][p[0]]).collect())
            .collect();
        let sizes = spaces.iter().map(|s| s.len()).collect();
        Ok((PointFibering { sizes, right, left }, spaces))
    }
}

fn point_gid(p: &[usize]) -> Gid {
    Gid::ns(&p.iter().map(|&x| x as i64).collect::<Vec<_>>())
}

fn point_of(g: &Gid) -> Vec<usize> {
    g.parts().iter().map(|x| x.num() as usize).collect()
}

impl GeometryModel for PointFibering {
    fn len(&self) -> usize {
        self.sizes.len()
    }

    fn cycles(&self, lo: usize, hi: usize) -> Result<Arc<FreeComplex>> {
        Ok(Arc::new(point_cycles(self.fiber_space(lo, hi)?.iter().map(|p| point_gid(p)))?))
    }

    fn proper_run(&self, _run: &[Part]) -> bool {
        true
    }

    /// The concatenated point when the seams agree, else zero.
    fn product(&self, run: &[Part]) -> Result<Terms> {
        check_blocks(run, self.len())?;
        let mut all: Vec<usize> = Vec::new();
        for (k, part) in run.iter().enumerate() {
            if k > 0 && part.lo != run[k - 1].hi + 1 {
                return Err(Error::invalid("product needs adjacent blocks"));
            }
            let p = point_of(&part.gen);
            if p.len() != part.hi - part.lo + 1 {
                return Err(Error::invalid(format!("{:?} is not a point of block [{}, {}]", part.gen, part.lo, part.hi)));
            }
            if k > 0 && self.right[part.lo - 1][*all.last().unwrap()] != self.left[part.lo - 1][p[0]] {
                return Ok(Vec::new());
            }
            all.extend(p);
        }
        Ok(vec![(point_gid(&all), 1)])
    }

    fn dim(&self, _lo: usize, _hi: usize) -> i64 {
        0
    }
}

// ---------------------------------------------------------------------------
// Table model

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub id: String,
    pub deg: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSpec {
    /// 1-based block `[lo, hi]`.
    pub block: (usize, usize),
    #[serde(default)]
    pub dim: i64,
    pub gens: Vec<GenSpec>,
    /// `(source, target, coefficient)` entries of the differential.
    #[serde(default)]
    pub d: Vec<(String, String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub tuple: Vec<(usize, usize, String)>,
    pub value: Vec<(String, i64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Pullback,
    Pushforward,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub name: String,
    pub kind: MapKind,
    /// Blocks of the complexes the matrix goes between.
    pub src: (usize, usize),
    pub tgt: (usize, usize),
    #[serde(default)]
    pub smooth: bool,
    #[serde(default)]
    pub projective: bool,
    /// `(source generator, target generator, coefficient)`.
    pub matrix: Vec<(String, String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionSpec {
    pub first: String,
    pub second: String,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenSpec {
    pub block: (usize, usize),
    pub name: String,
    /// Generators supported in the open set.
    pub gens: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSpec {
    pub n: usize,
    pub complexes: Vec<ComplexSpec>,
    #[serde(default)]
    pub proper: Vec<Vec<(usize, usize, String)>>,
    #[serde(default)]
    pub products: Vec<ProductSpec>,
    #[serde(default)]
    pub maps: Vec<MapSpec>,
    #[serde(default)]
    pub compositions: Vec<CompositionSpec>,
    #[serde(default)]
    pub opens: Vec<OpenSpec>,
}

struct Space {
    names: Vec<String>,
    complex: Arc<FreeComplex>,
    dim: i64,
}

pub struct TableModel {
    n: usize,
    spaces: BTreeMap<(usize, usize), Space>,
    proper: HashSet<Vec<Part>>,
    products: HashMap<Vec<Part>, Terms>,
    maps: BTreeMap<String, (MapSpec, ChainMap)>,
    opens: BTreeMap<((usize, usize), String), Vec<Gid>>,
}

impl std::fmt::Debug for TableModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TableModel(n = {}, {} spaces, {} proper tuples)", self.n, self.spaces.len(), self.proper.len())
    }
}

fn block0(b: (usize, usize)) -> Option<(usize, usize)> {
    (b.0 >= 1 && b.0 <= b.1).then(|| (b.0 - 1, b.1 - 1))
}

fn show_tuple(t: &[Part], model: &TableModel) -> String {
    let items: Vec<String> = t.iter().map(|p| format!("[{},{}]:{}", p.lo + 1, p.hi + 1, model.name(p))).collect();
    format!("({})", items.join(", "))
}

/// All ways to cut `0..m` into at least two consecutive groups, excluding
/// the cut into singletons when `m > 2`.
fn groupings(m: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << (m - 1)) {
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 0..m - 1 {
            if mask >> i & 1 == 1 {
                groups.push((start, i));
                start = i + 1;
            }
        }
        groups.push((start, m - 1));
        if groups.len() < m {
            out.push(groups);
        }
    }
    out
}

impl TableModel {
    /// Loads and validates the tables; every violation is reported.
    pub fn from_spec(spec: &TableSpec) -> std::result::Result<Self, Vec<String>> {
        let mut errs = Vec::new();
        let model = Self::build(spec, &mut errs);
        if !errs.is_empty() {
            return Err(errs);
        }
        model.validate_laws(&mut errs);
        if errs.is_empty() {
            Ok(model)
        } else {
            Err(errs)
        }
    }

    fn build(spec: &TableSpec, errs: &mut Vec<String>) -> TableModel {
        let mut spaces = BTreeMap::new();
        for c in &spec.complexes {
            let Some(b) = block0(c.block).filter(|b| b.1 < spec.n) else {
                errs.push(format!("complex {:?}: block outside [1, {}]", c.block, spec.n));
                continue;
            };
            if spaces.contains_key(&b) {
                errs.push(format!("complex {:?}: declared twice", c.block));
                continue;
            }
            let mut names = Vec::new();
            let mut gens = Vec::new();
            for (k, g) in c.gens.iter().enumerate() {
                if names.contains(&g.id) {
                    errs.push(format!("complex {:?}: duplicate generator {}", c.block, g.id));
                }
                names.push(g.id.clone());
                gens.push((g.deg, Gid::N(k as i64)));
            }
            let find = |s: &str| names.iter().position(|x| x == s);
            let mut dmap: HashMap<i64, Terms> = HashMap::new();
            let mut ok = true;
            for (k, (a, b2, v)) in c.d.iter().enumerate() {
                match (find(a), find(b2)) {
                    (Some(i), Some(j)) => dmap.entry(i as i64).or_default().push((Gid::N(j as i64), *v)),
                    _ => {
                        errs.push(format!("complex {:?}: differential entry {k} ({a} -> {b2}) names an unknown generator", c.block));
                        ok = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            match FreeComplex::from_fn(gens, |g| dmap.get(&g.num()).cloned().unwrap_or_default()) {
                Ok(fc) => {
                    spaces.insert(b, Space { names, complex: Arc::new(fc), dim: c.dim });
                }
                Err(e) => errs.push(format!("complex {:?}: {e}", c.block)),
            }
        }
        let mut model = TableModel {
            n: spec.n,
            spaces,
            proper: HashSet::new(),
            products: HashMap::new(),
            maps: BTreeMap::new(),
            opens: BTreeMap::new(),
        };
        for (k, t) in spec.proper.iter().enumerate() {
            match model.parse_tuple(t) {
                Ok(p) => {
                    model.proper.insert(p);
                }
                Err(e) => errs.push(format!("proper tuple {k}: {e}")),
            }
        }
        for (k, pr) in spec.products.iter().enumerate() {
            let t = match model.parse_tuple(&pr.tuple) {
                Ok(t) => t,
                Err(e) => {
                    errs.push(format!("product {k}: {e}"));
                    continue;
                }
            };
            let span = (t[0].lo, t[t.len() - 1].hi);
            let Some(sp) = model.spaces.get(&span) else {
                errs.push(format!("product {k}: no complex declared for block [{}, {}]", span.0 + 1, span.1 + 1));
                continue;
            };
            let mut val = Vec::new();
            for (g, v) in &pr.value {
                match sp.names.iter().position(|x| x == g) {
                    Some(i) => val.push((Gid::N(i as i64), *v)),
                    None => errs.push(format!("product {k}: unknown generator {g} in the value")),
                }
            }
            if model.products.insert(t, collect_terms(val)).is_some() {
                errs.push(format!("product {k}: tuple listed twice"));
            }
        }
        for m in &spec.maps {
            let (Some(s), Some(t)) = (block0(m.src), block0(m.tgt)) else {
                errs.push(format!("map {}: bad block", m.name));
                continue;
            };
            let (Some(a), Some(b)) = (model.spaces.get(&s), model.spaces.get(&t)) else {
                errs.push(format!("map {}: source or target complex is not declared", m.name));
                continue;
            };
            match m.kind {
                MapKind::Pullback if !m.smooth => errs.push(format!("map {}: pullback along a map not flagged smooth", m.name)),
                MapKind::Pushforward if !m.projective => {
                    errs.push(format!("map {}: pushforward along a map not flagged projective", m.name))
                }
                _ => {}
            }
            let mut trip = Vec::new();
            for (k, (x, y, v)) in m.matrix.iter().enumerate() {
                match (a.names.iter().position(|q| q == x), b.names.iter().position(|q| q == y)) {
                    (Some(i), Some(j)) => trip.push((i, j, *v)),
                    _ => errs.push(format!("map {}: matrix entry {k} ({x} -> {y}) names an unknown generator", m.name)),
                }
            }
            let src = a.complex.clone();
            let tgt = b.complex.clone();
            let f = |g: &Gid| -> Terms {
                let i = g.num() as usize;
                trip.iter().filter(|e| e.0 == i).map(|e| (Gid::N(e.1 as i64), e.2)).collect()
            };
            match ChainMap::from_fn(src, tgt, 0, f) {
                Ok(cm) => {
                    if model.maps.insert(m.name.clone(), (m.clone(), cm)).is_some() {
                        errs.push(format!("map {}: declared twice", m.name));
                    }
                }
                Err(e) => errs.push(format!("map {}: {e}", m.name)),
            }
        }
        for c in &spec.compositions {
            match (model.maps.get(&c.first), model.maps.get(&c.second), model.maps.get(&c.result)) {
                (Some(f), Some(g), Some(h)) => match f.1.then(&g.1) {
                    Ok(gf) if gf.same_as(&h.1) => {
                        let kinds = f.0.kind == g.0.kind && g.0.kind == h.0.kind;
                        if !kinds {
                            errs.push(format!("composition {} then {}: kinds differ from {}", c.first, c.second, c.result));
                        }
                    }
                    Ok(_) => errs.push(format!("composition {} then {} differs from {}", c.first, c.second, c.result)),
                    Err(e) => errs.push(format!("composition {} then {}: {e}", c.first, c.second)),
                },
                _ => errs.push(format!("composition {} then {} = {}: unknown map", c.first, c.second, c.result)),
            }
        }
        for o in &spec.opens {
            let Some(b) = block0(o.block) else {
                errs.push(format!("open {}: bad block", o.name));
                continue;
            };
            let Some(sp) = model.spaces.get(&b) else {
                errs.push(format!("open {}: complex not declared", o.name));
                continue;
            };
            let mut gens = Vec::new();
            for g in &o.gens {
                match sp.names.iter().position(|x| x == g) {
                    Some(i) => gens.push(Gid::N(i as i64)),
                    None => errs.push(format!("open {}: unknown generator {g}", o.name)),
                }
            }
            let keep: HashSet<&Gid> = gens.iter().collect();
            if let Err(e) = sp.complex.quotient(|g| keep.contains(g)) {
                errs.push(format!("open {}: restriction is not a chain map ({e})", o.name));
            }
            model.opens.insert((b, o.name.clone()), gens);
        }
        model
    }

    fn parse_tuple(&self, t: &[(usize, usize, String)]) -> Result<Vec<Part>> {
        let mut out = Vec::new();
        for (lo, hi, g) in t {
            let b = block0((*lo, *hi)).ok_or_else(|| Error::invalid(format!("bad block [{lo}, {hi}]")))?;
            let sp = self.spaces.get(&b).ok_or_else(|| Error::invalid(format!("no complex for block [{lo}, {hi}]")))?;
            let i = sp.names.iter().position(|x| x == g).ok_or_else(|| Error::invalid(format!("unknown generator {g}")))?;
            out.push(Part::new(b.0, b.1, Gid::N(i as i64)));
        }
        check_blocks(&out, self.n)?;
        if out.is_empty() {
            return Err(Error::invalid("empty tuple"));
        }
        Ok(out)
    }

    /// Generator name of a part.
    pub fn name(&self, p: &Part) -> String {
        self.spaces
            .get(&p.block())
            .and_then(|s| s.names.get(p.gen.num() as usize).cloned())
            .unwrap_or_else(|| format!("{:?}", p.gen))
    }

    pub fn declared_proper(&self) -> impl Iterator<Item = &Vec<Part>> {
        self.proper.iter()
    }

    pub fn map(&self, name: &str) -> Option<&ChainMap> {
        self.maps.get(name).map(|m| &m.1)
    }

    pub fn open(&self, block: (usize, usize), name: &str) -> Option<&[Gid]> {
        self.opens.get(&(block, name.to_string())).map(|v| v.as_slice())
    }

    fn is_proper_tuple(&self, t: &[Part]) -> bool {
        runs(t).into_iter().all(|r| r.len() < 2 || self.proper.contains(r))
    }

    fn degree(&self, p: &Part) -> i64 {
        self.spaces[&p.block()].complex.deg_of(&p.gen).expect("declared generator")
    }

    /// Boundary closure, sub-tuple closure, products as chain maps,
    /// grouping closure and associativity.
    fn validate_laws(&self, errs: &mut Vec<String>) {
        let mut tuples: Vec<&Vec<Part>> = self.proper.iter().collect();
        tuples.sort();
        for t in &tuples {
            if t.len() < 2 {
                continue;
            }
            for (i, p) in t.iter().enumerate() {
                for (h, _) in self.spaces[&p.block()].complex.d_of(&p.gen) {
                    let mut u = t.to_vec();
                    u[i].gen = h;
                    if !self.is_proper_tuple(&u) {
                        errs.push(format!(
                            "boundary closure: {} is proper but {} is not",
                            show_tuple(t, self),
                            show_tuple(&u, self)
                        ));
                    }
                }
            }
            let m = t.len();
            for mask in 1u64..(1u64 << m) - 1 {
                let sub: Vec<Part> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| t[i].clone()).collect();
                if sub.len() >= 2 && !self.is_proper_tuple(&sub) {
                    errs.push(format!("sub-tuple closure: {} is proper but {} is not", show_tuple(t, self), show_tuple(&sub, self)));
                }
            }
        }
        for t in tuples.iter().filter(|t| t.len() >= 2 && runs(t).len() == 1) {
            let span = (t[0].lo, t[t.len() - 1].hi);
            let Some(target) = self.spaces.get(&span) else {
                errs.push(format!("product of {} lands in block [{}, {}], which has no complex", show_tuple(t, self), span.0 + 1, span.1 + 1));
                continue;
            };
            let value = self.products.get(*t).cloned().unwrap_or_default();
            let lhs = collect_terms(value.iter().flat_map(|(g, v)| target.complex.d_of(g).into_iter().map(move |(h, w)| (h, v * w))));
            let mut rhs = Vec::new();
            let degs: Vec<i64> = t.iter().map(|p| self.degree(p)).collect();
            for (i, p) in t.iter().enumerate() {
                let after: i64 = degs[i + 1..].iter().sum();
                let s = if after.rem_euclid(2) == 0 { 1 } else { -1 };
                for (h, w) in self.spaces[&p.block()].complex.d_of(&p.gen) {
                    let mut u = t.to_vec();
                    u[i].gen = h;
                    if self.proper.contains(&u) {
                        rhs.extend(self.products.get(&u).cloned().unwrap_or_default().into_iter().map(|(g, v)| (g, s * w * v)));
                    }
                }
            }
            if lhs != collect_terms(rhs) {
                errs.push(format!("product on {} does not commute with the differential", show_tuple(t, self)));
            }
            if t.len() >= 3 {
                self.check_groupings(t, &value, errs);
            }
        }
        for (t, v) in &self.products {
            if !self.proper.contains(t) && !v.is_empty() {
                errs.push(format!("product given for {}, which is not proper", show_tuple(t, self)));
            }
        }
    }

    fn check_groupings(&self, t: &[Part], value: &Terms, errs: &mut Vec<String>) {
        for groups in groupings(t.len()) {
            let mut partial: Vec<Vec<(Part, i64)>> = Vec::new();
            let mut ok = true;
            for &(a, b) in &groups {
                if a == b {
                    partial.push(vec![(t[a].clone(), 1)]);
                    continue;
                }
                let sub = &t[a..=b];
                if !self.proper.contains(sub) {
                    ok = false;
                    break;
                }
                let v = self.products.get(sub).cloned().unwrap_or_default();
                partial.push(v.into_iter().map(|(g, c)| (Part::new(sub[0].lo, sub[sub.len() - 1].hi, g), c)).collect());
            }
            if !ok {
                continue;
            }
            let mut combos: Vec<(Vec<Part>, i64)> = vec![(Vec::new(), 1)];
            for choices in &partial {
                let mut next = Vec::new();
                for (c, k) in &combos {
                    for (p, v) in choices {
                        let mut d = c.clone();
                        d.push(p.clone());
                        next.push((d, k * v));
                    }
                }
                combos = next;
            }
            let mut total = Vec::new();
            for (c, k) in combos {
                if !self.proper.contains(&c) {
                    errs.push(format!("grouping of {}: {} is not proper", show_tuple(t, self), show_tuple(&c, self)));
                    continue;
                }
                total.extend(self.products.get(&c).cloned().unwrap_or_default().into_iter().map(|(g, v)| (g, k * v)));
            }
            if collect_terms(total) != *value {
                errs.push(format!("associativity fails on {} for grouping {:?}", show_tuple(t, self), groups));
            }
        }
    }

    /// Whether the restriction-to-open of this table reproduces a declared
    /// complex; exposes the open as a keep-predicate.
    pub fn restriction(&self, block: (usize, usize), name: &str) -> Result<ChainMap> {
        let gens = self.open(block, name).ok_or_else(|| Error::invalid(format!("unknown open {name}")))?;
        let keep: HashSet<&Gid> = gens.iter().collect();
        let src = self.cycles(block.0, block.1)?;
        let tgt = Arc::new(src.quotient(|g| keep.contains(g))?);
        ChainMap::from_fn(src, tgt, 0, |g| if keep.contains(g) { vec![(g.clone(), 1)] } else { Vec::new() })
    }

    /// Pushforward/pullback matrix of a declared map, as a plain matrix.
    pub fn map_matrix(&self, name: &str) -> Option<&SparseMat> {
        self.map(name).map(|m| m.matrix())
    }
}

impl GeometryModel for TableModel {
    fn len(&self) -> usize {
        self.n
    }

    fn cycles(&self, lo: usize, hi: usize) -> Result<Arc<FreeComplex>> {
        self.spaces
            .get(&(lo, hi))
            .map(|s| s.complex.clone())
            .ok_or_else(|| Error::invalid(format!("no complex declared for block [{}, {}]", lo + 1, hi + 1)))
    }

    fn proper_run(&self, run: &[Part]) -> bool {
        self.proper.contains(run)
    }

    fn product(&self, run: &[Part]) -> Result<Terms> {
        check_blocks(run, self.n)?;
        if run.len() == 1 {
            return Ok(vec![(run[0].gen.clone(), 1)]);
        }
        if runs(run).len() != 1 {
            return Err(Error::invalid("product needs adjacent blocks"));
        }
        if !self.proper.contains(run) {
            return Err(Error::invalid(format!("product requested for improper tuple {}", show_tuple(run, self))));
        }
        Ok(self.products.get(run).cloned().unwrap_or_default())
    }

    fn dim(&self, lo: usize, hi: usize) -> i64 {
        self.spaces.get(&(lo, hi)).map_or(0, |s| s.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pspec(label: &str, s: &str) -> PointSpec {
        PointSpec { label: label.into(), to_s: s.into() }
    }

    fn two_point_model() -> PointModel {
        let base = BaseSpec { s: vec!["s".into(), "t".into()], sbar: vec!["s".into(), "t".into(), "oo".into()] };
        let vars = vec![
            VarietySpec { name: "X1".into(), points: vec![pspec("a1", "s"), pspec("b1", "t")], bar_points: vec![pspec("c1", "oo")], dim: 0 },
            VarietySpec { name: "X2".into(), points: vec![pspec("a2", "s"), pspec("b2", "t")], bar_points: vec![], dim: 0 },
        ];
        PointModel::from_spec(&base, &vars).unwrap()
    }

    #[test]
    fn point_model_rejects_all_bad_maps() {
        let base = BaseSpec { s: vec!["s".into()], sbar: vec!["oo".into()] };
        let vars = vec![VarietySpec {
            name: "X".into(),
            points: vec![pspec("a", "oo"), pspec("b", "nowhere")],
            bar_points: vec![pspec("c", "s")],
            dim: 0,
        }];
        let errs = PointModel::from_spec(&base, &vars).unwrap_err();
        assert_eq!(errs.len(), 3, "{errs:?}");
    }

    #[test]
    fn fiber_over_a_point() {
        let f = PointFibering::new(vec![2, 1], vec![vec![0, 0]], vec![vec![0]]).unwrap();
        assert_eq!(f.fiber_space(0, 1).unwrap(), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(f.fiber_space(1, 1).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn renumbering_gives_the_same_points() {
        let m = two_point_model();
        let f = m.fibering(&[(0, true), (1, false), (0, false)]);
        let whole = f.fiber_space(0, 2).unwrap();
        let (g, spaces) = f.renumber(&[(0, 1), (2, 2)]).unwrap();
        let glued: Vec<Vec<usize>> =
            g.fiber_space(0, 1).unwrap().iter().map(|p| spaces[0][p[0]].iter().chain(&spaces[1][p[1]]).copied().collect()).collect();
        assert_eq!(whole, glued);
        assert_eq!(whole.len(), 2);
    }

    #[test]
    fn incompatible_product_is_zero() {
        let m = two_point_model();
        let f = m.fibering(&[(0, false), (1, false)]);
        let a = Part::new(0, 0, Gid::ns(&[0]));
        let b = Part::new(1, 1, Gid::ns(&[1]));
        assert!(f.product(&[a.clone(), b]).unwrap().is_empty());
        let c = Part::new(1, 1, Gid::ns(&[0]));
        assert_eq!(f.product(&[a.clone(), c.clone()]).unwrap(), vec![(Gid::ns(&[0, 0]), 1)]);
        assert!(f.proper(&[a, c]).unwrap());
    }

    #[test]
    fn projection_formula() {
        let n = Arc::new(point_cycles([Gid::N(0), Gid::N(1)]).unwrap());
        let m = Arc::new(point_cycles((0..5).map(Gid::N)).unwrap());
        let f = |g: &Gid| Gid::N(if g.num() < 3 { 0 } else { 1 });
        let pull = pull_points(n.clone(), m.clone(), f).unwrap();
        let push = push_points(m, n.clone(), |g| Some(f(g))).unwrap();
        let both = pull.then(&push).unwrap();
        assert_eq!(both.matrix().to_dense(), vec![vec![3, 0], vec![0, 2]]);
    }

    fn table(proper: Vec<Vec<(usize, usize, &str)>>) -> TableSpec {
        let g = |id: &str, deg| GenSpec { id: id.into(), deg };
        let own = |v: Vec<(usize, usize, &str)>| v.into_iter().map(|(a, b, s)| (a, b, s.to_string())).collect();
        TableSpec {
            n: 2,
            complexes: vec![
                ComplexSpec {
                    block: (1, 1),
                    dim: 0,
                    gens: vec![g("e", -1), g("a", 0), g("b", 0)],
                    d: vec![("e".into(), "a".into(), 1), ("e".into(), "b".into(), -1)],
                },
                ComplexSpec { block: (2, 2), dim: 0, gens: vec![g("x", 0)], d: vec![] },
                ComplexSpec { block: (1, 2), dim: 0, gens: vec![g("ax", 0), g("bx", 0)], d: vec![] },
            ],
            proper: proper.into_iter().map(own).collect(),
            products: vec![
                ProductSpec { tuple: own(vec![(1, 1, "a"), (2, 2, "x")]), value: vec![("ax".into(), 1)] },
                ProductSpec { tuple: own(vec![(1, 1, "b"), (2, 2, "x")]), value: vec![("bx".into(), 1)] },
            ],
            maps: vec![],
            compositions: vec![],
            opens: vec![],
        }
    }

    #[test]
    fn table_accepts_closed_properness() {
        let t = TableModel::from_spec(&table(vec![vec![(1, 1, "a"), (2, 2, "x")], vec![(1, 1, "b"), (2, 2, "x")]])).unwrap();
        let e = Part::new(0, 0, Gid::N(0));
        let x = Part::new(1, 1, Gid::N(0));
        assert!(!t.proper(&[e, x.clone()]).unwrap());
        assert!(t.proper(&[Part::new(0, 0, Gid::N(1)), x]).unwrap());
    }

    #[test]
    fn table_rejects_boundary_leak() {
        let spec = table(vec![vec![(1, 1, "e"), (2, 2, "x")], vec![(1, 1, "a"), (2, 2, "x")]]);
        let errs = TableModel::from_spec(&spec).unwrap_err();
        assert!(errs.iter().any(|e| e.starts_with("boundary closure")), "{errs:?}");
    }

    #[test]
    fn table_rejects_non_chain_product() {
        let mut spec = table(vec![vec![(1, 1, "e"), (2, 2, "x")], vec![(1, 1, "a"), (2, 2, "x")], vec![(1, 1, "b"), (2, 2, "x")]]);
        spec.products[0].value = vec![];
        let errs = TableModel::from_spec(&spec).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("does not commute")), "{errs:?}");
    }

    #[test]
    fn groupings_of_three() {
        assert_eq!(groupings(3), vec![vec![(0, 0), (1, 2)], vec![(0, 1), (2, 2)]]);
        assert!(groupings(2).is_empty());
    }
}
