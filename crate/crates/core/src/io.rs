//! The JSON dataset format.
//!
//! A dataset is an object with a `format_version` and any subset of the
//! sections below. Complex numbers are `[re, im]` pairs; matrices are lists
//! of rows. Labels may be given by name or by index and are emitted by name.
//! Numbers are emitted with 17 significant digits, so parsing an emitted
//! file reproduces every finite value exactly.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::braided::RSymbolSet;
use crate::cohomology::{Cochain, FiniteGroup};
use crate::error::{Error, Result};
use crate::fusion::{verify_ring_axioms, FSymbolSet, FusionRing, Gauge, NatIso, Quad, Vertex, DEFAULT_TOL};
use crate::linalg::CMatrix;
use crate::module_cats::{ModuleData, ModuleEquivalenceData, ModuleGauge};
use crate::unitarizer::EquivalenceData;

pub const FORMAT_VERSION: &str = "1";

const SECTIONS: &[&str] = &[
    "format_version",
    "name",
    "description",
    "tolerance",
    "checks",
    "fusion_ring",
    "f_symbols",
    "r_symbols",
    "gauge",
    "positive_gauge",
    "nat_iso",
    "equivalence",
    "module_data",
    "module_equivalence",
    "group",
    "cochain",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    /// Ring axioms must hold on load.
    Strict,
    /// Ring-axiom violations are recorded in [`Dataset::warnings`].
    WarnOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadOptions {
    /// Used when the dataset declares no tolerance.
    pub default_tol: f64,
    /// Replaces the dataset tolerance.
    pub tol_override: Option<f64>,
    pub validation: Validation,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            default_tol: DEFAULT_TOL,
            tol_override: None,
            validation: Validation::Strict,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NatIsoSection {
    pub eta: NatIso,
    /// Tensorator of the codomain equivalence; defaults to the domain's.
    pub target_tensorator: Option<Gauge>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceSection {
    pub equivalence: EquivalenceData,
    pub target_r: Option<RSymbolSet>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub format_version: String,
    pub name: Option<String>,
    pub description: Option<String>,
    /// Tolerance as declared in the file.
    pub tolerance: Option<f64>,
    /// Tolerance in effect after load options were applied.
    pub tol: f64,
    /// Checks the dataset is expected to pass.
    pub checks: Vec<String>,
    pub ring: Option<FusionRing>,
    pub f: Option<FSymbolSet>,
    pub r: Option<RSymbolSet>,
    pub gauge: Option<Gauge>,
    pub positive_gauge: Option<Gauge>,
    pub nat_iso: Option<NatIsoSection>,
    pub equivalence: Option<EquivalenceSection>,
    pub module: Option<ModuleData>,
    pub module_equivalence: Option<ModuleEquivalenceData>,
    pub group: Option<FiniteGroup>,
    pub cochain: Option<Cochain>,
    /// Invariant violations tolerated under [`Validation::WarnOnly`].
    pub warnings: Vec<String>,
}

impl Dataset {
    pub fn new(name: &str) -> Self {
        Dataset {
            format_version: FORMAT_VERSION.into(),
            name: Some(name.into()),
            tol: DEFAULT_TOL,
            ..Dataset::default()
        }
    }
}

/// `f64` emitted with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!("cannot emit non-finite value {}", self.0)));
        }
        let n = serde_json::Number::from_str(&format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Num)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Label {
    Index(usize),
    Name(String),
}

type RawComplex = [Num; 2];
type RawMatrix = Vec<Vec<RawComplex>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    labels: Vec<String>,
    dual: Vec<Label>,
    fusion: Vec<RawFusion>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFusion {
    a: Label,
    b: Label,
    c: Label,
    n: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFBlock {
    a: Label,
    b: Label,
    c: Label,
    d: Label,
    matrix: RawMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVBlock {
    a: Label,
    b: Label,
    c: Label,
    matrix: RawMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNatIso {
    components: Vec<RawComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_tensorator: Option<Vec<RawVBlock>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquivalence {
    simple_map: Vec<Label>,
    target_f_symbols: Vec<RawFBlock>,
    tensorator: Vec<RawVBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_r_symbols: Option<Vec<RawVBlock>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    a: Label,
    m: Label,
    m2: Label,
    n: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLBlock {
    a: Label,
    b: Label,
    m: Label,
    m2: Label,
    matrix: RawMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModule {
    labels: Vec<String>,
    action: Vec<RawAction>,
    l_symbols: Vec<RawLBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMBlock {
    a: Label,
    m: Label,
    m2: Label,
    matrix: RawMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModuleEquivalence {
    simple_map: Vec<Label>,
    target_l_symbols: Vec<RawLBlock>,
    tensorator: Vec<RawMBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    name: String,
    table: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCochain {
    degree: usize,
    values: Vec<RawComplex>,
}

#[derive(Debug, Clone, Serialize)]
struct RawDataset {
    format_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<Num>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    checks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fusion_ring: Option<RawRing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_symbols: Option<Vec<RawFBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_symbols: Option<Vec<RawVBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gauge: Option<Vec<RawVBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    positive_gauge: Option<Vec<RawVBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nat_iso: Option<RawNatIso>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equivalence: Option<RawEquivalence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    module_data: Option<RawModule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    module_equivalence: Option<RawModuleEquivalence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<RawGroup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cochain: Option<RawCochain>,
}

fn resolve(label: &Label, labels: &[String], what: &str) -> std::result::Result<usize, String> {
    match label {
        Label::Index(i) if *i < labels.len() => Ok(*i),
        Label::Index(i) => Err(format!("{what} index {i} out of range")),
        Label::Name(s) => labels
            .iter()
            .position(|l| l == s)
            .ok_or_else(|| format!("unknown {what} label `{s}`")),
    }
}

fn matrix_from_raw(raw: &RawMatrix) -> std::result::Result<CMatrix, String> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, |r| r.len());
    if raw.iter().any(|r| r.len() != cols) {
        return Err("matrix rows have different lengths".into());
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let [re, im] = raw[i][j];
        Complex64::new(re.0, im.0)
    }))
}

fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [Num(m[(i, j)].re), Num(m[(i, j)].im)]).collect())
        .collect()
}

fn complex_to_raw(z: Complex64) -> RawComplex {
    [Num(z.re), Num(z.im)]
}

fn section<T: DeserializeOwned>(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Option<T>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| Error::semantic(key, e.to_string())),
    }
}

fn sem<T>(section: &str, r: std::result::Result<T, String>) -> Result<T> {
    r.map_err(|m| Error::semantic(section, m))
}

/// Library errors raised while building a section become semantic errors
/// naming that section.
fn lift<T>(section: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Semantic { .. } | Error::Syntax { .. } => e,
        Error::Input(m) | Error::RingMismatch(m) => Error::semantic(section, m),
        other => Error::semantic(section, other.to_string()),
    })
}

fn ring_from_raw(raw: &RawRing) -> std::result::Result<FusionRing, String> {
    let labels = &raw.labels;
    let dual = raw
        .dual
        .iter()
        .map(|l| resolve(l, labels, "simple"))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut entries = Vec::new();
    for e in &raw.fusion {
        entries.push((
            resolve(&e.a, labels, "simple")?,
            resolve(&e.b, labels, "simple")?,
            resolve(&e.c, labels, "simple")?,
            e.n,
        ));
    }
    FusionRing::from_entries(labels.clone(), dual, &entries).map_err(|e| e.to_string())
}

fn f_blocks(raw: &[RawFBlock], labels: &[String]) -> std::result::Result<BTreeMap<Quad, CMatrix>, String> {
    let mut out = BTreeMap::new();
    for b in raw {
        let key = (
            resolve(&b.a, labels, "simple")?,
            resolve(&b.b, labels, "simple")?,
            resolve(&b.c, labels, "simple")?,
            resolve(&b.d, labels, "simple")?,
        );
        if out.insert(key, matrix_from_raw(&b.matrix)?).is_some() {
            return Err(format!("duplicate block {key:?}"));
        }
    }
    Ok(out)
}

fn v_blocks(raw: &[RawVBlock], labels: &[String]) -> std::result::Result<BTreeMap<Vertex, CMatrix>, String> {
    let mut out = BTreeMap::new();
    for b in raw {
        let key = (
            resolve(&b.a, labels, "simple")?,
            resolve(&b.b, labels, "simple")?,
            resolve(&b.c, labels, "simple")?,
        );
        if out.insert(key, matrix_from_raw(&b.matrix)?).is_some() {
            return Err(format!("duplicate block {key:?}"));
        }
    }
    Ok(out)
}

fn l_blocks(raw: &[RawLBlock], ring: &[String], module: &[String]) -> std::result::Result<BTreeMap<Quad, CMatrix>, String> {
    let mut out = BTreeMap::new();
    for b in raw {
        let key = (
            resolve(&b.a, ring, "simple")?,
            resolve(&b.b, ring, "simple")?,
            resolve(&b.m, module, "module simple")?,
            resolve(&b.m2, module, "module simple")?,
        );
        if out.insert(key, matrix_from_raw(&b.matrix)?).is_some() {
            return Err(format!("duplicate block {key:?}"));
        }
    }
    Ok(out)
}

fn m_blocks(raw: &[RawMBlock], ring: &[String], module: &[String]) -> std::result::Result<BTreeMap<Vertex, CMatrix>, String> {
    let mut out = BTreeMap::new();
    for b in raw {
        let key = (
            resolve(&b.a, ring, "simple")?,
            resolve(&b.m, module, "module simple")?,
            resolve(&b.m2, module, "module simple")?,
        );
        if out.insert(key, matrix_from_raw(&b.matrix)?).is_some() {
            return Err(format!("duplicate block {key:?}"));
        }
    }
    Ok(out)
}

fn require<'a, T>(v: &'a Option<T>, section: &str, needed: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::semantic(section, format!("requires the `{needed}` section")))
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    parse_dataset_with(text, &LoadOptions::default())
}

pub fn parse_dataset_with(text: &str, opts: &LoadOptions) -> Result<Dataset> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = match value {
        Value::Object(o) => o,
        _ => return Err(Error::semantic("dataset", "top level must be a JSON object")),
    };
    if let Some(k) = obj.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
        return Err(Error::semantic(k, "unknown section"));
    }
    let format_version: String =
        section(&obj, "format_version")?.ok_or_else(|| Error::semantic("format_version", "missing"))?;
    if format_version != FORMAT_VERSION {
        return Err(Error::semantic(
            "format_version",
            format!("unsupported version `{format_version}`, expected `{FORMAT_VERSION}`"),
        ));
    }
    let tolerance: Option<f64> = section::<Num>(&obj, "tolerance")?.map(|n| n.0);
    if let Some(t) = tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::semantic("tolerance", format!("must be positive, got {t}")));
        }
    }
    let tol = opts.tol_override.or(tolerance).unwrap_or(opts.default_tol);
    let mut ds = Dataset {
        format_version,
        name: section(&obj, "name")?,
        description: section(&obj, "description")?,
        tolerance,
        tol,
        checks: section(&obj, "checks")?.unwrap_or_default(),
        ..Dataset::default()
    };

    if let Some(raw) = section::<RawRing>(&obj, "fusion_ring")? {
        let ring = sem("fusion_ring", ring_from_raw(&raw))?;
        let rep = verify_ring_axioms(&ring);
        if let Some(v) = rep.violation {
            match opts.validation {
                Validation::Strict => return Err(Error::semantic("fusion_ring", v)),
                Validation::WarnOnly => ds.warnings.push(format!("fusion_ring: {v}")),
            }
        }
        ds.ring = Some(ring);
    }
    let labels: Vec<String> = ds.ring.as_ref().map(|r| r.labels().to_vec()).unwrap_or_default();

    if let Some(raw) = section::<Vec<RawFBlock>>(&obj, "f_symbols")? {
        let ring = require(&ds.ring, "f_symbols", "fusion_ring")?;
        let blocks = sem("f_symbols", f_blocks(&raw, &labels))?;
        ds.f = Some(lift("f_symbols", FSymbolSet::new(ring.clone(), tol, blocks))?);
    }
    if let Some(raw) = section::<Vec<RawVBlock>>(&obj, "r_symbols")? {
        let ring = require(&ds.ring, "r_symbols", "fusion_ring")?;
        let blocks = sem("r_symbols", v_blocks(&raw, &labels))?;
        ds.r = Some(lift("r_symbols", RSymbolSet::new(ring.clone(), blocks))?);
    }
    for key in ["gauge", "positive_gauge"] {
        if let Some(raw) = section::<Vec<RawVBlock>>(&obj, key)? {
            let ring = require(&ds.ring, key, "fusion_ring")?;
            let blocks = sem(key, v_blocks(&raw, &labels))?;
            let g = lift(key, Gauge::new(ring.clone(), blocks))?;
            if key == "gauge" {
                ds.gauge = Some(g);
            } else {
                ds.positive_gauge = Some(g);
            }
        }
    }
    if let Some(raw) = section::<RawEquivalence>(&obj, "equivalence")? {
        let f = require(&ds.f, "equivalence", "f_symbols")?;
        let ring = f.ring();
        let map = sem(
            "equivalence",
            raw.simple_map.iter().map(|l| resolve(l, &labels, "simple")).collect::<std::result::Result<Vec<_>, _>>(),
        )?;
        let target = lift(
            "equivalence",
            FSymbolSet::new(ring.clone(), tol, sem("equivalence", f_blocks(&raw.target_f_symbols, &labels))?),
        )?;
        let t = lift("equivalence", Gauge::new(ring.clone(), sem("equivalence", v_blocks(&raw.tensorator, &labels))?))?;
        let target_r = match &raw.target_r_symbols {
            Some(rs) => Some(lift("equivalence", RSymbolSet::new(ring.clone(), sem("equivalence", v_blocks(rs, &labels))?))?),
            None => None,
        };
        let equivalence = lift("equivalence", EquivalenceData::new(f.clone(), target, map, t))?;
        ds.equivalence = Some(EquivalenceSection { equivalence, target_r });
    }
    if let Some(raw) = section::<RawNatIso>(&obj, "nat_iso")? {
        let ring = require(&ds.ring, "nat_iso", "fusion_ring")?;
        let comps = raw.components.iter().map(|[re, im]| Complex64::new(re.0, im.0)).collect();
        let eta = lift("nat_iso", NatIso::new(ring.clone(), comps))?;
        let target_tensorator = match &raw.target_tensorator {
            Some(bs) => Some(lift("nat_iso", Gauge::new(ring.clone(), sem("nat_iso", v_blocks(bs, &labels))?))?),
            None => None,
        };
        ds.nat_iso = Some(NatIsoSection { eta, target_tensorator });
    }
    if let Some(raw) = section::<RawModule>(&obj, "module_data")? {
        let ring = require(&ds.ring, "module_data", "fusion_ring")?;
        let mut action = Vec::new();
        for e in &raw.action {
            action.push((
                sem("module_data", resolve(&e.a, &labels, "simple"))?,
                sem("module_data", resolve(&e.m, &raw.labels, "module simple"))?,
                sem("module_data", resolve(&e.m2, &raw.labels, "module simple"))?,
                e.n,
            ));
        }
        let blocks = sem("module_data", l_blocks(&raw.l_symbols, &labels, &raw.labels))?;
        ds.module = Some(lift(
            "module_data",
            ModuleData::new(ring.clone(), raw.labels.clone(), &action, tol, blocks),
        )?);
    }
    if let Some(raw) = section::<RawModuleEquivalence>(&obj, "module_equivalence")? {
        let m = require(&ds.module, "module_equivalence", "module_data")?;
        let mlabels = m.labels().to_vec();
        let map = sem(
            "module_equivalence",
            raw.simple_map
                .iter()
                .map(|l| resolve(l, &mlabels, "module simple"))
                .collect::<std::result::Result<Vec<_>, _>>(),
        )?;
        let blocks = sem("module_equivalence", l_blocks(&raw.target_l_symbols, &labels, &mlabels))?;
        let target = lift(
            "module_equivalence",
            ModuleData::new(m.ring().clone(), mlabels.clone(), &m.action(), tol, blocks),
        )?;
        let t = lift(
            "module_equivalence",
            ModuleGauge::new(&target, sem("module_equivalence", m_blocks(&raw.tensorator, &labels, &mlabels))?),
        )?;
        ds.module_equivalence = Some(lift("module_equivalence", ModuleEquivalenceData::new(m.clone(), target, map, t))?);
    }
    if let Some(raw) = section::<RawGroup>(&obj, "group")? {
        ds.group = Some(lift("group", FiniteGroup::new(raw.name, raw.table))?);
    }
    if let Some(raw) = section::<RawCochain>(&obj, "cochain")? {
        let g = require(&ds.group, "cochain", "group")?;
        let values = raw.values.iter().map(|[re, im]| Complex64::new(re.0, im.0)).collect();
        ds.cochain = Some(lift("cochain", Cochain::new(g.clone(), raw.degree, values))?);
    }
    Ok(ds)
}

fn label_of(labels: &[String], i: usize) -> Label {
    Label::Name(labels[i].clone())
}

fn raw_f_blocks<'a>(blocks: impl Iterator<Item = (&'a Quad, &'a CMatrix)>, labels: &[String]) -> Vec<RawFBlock> {
    blocks
        .filter(|(k, _)| k.0 != 0 && k.1 != 0 && k.2 != 0)
        .map(|(&(a, b, c, d), m)| RawFBlock {
            a: label_of(labels, a),
            b: label_of(labels, b),
            c: label_of(labels, c),
            d: label_of(labels, d),
            matrix: matrix_to_raw(m),
        })
        .collect()
}

fn raw_v_blocks<'a>(blocks: impl Iterator<Item = (&'a Vertex, &'a CMatrix)>, labels: &[String]) -> Vec<RawVBlock> {
    blocks
        .filter(|(k, _)| k.0 != 0 && k.1 != 0)
        .map(|(&(a, b, c), m)| RawVBlock {
            a: label_of(labels, a),
            b: label_of(labels, b),
            c: label_of(labels, c),
            matrix: matrix_to_raw(m),
        })
        .collect()
}

fn raw_l_blocks(m: &ModuleData, labels: &[String]) -> Vec<RawLBlock> {
    let ml = m.labels();
    m.blocks()
        .filter(|(k, _)| k.0 != 0 && k.1 != 0)
        .map(|(&(a, b, x, y), blk)| RawLBlock {
            a: label_of(labels, a),
            b: label_of(labels, b),
            m: label_of(ml, x),
            m2: label_of(ml, y),
            matrix: matrix_to_raw(blk),
        })
        .collect()
}

fn raw_ring(ring: &FusionRing) -> RawRing {
    let labels = ring.labels();
    RawRing {
        labels: labels.to_vec(),
        dual: ring.duals().iter().map(|&d| label_of(labels, d)).collect(),
        fusion: ring
            .entries()
            .into_iter()
            .map(|(a, b, c, n)| RawFusion {
                a: label_of(labels, a),
                b: label_of(labels, b),
                c: label_of(labels, c),
                n,
            })
            .collect(),
    }
}

/// Pretty-printed JSON with a trailing newline. Unit blocks are omitted.
pub fn emit_dataset(ds: &Dataset) -> Result<String> {
    let ring = ds
        .ring
        .as_ref()
        .or(ds.f.as_ref().map(|f| f.ring()))
        .or(ds.module.as_ref().map(|m| m.ring()));
    let labels: Vec<String> = ring.map(|r| r.labels().to_vec()).unwrap_or_default();
    let raw = RawDataset {
        format_version: ds.format_version.clone(),
        name: ds.name.clone(),
        description: ds.description.clone(),
        tolerance: ds.tolerance.map(Num),
        checks: ds.checks.clone(),
        fusion_ring: ring.map(raw_ring),
        f_symbols: ds.f.as_ref().map(|f| raw_f_blocks(f.blocks(), &labels)),
        r_symbols: ds.r.as_ref().map(|r| raw_v_blocks(r.blocks(), &labels)),
        gauge: ds.gauge.as_ref().map(|g| raw_v_blocks(g.blocks(), &labels)),
        positive_gauge: ds.positive_gauge.as_ref().map(|g| raw_v_blocks(g.blocks(), &labels)),
        nat_iso: ds.nat_iso.as_ref().map(|n| RawNatIso {
            components: n.eta.components().iter().map(|&z| complex_to_raw(z)).collect(),
            target_tensorator: n.target_tensorator.as_ref().map(|g| raw_v_blocks(g.blocks(), &labels)),
        }),
        equivalence: ds.equivalence.as_ref().map(|s| {
            let e = &s.equivalence;
            RawEquivalence {
                simple_map: e.simple_map.iter().map(|&i| label_of(&labels, i)).collect(),
                target_f_symbols: raw_f_blocks(e.target_f.blocks(), &labels),
                tensorator: raw_v_blocks(e.tensorator.blocks(), &labels),
                target_r_symbols: s.target_r.as_ref().map(|r| raw_v_blocks(r.blocks(), &labels)),
            }
        }),
        module_data: ds.module.as_ref().map(|m| RawModule {
            labels: m.labels().to_vec(),
            action: m
                .action()
                .into_iter()
                .map(|(a, x, y, n)| RawAction {
                    a: label_of(&labels, a),
                    m: label_of(m.labels(), x),
                    m2: label_of(m.labels(), y),
                    n,
                })
                .collect(),
            l_symbols: raw_l_blocks(m, &labels),
        }),
        module_equivalence: ds.module_equivalence.as_ref().map(|e| {
            let ml = e.target.labels();
            RawModuleEquivalence {
                simple_map: e.simple_map.iter().map(|&i| label_of(ml, i)).collect(),
                target_l_symbols: raw_l_blocks(&e.target, &labels),
                tensorator: e
                    .tensorator
                    .blocks()
                    .filter(|(k, _)| k.0 != 0)
                    .map(|(&(a, x, y), m)| RawMBlock {
                        a: label_of(&labels, a),
                        m: label_of(ml, x),
                        m2: label_of(ml, y),
                        matrix: matrix_to_raw(m),
                    })
                    .collect(),
            }
        }),
        group: ds.group.as_ref().map(|g| RawGroup {
            name: g.name().to_string(),
            table: g.table().to_vec(),
        }),
        cochain: ds.cochain.as_ref().map(|c| RawCochain {
            degree: c.degree(),
            values: c.values().iter().map(|&z| complex_to_raw(z)).collect(),
        }),
    };
    let mut s = serde_json::to_string_pretty(&raw).map_err(|e| Error::input(format!("cannot emit dataset: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_digits() {
        let s = serde_json::to_string(&Num(0.1)).unwrap();
        assert_eq!(s, "1.0000000000000001e-1");
        let back: Num = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, 0.1);
    }

    #[test]
    fn truncated_input_is_syntax_error() {
        match parse_dataset("{\"format_version\": \"1\", \"fusion_ring\": {").unwrap_err() {
            Error::Syntax { line, .. } => assert_eq!(line, 1),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn unknown_section_is_named() {
        match parse_dataset("{\"format_version\": \"1\", \"fusion\": 3}").unwrap_err() {
            Error::Semantic { section, .. } => assert_eq!(section, "fusion"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn f_symbols_without_ring_is_semantic_error() {
        let err = parse_dataset("{\"format_version\": \"1\", \"f_symbols\": []}").unwrap_err();
        assert!(matches!(err, Error::Semantic { ref section, .. } if section == "f_symbols"), "{err:?}");
    }
}
