//! Per-theorem checkers and the sweep engine.
//!
//! Every theorem has a [`TheoremChecker`] registered under its id in a
//! [`CheckerRegistry`]. A checker reads an [`Instance`], decides whether the
//! hypothesis applies, and if so whether the conclusion holds. A
//! counterexample is an instance where the hypothesis holds and the
//! conclusion does not.

mod checkers;
pub mod sweep;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{GroupSpec, ProductPoint};
use crate::nonabelian::GroupSubset;
use crate::sets::IntSet;

pub use checkers::*;
pub use sweep::{run_sweep, Family, Mode, SweepReport, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "eq1_lower_bound")]
    Eq1LowerBound,
    #[serde(rename = "cauchy_davenport")]
    CauchyDavenport,
    #[serde(rename = "thm_A_3k4")]
    ThmA,
    #[serde(rename = "lemma_1_L4")]
    Lemma1,
    #[serde(rename = "lemma_2_L2")]
    Lemma2,
    #[serde(rename = "thm_1_balu")]
    Thm1,
    #[serde(rename = "thm_2_structure")]
    Thm2,
    #[serde(rename = "cor_1_M3")]
    Cor1,
    #[serde(rename = "cor_2_M1")]
    Cor2,
    #[serde(rename = "thm_4_prem1")]
    Thm4,
    #[serde(rename = "thm_3_prem")]
    Thm3,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::Eq1LowerBound,
        TheoremId::CauchyDavenport,
        TheoremId::ThmA,
        TheoremId::Lemma1,
        TheoremId::Lemma2,
        TheoremId::Thm1,
        TheoremId::Thm2,
        TheoremId::Cor1,
        TheoremId::Cor2,
        TheoremId::Thm4,
        TheoremId::Thm3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Eq1LowerBound => "eq1_lower_bound",
            TheoremId::CauchyDavenport => "cauchy_davenport",
            TheoremId::ThmA => "thm_A_3k4",
            TheoremId::Lemma1 => "lemma_1_L4",
            TheoremId::Lemma2 => "lemma_2_L2",
            TheoremId::Thm1 => "thm_1_balu",
            TheoremId::Thm2 => "thm_2_structure",
            TheoremId::Cor1 => "cor_1_M3",
            TheoremId::Cor2 => "cor_2_M1",
            TheoremId::Thm4 => "thm_4_prem1",
            TheoremId::Thm3 => "thm_3_prem",
        }
    }

    /// Short alias accepted on the command line.
    pub fn alias(&self) -> &'static str {
        match self {
            TheoremId::Eq1LowerBound => "eq1",
            TheoremId::CauchyDavenport => "cauchy_davenport",
            TheoremId::ThmA => "thm_A",
            TheoremId::Lemma1 => "lemma_1",
            TheoremId::Lemma2 => "lemma_2",
            TheoremId::Thm1 => "thm_1",
            TheoremId::Thm2 => "thm_2",
            TheoremId::Cor1 => "cor_1",
            TheoremId::Cor2 => "cor_2",
            TheoremId::Thm4 => "thm_4",
            TheoremId::Thm3 => "thm_3",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s || t.alias() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown theorem {s:?}")))
    }
}

/// Serialized checker input. Every report carries its instance, so a report
/// can be re-verified from its JSON alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instance {
    Int { set: IntSet },
    IntPair { a: IntSet, b: IntSet },
    /// `set ⊆ [0, n-1]`.
    Bounded { set: IntSet, n: i64 },
    /// Residue sets in `Z/pZ`.
    Modular { p: u64, a: Vec<u64>, b: Vec<u64> },
    /// Points `(a, x)` of `Z x inner`.
    Product { inner: GroupSpec, points: Vec<(i64, Vec<i64>)> },
    Group { spec: GroupSpec, elements: Vec<Vec<i64>> },
}

impl Instance {
    pub fn int(set: IntSet) -> Self {
        Instance::Int { set }
    }

    pub fn product(points: &[ProductPoint]) -> Result<Self> {
        let inner = points
            .first()
            .ok_or_else(|| Error::Degenerate("empty point set".into()))?
            .x
            .spec();
        Ok(Instance::Product {
            inner,
            points: points.iter().map(|p| (p.a, p.x.coords())).collect(),
        })
    }

    pub fn group(s: &GroupSubset) -> Self {
        Instance::Group {
            spec: s.spec.clone(),
            elements: s.elements.iter().map(|g| g.coords()).collect(),
        }
    }

    pub fn product_points(&self) -> Result<Vec<ProductPoint>> {
        match self {
            Instance::Product { inner, points } => points
                .iter()
                .map(|(a, x)| Ok(ProductPoint::new(*a, inner.element(x)?)))
                .collect(),
            other => Err(Error::Malformed(format!("expected product instance, got {}", other.kind()))),
        }
    }

    pub fn group_subset(&self) -> Result<GroupSubset> {
        match self {
            Instance::Group { spec, elements } => GroupSubset::from_coords(spec.clone(), elements),
            other => Err(Error::Malformed(format!("expected group instance, got {}", other.kind()))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Int { .. } => "int",
            Instance::IntPair { .. } => "int_pair",
            Instance::Bounded { .. } => "bounded",
            Instance::Modular { .. } => "modular",
            Instance::Product { .. } => "product",
            Instance::Group { .. } => "group",
        }
    }
}

/// What a checker concluded, before timing and packaging.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Outcome {
    pub hypothesis_met: bool,
    pub conclusion_holds: bool,
    pub evidence: Option<serde_json::Value>,
    pub flags: Vec<&'static str>,
    pub note: Option<String>,
}

impl Outcome {
    pub fn vacuous() -> Self {
        Outcome { hypothesis_met: false, conclusion_holds: true, ..Outcome::default() }
    }

    pub fn decided(holds: bool) -> Self {
        Outcome { hypothesis_met: true, conclusion_holds: holds, ..Outcome::default() }
    }

    pub fn with_evidence(mut self, e: impl Serialize) -> Self {
        self.evidence = Some(serde_json::to_value(e).expect("evidence serializes"));
        self
    }

    pub fn flag(mut self, f: &'static str) -> Self {
        self.flags.push(f);
        self
    }

    pub fn flag_if(self, cond: bool, f: &'static str) -> Self {
        if cond { self.flag(f) } else { self }
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub instance: Instance,
    pub hypothesis_met: bool,
    pub conclusion_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub elapsed_us: u64,
}

impl VerificationReport {
    pub fn is_counterexample(&self) -> bool {
        self.hypothesis_met && !self.conclusion_holds
    }
}

pub trait TheoremChecker: Send + Sync {
    fn id(&self) -> TheoremId;

    fn evaluate(&self, instance: &Instance) -> Result<Outcome>;

    fn check(&self, instance: &Instance) -> Result<VerificationReport> {
        let start = Instant::now();
        let o = self.evaluate(instance)?;
        Ok(VerificationReport {
            theorem: self.id(),
            instance: instance.clone(),
            hypothesis_met: o.hypothesis_met,
            conclusion_holds: o.conclusion_holds,
            evidence: o.evidence,
            flags: o.flags,
            note: o.note,
            elapsed_us: start.elapsed().as_micros() as u64,
        })
    }
}

/// Checkers keyed by theorem id.
pub struct CheckerRegistry {
    checkers: BTreeMap<TheoremId, Box<dyn TheoremChecker>>,
}

impl Default for CheckerRegistry {
    fn default() -> Self {
        CheckerRegistry::standard()
    }
}

impl CheckerRegistry {
    pub fn empty() -> Self {
        CheckerRegistry { checkers: BTreeMap::new() }
    }

    pub fn standard() -> Self {
        let mut r = CheckerRegistry::empty();
        r.register(Box::new(Eq1Checker));
        r.register(Box::new(CauchyDavenportChecker));
        r.register(Box::new(ThmAChecker));
        r.register(Box::new(Lemma1Checker));
        r.register(Box::new(Lemma2Checker));
        r.register(Box::new(Thm1Checker));
        r.register(Box::new(Thm2Checker));
        r.register(Box::new(Cor1Checker));
        r.register(Box::new(Cor2Checker));
        r.register(Box::new(Thm4Checker::default()));
        r.register(Box::new(Thm3Checker::default()));
        r
    }

    pub fn register(&mut self, checker: Box<dyn TheoremChecker>) {
        self.checkers.insert(checker.id(), checker);
    }

    pub fn get(&self, id: TheoremId) -> Result<&dyn TheoremChecker> {
        self.checkers
            .get(&id)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::Unsupported(format!("no checker registered for {id}")))
    }

    pub fn by_name(&self, name: &str) -> Result<&dyn TheoremChecker> {
        self.get(name.parse()?)
    }

    pub fn ids(&self) -> Vec<TheoremId> {
        self.checkers.keys().copied().collect()
    }

    pub fn check(&self, id: TheoremId, instance: &Instance) -> Result<VerificationReport> {
        self.get(id)?.check(instance)
    }
}

/// Re-runs a serialized report (or any JSON with `theorem` and `instance`).
pub fn reverify(report: &serde_json::Value) -> Result<VerificationReport> {
    let theorem: TheoremId = serde_json::from_value(report["theorem"].clone())
        .map_err(|e| Error::Malformed(format!("theorem: {e}")))?;
    let instance: Instance = serde_json::from_value(report["instance"].clone())
        .map_err(|e| Error::Malformed(format!("instance: {e}")))?;
    CheckerRegistry::standard().check(theorem, &instance)
}

/// Drops timing fields (`elapsed_us`, `wall_time_ms`) at any depth.
pub fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(m) => {
            m.remove("elapsed_us");
            m.remove("wall_time_ms");
            m.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
