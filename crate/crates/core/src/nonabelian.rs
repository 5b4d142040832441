//! Product sets `S^2` in (possibly non-abelian) groups and weakly
//! structured sets: subsets of a geometric progression `{y x^t}` whose base
//! `y` and ratio `x` commute.
//!
//! Witness search is pluggable. Each [`WeakStructureStrategy`] is
//! registered by name in a [`StrategyRegistry`], which tries them in order
//! and rechecks whatever certificate comes back.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec};

/// Finite subset of a group, deduplicated and sorted canonically. For
/// ordered specs the canonical order is the group order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupSubset {
    pub spec: GroupSpec,
    pub elements: Vec<GroupElement>,
}

impl GroupSubset {
    pub fn new(spec: GroupSpec, elements: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let set: BTreeSet<GroupElement> = elements.into_iter().collect();
        if let Some(bad) = set.iter().find(|g| !spec.contains(g)) {
            return Err(Error::TypeMismatch(format!("{bad} is not an element of {spec}")));
        }
        Ok(GroupSubset { spec, elements: set.into_iter().collect() })
    }

    pub fn from_coords(spec: GroupSpec, coords: &[Vec<i64>]) -> Result<Self> {
        let elems = coords.iter().map(|c| spec.element(c)).collect::<Result<Vec<_>>>()?;
        GroupSubset::new(spec, elems)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }
}

/// `ST = {st : s ∈ S, t ∈ T}`.
pub fn product_set(s: &GroupSubset, t: &GroupSubset) -> Result<GroupSubset> {
    if s.spec != t.spec {
        return Err(Error::TypeMismatch(format!("{} vs {}", s.spec, t.spec)));
    }
    let mut out = BTreeSet::new();
    for a in &s.elements {
        for b in &t.elements {
            out.insert(a.op(b)?);
        }
    }
    Ok(GroupSubset { spec: s.spec.clone(), elements: out.into_iter().collect() })
}

/// `S ⊆ {y x^t}` with `xy = yx`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakStructureCertificate {
    pub x: GroupElement,
    pub y: GroupElement,
    /// `(s, t)` with `s = y x^t`, in the subset's canonical order.
    pub exponents: Vec<(GroupElement, i64)>,
    /// Exponents lie in `[-n, n]`.
    pub n: i64,
}

impl WeakStructureCertificate {
    fn from_parts(x: GroupElement, y: GroupElement, exponents: Vec<(GroupElement, i64)>) -> Self {
        let n = exponents.iter().map(|(_, t)| t.abs()).max().unwrap_or(0);
        WeakStructureCertificate { x, y, exponents, n }
    }

    /// Independent check against `s`: commutation, exact coverage of `s`,
    /// and exact reproduction of every element.
    pub fn recheck(&self, s: &GroupSubset) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCertificate(msg));
        if !self.x.commutes(&self.y)? {
            return bad(format!("x={} and y={} do not commute", self.x, self.y));
        }
        let listed: BTreeSet<&GroupElement> = self.exponents.iter().map(|(g, _)| g).collect();
        if listed.len() != self.exponents.len() || listed.len() != s.len()
            || !s.elements.iter().all(|g| listed.contains(g))
        {
            return bad("exponent map does not cover the set exactly".into());
        }
        for (g, t) in &self.exponents {
            if t.abs() > self.n {
                return bad(format!("exponent {t} outside [-{0}, {0}]", self.n));
            }
            if &self.y.op(&self.x.pow(*t)?)? != g {
                return bad(format!("{g} != y x^{t}"));
            }
        }
        Ok(())
    }

    /// Rebases so the least exponent is 0 and the exponent gcd is 1. This
    /// leaves the shortest window `0..=span` describing the same set.
    pub fn normalized(self) -> Result<Self> {
        let Some(lo) = self.exponents.iter().map(|(_, t)| *t).min() else {
            return Ok(self);
        };
        let g = self.exponents.iter().fold(0i64, |g, (_, t)| g.gcd(&(t - lo)));
        let y = self.y.op(&self.x.pow(lo)?)?;
        let (x, g) = if g == 0 { (self.x, 1) } else { (self.x.pow(g)?, g) };
        let exps = self.exponents.into_iter().map(|(e, t)| (e, (t - lo) / g)).collect();
        Ok(WeakStructureCertificate::from_parts(x, y, exps))
    }

    /// Largest exponent minus smallest.
    pub fn span(&self) -> i64 {
        let ts = self.exponents.iter().map(|(_, t)| *t);
        ts.clone().max().unwrap_or(0) - ts.min().unwrap_or(0)
    }
}

pub trait WeakStructureStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn applies_to(&self, spec: &GroupSpec) -> bool;

    /// A certificate, or `None` when this strategy finds no witness.
    fn search(&self, s: &GroupSubset) -> Result<Option<WeakStructureCertificate>>;
}

/// Exponent budget for the monotone walks in ordered groups.
const WALK_BUDGET: i64 = 4096;

/// Smallest `t >= 0` with `start * step^t == target`, walking in the
/// direction `step` moves. Only valid in ordered groups.
fn ordered_log(start: &GroupElement, step: &GroupElement, target: &GroupElement) -> Result<Option<i64>> {
    let dir = step.compare(&step.spec().identity())?;
    if dir == Ordering::Equal {
        return Ok((start == target).then_some(0));
    }
    let mut cur = start.clone();
    for t in 0..=WALK_BUDGET {
        match cur.compare(target)? {
            Ordering::Equal => return Ok(Some(t)),
            o if o == dir => return Ok(None),
            _ => cur = cur.op(step)?,
        }
    }
    Ok(None)
}

/// The proof-derived choice: `y = x_k`, `x = x_{k-1} x_k^{-1}` from the top
/// two elements in the group order.
pub struct TopPair;

impl WeakStructureStrategy for TopPair {
    fn name(&self) -> &'static str {
        "top_pair"
    }

    fn applies_to(&self, spec: &GroupSpec) -> bool {
        spec.is_ordered()
    }

    fn search(&self, s: &GroupSubset) -> Result<Option<WeakStructureCertificate>> {
        let k = s.len();
        if k < 2 {
            return Ok(None);
        }
        let y = s.elements[k - 1].clone();
        let x = s.elements[k - 2].op(&y.inverse()?)?;
        if !x.commutes(&y)? {
            return Ok(None);
        }
        let mut exps = Vec::with_capacity(k);
        for g in &s.elements {
            match ordered_log(&y, &x, g)? {
                Some(t) => exps.push((g.clone(), t)),
                None => return Ok(None),
            }
        }
        Ok(Some(WeakStructureCertificate::from_parts(x, y, exps)))
    }
}

/// `y = min S`; the quotients `y^{-1} s` are positive, and when they all
/// commute a subtractive gcd recovers the shortest common ratio.
pub struct Euclid;

impl WeakStructureStrategy for Euclid {
    fn name(&self) -> &'static str {
        "euclid"
    }

    fn applies_to(&self, spec: &GroupSpec) -> bool {
        spec.is_ordered()
    }

    fn search(&self, s: &GroupSubset) -> Result<Option<WeakStructureCertificate>> {
        if s.len() < 2 {
            return Ok(None);
        }
        let y = s.elements[0].clone();
        let y_inv = y.inverse()?;
        let quotients = s.elements[1..]
            .iter()
            .map(|g| y_inv.op(g))
            .collect::<Result<Vec<_>>>()?;
        for (i, d) in quotients.iter().enumerate() {
            if !d.commutes(&y)? {
                return Ok(None);
            }
            for e in &quotients[i + 1..] {
                if !d.commutes(e)? {
                    return Ok(None);
                }
            }
        }
        let mut steps = 0;
        let mut x = quotients[0].clone();
        for d in &quotients[1..] {
            let (mut p, mut q) = (x, d.clone());
            while p != q {
                steps += 1;
                if steps > WALK_BUDGET {
                    return Ok(None);
                }
                if p.compare(&q)? == Ordering::Greater {
                    p = p.op(&q.inverse()?)?;
                } else {
                    q = q.op(&p.inverse()?)?;
                }
            }
            x = p;
        }
        let mut exps = Vec::with_capacity(s.len());
        for g in &s.elements {
            match ordered_log(&y, &x, g)? {
                Some(t) => exps.push((g.clone(), t)),
                None => return Ok(None),
            }
        }
        Ok(Some(WeakStructureCertificate::from_parts(x, y, exps)))
    }
}

/// Ratio `x ∈ S S^{-1}`, base `y ∈ S`, exponents bounded by `|S^2|`.
/// Works in every group.
pub struct DifferenceScan;

impl WeakStructureStrategy for DifferenceScan {
    fn name(&self) -> &'static str {
        "difference_scan"
    }

    fn applies_to(&self, _spec: &GroupSpec) -> bool {
        true
    }

    fn search(&self, s: &GroupSubset) -> Result<Option<WeakStructureCertificate>> {
        let bound = product_set(s, s)?.len() as i64;
        let inverses = s.elements.iter().map(|g| g.inverse()).collect::<Result<Vec<_>>>()?;
        let mut ratios = BTreeSet::new();
        for a in &s.elements {
            for b in &inverses {
                ratios.insert(a.op(b)?);
            }
        }
        if s.len() == 1 {
            let y = s.elements[0].clone();
            let x = s.spec.identity();
            return Ok(Some(WeakStructureCertificate::from_parts(x, y.clone(), vec![(y, 0)])));
        }
        for x in ratios.iter().filter(|x| !x.is_identity()) {
            // t = 0, 1, -1, 2, -2, ... so the first hit has least |t|
            let mut powers: HashMap<GroupElement, i64> = HashMap::new();
            let (mut up, mut down) = (s.spec.identity(), s.spec.identity());
            let x_inv = x.inverse()?;
            powers.insert(up.clone(), 0);
            for t in 1..=bound {
                up = up.op(x)?;
                down = down.op(&x_inv)?;
                powers.entry(up.clone()).or_insert(t);
                powers.entry(down.clone()).or_insert(-t);
            }
            'base: for y in &s.elements {
                if !x.commutes(y)? {
                    continue;
                }
                let y_inv = y.inverse()?;
                let mut exps = Vec::with_capacity(s.len());
                for g in &s.elements {
                    match powers.get(&y_inv.op(g)?) {
                        Some(&t) => exps.push((g.clone(), t)),
                        None => continue 'base,
                    }
                }
                return Ok(Some(WeakStructureCertificate::from_parts(x.clone(), y.clone(), exps)));
            }
        }
        Ok(None)
    }
}

/// Named strategies, tried in registration order.
pub struct StrategyRegistry {
    strategies: Vec<Box<dyn WeakStructureStrategy>>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        StrategyRegistry::standard()
    }
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry { strategies: Vec::new() }
    }

    /// `top_pair`, then `euclid`, then `difference_scan`.
    pub fn standard() -> Self {
        let mut r = StrategyRegistry::empty();
        r.register(Box::new(TopPair));
        r.register(Box::new(Euclid));
        r.register(Box::new(DifferenceScan));
        r
    }

    pub fn register(&mut self, strategy: Box<dyn WeakStructureStrategy>) {
        self.strategies.retain(|s| s.name() != strategy.name());
        self.strategies.push(strategy);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn WeakStructureStrategy> {
        self.strategies.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    /// Registry holding only the named strategy.
    pub fn only(name: &str) -> Result<Self> {
        let mut all = StrategyRegistry::standard();
        let pos = all
            .strategies
            .iter()
            .position(|s| s.name() == name)
            .ok_or_else(|| Error::Malformed(format!("unknown strategy {name:?}")))?;
        Ok(StrategyRegistry { strategies: vec![all.strategies.swap_remove(pos)] })
    }

    /// First certificate from an applicable strategy, rechecked and
    /// normalized, together with the strategy's name.
    pub fn search(&self, s: &GroupSubset) -> Result<Option<(&'static str, WeakStructureCertificate)>> {
        if s.len() < 2 {
            return Err(Error::Degenerate(format!("need |S| >= 2, got {}", s.len())));
        }
        for strat in self.strategies.iter().filter(|st| st.applies_to(&s.spec)) {
            if let Some(cert) = strat.search(s)? {
                cert.recheck(s).map_err(|e| {
                    Error::InternalInvariant(format!("strategy {} returned a bad certificate: {e}", strat.name()))
                })?;
                let cert = cert.normalized()?;
                cert.recheck(s)?;
                return Ok(Some((strat.name(), cert)));
            }
        }
        Ok(None)
    }
}

/// Weak-structure detection with the standard strategy chain.
pub fn is_weakly_structured(s: &GroupSubset) -> Result<Option<WeakStructureCertificate>> {
    Ok(StrategyRegistry::standard().search(s)?.map(|(_, c)| c))
}

/// Both readings of the window bound for `N = |S^2| - |S|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowCheck {
    pub n: i64,
    pub span: i64,
    /// `0 <= t <= N - 1`.
    pub strict: bool,
    /// `0 <= t <= N`.
    pub inclusive: bool,
}

impl WindowCheck {
    pub fn new(square_size: usize, set_size: usize, cert: &WeakStructureCertificate) -> Self {
        let n = square_size as i64 - set_size as i64;
        let span = cert.span();
        WindowCheck { n, span, strict: span < n, inclusive: span <= n }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupConclusion {
    /// Generators of an abelian subgroup containing `<S>`; at most two.
    pub generators: Vec<GroupElement>,
    pub abelian: bool,
}

/// From a certificate for `s`: `<S> ⊆ <x, y>`, which is abelian because
/// `x` and `y` commute, and needs at most the two generators `x, y`.
pub fn subgroup_conclusions(cert: &WeakStructureCertificate, s: &GroupSubset) -> Result<SubgroupConclusion> {
    cert.recheck(s)?;
    let mut generators: Vec<GroupElement> = Vec::new();
    for g in [&cert.x, &cert.y] {
        if !g.is_identity() && !generators.contains(g) {
            generators.push(g.clone());
        }
    }
    let mut abelian = true;
    for (i, g) in generators.iter().enumerate() {
        for h in &generators[i + 1..] {
            abelian &= g.commutes(h)?;
        }
    }
    Ok(SubgroupConclusion { generators, abelian })
}
