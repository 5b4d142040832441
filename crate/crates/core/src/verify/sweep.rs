//! Instance families and the parallel sweep engine.
//!
//! A family is an indexable, finite sequence of instances: instance `i` is a
//! pure function of the family parameters (and the seed, in random mode), so
//! any partition of the index range across workers reproduces the same
//! report. Results are folded in index order.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_integer::Integer;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CheckerRegistry, Instance, TheoremId, VerificationReport};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec};
use crate::sets::IntSet;

/// Product-set families switch to random sampling above this many
/// second-coordinate tuples per projection.
pub const EXHAUSTIVE_TUPLE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Random { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Subsets of `[0, n_max]` with min 0 and gcd 1 (all subsets when `raw`).
    NormalizedIntSets { n_max: u32, k_min: usize, k_max: usize, raw: bool },
    /// `(A, N)` for every `N` in range and every nonempty `A ⊆ [0, N-1]`.
    BoundedIntSets { n_min: u32, n_max: u32 },
    /// Pairs of subsets of `[0, n_max]`, each with min 0.
    IntPairs { n_max: u32 },
    /// Pairs of nonempty residue sets mod `p`.
    ModularPairs { p: u64 },
    /// Subsets of `Z x inner` with normalized projection inside `[0, a_max]`.
    ProductSets { inner: GroupSpec, a_max: u32, k_min: usize, k_max: usize, mode: Mode },
    /// Heisenberg subsets with coordinates in `[lo, hi]`.
    HeisenbergSubsets { lo: i64, hi: i64, k_min: usize, k_max: usize, mode: Mode },
}

impl Family {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Family::ProductSets { mode: Mode::Random { seed, .. }, .. }
            | Family::HeisenbergSubsets { mode: Mode::Random { seed, .. }, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn source(&self) -> Result<Box<dyn InstanceSource>> {
        Ok(match self {
            Family::NormalizedIntSets { n_max, k_min, k_max, raw } => {
                Box::new(IntSets::new(*n_max, *k_min, *k_max, *raw)?)
            }
            Family::BoundedIntSets { n_min, n_max } => Box::new(BoundedSets::new(*n_min, *n_max)?),
            Family::IntPairs { n_max } => Box::new(IntPairs::new(*n_max)?),
            Family::ModularPairs { p } => Box::new(ModularPairs::new(*p)?),
            Family::ProductSets { inner, a_max, k_min, k_max, mode } => {
                Box::new(ProductSets::new(inner.clone(), *a_max, *k_min, *k_max, *mode)?)
            }
            Family::HeisenbergSubsets { lo, hi, k_min, k_max, mode } => {
                Box::new(HeisenbergSubsets::new(*lo, *hi, *k_min, *k_max, *mode)?)
            }
        })
    }
}

/// Indexable instance stream.
pub trait InstanceSource: Send + Sync {
    fn len(&self) -> u64;

    fn instance(&self, index: u64) -> Instance;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_range(k_min: usize, k_max: usize, n: u32, limit: u32) -> Result<()> {
    if k_min > k_max || k_min == 0 {
        return Err(Error::Malformed(format!("empty size range {k_min}..={k_max}")));
    }
    if n > limit {
        return Err(Error::Malformed(format!("bound {n} exceeds the enumeration limit {limit}")));
    }
    Ok(())
}

fn mask_gcd(mask: u64) -> u64 {
    (0..64u64).filter(|i| mask >> i & 1 == 1).fold(0, |g, i| g.gcd(&i))
}

/// Bitmasks over `[0, n_max]` containing bit 0 (any mask when `raw`).
fn normalized_masks(n_max: u32, k_min: usize, k_max: usize, raw: bool) -> Vec<u64> {
    (1u64..1 << (n_max + 1))
        .filter(|&m| {
            let k = m.count_ones() as usize;
            (k_min..=k_max).contains(&k) && (raw || (m & 1 == 1 && mask_gcd(m) == 1))
        })
        .collect()
}

struct IntSets {
    masks: Vec<u64>,
}

impl IntSets {
    fn new(n_max: u32, k_min: usize, k_max: usize, raw: bool) -> Result<Self> {
        check_range(k_min, k_max, n_max, 24)?;
        Ok(IntSets { masks: normalized_masks(n_max, k_min, k_max, raw) })
    }
}

impl InstanceSource for IntSets {
    fn len(&self) -> u64 {
        self.masks.len() as u64
    }

    fn instance(&self, index: u64) -> Instance {
        Instance::int(IntSet::from_mask(self.masks[index as usize], 0).expect("nonempty mask"))
    }
}

struct BoundedSets {
    items: Vec<(u64, u32)>,
}

impl BoundedSets {
    fn new(n_min: u32, n_max: u32) -> Result<Self> {
        if n_min < 2 || n_min > n_max {
            return Err(Error::Malformed(format!("bad N range {n_min}..={n_max}")));
        }
        check_range(1, 1, n_max, 22)?;
        let items = (n_min..=n_max)
            .flat_map(|n| (1u64..1 << n).map(move |m| (m, n)))
            .collect();
        Ok(BoundedSets { items })
    }
}

impl InstanceSource for BoundedSets {
    fn len(&self) -> u64 {
        self.items.len() as u64
    }

    fn instance(&self, index: u64) -> Instance {
        let (m, n) = self.items[index as usize];
        Instance::Bounded { set: IntSet::from_mask(m, 0).expect("nonempty mask"), n: n as i64 }
    }
}

struct IntPairs {
    side: u64,
}

impl IntPairs {
    fn new(n_max: u32) -> Result<Self> {
        check_range(1, 1, n_max, 14)?;
        Ok(IntPairs { side: 1 << n_max })
    }
}

impl InstanceSource for IntPairs {
    fn len(&self) -> u64 {
        self.side * self.side
    }

    fn instance(&self, index: u64) -> Instance {
        // odd masks: bit 0 always set
        let a = (index / self.side) << 1 | 1;
        let b = (index % self.side) << 1 | 1;
        Instance::IntPair {
            a: IntSet::from_mask(a, 0).expect("nonempty"),
            b: IntSet::from_mask(b, 0).expect("nonempty"),
        }
    }
}

struct ModularPairs {
    p: u64,
    side: u64,
}

impl ModularPairs {
    fn new(p: u64) -> Result<Self> {
        if !(2..=13).contains(&p) {
            return Err(Error::Malformed(format!("modulus {p} outside 2..=13")));
        }
        Ok(ModularPairs { p, side: (1 << p) - 1 })
    }
}

impl InstanceSource for ModularPairs {
    fn len(&self) -> u64 {
        self.side * self.side
    }

    fn instance(&self, index: u64) -> Instance {
        let residues = |m: u64| (0..self.p).filter(|i| m >> i & 1 == 1).collect();
        Instance::Modular {
            p: self.p,
            a: residues(index / self.side + 1),
            b: residues(index % self.side + 1),
        }
    }
}

/// Per-instance generator: deterministic in `(seed, index)` alone.
fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

struct ProductSets {
    inner: GroupSpec,
    elements: Vec<GroupElement>,
    a_max: u32,
    k_min: usize,
    k_max: usize,
    mode: Mode,
    projections: Vec<u64>,
    /// Start index of each projection's block of tuples.
    offsets: Vec<u64>,
}

impl ProductSets {
    fn new(inner: GroupSpec, a_max: u32, k_min: usize, k_max: usize, mode: Mode) -> Result<Self> {
        inner.validate()?;
        check_range(k_min, k_max, a_max, 24)?;
        if k_min < 3 || k_max > a_max as usize + 1 {
            return Err(Error::Malformed(format!("sizes {k_min}..={k_max} need 3 <= k <= a_max + 1")));
        }
        if !inner.is_abelian() {
            return Err(Error::Unsupported(format!("inner group {inner} is not abelian")));
        }
        let elements = inner.elements()?;
        let order = elements.len() as u64;
        let projections = normalized_masks(a_max, k_min, k_max, false);
        let mut offsets = Vec::with_capacity(projections.len() + 1);
        let mut total = 0u64;
        for &m in &projections {
            offsets.push(total);
            if mode == Mode::Exhaustive {
                let tuples = order
                    .checked_pow(m.count_ones())
                    .filter(|&t| t <= EXHAUSTIVE_TUPLE_LIMIT)
                    .ok_or_else(|| {
                        Error::Unsupported(format!(
                            "|G|^k exceeds {EXHAUSTIVE_TUPLE_LIMIT}; use random mode"
                        ))
                    })?;
                total += tuples;
            }
        }
        offsets.push(total);
        Ok(ProductSets { inner, elements, a_max, k_min, k_max, mode, projections, offsets })
    }

    fn exhaustive(&self, index: u64) -> Instance {
        let block = self.offsets.partition_point(|&o| o <= index) - 1;
        let mask = self.projections[block];
        let mut code = index - self.offsets[block];
        let order = self.elements.len() as u64;
        let proj = IntSet::from_mask(mask, 0).expect("nonempty");
        let mut points = Vec::with_capacity(proj.len());
        for &a in proj.elements() {
            points.push((a, self.elements[(code % order) as usize].coords()));
            code /= order;
        }
        Instance::Product { inner: self.inner.clone(), points }
    }

    /// Half uniform; half affine `x_i = a_i x + y`, a third of which get
    /// one point perturbed.
    fn random(&self, seed: u64, index: u64) -> Instance {
        let mut rng = instance_rng(seed, index);
        let k = rng.random_range(self.k_min..=self.k_max);
        let mut proj: Vec<i64> = sample(&mut rng, self.a_max as usize, k - 1)
            .into_iter()
            .map(|i| i as i64 + 1)
            .collect();
        proj.push(0);
        proj.sort_unstable();
        let pick = |rng: &mut ChaCha8Rng| self.elements[rng.random_range(0..self.elements.len())].clone();
        let xs: Vec<GroupElement> = if rng.random_bool(0.5) {
            proj.iter().map(|_| pick(&mut rng)).collect()
        } else {
            let (x, y) = (pick(&mut rng), pick(&mut rng));
            let mut xs: Vec<GroupElement> = proj
                .iter()
                .map(|&a| x.pow(a).and_then(|p| p.op(&y)).expect("finite group"))
                .collect();
            if rng.random_bool(1.0 / 3.0) {
                let i = rng.random_range(0..k);
                xs[i] = xs[i].op(&pick(&mut rng)).expect("same group");
            }
            xs
        };
        Instance::Product {
            inner: self.inner.clone(),
            points: proj.into_iter().zip(xs).map(|(a, x)| (a, x.coords())).collect(),
        }
    }
}

impl InstanceSource for ProductSets {
    fn len(&self) -> u64 {
        match self.mode {
            Mode::Exhaustive => *self.offsets.last().expect("nonempty"),
            Mode::Random { count, .. } => count,
        }
    }

    fn instance(&self, index: u64) -> Instance {
        match self.mode {
            Mode::Exhaustive => self.exhaustive(index),
            Mode::Random { seed, .. } => self.random(seed, index),
        }
    }
}

struct HeisenbergSubsets {
    lo: i64,
    hi: i64,
    k_min: usize,
    k_max: usize,
    mode: Mode,
    /// Box elements in lex order.
    points: Vec<[i64; 3]>,
    /// `binom[n][r]` for `n <= |box|`, `r <= k_max`.
    binom: Vec<Vec<u64>>,
    offsets: Vec<u64>,
}

impl HeisenbergSubsets {
    fn new(lo: i64, hi: i64, k_min: usize, k_max: usize, mode: Mode) -> Result<Self> {
        if lo > hi || hi - lo > 20 {
            return Err(Error::Malformed(format!("bad coordinate box [{lo}, {hi}]")));
        }
        check_range(k_min, k_max, 0, 0)?;
        if k_min < 3 {
            return Err(Error::Malformed("Heisenberg sweeps need |S| >= 3".into()));
        }
        let mut points = Vec::new();
        for a in lo..=hi {
            for b in lo..=hi {
                for c in lo..=hi {
                    points.push([a, b, c]);
                }
            }
        }
        let n = points.len();
        if k_max > n {
            return Err(Error::Malformed(format!("|S| = {k_max} exceeds the box size {n}")));
        }
        let mut binom = vec![vec![0u64; k_max + 1]; n + 1];
        for i in 0..=n {
            binom[i][0] = 1;
            for j in 1..=k_max.min(i) {
                binom[i][j] = binom[i - 1][j - 1].saturating_add(if j < i { binom[i - 1][j] } else { 0 });
            }
        }
        let mut offsets = vec![0u64];
        for count in &binom[n][k_min..=k_max] {
            let next = offsets.last().unwrap().checked_add(*count);
            offsets.push(next.ok_or(Error::Overflow("subset count"))?);
        }
        if mode == Mode::Exhaustive && *offsets.last().unwrap() >= u64::MAX / 2 {
            return Err(Error::Unsupported("exhaustive enumeration too large".into()));
        }
        Ok(HeisenbergSubsets { lo, hi, k_min, k_max, mode, points, binom, offsets })
    }

    /// `rank`-th k-subset of the box in colex order.
    fn unrank(&self, mut rank: u64, k: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(k);
        let mut n = self.points.len();
        for r in (1..=k).rev() {
            // largest c < n with binom(c, r) <= rank
            n -= 1;
            while self.binom[n][r] > rank {
                n -= 1;
            }
            rank -= self.binom[n][r];
            out.push(n);
        }
        out
    }

    fn in_box(&self, g: &GroupElement) -> bool {
        g.coords().iter().all(|c| (self.lo..=self.hi).contains(c))
    }

    /// Half uniform k-subsets of the box; half progressions `{y x^t}` with
    /// `y` drawn from the centralizer of `x`, kept only if they fit the box.
    fn random(&self, seed: u64, index: u64) -> Instance {
        let mut rng = instance_rng(seed, index);
        let k = rng.random_range(self.k_min..=self.k_max);
        if rng.random_bool(0.5) {
            for _ in 0..32 {
                if let Some(s) = self.progression(&mut rng, k) {
                    return s;
                }
            }
        }
        let idx = sample(&mut rng, self.points.len(), k);
        self.subset_at(idx.into_iter())
    }

    fn progression(&self, rng: &mut ChaCha8Rng, k: usize) -> Option<Instance> {
        let x = [rng.random_range(-1..=1), rng.random_range(-1..=1), rng.random_range(-1..=1)];
        if x == [0, 0, 0] {
            return None;
        }
        let c = rng.random_range(self.lo..=self.hi);
        // centralizer of (a,b,c) with (a,b) != 0 is {(p u, p v, *)} for (u,v) = (a,b)/gcd
        let y = if x[0] == 0 && x[1] == 0 {
            [rng.random_range(self.lo..=self.hi), rng.random_range(self.lo..=self.hi), c]
        } else {
            let g = x[0].gcd(&x[1]);
            let p = rng.random_range(self.lo..=self.hi);
            [p * x[0] / g, p * x[1] / g, c]
        };
        let (x, y) = (GroupElement::Heisenberg(x), GroupElement::Heisenberg(y));
        let exps = sample(rng, 2 * k, k);
        let mut elems = Vec::with_capacity(k);
        for t in exps {
            let g = y.op(&x.pow(t as i64).ok()?).ok()?;
            if !self.in_box(&g) {
                return None;
            }
            elems.push(g.coords());
        }
        elems.sort();
        Some(Instance::Group { spec: GroupSpec::Heisenberg, elements: elems })
    }

    fn subset_at(&self, idx: impl Iterator<Item = usize>) -> Instance {
        let mut elements: Vec<Vec<i64>> = idx.map(|i| self.points[i].to_vec()).collect();
        elements.sort();
        Instance::Group { spec: GroupSpec::Heisenberg, elements }
    }
}

impl InstanceSource for HeisenbergSubsets {
    fn len(&self) -> u64 {
        match self.mode {
            Mode::Exhaustive => *self.offsets.last().unwrap(),
            Mode::Random { count, .. } => count,
        }
    }

    fn instance(&self, index: u64) -> Instance {
        match self.mode {
            Mode::Exhaustive => {
                let block = self.offsets.partition_point(|&o| o <= index) - 1;
                let k = self.k_min + block;
                let idx = self.unrank(index - self.offsets[block], k);
                self.subset_at(idx.into_iter())
            }
            Mode::Random { seed, .. } => self.random(seed, index),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub theorem: TheoremId,
    pub family: Family,
    /// Worker threads; `None` uses the global rayon pool.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Stop after this many instances and flag the report incomplete.
    #[serde(default)]
    pub max_instances: Option<u64>,
    #[serde(default)]
    pub time_limit_ms: Option<u64>,
}

impl SweepSpec {
    pub fn new(theorem: TheoremId, family: Family) -> Self {
        SweepSpec { theorem, family, workers: None, max_instances: None, time_limit_ms: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub instances: u64,
    pub hypothesis_met: u64,
    pub holds: u64,
    pub vacuous: u64,
    pub counterexamples: u64,
    pub errors: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub theorem: TheoremId,
    pub family: Family,
    pub seed: Option<u64>,
    pub total_instances: u64,
    pub counts: Counts,
    /// Checker flag tallies, e.g. which window reading held.
    pub flags: BTreeMap<String, u64>,
    pub counterexamples: Vec<VerificationReport>,
    /// First errors encountered, capped.
    pub errors: Vec<String>,
    pub complete: bool,
    pub wall_time_ms: u64,
}

const ERROR_SAMPLE_CAP: usize = 32;
const CHUNK: u64 = 1 << 13;

impl SweepReport {
    fn empty(spec: &SweepSpec, total: u64) -> Self {
        SweepReport {
            schema_version: 1,
            theorem: spec.theorem,
            family: spec.family.clone(),
            seed: spec.family.seed(),
            total_instances: total,
            counts: Counts::default(),
            flags: BTreeMap::new(),
            counterexamples: Vec::new(),
            errors: Vec::new(),
            complete: false,
            wall_time_ms: 0,
        }
    }

    fn absorb(&mut self, index: u64, result: Result<VerificationReport>) {
        self.counts.instances += 1;
        match result {
            Ok(r) => {
                for f in &r.flags {
                    *self.flags.entry((*f).to_string()).or_default() += 1;
                }
                if !r.hypothesis_met {
                    self.counts.vacuous += 1;
                } else {
                    self.counts.hypothesis_met += 1;
                    if r.conclusion_holds {
                        self.counts.holds += 1;
                    } else {
                        self.counts.counterexamples += 1;
                        self.counterexamples.push(r);
                    }
                }
            }
            Err(e) => {
                self.counts.errors += 1;
                if self.errors.len() < ERROR_SAMPLE_CAP {
                    self.errors.push(format!("instance {index}: {e}"));
                }
            }
        }
    }

    /// Complete, error-free and without counterexamples.
    pub fn passed(&self) -> bool {
        self.complete && self.counts.counterexamples == 0 && self.counts.errors == 0
    }

    pub fn flag(&self, name: &str) -> u64 {
        self.flags.get(name).copied().unwrap_or(0)
    }

    /// JSON with timing fields removed, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        super::strip_timing(&mut v);
        v
    }
}

/// Runs a sweep with the standard checkers.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    run_sweep_with(spec, &CheckerRegistry::standard(), |_| {})
}

/// Runs a sweep, calling `progress` with the partial report after each chunk.
pub fn run_sweep_with(
    spec: &SweepSpec,
    registry: &CheckerRegistry,
    mut progress: impl FnMut(&SweepReport),
) -> Result<SweepReport> {
    let start = Instant::now();
    let checker = registry.get(spec.theorem)?;
    let source = spec.family.source()?;
    let total = source.len();
    let limit = spec.max_instances.map_or(total, |m| m.min(total));
    let deadline = spec.time_limit_ms.map(Duration::from_millis);
    let pool = match spec.workers {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?,
        ),
        None => None,
    };
    let mut report = SweepReport::empty(spec, total);
    let mut next = 0u64;
    while next < limit {
        if deadline.is_some_and(|d| start.elapsed() >= d) {
            break;
        }
        let end = (next + CHUNK).min(limit);
        let run = || {
            (next..end)
                .into_par_iter()
                .map(|i| checker.check(&source.instance(i)))
                .collect::<Vec<_>>()
        };
        let results = match &pool {
            Some(p) => p.install(run),
            None => run(),
        };
        for (i, r) in (next..end).zip(results) {
            report.absorb(i, r);
        }
        next = end;
        report.wall_time_ms = start.elapsed().as_millis() as u64;
        progress(&report);
    }
    report.complete = next == total;
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Every report of a family, in index order. Meant for cross-checks.
pub fn collect_reports(theorem: TheoremId, family: &Family) -> Result<Vec<Result<VerificationReport>>> {
    let registry = CheckerRegistry::standard();
    let checker = registry.get(theorem)?;
    let source = family.source()?;
    Ok((0..source.len())
        .into_par_iter()
        .map(|i| checker.check(&source.instance(i)))
        .collect())
}
