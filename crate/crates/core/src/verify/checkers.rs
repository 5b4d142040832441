use std::collections::HashSet;

use serde::Serialize;
use serde_json::json;

use super::{Instance, Outcome, TheoremChecker, TheoremId, VerificationReport};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, ProductPoint};
use crate::nonabelian::{product_set, subgroup_conclusions, GroupSubset, StrategyRegistry, WindowCheck};
use crate::sets::{
    is_ap_pair_with_common_difference, minimal_containing_ap, normalize, stats, sumset, IntSet,
};
use crate::structure::{first_projection, is_structured, is_structured_literal, recover_affine_witness, StructureCertificate};

fn int_set(instance: &Instance) -> Result<&IntSet> {
    match instance {
        Instance::Int { set } => Ok(set),
        other => Err(Error::Malformed(format!("expected an integer set, got {}", other.kind()))),
    }
}

fn require_k(set: &IntSet, k: usize) -> Result<()> {
    if set.len() < k {
        return Err(Error::Malformed(format!("need k >= {k}, got {set}")));
    }
    Ok(())
}

fn require_normalized(set: &IntSet) -> Result<()> {
    if !set.is_normalized() {
        return Err(Error::Malformed(format!("{set} is not normalized (min 0, gcd 1)")));
    }
    Ok(())
}

fn sumset_size(a: &IntSet) -> Result<i64> {
    Ok(sumset(a, a)?.len() as i64)
}

#[derive(Serialize)]
struct Bound {
    lhs: i64,
    rhs: i64,
}

/// `|A+B| >= |A|+|B|-1`, with equality exactly for APs of equal difference.
pub struct Eq1Checker;

impl TheoremChecker for Eq1Checker {
    fn id(&self) -> TheoremId {
        TheoremId::Eq1LowerBound
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let Instance::IntPair { a, b } = instance else {
            return Err(Error::Malformed(format!("expected an integer pair, got {}", instance.kind())));
        };
        let lhs = sumset(a, b)?.len() as i64;
        let rhs = (a.len() + b.len()) as i64 - 1;
        let mut holds = lhs >= rhs;
        let mut o = Outcome::default();
        if a.len() >= 2 && b.len() >= 2 {
            let ap = is_ap_pair_with_common_difference(a, b)?.is_some();
            holds &= (lhs == rhs) == ap;
            o = o.flag_if(ap, "equality_case");
        }
        o.hypothesis_met = true;
        o.conclusion_holds = holds;
        Ok(o.with_evidence(Bound { lhs, rhs }))
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `|A+B| >= min{p, |A|+|B|-1}` in `Z/pZ`.
pub struct CauchyDavenportChecker;

impl TheoremChecker for CauchyDavenportChecker {
    fn id(&self) -> TheoremId {
        TheoremId::CauchyDavenport
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let Instance::Modular { p, a, b } = instance else {
            return Err(Error::Malformed(format!("expected residue sets, got {}", instance.kind())));
        };
        let p = *p;
        if !is_prime(p) {
            return Err(Error::Unsupported(format!("modulus {p} is not prime")));
        }
        let check = |v: &[u64]| -> Result<HashSet<u64>> {
            let s: HashSet<u64> = v.iter().copied().collect();
            if s.is_empty() || s.len() != v.len() || v.iter().any(|&r| r >= p) {
                return Err(Error::Malformed(format!("bad residue set {v:?} mod {p}")));
            }
            Ok(s)
        };
        let (sa, sb) = (check(a)?, check(b)?);
        let sums: HashSet<u64> = sa.iter().flat_map(|x| sb.iter().map(move |y| (x + y) % p)).collect();
        let lhs = sums.len() as i64;
        let rhs = (p as i64).min((sa.len() + sb.len()) as i64 - 1);
        Ok(Outcome::decided(lhs >= rhs).with_evidence(Bound { lhs, rhs }))
    }
}

/// Freiman's `3k-4` theorem.
pub struct ThmAChecker;

impl TheoremChecker for ThmAChecker {
    fn id(&self) -> TheoremId {
        TheoremId::ThmA
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let a = int_set(instance)?;
        require_k(a, 2)?;
        require_normalized(a)?;
        let st = stats(a)?;
        let k = st.k as i64;
        if st.sumset_size as i64 > 3 * k - 4 {
            return Ok(Outcome::vacuous());
        }
        let ap = minimal_containing_ap(a)?;
        let bound = k + st.b;
        Ok(Outcome::decided(ap.length as i64 <= bound)
            .flag_if(ap.length as i64 == bound, "ap_length_tight")
            .with_evidence(json!({ "ap": ap, "b": st.b, "k_plus_b": bound })))
    }
}

/// `|A+A| >= |B+B| + 3` when the top two elements are not successive in
/// any AP containing `A`.
pub struct Lemma1Checker;

impl TheoremChecker for Lemma1Checker {
    fn id(&self) -> TheoremId {
        TheoremId::Lemma1
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let a = int_set(instance)?;
        require_k(a, 3)?;
        let e = a.elements();
        // successive in some containing AP iff the gap equals the difference gcd
        let gap = e[e.len() - 1] - e[e.len() - 2];
        if gap == a.difference_gcd() {
            return Ok(Outcome::vacuous());
        }
        let b = a.without_max().expect("k >= 3");
        let lhs = sumset_size(a)?;
        let rhs = sumset_size(&b)? + 3;
        Ok(Outcome::decided(lhs >= rhs).with_evidence(Bound { lhs, rhs }))
    }
}

/// `|A+A| >= 2k + R - 3` for normalized `A`.
pub struct Lemma2Checker;

impl TheoremChecker for Lemma2Checker {
    fn id(&self) -> TheoremId {
        TheoremId::Lemma2
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let a = int_set(instance)?;
        require_k(a, 3)?;
        require_normalized(a)?;
        let st = stats(a)?;
        let lhs = st.sumset_size as i64;
        let rhs = 2 * st.k as i64 + st.r - 3;
        Ok(Outcome::decided(lhs >= rhs)
            .flag_if(lhs == rhs, "equality")
            .with_evidence(json!({ "lhs": lhs, "rhs": rhs, "r": st.r })))
    }
}

/// A non-structured normalized set has `|A+A| > 3k - 4`.
pub struct Cor1Checker;

impl TheoremChecker for Cor1Checker {
    fn id(&self) -> TheoremId {
        TheoremId::Cor1
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let a = int_set(instance)?;
        require_k(a, 3)?;
        require_normalized(a)?;
        let cert = is_structured(a)?;
        if let Some(t) = cert.trace() {
            return Ok(Outcome::vacuous().with_evidence(json!({ "seed": t.seed })));
        }
        let lhs = sumset_size(a)?;
        let rhs = 3 * a.len() as i64 - 3;
        Ok(Outcome::decided(lhs >= rhs).with_evidence(Bound { lhs, rhs }))
    }
}

/// `A ⊆ [0, N-1]` with `|A| >= 2N/3 + 1` is structured. For a bare integer
/// set, `N = max(A) + 1`.
pub struct Cor2Checker;

impl TheoremChecker for Cor2Checker {
    fn id(&self) -> TheoremId {
        TheoremId::Cor2
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let (a, n) = match instance {
            Instance::Bounded { set, n } => (set, *n),
            Instance::Int { set } => (set, set.largest() + 1),
            other => {
                return Err(Error::Malformed(format!("expected a bounded set, got {}", other.kind())))
            }
        };
        if n < 2 || a.smallest() < 0 || a.largest() > n - 1 {
            return Err(Error::Malformed(format!("{a} is not a subset of [0, {}]", n - 1)));
        }
        // |A| >= 2N/3 + 1, exactly
        if 3 * (a.len() as i64 - 1) < 2 * n {
            return Ok(Outcome::vacuous());
        }
        let cert = is_structured_literal(a)?;
        Ok(Outcome::decided(cert.is_structured())
            .with_evidence(json!({ "n": n, "seed": cert.trace().map(|t| t.seed.clone()) })))
    }
}

struct ProductData {
    points: Vec<ProductPoint>,
    proj: IntSet,
    sum_size: i64,
}

fn product_data(instance: &Instance) -> Result<ProductData> {
    let points = instance.product_points()?;
    if points.len() < 3 {
        return Err(Error::Malformed(format!("need k >= 3 points, got {}", points.len())));
    }
    let proj = first_projection(&points).map_err(|e| Error::Malformed(e.to_string()))?;
    let mut sums = HashSet::new();
    for p in &points {
        for q in &points {
            sums.insert(p.add(q)?);
        }
    }
    Ok(ProductData { points, proj, sum_size: sums.len() as i64 })
}

fn small_doubling(d: &ProductData) -> bool {
    d.sum_size <= 3 * d.points.len() as i64 - 4
}

/// `|𝒜+𝒜| <= 3k - 4` puts `𝒜 ⊂ Z x G` inside an AP of length `k + b`.
pub struct Thm1Checker;

#[derive(Serialize)]
struct ProductAp {
    start: (i64, GroupElement),
    difference: (i64, GroupElement),
    length: i64,
    b: i64,
    r: i64,
    b_eq_r_minus_2: bool,
}

impl TheoremChecker for Thm1Checker {
    fn id(&self) -> TheoremId {
        TheoremId::Thm1
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let d = product_data(instance)?;
        if !small_doubling(&d) {
            return Ok(Outcome::vacuous());
        }
        let (norm, map) = normalize(&d.proj)?;
        let st = stats(&norm)?;
        let deduction = st.b == st.r - 2;
        let base = Outcome::default().flag_if(!deduction, "b_eq_r_minus_2_failed");
        let (x, y) = match recover_affine_witness(&d.points) {
            Ok(StructureCertificate::ProductStructured { x, y, .. }) => (x, y),
            Ok(_) => unreachable!("recover_affine_witness returns a product certificate"),
            Err(e @ (Error::Precondition(_) | Error::InternalInvariant(_))) => {
                return Ok(Outcome { hypothesis_met: true, conclusion_holds: false, ..base }.note(e.to_string()));
            }
            Err(e) => return Err(e),
        };
        let length = st.k as i64 + st.b;
        // point (a, x_a) sits at index a' = map(a) of the AP
        // start (min, y), difference (scale, x)
        let mut holds = norm.largest() < length;
        for p in &d.points {
            let t = map.apply(p.a)?;
            holds &= 0 <= t && t < length && p.x == y.op(&x.pow(t)?)?;
        }
        let ap = ProductAp {
            start: (map.shift, y),
            difference: (map.scale, x),
            length,
            b: st.b,
            r: st.r,
            b_eq_r_minus_2: deduction,
        };
        Ok(Outcome { hypothesis_met: true, conclusion_holds: holds, ..base }.with_evidence(ap))
    }
}

/// `|𝒜+𝒜| <= 3k - 4` makes `𝒜` 2-isomorphic to a structured set; checked
/// in the stronger on-the-nose form with an explicit affine witness.
pub struct Thm2Checker;

impl TheoremChecker for Thm2Checker {
    fn id(&self) -> TheoremId {
        TheoremId::Thm2
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let d = product_data(instance)?;
        if !small_doubling(&d) {
            return Ok(Outcome::vacuous());
        }
        match recover_affine_witness(&d.points) {
            Ok(cert) => {
                let StructureCertificate::ProductStructured { x, y, normalization, .. } = &cert else {
                    unreachable!("recover_affine_witness returns a product certificate")
                };
                let mut holds = true;
                for p in &d.points {
                    holds &= p.x == y.op(&x.pow(normalization.apply(p.a)?)?)?;
                }
                Ok(Outcome::decided(holds).with_evidence(cert))
            }
            Err(e @ (Error::Precondition(_) | Error::InternalInvariant(_))) => {
                Ok(Outcome::decided(false).note(e.to_string()))
            }
            Err(e) => Err(e),
        }
    }
}

fn ordered_subset(instance: &Instance) -> Result<GroupSubset> {
    let s = instance.group_subset()?;
    if !s.spec.is_ordered() {
        return Err(Error::Unsupported(format!("{} carries no group order", s.spec)));
    }
    if s.len() < 3 {
        return Err(Error::Malformed(format!("need |S| >= 3, got {}", s.len())));
    }
    Ok(s)
}

/// `|S^2| <= 3|S| - 4` in an ordered group makes `S` weakly structured,
/// inside `{y x^i : 0 <= i <= N-1}` with `N = |S^2| - |S|`. Both the stated
/// window and the one-longer window `0..=N` are evaluated.
#[derive(Default)]
pub struct Thm4Checker {
    strategies: StrategyRegistry,
}

impl Thm4Checker {
    pub fn with_strategies(strategies: StrategyRegistry) -> Self {
        Thm4Checker { strategies }
    }
}

impl TheoremChecker for Thm4Checker {
    fn id(&self) -> TheoremId {
        TheoremId::Thm4
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let s = ordered_subset(instance)?;
        let square = product_set(&s, &s)?.len();
        if square as i64 > 3 * s.len() as i64 - 4 {
            return Ok(Outcome::vacuous());
        }
        let Some((strategy, cert)) = self.strategies.search(&s)? else {
            return Ok(Outcome::decided(false).note("no weak-structure certificate found"));
        };
        let w = WindowCheck::new(square, s.len(), &cert);
        Ok(Outcome::decided(w.strict || w.inclusive)
            .flag_if(w.strict, "window_strict_held")
            .flag_if(w.inclusive, "window_inclusive_held")
            .with_evidence(json!({ "strategy": strategy, "certificate": cert, "window": w })))
    }
}

/// `|S^2| <= 3|S| - 4` in an ordered group makes `<S>` abelian and
/// generated by two elements.
#[derive(Default)]
pub struct Thm3Checker {
    strategies: StrategyRegistry,
}

impl Thm3Checker {
    pub fn with_strategies(strategies: StrategyRegistry) -> Self {
        Thm3Checker { strategies }
    }
}

impl TheoremChecker for Thm3Checker {
    fn id(&self) -> TheoremId {
        TheoremId::Thm3
    }

    fn evaluate(&self, instance: &Instance) -> Result<Outcome> {
        let s = ordered_subset(instance)?;
        let square = product_set(&s, &s)?.len();
        if square as i64 > 3 * s.len() as i64 - 4 {
            return Ok(Outcome::vacuous());
        }
        let Some((_, cert)) = self.strategies.search(&s)? else {
            return Ok(Outcome::decided(false).note("no weak-structure certificate found"));
        };
        let c = subgroup_conclusions(&cert, &s)?;
        Ok(Outcome::decided(c.abelian && c.generators.len() <= 2).with_evidence(c))
    }
}

macro_rules! single {
    ($(#[$m:meta])* $name:ident, $checker:expr, $arg:ident : $ty:ty => $inst:expr) => {
        $(#[$m])*
        pub fn $name($arg: $ty) -> Result<VerificationReport> {
            $checker.check(&$inst)
        }
    };
}

single!(verify_thm_a, ThmAChecker, a: &IntSet => Instance::int(a.clone()));
single!(verify_lemma_1, Lemma1Checker, a: &IntSet => Instance::int(a.clone()));
single!(verify_lemma_2, Lemma2Checker, a: &IntSet => Instance::int(a.clone()));
single!(verify_cor_1, Cor1Checker, a: &IntSet => Instance::int(a.clone()));
single!(verify_thm_1, Thm1Checker, points: &[ProductPoint] => Instance::product(points)?);
single!(verify_thm_2, Thm2Checker, points: &[ProductPoint] => Instance::product(points)?);
single!(verify_theorem_prem1, Thm4Checker::default(), s: &GroupSubset => Instance::group(s));
single!(verify_thm_3, Thm3Checker::default(), s: &GroupSubset => Instance::group(s));

pub fn verify_cor_2(a: &IntSet, n: i64) -> Result<VerificationReport> {
    Cor2Checker.check(&Instance::Bounded { set: a.clone(), n })
}

pub fn verify_cauchy_davenport(p: u64, a: &[u64], b: &[u64]) -> Result<VerificationReport> {
    CauchyDavenportChecker.check(&Instance::Modular { p, a: a.to_vec(), b: b.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;

    fn s(v: &[i64]) -> IntSet {
        IntSet::new(v.iter().copied()).unwrap()
    }

    fn pts(n: u64, v: &[(i64, i64)]) -> Vec<ProductPoint> {
        let spec = GroupSpec::cyclic(n);
        v.iter().map(|&(a, x)| ProductPoint::new(a, spec.element(&[x]).unwrap())).collect()
    }

    fn heis(v: &[[i64; 3]]) -> GroupSubset {
        GroupSubset::new(GroupSpec::Heisenberg, v.iter().map(|&c| GroupElement::Heisenberg(c))).unwrap()
    }

    #[test]
    fn thm_a_examples() {
        let r = verify_thm_a(&s(&[0, 1, 2])).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds);
        assert_eq!(r.evidence.as_ref().unwrap()["ap"]["length"], 3);
        assert!(!verify_thm_a(&s(&[0, 1, 3])).unwrap().hypothesis_met);
        let r = verify_thm_a(&s(&[0, 1, 2, 4])).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds);
        assert_eq!(r.evidence.as_ref().unwrap()["ap"]["length"], 5);
        assert_eq!(r.evidence.as_ref().unwrap()["b"], 1);
        assert!(verify_thm_a(&s(&[1, 2, 3])).is_err());
    }

    #[test]
    fn lemma_1_examples() {
        let r = verify_lemma_1(&s(&[0, 1, 5])).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds);
        assert_eq!(r.evidence.unwrap(), json!({"lhs": 6, "rhs": 6}));
        assert!(!verify_lemma_1(&s(&[0, 1, 2])).unwrap().hypothesis_met);
        let r = verify_lemma_1(&s(&[0, 2, 3, 7])).unwrap();
        // A+A = {0,2,3,4,5,6,7,9,10,14}, B+B = {0,2,3,4,5,6}
        assert_eq!(r.evidence.unwrap(), json!({"lhs": 10, "rhs": 9}));
        assert!(r.conclusion_holds);
    }

    #[test]
    fn lemma_2_examples() {
        for k in 3..9 {
            let r = verify_lemma_2(&IntSet::interval(0, k - 1).unwrap()).unwrap();
            assert!(r.conclusion_holds && r.flags.contains(&"equality"));
        }
        let r = verify_lemma_2(&s(&[0, 1, 3])).unwrap();
        assert!(r.conclusion_holds && r.flags.contains(&"equality"));
        let r = verify_lemma_2(&s(&[0, 2, 3])).unwrap();
        assert_eq!(r.evidence.unwrap()["rhs"], 6);
        assert!(r.conclusion_holds);
    }

    #[test]
    fn cor_1_examples() {
        let r = verify_cor_1(&s(&[0, 1, 3, 4, 6])).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds);
        assert_eq!(r.evidence.unwrap(), json!({"lhs": 12, "rhs": 12}));
        assert!(!verify_cor_1(&s(&[0, 1, 2])).unwrap().hypothesis_met);
    }

    #[test]
    fn cor_2_examples() {
        let r = verify_cor_2(&s(&[0, 1, 2, 3, 4, 5, 6]), 9).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds);
        for skip in 0..6 {
            let a = IntSet::new((0..6).filter(|&x| x != skip)).unwrap();
            let r = verify_cor_2(&a, 6).unwrap();
            assert!(r.hypothesis_met && r.conclusion_holds, "{a}");
        }
        assert!(!verify_cor_2(&s(&[0, 1, 2]), 9).unwrap().hypothesis_met);
        assert!(verify_cor_2(&s(&[0, 9]), 9).is_err());
    }

    #[test]
    fn cauchy_davenport_examples() {
        let r = verify_cauchy_davenport(5, &[0, 1], &[0, 1]).unwrap();
        assert_eq!(r.evidence.unwrap(), json!({"lhs": 3, "rhs": 3}));
        let all: Vec<u64> = (0..5).collect();
        let r = verify_cauchy_davenport(5, &all, &all).unwrap();
        assert_eq!(r.evidence.unwrap(), json!({"lhs": 5, "rhs": 5}));
        assert!(matches!(verify_cauchy_davenport(6, &[0], &[0]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn thm_1_examples() {
        for (x0, y0) in [(0, 0), (1, 2), (4, 3)] {
            let p = pts(5, &[(0, y0), (1, y0 + x0), (2, y0 + 2 * x0)]);
            let r = verify_thm_1(&p).unwrap();
            assert!(r.hypothesis_met && r.conclusion_holds);
            assert_eq!(r.evidence.unwrap()["length"], 3);
        }
        assert!(!verify_thm_1(&pts(5, &[(0, 0), (1, 0), (2, 1)])).unwrap().hypothesis_met);
    }

    #[test]
    fn thm_1_records_failed_b_r_deduction() {
        // A = {0,1,2,4,5}: |A+A| = 11 <= 11, b = 2, R = 3
        let p = pts(3, &[(0, 0), (1, 0), (2, 0), (4, 0), (5, 0)]);
        let r = verify_thm_1(&p).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds);
        assert!(r.flags.contains(&"b_eq_r_minus_2_failed"));
        let e = r.evidence.unwrap();
        assert_eq!((e["b"].as_i64(), e["r"].as_i64()), (Some(2), Some(3)));
    }

    #[test]
    fn thm_1_with_dilated_projection() {
        // gcd 2 projection over Z/2: witness lives in normalized coordinates
        let p = pts(2, &[(0, 0), (2, 1), (4, 0)]);
        let r = verify_thm_1(&p).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds, "{r:?}");
    }

    #[test]
    fn thm_2_examples() {
        let r = verify_thm_2(&pts(5, &[(0, 1), (1, 1), (2, 1), (3, 1)])).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds);
        assert_eq!(r.evidence.as_ref().unwrap()["x"], json!([0]));
        let r = verify_thm_2(&pts(5, &[(0, 2), (1, 3), (2, 4)])).unwrap();
        assert!(r.conclusion_holds);
        assert!(verify_thm_2(&pts(5, &[(0, 2), (0, 3), (2, 4)])).is_err());
    }

    #[test]
    fn thm_4_examples() {
        let r = verify_theorem_prem1(&heis(&[[0, 0, 1], [1, 0, 1], [2, 0, 1]])).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds);
        assert_eq!(r.flags, vec!["window_inclusive_held"]);
        let w = &r.evidence.unwrap()["window"];
        assert_eq!((w["n"].as_i64(), w["span"].as_i64()), (Some(2), Some(2)));
        let r = verify_theorem_prem1(&heis(&[[0, 0, 0], [1, 0, 0], [0, 1, 0]])).unwrap();
        assert!(!r.hypothesis_met);
        let z = GroupSubset::from_coords(GroupSpec::cyclic(5), &[vec![0], vec![1], vec![2]]).unwrap();
        assert!(matches!(verify_theorem_prem1(&z), Err(Error::Unsupported(_))));
    }

    #[test]
    fn thm_3_examples() {
        let r = verify_thm_3(&heis(&[[0, 0, 1], [1, 0, 1], [2, 0, 1]])).unwrap();
        assert!(r.hypothesis_met && r.conclusion_holds);
        assert_eq!(r.evidence.unwrap()["generators"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn eq1_examples() {
        let r = Eq1Checker.check(&Instance::IntPair { a: s(&[0, 3, 6]), b: s(&[1, 4]) }).unwrap();
        assert!(r.conclusion_holds && r.flags.contains(&"equality_case"));
        let r = Eq1Checker.check(&Instance::IntPair { a: s(&[0, 1, 3]), b: s(&[0, 1]) }).unwrap();
        assert!(r.conclusion_holds && r.flags.is_empty());
    }

    #[test]
    fn wrong_instance_kind_is_malformed() {
        let inst = Instance::int(s(&[0, 1, 2]));
        assert!(matches!(Thm1Checker.check(&inst), Err(Error::Malformed(_))));
        assert!(matches!(Eq1Checker.check(&inst), Err(Error::Malformed(_))));
    }
}
