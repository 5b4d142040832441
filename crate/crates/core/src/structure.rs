//! The closure operator `X -> (X + X - X) ∩ A`, structured-set detection in
//! `Z`, and affine witness recovery for subsets of `Z x G`.
//!
//! A set `A ⊂ Z` is structured when some pair `{g, g+1} ⊆ A` generates all
//! of `A` under repeated closure. A subset of `Z x G` is structured when its
//! first projection is, and the second coordinates follow `x_i = a_i x + y`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{GroupElement, ProductPoint};
use crate::sets::{normalize, sumset, IntSet, NormalizationMap};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureTrace {
    pub seed: IntSet,
    /// `X^(1), X^(2), ...` up to the first repeat.
    pub iterates: Vec<IntSet>,
    pub fixed_point: IntSet,
}

impl ClosureTrace {
    pub fn steps(&self) -> usize {
        self.iterates.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum StructureCertificate {
    IntStructured {
        trace: ClosureTrace,
    },
    /// `x_i = a'_i x + y` where `a'_i = normalization(a_i)`.
    ProductStructured {
        trace: ClosureTrace,
        normalization: NormalizationMap,
        x: GroupElement,
        y: GroupElement,
    },
    NotStructured {
        seeds: Vec<ClosureTrace>,
    },
}

impl StructureCertificate {
    pub fn is_structured(&self) -> bool {
        !matches!(self, StructureCertificate::NotStructured { .. })
    }

    pub fn trace(&self) -> Option<&ClosureTrace> {
        match self {
            StructureCertificate::IntStructured { trace }
            | StructureCertificate::ProductStructured { trace, .. } => Some(trace),
            StructureCertificate::NotStructured { .. } => None,
        }
    }
}

/// `(X + X - X) ∩ A`.
pub fn closure_step(x: &IntSet, a: &IntSet) -> Result<IntSet> {
    if !x.is_subset(a) {
        return Err(Error::Precondition(format!("{x} is not contained in {a}")));
    }
    // c ∈ X+X-X  iff  c + r ∈ X+X for some r ∈ X
    let xx = sumset(x, x)?;
    let kept = a.elements().iter().copied().filter(|&c| {
        x.elements()
            .iter()
            .any(|&r| c.checked_add(r).is_some_and(|s| xx.contains(s)))
    });
    // X ⊆ X^(1), so the result is never empty
    IntSet::new(kept)
}

/// Iterates [`closure_step`] until it stabilizes.
pub fn closure(x: &IntSet, a: &IntSet) -> Result<ClosureTrace> {
    let mut iterates = vec![closure_step(x, a)?];
    loop {
        let last = iterates.last().expect("nonempty");
        let next = closure_step(last, a)?;
        if &next == last {
            break;
        }
        iterates.push(next);
        // iterates grow strictly inside A, so at most |A| of them
        assert!(
            iterates.len() <= a.len(),
            "closure of {x} in {a} failed to stabilize within |A| steps"
        );
    }
    let fixed_point = iterates.last().expect("nonempty").clone();
    Ok(ClosureTrace { seed: x.clone(), iterates, fixed_point })
}

/// Structured-set test on a normalized set (min 0, gcd 1). Seeds `{g, g+1}`
/// are tried in increasing `g`; the first success is returned.
pub fn is_structured(a: &IntSet) -> Result<StructureCertificate> {
    if a.len() < 2 {
        return Err(Error::Degenerate(format!("{a} has fewer than two elements")));
    }
    if !a.is_normalized() {
        return Err(Error::Precondition(format!("{a} is not normalized (min 0, gcd 1)")));
    }
    is_structured_literal(a)
}

/// Structured-set test straight from the definition, with no normalization
/// requirement. A set without two consecutive elements is never structured.
pub fn is_structured_literal(a: &IntSet) -> Result<StructureCertificate> {
    if a.len() < 2 {
        return Err(Error::Degenerate(format!("{a} has fewer than two elements")));
    }
    let mut seeds = Vec::new();
    for w in a.elements().windows(2) {
        if w[1] - w[0] != 1 {
            continue;
        }
        let trace = closure(&IntSet::new([w[0], w[1]])?, a)?;
        if &trace.fixed_point == a {
            return Ok(StructureCertificate::IntStructured { trace });
        }
        seeds.push(trace);
    }
    Ok(StructureCertificate::NotStructured { seeds })
}

/// Normalizes first, then tests. The certificate describes the normalized
/// image, which is 2-isomorphic to `a` through the returned map.
pub fn detect_structure(a: &IntSet) -> Result<(StructureCertificate, NormalizationMap)> {
    let (n, map) = normalize(a)?;
    Ok((is_structured(&n)?, map))
}

fn check_points(points: &[ProductPoint]) -> Result<IntSet> {
    let first = points
        .first()
        .ok_or_else(|| Error::Degenerate("empty point set".into()))?;
    let spec = first.x.spec();
    if let Some(p) = points.iter().find(|p| p.x.spec() != spec) {
        return Err(Error::TypeMismatch(format!("{} vs {}", spec, p.x.spec())));
    }
    if !spec.is_abelian() {
        return Err(Error::Unsupported(format!("inner group {spec} is not abelian")));
    }
    let proj = IntSet::new(points.iter().map(|p| p.a))?;
    if proj.len() != points.len() {
        return Err(Error::Precondition("first projection is not injective".into()));
    }
    Ok(proj)
}

/// First projection of a point set, checking injectivity and that the inner
/// group is shared and abelian.
pub fn first_projection(points: &[ProductPoint]) -> Result<IntSet> {
    check_points(points)
}

/// Checks `a_i + a_j = a_k + a_l  =>  x_i + x_j = x_k + x_l` over all
/// quadruples. Returns a violating `(i, j, k, l)` if there is one.
pub fn check_additive_implication(points: &[ProductPoint]) -> Result<Option<[usize; 4]>> {
    check_points(points)?;
    let mut seen: HashMap<i64, (usize, usize, GroupElement)> = HashMap::new();
    for i in 0..points.len() {
        for j in i..points.len() {
            let s = points[i].add(&points[j])?;
            match seen.get(&s.a) {
                Some((k, l, x)) if *x != s.x => return Ok(Some([i, j, *k, *l])),
                Some(_) => {}
                None => {
                    seen.insert(s.a, (i, j, s.x));
                }
            }
        }
    }
    Ok(None)
}

/// Recovers `x, y` with `x_i = a'_i x + y` for every point, where `a'` is the
/// normalized first coordinate. Requires a structured first projection and
/// the additive implication.
pub fn recover_affine_witness(points: &[ProductPoint]) -> Result<StructureCertificate> {
    let proj = check_points(points)?;
    let (norm, map) = normalize(&proj)?;
    let cert = is_structured(&norm)?;
    let StructureCertificate::IntStructured { trace } = cert else {
        return Err(Error::Precondition(format!(
            "first projection {proj} (normalized {norm}) is not structured"
        )));
    };
    if let Some([i, j, k, l]) = check_additive_implication(points)? {
        return Err(Error::Precondition(format!(
            "additive implication fails at points {i},{j},{k},{l}"
        )));
    }
    let normalized: Vec<(i64, &GroupElement)> = points
        .iter()
        .map(|p| Ok((map.apply(p.a)?, &p.x)))
        .collect::<Result<_>>()?;
    let at = |a: i64| {
        normalized
            .iter()
            .find(|(b, _)| *b == a)
            .map(|(_, x)| *x)
            .expect("seed lies in the projection")
    };
    let g = trace.seed.smallest();
    let x = at(g + 1).op(&at(g).inverse()?)?;
    let y = at(g).op(&x.pow(g)?.inverse()?)?;
    for (a, xi) in &normalized {
        if &x.pow(*a)?.op(&y)? != *xi {
            return Err(Error::InternalInvariant(format!(
                "witness x={x}, y={y} from seed {} fails at a={a}: trace {trace:?}",
                trace.seed
            )));
        }
    }
    Ok(StructureCertificate::ProductStructured { trace, normalization: map, x, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(v: &[i64]) -> IntSet {
        IntSet::new(v.iter().copied()).unwrap()
    }

    fn pts(n: u64, v: &[(i64, i64)]) -> Vec<ProductPoint> {
        let spec = GroupSpec::cyclic(n);
        v.iter()
            .map(|&(a, x)| ProductPoint::new(a, spec.element(&[x]).unwrap()))
            .collect()
    }

    // X+X-X by triple enumeration
    fn brute_step(x: &[i64], a: &[i64]) -> Vec<i64> {
        let mut out: Vec<i64> = a
            .iter()
            .copied()
            .filter(|c| x.iter().any(|p| x.iter().any(|q| x.iter().any(|r| p + q - r == *c))))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn closure_step_examples() {
        assert_eq!(brute_step(&[0, 1], &[0, 1, 2, 4]), vec![0, 1, 2]);
        assert_eq!(closure_step(&s(&[0, 1]), &s(&[0, 1, 2, 4])).unwrap(), s(&[0, 1, 2]));
        let a = s(&[0, 3, 4, 9]);
        assert_eq!(closure_step(&a, &a).unwrap(), a);
        assert_eq!(closure_step(&s(&[0, 1]), &s(&[0, 1, 3, 4, 6])).unwrap(), s(&[0, 1]));
        assert!(matches!(closure_step(&s(&[0, 5]), &s(&[0, 1])), Err(Error::Precondition(_))));
    }

    #[test]
    fn closure_examples() {
        let t = closure(&s(&[0, 1]), &s(&[0, 1, 2, 4])).unwrap();
        assert_eq!(t.fixed_point, s(&[0, 1, 2, 4]));
        assert_eq!(t.iterates, vec![s(&[0, 1, 2]), s(&[0, 1, 2, 4])]);
        let t = closure(&s(&[0, 1]), &s(&[0, 1])).unwrap();
        assert_eq!((t.fixed_point.clone(), t.steps()), (s(&[0, 1]), 1));
        let t = closure(&s(&[3, 4]), &s(&[0, 1, 3, 4, 6])).unwrap();
        assert_eq!(t.fixed_point, s(&[3, 4]));
    }

    #[test]
    fn is_structured_examples() {
        for n in 2..12 {
            let cert = is_structured(&IntSet::interval(0, n - 1).unwrap()).unwrap();
            assert_eq!(cert.trace().unwrap().seed, s(&[0, 1]));
        }
        let mod3 = s(&[0, 1, 3, 4, 6]);
        let StructureCertificate::NotStructured { seeds } = is_structured(&mod3).unwrap() else {
            panic!("mod-3 set must not be structured");
        };
        assert_eq!(seeds.len(), 2);
        assert!(seeds.iter().all(|t| t.fixed_point != mod3 && t.fixed_point.is_subset(&mod3)));
        let cert = is_structured(&s(&[0, 1, 2, 4])).unwrap();
        assert_eq!(cert.trace().unwrap().seed, s(&[0, 1]));
        assert!(matches!(is_structured(&s(&[1, 2, 3])), Err(Error::Precondition(_))));
        assert!(matches!(is_structured(&s(&[0, 2, 4])), Err(Error::Precondition(_))));
    }

    #[test]
    fn detect_structure_normalizes() {
        let (cert, map) = detect_structure(&s(&[10, 12, 14, 18])).unwrap();
        assert!(cert.is_structured());
        assert_eq!(map, NormalizationMap { shift: 10, scale: 2 });
    }

    #[test]
    fn additive_implication_examples() {
        assert_eq!(check_additive_implication(&pts(5, &[(0, 0), (1, 1), (2, 2)])).unwrap(), None);
        let v = check_additive_implication(&pts(5, &[(0, 0), (1, 0), (2, 1)])).unwrap();
        let [i, j, k, l] = v.expect("violation");
        let p = pts(5, &[(0, 0), (1, 0), (2, 1)]);
        assert_eq!(p[i].a + p[j].a, p[k].a + p[l].a);
        assert_ne!(p[i].add(&p[j]).unwrap(), p[k].add(&p[l]).unwrap());
        assert_eq!(check_additive_implication(&pts(5, &[(0, 3), (4, 3), (7, 3), (9, 3)])).unwrap(), None);
        assert!(matches!(
            check_additive_implication(&pts(5, &[(0, 0), (0, 1)])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn recover_witness_examples() {
        let cert = recover_affine_witness(&pts(5, &[(0, 2), (1, 3), (2, 4)])).unwrap();
        let StructureCertificate::ProductStructured { x, y, .. } = cert else { panic!() };
        assert_eq!((x.coords(), y.coords()), (vec![1], vec![2]));

        // {0,1,3} is not structured, whatever the second coordinates
        let (x0, y0) = (3, 5);
        let p = pts(7, &[(0, y0), (1, y0 + x0), (3, y0 + 3 * x0)]);
        assert!(matches!(recover_affine_witness(&p), Err(Error::Precondition(_))));

        let cert = recover_affine_witness(&pts(5, &[(0, 0), (1, 0), (2, 0)])).unwrap();
        let StructureCertificate::ProductStructured { x, y, .. } = cert else { panic!() };
        assert!(x.is_identity() && y.is_identity());
    }

    #[test]
    fn recover_rejects_failed_implication() {
        let p = pts(5, &[(0, 0), (1, 0), (2, 1)]);
        assert!(matches!(recover_affine_witness(&p), Err(Error::Precondition(_))));
    }

    #[test]
    fn recover_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut structured_seen = 0;
        for _ in 0..10_000 {
            let m = rng.random_range(2..=11u64);
            let spec = GroupSpec::cyclic(m);
            let (x0, y0) = (rng.random_range(0..m as i64), rng.random_range(0..m as i64));
            let k = rng.random_range(2..=7);
            let mut a: Vec<i64> = (0..k).map(|_| rng.random_range(0..12)).collect();
            a.push(0);
            a.push(1);
            let proj = IntSet::new(a).unwrap();
            let points: Vec<ProductPoint> = proj
                .elements()
                .iter()
                .map(|&a| ProductPoint::new(a, spec.element(&[a * x0 + y0]).unwrap()))
                .collect();
            if !is_structured(&proj).unwrap().is_structured() {
                continue;
            }
            structured_seen += 1;
            let StructureCertificate::ProductStructured { x, y, .. } =
                recover_affine_witness(&points).unwrap()
            else {
                panic!()
            };
            for p in &points {
                assert_eq!(x.pow(p.a).unwrap().op(&y).unwrap(), p.x);
            }
        }
        assert!(structured_seen > 1000);
    }

    /// Extensive, monotone, bounded by A and stabilizing within |A| steps,
    /// for every A ⊆ [0,8] and every two-element seed.
    #[test]
    fn closure_properties_exhaustive() {
        for mask in 1u64..1 << 9 {
            let a = IntSet::from_mask(mask, 0).unwrap();
            let e = a.elements();
            for i in 0..e.len() {
                for j in i + 1..e.len() {
                    let x = s(&[e[i], e[j]]);
                    let x1 = closure_step(&x, &a).unwrap();
                    assert!(x.is_subset(&x1) && x1.is_subset(&a));
                    assert_eq!(x1.elements(), brute_step(x.elements(), e).as_slice());
                    // monotone: add one more element of A to the seed
                    for &c in e {
                        let y = IntSet::new([e[i], e[j], c]).unwrap();
                        assert!(x1.is_subset(&closure_step(&y, &a).unwrap()));
                    }
                    let t = closure(&x, &a).unwrap();
                    assert!(t.steps() <= a.len());
                    assert!(t.iterates.windows(2).all(|w| w[0].is_subset(&w[1])));
                    assert_eq!(closure_step(&t.fixed_point, &a).unwrap(), t.fixed_point);
                    let shifted = closure(&x.translate(5).unwrap(), &a.translate(5).unwrap()).unwrap();
                    assert_eq!(shifted.fixed_point, t.fixed_point.translate(5).unwrap());
                }
            }
        }
    }
}
