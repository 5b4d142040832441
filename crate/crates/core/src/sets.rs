//! Finite integer sets and the scalar quantities attached to them.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite set of integers, stored strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntSet(Vec<i64>);

impl TryFrom<Vec<i64>> for IntSet {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed(format!(
                "set must be strictly increasing: {v:?}"
            )));
        }
        if v.is_empty() {
            return Err(Error::Degenerate("empty set".into()));
        }
        Ok(IntSet(v))
    }
}

impl From<IntSet> for Vec<i64> {
    fn from(s: IntSet) -> Self {
        s.0
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl IntSet {
    /// Builds a set from arbitrary elements, sorting and deduplicating.
    pub fn new(elements: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut v: Vec<i64> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::Degenerate("empty set".into()));
        }
        Ok(IntSet(v))
    }

    /// Set of the bit positions of `mask`, offset by `offset`.
    pub fn from_mask(mask: u64, offset: i64) -> Result<Self> {
        IntSet::new((0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + offset))
    }

    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        IntSet::new(lo..=hi)
    }

    pub fn elements(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn smallest(&self) -> i64 {
        self.0[0]
    }

    pub fn largest(&self) -> i64 {
        self.0[self.0.len() - 1]
    }

    pub fn contains(&self, a: i64) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.0.iter().all(|&a| other.contains(a))
    }

    pub fn intersection(&self, other: &IntSet) -> Option<IntSet> {
        let v: Vec<i64> = self.0.iter().copied().filter(|&a| other.contains(a)).collect();
        (!v.is_empty()).then_some(IntSet(v))
    }

    /// Set with its maximum removed, or `None` for a singleton.
    pub fn without_max(&self) -> Option<IntSet> {
        (self.0.len() > 1).then(|| IntSet(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn translate(&self, t: i64) -> Result<IntSet> {
        let v = self
            .0
            .iter()
            .map(|&a| a.checked_add(t).ok_or(Error::Overflow("translate")))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntSet(v))
    }

    /// gcd of the nonzero elements; 0 when every element is zero.
    pub fn gcd(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &a| g.gcd(&a))
    }

    /// gcd of all pairwise differences, which equals the gcd of `a - min`.
    pub fn difference_gcd(&self) -> i64 {
        let m = self.smallest();
        self.0.iter().fold(0i64, |g, &a| g.gcd(&(a - m)))
    }

    pub fn is_normalized(&self) -> bool {
        self.smallest() == 0 && self.gcd() == 1
    }

    /// True when the elements form a full arithmetic progression.
    pub fn is_ap(&self) -> bool {
        if self.0.len() <= 2 {
            return true;
        }
        let d = self.0[1] - self.0[0];
        self.0.windows(2).all(|w| w[1] - w[0] == d)
    }
}

/// `A + B`.
pub fn sumset(a: &IntSet, b: &IntSet) -> Result<IntSet> {
    combine(a, b, i64::checked_add, "sumset")
}

/// `A - B`.
pub fn difference_set(a: &IntSet, b: &IntSet) -> Result<IntSet> {
    combine(a, b, i64::checked_sub, "difference_set")
}

fn combine(
    a: &IntSet,
    b: &IntSet,
    f: fn(i64, i64) -> Option<i64>,
    what: &'static str,
) -> Result<IntSet> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a.elements() {
        for &y in b.elements() {
            out.push(f(x, y).ok_or(Error::Overflow(what))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(IntSet(out))
}

/// Affine map `a -> (a - shift) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizationMap {
    pub shift: i64,
    pub scale: i64,
}

impl NormalizationMap {
    pub const IDENTITY: NormalizationMap = NormalizationMap { shift: 0, scale: 1 };

    pub fn apply(&self, a: i64) -> Result<i64> {
        let d = a.checked_sub(self.shift).ok_or(Error::Overflow("normalize"))?;
        if d % self.scale != 0 {
            return Err(Error::Precondition(format!(
                "{a} is outside the image lattice of {self:?}"
            )));
        }
        Ok(d / self.scale)
    }

    pub fn invert(&self, a: i64) -> Result<i64> {
        a.checked_mul(self.scale)
            .and_then(|v| v.checked_add(self.shift))
            .ok_or(Error::Overflow("denormalize"))
    }

    pub fn apply_set(&self, s: &IntSet) -> Result<IntSet> {
        IntSet::new(s.elements().iter().map(|&a| self.apply(a)).collect::<Result<Vec<_>>>()?)
    }

    pub fn invert_set(&self, s: &IntSet) -> Result<IntSet> {
        IntSet::new(s.elements().iter().map(|&a| self.invert(a)).collect::<Result<Vec<_>>>()?)
    }
}

/// Translates to minimum 0 and divides by the gcd. Both are Freiman
/// 2-isomorphisms, so every sumset statement survives the map.
pub fn normalize(a: &IntSet) -> Result<(IntSet, NormalizationMap)> {
    if a.len() < 2 {
        return Err(Error::Degenerate(format!("cannot normalize singleton {a}")));
    }
    let map = NormalizationMap { shift: a.smallest(), scale: a.difference_gcd() };
    Ok((map.apply_set(a)?, map))
}

/// Arithmetic progression `start + t * difference`, `0 <= t < length`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct APDescription {
    pub start: i64,
    pub difference: i64,
    pub length: u64,
}

impl APDescription {
    pub fn index_of(&self, a: i64) -> Option<u64> {
        let off = a.checked_sub(self.start)?;
        if off < 0 || off % self.difference != 0 {
            return None;
        }
        let t = (off / self.difference) as u64;
        (t < self.length).then_some(t)
    }

    pub fn contains(&self, set: &IntSet) -> bool {
        set.elements().iter().all(|&a| self.index_of(a).is_some())
    }
}

/// Shortest AP containing `a`.
///
/// Any AP containing `a` has a difference dividing every `a_i - a_j`,
/// hence dividing their gcd `g`; its length is then at least
/// `(max - min) / difference + 1 >= (max - min) / g + 1`. The bound is met
/// only by difference `g` starting at `min`, so the minimizer is unique.
pub fn minimal_containing_ap(a: &IntSet) -> Result<APDescription> {
    if a.len() < 2 {
        return Err(Error::Degenerate(format!("singleton {a} has no difference")));
    }
    let g = a.difference_gcd();
    Ok(APDescription {
        start: a.smallest(),
        difference: g,
        length: ((a.largest() - a.smallest()) / g) as u64 + 1,
    })
}

/// Decides whether `a` and `b` are full APs sharing a common difference,
/// the equality case of `|A+B| >= |A|+|B|-1`. Returns that difference.
pub fn is_ap_pair_with_common_difference(a: &IntSet, b: &IntSet) -> Result<Option<i64>> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Degenerate("both sets need at least two elements".into()));
    }
    let da = a.elements()[1] - a.elements()[0];
    let db = b.elements()[1] - b.elements()[0];
    Ok((a.is_ap() && b.is_ap() && da == db).then_some(da))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsetStats {
    pub k: usize,
    pub sumset_size: usize,
    /// `|A+A| = 2k - 1 + b`.
    pub b: i64,
    /// `min{a_k - k + 3, k}`.
    pub r: i64,
    pub doubling: Ratio<i64>,
}

/// Scalar data of a normalized set.
pub fn stats(a: &IntSet) -> Result<SumsetStats> {
    if a.len() < 2 {
        return Err(Error::Degenerate(format!("stats need k >= 2, got {a}")));
    }
    if !a.is_normalized() {
        return Err(Error::Precondition(format!(
            "{a} is not normalized (min 0, gcd 1); normalize first"
        )));
    }
    let k = a.len() as i64;
    let s = sumset(a, a)?.len() as i64;
    Ok(SumsetStats {
        k: a.len(),
        sumset_size: s as usize,
        b: s - (2 * k - 1),
        r: (a.largest() - k + 3).min(k),
        doubling: Ratio::new(s, k),
    })
}

/// Checks that `phi` is a Freiman 2-isomorphism from `a` onto `b`:
/// `a_i + a_j = a_k + a_l` iff the images satisfy the same relation.
pub fn check_2_isomorphism(a: &IntSet, b: &IntSet, phi: &BTreeMap<i64, i64>) -> Result<bool> {
    let domain: Vec<i64> = phi.keys().copied().collect();
    if domain != a.elements() {
        return Err(Error::Malformed("map domain differs from the source set".into()));
    }
    let image = IntSet::new(phi.values().copied())?;
    if image.len() != phi.len() || &image != b {
        return Err(Error::Malformed("map is not a bijection onto the target set".into()));
    }
    let pts: Vec<(i64, i64)> = phi.iter().map(|(&x, &y)| (x, y)).collect();
    let add = |p: i64, q: i64| p.checked_add(q).ok_or(Error::Overflow("check_2_isomorphism"));
    for &(x1, y1) in &pts {
        for &(x2, y2) in &pts {
            let sx = add(x1, x2)?;
            let sy = add(y1, y2)?;
            for &(x3, y3) in &pts {
                for &(x4, y4) in &pts {
                    if (sx == add(x3, x4)?) != (sy == add(y3, y4)?) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
