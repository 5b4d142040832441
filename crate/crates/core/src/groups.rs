//! Concrete groups: cyclic groups and their direct sums, integer lattices
//! and the discrete Heisenberg group under lexicographic order, and the
//! direct product `Z x G`.
//!
//! Elements carry enough data to recover their group; operations across
//! different groups fail with [`Error::TypeMismatch`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Cyclic { n: u64 },
    DirectSum { moduli: Vec<u64> },
    /// `Z^d` with lexicographic order.
    Lattice { d: usize },
    /// Integer triples, `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`, lex order.
    Heisenberg,
    /// `Z x inner`.
    Product { inner: Box<GroupSpec> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Cyclic { n: u64, r: u64 },
    DirectSum { moduli: Vec<u64>, residues: Vec<u64> },
    Lattice(Vec<i64>),
    Heisenberg([i64; 3]),
    Product(i64, Box<GroupElement>),
}

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow("group operation"))
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow("group operation"))
}

fn neg(a: i64) -> Result<i64> {
    a.checked_neg().ok_or(Error::Overflow("group inverse"))
}

impl GroupSpec {
    pub fn cyclic(n: u64) -> Self {
        GroupSpec::Cyclic { n }
    }

    pub fn product(inner: GroupSpec) -> Self {
        GroupSpec::Product { inner: Box::new(inner) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Cyclic { n } if *n == 0 || *n > i64::MAX as u64 => {
                Err(Error::Malformed(format!("cyclic modulus {n} out of range")))
            }
            GroupSpec::DirectSum { moduli } if moduli.is_empty() => {
                Err(Error::Malformed("direct sum needs at least one modulus".into()))
            }
            GroupSpec::DirectSum { moduli } => {
                moduli.iter().try_for_each(|&n| GroupSpec::cyclic(n).validate())
            }
            GroupSpec::Lattice { d: 0 } => Err(Error::Malformed("lattice rank must be positive".into())),
            GroupSpec::Product { inner } => inner.validate(),
            _ => Ok(()),
        }
    }

    /// Whether the spec carries a bi-invariant total order.
    pub fn is_ordered(&self) -> bool {
        match self {
            GroupSpec::Lattice { .. } | GroupSpec::Heisenberg => true,
            GroupSpec::Product { inner } => inner.is_ordered(),
            GroupSpec::Cyclic { n } => *n == 1,
            GroupSpec::DirectSum { moduli } => moduli.iter().all(|&n| n == 1),
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            GroupSpec::Heisenberg => false,
            GroupSpec::Product { inner } => inner.is_abelian(),
            _ => true,
        }
    }

    /// Number of elements, when finite.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupSpec::Cyclic { n } => Some(*n),
            GroupSpec::DirectSum { moduli } => {
                moduli.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n))
            }
            _ => None,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GroupSpec::Cyclic { .. } => 1,
            GroupSpec::DirectSum { moduli } => moduli.len(),
            GroupSpec::Lattice { d } => *d,
            GroupSpec::Heisenberg => 3,
            GroupSpec::Product { inner } => 1 + inner.arity(),
        }
    }

    /// Parses canonical coordinates; residues are reduced.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.arity() {
            return Err(Error::Malformed(format!(
                "expected {} coordinates for {self}, got {coords:?}",
                self.arity()
            )));
        }
        let reduce = |c: i64, n: u64| c.rem_euclid(n as i64) as u64;
        Ok(match self {
            GroupSpec::Cyclic { n } => GroupElement::Cyclic { n: *n, r: reduce(coords[0], *n) },
            GroupSpec::DirectSum { moduli } => GroupElement::DirectSum {
                moduli: moduli.clone(),
                residues: coords.iter().zip(moduli).map(|(&c, &n)| reduce(c, n)).collect(),
            },
            GroupSpec::Lattice { .. } => GroupElement::Lattice(coords.to_vec()),
            GroupSpec::Heisenberg => GroupElement::Heisenberg([coords[0], coords[1], coords[2]]),
            GroupSpec::Product { inner } => {
                GroupElement::Product(coords[0], Box::new(inner.element(&coords[1..])?))
            }
        })
    }

    pub fn identity(&self) -> GroupElement {
        self.element(&vec![0; self.arity()]).expect("zero coordinates always parse")
    }

    /// Every element of a finite spec, in canonical order.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        let moduli: Vec<u64> = match self {
            GroupSpec::Cyclic { n } => vec![*n],
            GroupSpec::DirectSum { moduli } => moduli.clone(),
            _ => return Err(Error::Unsupported(format!("{self} is infinite"))),
        };
        let total = self.order().ok_or(Error::Overflow("group order"))?;
        (0..total)
            .map(|mut i| {
                let mut coords = vec![0i64; moduli.len()];
                for (c, &n) in coords.iter_mut().zip(&moduli).rev() {
                    *c = (i % n) as i64;
                    i /= n;
                }
                self.element(&coords)
            })
            .collect()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        &g.spec() == self
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic { n } => write!(f, "cyclic:{n}"),
            GroupSpec::DirectSum { moduli } => {
                let m: Vec<String> = moduli.iter().map(u64::to_string).collect();
                write!(f, "direct_sum:{}", m.join(","))
            }
            GroupSpec::Lattice { d } => write!(f, "lattice:{d}"),
            GroupSpec::Heisenberg => write!(f, "heisenberg"),
            GroupSpec::Product { inner } => write!(f, "product:{inner}"),
        }
    }
}

/// Accepts JSON (`{"kind":"cyclic","n":5}`) or the shorthand printed by
/// `Display` (`cyclic:5`, `direct_sum:2,3`, `lattice:2`, `heisenberg`,
/// `product:cyclic:5`).
impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec = if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| Error::Malformed(format!("group spec: {e}")))?
        } else {
            let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
            let num = |t: &str| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Malformed(format!("bad number {t:?} in group spec {s:?}")))
            };
            match kind {
                "cyclic" => GroupSpec::Cyclic { n: num(rest)? },
                "direct_sum" => GroupSpec::DirectSum {
                    moduli: rest.split(',').map(num).collect::<Result<_>>()?,
                },
                "lattice" => GroupSpec::Lattice { d: num(rest)? as usize },
                "heisenberg" if rest.is_empty() => GroupSpec::Heisenberg,
                "product" => GroupSpec::product(rest.parse()?),
                _ => return Err(Error::Malformed(format!("unknown group spec {s:?}"))),
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl GroupElement {
    pub fn spec(&self) -> GroupSpec {
        match self {
            GroupElement::Cyclic { n, .. } => GroupSpec::Cyclic { n: *n },
            GroupElement::DirectSum { moduli, .. } => GroupSpec::DirectSum { moduli: moduli.clone() },
            GroupElement::Lattice(v) => GroupSpec::Lattice { d: v.len() },
            GroupElement::Heisenberg(_) => GroupSpec::Heisenberg,
            GroupElement::Product(_, inner) => GroupSpec::product(inner.spec()),
        }
    }

    pub fn coords(&self) -> Vec<i64> {
        match self {
            GroupElement::Cyclic { r, .. } => vec![*r as i64],
            GroupElement::DirectSum { residues, .. } => residues.iter().map(|&r| r as i64).collect(),
            GroupElement::Lattice(v) => v.clone(),
            GroupElement::Heisenberg(h) => h.to_vec(),
            GroupElement::Product(a, inner) => {
                let mut v = vec![*a];
                v.extend(inner.coords());
                v
            }
        }
    }

    fn mismatch(&self, other: &GroupElement) -> Error {
        Error::TypeMismatch(format!("{} vs {}", self.spec(), other.spec()))
    }

    /// Group operation; written multiplicatively for the Heisenberg group
    /// and additively everywhere else.
    pub fn op(&self, other: &GroupElement) -> Result<GroupElement> {
        use GroupElement::*;
        Ok(match (self, other) {
            (Cyclic { n, r }, Cyclic { n: m, r: s }) if n == m => {
                Cyclic { n: *n, r: ((*r as u128 + *s as u128) % *n as u128) as u64 }
            }
            (DirectSum { moduli, residues }, DirectSum { moduli: m2, residues: r2 }) if moduli == m2 => {
                DirectSum {
                    moduli: moduli.clone(),
                    residues: residues
                        .iter()
                        .zip(r2)
                        .zip(moduli)
                        .map(|((&x, &y), &n)| ((x as u128 + y as u128) % n as u128) as u64)
                        .collect(),
                }
            }
            (Lattice(u), Lattice(v)) if u.len() == v.len() => {
                Lattice(u.iter().zip(v).map(|(&x, &y)| add(x, y)).collect::<Result<_>>()?)
            }
            (Heisenberg([a, b, c]), Heisenberg([a2, b2, c2])) => {
                Heisenberg([add(*a, *a2)?, add(*b, *b2)?, add(add(*c, *c2)?, mul(*a, *b2)?)?])
            }
            (Product(a, x), Product(b, y)) => Product(add(*a, *b)?, Box::new(x.op(y)?)),
            _ => return Err(self.mismatch(other)),
        })
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        use GroupElement::*;
        Ok(match self {
            Cyclic { n, r } => Cyclic { n: *n, r: (*n - *r) % *n },
            DirectSum { moduli, residues } => DirectSum {
                moduli: moduli.clone(),
                residues: residues.iter().zip(moduli).map(|(&r, &n)| (n - r) % n).collect(),
            },
            Lattice(v) => Lattice(v.iter().map(|&x| neg(x)).collect::<Result<_>>()?),
            // (a,b,c)^-1 = (-a, -b, ab - c)
            Heisenberg([a, b, c]) => Heisenberg([neg(*a)?, neg(*b)?, mul(*a, *b)?.checked_sub(*c).ok_or(Error::Overflow("group inverse"))?]),
            Product(a, x) => Product(neg(*a)?, Box::new(x.inverse()?)),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.coords().iter().all(|&c| c == 0)
    }

    /// `self^n` (or `n * self` additively), negative `n` allowed.
    pub fn pow(&self, n: i64) -> Result<GroupElement> {
        let mut base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.spec().identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.op(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.op(&base)?;
            }
        }
        Ok(acc)
    }

    /// Group order comparison; only ordered specs support it.
    pub fn compare(&self, other: &GroupElement) -> Result<Ordering> {
        let spec = self.spec();
        if spec != other.spec() {
            return Err(self.mismatch(other));
        }
        if !spec.is_ordered() {
            return Err(Error::Unsupported(format!("{spec} carries no group order")));
        }
        // lexicographic on coordinates, which is what derived `Ord` gives
        // for lattice, Heisenberg and `Z x ordered` elements
        Ok(self.cmp(other))
    }

    pub fn commutes(&self, other: &GroupElement) -> Result<bool> {
        Ok(self.op(other)? == other.op(self)?)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords().iter().map(i64::to_string).collect();
        write!(f, "[{}]", c.join(","))
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coords = self.coords();
        let mut seq = serializer.serialize_seq(Some(coords.len()))?;
        for c in coords {
            seq.serialize_element(&c)?;
        }
        seq.end()
    }
}

/// Point `(a, x)` of `Z x G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProductPoint {
    pub a: i64,
    pub x: GroupElement,
}

impl ProductPoint {
    pub fn new(a: i64, x: GroupElement) -> Self {
        ProductPoint { a, x }
    }

    /// Componentwise sum; the inner group must be abelian.
    pub fn add(&self, other: &ProductPoint) -> Result<ProductPoint> {
        let spec = self.x.spec();
        if !spec.is_abelian() {
            return Err(Error::Unsupported(format!(
                "componentwise addition needs an abelian inner group, got {spec}"
            )));
        }
        Ok(ProductPoint { a: add(self.a, other.a)?, x: self.x.op(&other.x)? })
    }

    pub fn into_element(self) -> GroupElement {
        GroupElement::Product(self.a, Box::new(self.x))
    }
}

impl fmt::Display for ProductPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.x)
    }
}
