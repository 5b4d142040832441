//! Literal parsers for command-line inputs.

use serde_json::Value;
use sumsetlab::{Error, IntSet, Result};

fn bad(what: &str, s: &str) -> Error {
    Error::Malformed(format!("cannot parse {what} {s:?}"))
}

fn ints(s: &str, what: &str) -> Result<Vec<i64>> {
    let body = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
    if body.is_empty() {
        return Err(bad(what, s));
    }
    body.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| bad(what, s)))
        .collect()
}

/// `0,1,3` or `{0,1,3}`.
pub fn int_set(s: &str) -> Result<IntSet> {
    IntSet::new(ints(s, "integer set")?)
}

/// Residues for `Z/pZ`, kept in input order.
pub fn residues(s: &str) -> Result<Vec<u64>> {
    ints(s, "residue set")?
        .into_iter()
        .map(|r| u64::try_from(r).map_err(|_| bad("residue set", s)))
        .collect()
}

fn coords(v: &Value, s: &str) -> Result<Vec<i64>> {
    match v {
        Value::Number(n) => Ok(vec![n.as_i64().ok_or_else(|| bad("coordinate", s))?]),
        Value::Array(a) => a
            .iter()
            .map(|c| c.as_i64().ok_or_else(|| bad("coordinate", s)))
            .collect(),
        _ => Err(bad("group element", s)),
    }
}

/// JSON array of coordinate arrays, e.g. `[[0,0,1],[1,0,1]]`. Bare numbers
/// stand for one-coordinate elements.
pub fn group_elements(s: &str) -> Result<Vec<Vec<i64>>> {
    let v: Value = serde_json::from_str(s).map_err(|_| bad("group set", s))?;
    let Value::Array(items) = v else {
        return Err(bad("group set", s));
    };
    items.iter().map(|g| coords(g, s)).collect()
}

/// `(0,2),(1,3)` or JSON `[[0,2],[1,[3]]]`: first entry is the integer
/// coordinate, the rest are the inner group's.
pub fn points(s: &str) -> Result<Vec<(i64, Vec<i64>)>> {
    let s = s.trim();
    if s.starts_with('[') {
        let v: Value = serde_json::from_str(s).map_err(|_| bad("point list", s))?;
        let Value::Array(items) = v else {
            return Err(bad("point list", s));
        };
        return items
            .iter()
            .map(|p| match p.as_array().map(Vec::as_slice) {
                Some([a, rest @ ..]) if !rest.is_empty() => {
                    let a = a.as_i64().ok_or_else(|| bad("point", s))?;
                    let x = if rest.len() == 1 {
                        coords(&rest[0], s)?
                    } else {
                        coords(&Value::Array(rest.to_vec()), s)?
                    };
                    Ok((a, x))
                }
                _ => Err(bad("point", s)),
            })
            .collect();
    }
    let mut out = Vec::new();
    for piece in s.split(')') {
        let piece = piece.trim().trim_start_matches(',').trim();
        if piece.is_empty() {
            continue;
        }
        let inner = piece.strip_prefix('(').ok_or_else(|| bad("point list", s))?;
        let nums = ints(inner, "point")?;
        if nums.len() < 2 {
            return Err(bad("point", piece));
        }
        out.push((nums[0], nums[1..].to_vec()));
    }
    if out.is_empty() {
        return Err(bad("point list", s));
    }
    Ok(out)
}
