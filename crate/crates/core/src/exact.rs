//! Exact rational helpers and their JSON shape.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Count, Exact};

/// The rational a user meant when typing `x`: the shortest decimal that
/// round-trips to `x`, read exactly. `0.1` becomes `1/10`, not the binary
/// value `3602879701896397/36028797018963968`.
pub fn from_decimal(x: f64) -> Result<Exact> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{x} is not a finite number")));
    }
    let text = format!("{x}");
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.as_str()),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let numer: BigInt = format!("{int_part}{frac_part}").parse().expect("decimal digits");
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = Exact::new(numer, denom);
    Ok(if negative { -value } else { value })
}

pub fn from_count(c: &Count) -> Exact {
    Exact::from_integer(BigInt::from(c.clone()))
}

pub fn ratio(num: &Count, den: &Count) -> Exact {
    Exact::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn to_f64(r: &Exact) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn count_to_f64(c: &Count) -> f64 {
    c.to_f64().unwrap_or(f64::INFINITY)
}

/// Smallest integer `m` with `m >= r`.
pub fn ceil_int(r: &Exact) -> BigInt {
    r.ceil().to_integer()
}

/// Largest integer `m` with `m <= r`.
pub fn floor_int(r: &Exact) -> BigInt {
    r.floor().to_integer()
}

pub fn exact_pow(base: &Exact, exp: usize) -> Exact {
    num_traits::pow(base.clone(), exp)
}

/// `{"num": "...", "den": "..."}` with decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&Exact> for RationalJson {
    fn from(r: &Exact) -> Self {
        RationalJson { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

impl RationalJson {
    pub fn to_exact(&self) -> Result<Exact> {
        let bad = |s: &str| Error::InvalidParameter(format!("not an integer: {s:?}"));
        let num: BigInt = self.num.parse().map_err(|_| bad(&self.num))?;
        let den: BigInt = self.den.parse().map_err(|_| bad(&self.den))?;
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Exact::new(num, den))
    }
}

pub fn serialize_exact<S: Serializer>(r: &Exact, s: S) -> std::result::Result<S::Ok, S::Error> {
    RationalJson::from(r).serialize(s)
}

pub fn serialize_opt_exact<S: Serializer>(
    r: &Option<Exact>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    r.as_ref().map(RationalJson::from).serialize(s)
}

pub fn serialize_count<S: Serializer>(c: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

/// Counts keyed by `k`, as `{"0": "...", "1": "..."}`.
pub fn serialize_count_map<S: Serializer>(
    counts: &[BigUint],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(counts.len()))?;
    for (k, c) in counts.iter().enumerate() {
        map.serialize_entry(&k.to_string(), &c.to_string())?;
    }
    map.end()
}
