use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AnalysisError;

/// An exact analytic value: a rational number or an explicit infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AnalysisResult {
    Finite(BigRational),
    Infinite,
}

impl AnalysisResult {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            AnalysisResult::Finite(r) => Some(r),
            AnalysisResult::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, AnalysisResult::Infinite)
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> Option<BigInt> {
        self.finite().map(|r| r.ceil().to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            AnalysisResult::Finite(r) => ratio_to_f64(r),
            AnalysisResult::Infinite => f64::INFINITY,
        }
    }

    /// Six-significant-digit rendering; `inf` for the infinite case.
    pub fn decimal(&self) -> String {
        match self {
            AnalysisResult::Finite(r) => format_sig(r, 6),
            AnalysisResult::Infinite => "inf".to_string(),
        }
    }
}

impl From<BigRational> for AnalysisResult {
    fn from(r: BigRational) -> Self {
        AnalysisResult::Finite(r)
    }
}

impl fmt::Display for AnalysisResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decimal())
    }
}

#[derive(Serialize)]
struct Rendered {
    numer: Option<String>,
    denom: Option<String>,
    decimal: String,
}

impl Serialize for AnalysisResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let r = match self {
            AnalysisResult::Finite(r) => Rendered {
                numer: Some(r.numer().to_string()),
                denom: Some(r.denom().to_string()),
                decimal: self.decimal(),
            },
            AnalysisResult::Infinite => Rendered {
                numer: None,
                denom: None,
                decimal: self.decimal(),
            },
        };
        r.serialize(s)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => format_sig(r, 17).parse().unwrap_or(f64::NAN),
    }
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `%g`-style rendering with `sig` significant digits, rounding half away
/// from zero, trailing zeros removed.
pub fn format_sig(r: &BigRational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let x = r.abs();
    let ten = BigInt::from(10);
    // exponent e with 10^e <= x < 10^(e+1)
    let mut e: i64 = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
    let pow = |k: i64| -> BigRational {
        if k >= 0 {
            int(num_traits::pow(ten.clone(), k as usize))
        } else {
            int(1) / int(num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while x < pow(e) {
        e -= 1;
    }
    while x >= pow(e + 1) {
        e += 1;
    }
    let scaled = &x * pow(sig as i64 - 1 - e);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut digits = q;
    if int(rem) * int(2) >= int(scaled.denom().clone()) {
        digits += BigInt::one();
    }
    if digits == num_traits::pow(ten.clone(), sig) {
        digits /= &ten;
        e += 1;
    }
    let ds = digits.to_string();
    let body = if e < -4 || e >= sig as i64 {
        let mut m = format!("{}.{}", &ds[..1], &ds[1..]);
        trim_zeros(&mut m);
        format!("{}e{}{:02}", m, if e < 0 { '-' } else { '+' }, e.abs())
    } else if e < 0 {
        let mut m = format!("0.{}{}", "0".repeat((-e - 1) as usize), ds);
        trim_zeros(&mut m);
        m
    } else {
        let split = (e + 1) as usize;
        let mut m = format!("{}.{}", &ds[..split], &ds[split..]);
        trim_zeros(&mut m);
        m
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// [`format_sig`] of `numer / denom`.
pub fn format_fraction(numer: u128, denom: u128, sig: usize) -> String {
    format_sig(&BigRational::new(numer.into(), denom.into()), sig)
}

/// [`format_sig`] of a float, exactly as stored; `nan` and `inf` verbatim.
pub fn format_f64(x: f64, sig: usize) -> String {
    match BigRational::from_float(x) {
        Some(r) => format_sig(&r, sig),
        None if x.is_nan() => "nan".into(),
        None => (if x > 0.0 { "inf" } else { "-inf" }).into(),
    }
}

fn trim_zeros(s: &mut String) {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
}

/// Parses `"3"`, `"-2/7"`, `"0.125"` or `"1e-3"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, AnalysisError> {
    let bad = || AnalysisError::Parse(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty()
        || !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = BigInt::from_str(&format!("{whole}{frac}")).map_err(|_| bad())?;
    let scale = exp as i64 - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut v = int(digits);
    if scale >= 0 {
        v *= int(num_traits::pow(ten, scale as usize));
    } else {
        v /= int(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -v } else { v })
}

/// Serde adapter storing a rational as a string such as `"1/2"` or `"0.5"`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let raw = RawNumber::deserialize(d)?;
        parse_rational(&raw.0).map_err(serde::de::Error::custom)
    }

    /// Accepts a JSON string or number.
    pub(super) struct RawNumber(pub String);

    impl<'de> Deserialize<'de> for RawNumber {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            struct V;
            impl serde::de::Visitor<'_> for V {
                type Value = RawNumber;
                fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                    f.write_str("a number or a rational string")
                }
                fn visit_str<E>(self, v: &str) -> Result<RawNumber, E> {
                    Ok(RawNumber(v.to_string()))
                }
                fn visit_u64<E>(self, v: u64) -> Result<RawNumber, E> {
                    Ok(RawNumber(v.to_string()))
                }
                fn visit_i64<E>(self, v: i64) -> Result<RawNumber, E> {
                    Ok(RawNumber(v.to_string()))
                }
                fn visit_f64<E>(self, v: f64) -> Result<RawNumber, E> {
                    // Shortest round-trip decimal of the float.
                    Ok(RawNumber(format!("{v:?}")))
                }
            }
            d.deserialize_any(V)
        }
    }
}

/// Serde adapter for optional rationals.
pub mod option_rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<rational_str::RawNumber>::deserialize(d)?
            .map(|raw| parse_rational(&raw.0).map_err(serde::de::Error::custom))
            .transpose()
    }
}
