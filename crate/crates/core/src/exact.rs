//! Exact rationals for stored metrics; decimals appear only when rendering.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Significant digits used by [`Exact::decimal`].
pub const DECIMAL_DIGITS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Exact(BigRational::new(num.into(), den.into()))
    }

    pub fn int(v: impl Into<BigInt>) -> Self {
        Exact(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Exact(BigRational::zero())
    }

    /// `2^e` for any integer exponent.
    pub fn pow2(e: i64) -> Self {
        let p = BigInt::one() << e.unsigned_abs();
        if e >= 0 {
            Exact(BigRational::from_integer(p))
        } else {
            Exact(BigRational::new(BigInt::one(), p))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Decimal rendering rounded half-up to [`DECIMAL_DIGITS`] significant
    /// digits, trailing zeros after the point dropped.
    pub fn decimal(&self) -> String {
        render_decimal(&self.0, DECIMAL_DIGITS)
    }
}

fn render_decimal(v: &BigRational, digits: usize) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let sign = if v.is_negative() { "-" } else { "" };
    let num = v.numer().abs().to_biguint().expect("abs is non-negative");
    let den = v.denom().to_biguint().expect("denominator is positive");
    let ten = BigUint::from(10u32);

    // Find e with 10^e <= |v| < 10^(e+1), starting from a float estimate.
    let mut e = v.abs().to_f64().map(|f| f.log10().floor() as i64).unwrap_or(0);
    let cmp_pow = |e: i64| -> Ordering {
        // compare num/den against 10^e
        if e >= 0 {
            num.cmp(&(&den * ten.pow(e as u32)))
        } else {
            (&num * ten.pow((-e) as u32)).cmp(&den)
        }
    };
    while cmp_pow(e) == Ordering::Less {
        e -= 1;
    }
    while cmp_pow(e + 1) != Ordering::Less {
        e += 1;
    }

    // scaled = round(|v| * 10^(digits-1-e))
    let shift = digits as i64 - 1 - e;
    let (n, d) = if shift >= 0 {
        (&num * ten.pow(shift as u32), den.clone())
    } else {
        (num.clone(), &den * ten.pow((-shift) as u32))
    };
    let (q, r) = n.div_rem(&d);
    let mut scaled = if &r * 2u32 >= d { q + 1u32 } else { q };
    if scaled == ten.pow(digits as u32) {
        scaled /= 10u32;
        e += 1;
    }
    let s = scaled.to_string();
    let out = if e >= digits as i64 - 1 {
        format!("{s}{}", "0".repeat((e - (digits as i64 - 1)) as usize))
    } else if e >= 0 {
        let (int, frac) = s.split_at(e as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{s}", "0".repeat((-e - 1) as usize))
    };
    let out = if out.contains('.') { out.trim_end_matches('0').trim_end_matches('.').to_string() } else { out };
    format!("{sign}{out}")
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<u64> for Exact {
    fn from(v: u64) -> Self {
        Exact::int(v)
    }
}

fn json_int(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::from(v.to_string()),
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Exact", 3)?;
        st.serialize_field("num", &json_int(self.numer()))?;
        st.serialize_field("den", &json_int(self.denom()))?;
        st.serialize_field("decimal", &self.decimal())?;
        st.end()
    }
}
