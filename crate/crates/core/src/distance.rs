use std::cmp::Ordering;
use std::fmt;

use num_integer::Roots;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = Ratio<i64>;

/// An exact non-negative distance, stored as its square.
///
/// Rational distances and Euclidean distances between rational points both
/// have rational squares, so equality and order are decided without floats.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Distance {
    sq: Rational,
}

impl Distance {
    pub const ZERO: Distance = Distance { sq: Ratio::new_raw(0, 1) };

    pub fn from_int(n: i64) -> Distance {
        assert!(n >= 0, "negative distance");
        Distance { sq: Rational::from_integer(n * n) }
    }

    pub fn from_rational(r: Rational) -> Distance {
        assert!(!r.is_negative(), "negative distance");
        Distance { sq: r * r }
    }

    pub fn from_squared(q: Rational) -> Distance {
        assert!(!q.is_negative(), "negative squared distance");
        Distance { sq: q }
    }

    pub fn squared(&self) -> Rational {
        self.sq
    }

    pub fn is_zero(&self) -> bool {
        self.sq.is_zero()
    }

    /// The value itself when it is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        let n = exact_sqrt(*self.sq.numer())?;
        let d = exact_sqrt(*self.sq.denom())?;
        Some(Rational::new(n, d))
    }

    pub fn to_f64(&self) -> f64 {
        self.sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// Largest integer m with m <= value.
    pub fn floor(&self) -> u64 {
        let whole = self.sq.floor().to_integer();
        whole.sqrt() as u64
    }

    /// value / step, exact.
    pub fn div(&self, step: Distance) -> Distance {
        assert!(!step.is_zero(), "division by zero distance");
        Distance { sq: self.sq / step.sq }
    }

    /// Sum of two distances when both are rational.
    pub fn checked_add(&self, other: Distance) -> Option<Distance> {
        Some(Distance::from_rational(self.as_rational()? + other.as_rational()?))
    }

    /// Exact test of `self <= a + b`.
    pub fn le_sum(&self, a: Distance, b: Distance) -> bool {
        // sqrt(x) <= sqrt(y) + sqrt(z)  <=>  x - y - z <= 2 sqrt(yz)
        let lhs = self.sq - a.sq - b.sq;
        if !lhs.is_positive() {
            return true;
        }
        let four = Rational::from_integer(4);
        lhs * lhs <= four * a.sq * b.sq
    }

    /// Compare against an integer radius.
    pub fn cmp_int(&self, r: u64) -> Ordering {
        let r = r as i64;
        self.sq.cmp(&Rational::from_integer(r * r))
    }

    pub fn parse(s: &str) -> Result<Distance, Error> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let q = parse_rational(inner)?;
            if q.is_negative() {
                return Err(Error::Malformed(format!("negative value {s}")));
            }
            return Ok(Distance::from_squared(q));
        }
        let r = parse_rational(t)?;
        if r.is_negative() {
            return Err(Error::Malformed(format!("negative distance {s}")));
        }
        Ok(Distance::from_rational(r))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{}", fmt_rational(r)),
            None => write!(f, "sqrt({})", fmt_rational(self.sq)),
        }
    }
}

fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

pub fn fmt_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses "3", "-2", "7/4" or a finite decimal such as "0.25" exactly.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::Malformed(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if t.contains(['e', 'E']) {
        return Err(bad());
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if frac.len() > 15 || digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: i64 = digits.parse().map_err(|_| bad())?;
        let den = 10i64.pow(frac.len() as u32);
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    t.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

pub fn rational_from_json(v: &serde_json::Value) -> Result<Rational, Error> {
    match v {
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(Error::Malformed(format!("expected a number, got {other}"))),
    }
}

pub fn rational_to_json(r: Rational) -> serde_json::Value {
    if r.is_integer() {
        serde_json::Value::from(*r.numer())
    } else {
        serde_json::Value::from(fmt_rational(r))
    }
}
