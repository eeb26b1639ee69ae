//! Numeric abstraction shared by the geometry and metric code.
//!
//! Everything that computes IoU, precision, recall or AP is generic over
//! [`Scalar`]. Binary floats (`f32`, `f64`) are the production types; exact
//! rationals ([`Ratio`]) let tests run the same code paths without rounding.

use std::cmp::Ordering;
use std::fmt::{Debug, Write};

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// A number usable for box coordinates, scores and ratios.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {
    /// Converts an event count (true positives, ranks, ...) into the scalar.
    fn from_count(n: usize) -> Self;

    /// Lossy conversion used for display and cross-type comparisons.
    fn to_f64(self) -> f64;

    /// Parses a plain decimal literal such as `0.125` or `1`.
    ///
    /// Returns `None` for anything that is not a finite number.
    fn parse_decimal(s: &str) -> Option<Self>;

    /// Appends the value rounded to `places` fractional digits.
    fn write_fixed(self, places: usize, out: &mut String);

    /// Total order over the values this crate admits (no NaN).
    #[inline]
    fn order(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    #[inline]
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    #[inline]
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `true` when `0 <= self <= 1`. NaN is rejected.
    #[inline]
    fn is_unit_interval(self) -> bool {
        self >= Self::zero() && self <= Self::one()
    }

    /// Renders with `places` fractional digits.
    fn fixed(self, places: usize) -> String {
        let mut s = String::new();
        self.write_fixed(places, &mut s);
        s
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn from_count(n: usize) -> Self {
                n as $t
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }

            fn parse_decimal(s: &str) -> Option<Self> {
                // Rust's float parser also accepts "inf", "NaN" and exponents;
                // only plain decimals are valid in the CSV formats.
                if s.is_empty()
                    || !s
                        .bytes()
                        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+'))
                {
                    return None;
                }
                s.parse::<$t>().ok().filter(|v| v.is_finite())
            }

            fn write_fixed(self, places: usize, out: &mut String) {
                let _ = write!(out, "{:.*}", places, self);
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

macro_rules! ratio_scalar {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            #[inline]
            fn from_count(n: usize) -> Self {
                Ratio::from_integer(n as $int)
            }

            fn to_f64(self) -> f64 {
                ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
            }

            fn parse_decimal(s: &str) -> Option<Self> {
                let (negative, body) = match s.as_bytes().first()? {
                    b'-' => (true, &s[1..]),
                    b'+' => (false, &s[1..]),
                    _ => (false, s),
                };
                let (int_part, frac_part) = match body.split_once('.') {
                    Some((i, f)) => (i, f),
                    None => (body, ""),
                };
                if int_part.is_empty() && frac_part.is_empty() {
                    return None;
                }
                let digits_ok = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
                if !digits_ok(int_part) || !digits_ok(frac_part) {
                    return None;
                }
                let mut numer: $int = 0;
                for b in int_part.bytes().chain(frac_part.bytes()) {
                    numer = numer.checked_mul(10)?.checked_add((b - b'0') as $int)?;
                }
                let denom = (10 as $int).checked_pow(frac_part.len() as u32)?;
                let value = Ratio::new(numer, denom);
                Some(if negative { -value } else { value })
            }

            fn write_fixed(self, places: usize, out: &mut String) {
                let scale = Ratio::from_integer((10 as $int).pow(places as u32));
                // Ratio::round rounds half away from zero.
                let scaled = (self * scale).round().to_integer();
                if scaled.is_negative() {
                    out.push('-');
                }
                let magnitude = scaled.abs();
                let unit = (10 as $int).pow(places as u32);
                let _ = write!(out, "{}", magnitude / unit);
                if places > 0 {
                    let _ = write!(out, ".{:0width$}", magnitude % unit, width = places);
                }
            }
        }
    };
}

ratio_scalar!(i64);
ratio_scalar!(i128);
