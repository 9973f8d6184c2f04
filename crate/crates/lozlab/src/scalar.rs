//! Scalar arithmetic: exact rationals, adaptive-precision floats, and the
//! small trait surface the generic linear algebra and jets are written
//! against.
//!
//! The precision policy lives here: exact rational arithmetic whenever all
//! inputs are rational and all exponents integral, otherwise high-precision
//! floats starting at [`PREC_START`] bits and doubling until two successive
//! precisions agree to [`REL_AGREE`] relative; failing to stabilize at
//! [`PREC_MAX`] bits is an error, never a silent return.

use crate::error::{invalid, Error, Result};
use rug::ops::Pow;
pub use rug::{Float, Integer, Rational};

pub const PREC_START: u32 = 128;
pub const PREC_MAX: u32 = 2048;
pub const REL_AGREE: f64 = 1e-12;

/// Minimal field operations, by reference, with enough context to mint new
/// values (floats carry their precision in the prototype value).
pub trait Field: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, v: i64) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn div_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn is_zero_val(&self) -> bool;
    /// |self| > |o|, used for pivot selection.
    fn abs_gt(&self, o: &Self) -> bool;
}

/// Fields with the transcendental operations the jets and Bessel code need.
pub trait Analytic: Field {
    fn exp_val(&self) -> Self;
    fn ln_val(&self) -> Self;
    fn sqrt_val(&self) -> Self;
    fn from_f64_like(&self, v: f64) -> Self;
    fn to_f64_val(&self) -> f64;
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Rational::from(v)
    }
    fn add_ref(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn div_ref(&self, o: &Self) -> Self {
        Rational::from(self / o)
    }
    fn neg_ref(&self) -> Self {
        Rational::from(-self)
    }
    fn is_zero_val(&self) -> bool {
        *self == 0
    }
    fn abs_gt(&self, o: &Self) -> bool {
        self.cmp_abs(o) == std::cmp::Ordering::Greater
    }
}

impl Field for Float {
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn one_like(&self) -> Self {
        Float::with_val(self.prec(), 1)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Float::with_val(self.prec(), v)
    }
    fn add_ref(&self, o: &Self) -> Self {
        Float::with_val(self.prec().max(o.prec()), self + o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        Float::with_val(self.prec().max(o.prec()), self - o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        Float::with_val(self.prec().max(o.prec()), self * o)
    }
    fn div_ref(&self, o: &Self) -> Self {
        Float::with_val(self.prec().max(o.prec()), self / o)
    }
    fn neg_ref(&self) -> Self {
        Float::with_val(self.prec(), -self)
    }
    fn is_zero_val(&self) -> bool {
        self.is_zero()
    }
    fn abs_gt(&self, o: &Self) -> bool {
        self.cmp_abs(o) == Some(std::cmp::Ordering::Greater)
    }
}

impl Analytic for Float {
    fn exp_val(&self) -> Self {
        self.clone().exp()
    }
    fn ln_val(&self) -> Self {
        self.clone().ln()
    }
    fn sqrt_val(&self) -> Self {
        self.clone().sqrt()
    }
    fn from_f64_like(&self, v: f64) -> Self {
        Float::with_val(self.prec(), v)
    }
    fn to_f64_val(&self) -> f64 {
        self.to_f64()
    }
}

impl Field for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn from_i64_like(&self, v: i64) -> Self {
        v as f64
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn is_zero_val(&self) -> bool {
        *self == 0.0
    }
    fn abs_gt(&self, o: &Self) -> bool {
        self.abs() > o.abs()
    }
}

impl Analytic for f64 {
    fn exp_val(&self) -> Self {
        f64::exp(*self)
    }
    fn ln_val(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt_val(&self) -> Self {
        f64::sqrt(*self)
    }
    fn from_f64_like(&self, v: f64) -> Self {
        v
    }
    fn to_f64_val(&self) -> f64 {
        *self
    }
}

/// A value that is either an exact rational or a high-precision real.
///
/// Operations that can stay exact do; anything touched by an irrational
/// input degrades to `Real` at that input's precision.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Rational),
    Real(Float),
}

impl Scalar {
    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(Rational::from(v))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(invalid("zero denominator"));
        }
        Ok(Scalar::Exact(Rational::from((num, den))))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Real(_) => None,
        }
    }

    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            Scalar::Exact(r) => Float::with_val(prec, r),
            Scalar::Real(f) => Float::with_val(prec, f),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Real(f) => f.to_f64(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => *r == 0,
            Scalar::Real(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => *r == 1,
            Scalar::Real(f) => *f == 1,
        }
    }

    /// Decimal rendering: exact values as `p/q`, floats with enough digits
    /// for their precision.
    pub fn to_decimal_string(&self) -> String {
        match self {
            Scalar::Exact(r) => {
                if r.denom() == &Integer::from(1) {
                    r.numer().to_string()
                } else {
                    r.to_string()
                }
            }
            Scalar::Real(f) => format_float(f),
        }
    }
}

/// Render a float in decimal with digits matching its binary precision.
pub fn format_float(f: &Float) -> String {
    let digits = (f.prec() as f64 * 0.30103).floor() as usize;
    let digits = digits.clamp(17, 640);
    let (sign, mantissa, exp) = f.to_sign_string_exp(10, Some(digits));
    if mantissa.chars().all(|c| c == '0') {
        return "0".to_string();
    }
    let s = if sign { "-" } else { "" };
    format!("{s}0.{mantissa}e{}", exp.unwrap_or(0))
}

/// Relative agreement used by the doubling driver: true when the two values
/// differ by at most [`REL_AGREE`] relatively, or both are negligibly small.
pub fn floats_agree(a: &Float, b: &Float) -> bool {
    if a.is_zero() && b.is_zero() {
        return true;
    }
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    let scale = {
        let aa = Float::with_val(prec, a).abs();
        let bb = Float::with_val(prec, b).abs();
        if aa > bb {
            aa
        } else {
            bb
        }
    };
    if scale < 1e-250 {
        return true;
    }
    diff / scale < REL_AGREE
}

/// Evaluate at doubling precision until two successive runs agree to
/// [`REL_AGREE`] on every component; return the higher-precision result.
pub fn adaptive_floats<F>(mut eval: F) -> Result<Vec<Float>>
where
    F: FnMut(u32) -> Result<Vec<Float>>,
{
    let mut prec = PREC_START;
    let mut prev = eval(prec)?;
    while prec < PREC_MAX {
        prec *= 2;
        let cur = eval(prec)?;
        if cur.len() == prev.len()
            && cur.iter().zip(prev.iter()).all(|(a, b)| floats_agree(a, b))
        {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::PrecisionExhausted(PREC_MAX))
}

pub fn adaptive_float<F>(mut eval: F) -> Result<Float>
where
    F: FnMut(u32) -> Result<Float>,
{
    let v = adaptive_floats(|p| eval(p).map(|f| vec![f]))?;
    Ok(v.into_iter().next().unwrap())
}

/// x^e for integer e, exact.
pub fn rational_pow(x: &Rational, e: i64) -> Result<Rational> {
    if *x == 0 && e <= 0 {
        return Err(invalid("zero base with non-positive exponent"));
    }
    let p = x.clone().pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Ok(p)
    } else {
        Ok(Rational::from(1) / p)
    }
}

/// Exact square root when the rational is a perfect square of a rational.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if *x < 0 {
        return None;
    }
    let num = x.numer().clone();
    let den = x.denom().clone();
    let (ns, nrem) = num.sqrt_rem(Integer::new());
    let (ds, drem) = den.sqrt_rem(Integer::new());
    if nrem == 0 && drem == 0 {
        Some(Rational::from((ns, ds)))
    } else {
        None
    }
}

/// Exact k-th root of a nonnegative rational, when it exists.
pub fn rational_root(x: &Rational, k: u32) -> Option<Rational> {
    if k == 0 || *x < 0 {
        return None;
    }
    if k == 1 {
        return Some(x.clone());
    }
    let (nr, nrem) = x.numer().clone().root_rem(Integer::new(), k);
    let (dr, drem) = x.denom().clone().root_rem(Integer::new(), k);
    if nrem == 0 && drem == 0 {
        Some(Rational::from((nr, dr)))
    } else {
        None
    }
}

/// Binomial coefficient C(l, t) for integer l (possibly negative), t >= 0:
/// the falling-factorial definition l(l-1)...(l-t+1)/t!.
pub fn binomial_general(l: i64, t: u32) -> Rational {
    let mut num = Integer::from(1);
    for s in 0..t as i64 {
        num *= Integer::from(l - s);
    }
    let mut den = Integer::from(1);
    for s in 1..=t {
        den *= Integer::from(s);
    }
    Rational::from((num, den))
}

pub fn factorial(n: u32) -> Integer {
    Integer::factorial(n).into()
}

/// Product of j! for j = 1..k-1; the Vandermonde of a staircase.
pub fn superfactorial(k: u32) -> Integer {
    let mut p = Integer::from(1);
    for j in 1..k {
        p *= factorial(j);
    }
    p
}
