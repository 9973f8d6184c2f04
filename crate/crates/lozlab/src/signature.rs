//! Signatures with integer or half-integer parts.
//!
//! Parts are stored doubled so that half-integers stay exact: the signature
//! (3/2, 1/2) is `doubled = [3, 1]`. A signature is valid when the doubled
//! parts are weakly decreasing and share one parity (all even = integer
//! parts, all odd = half-integer parts). The constructors used around the
//! crate live here:
//!
//! * `from_parts` / `from_doubled`: explicit input, validated;
//! * `box_top(m, n)`: the rectangle (m^n);
//! * `staircase_merge(lam, n)`: the length-2n signature with parts
//!   lam_i + 1 on top and the negated reversal of lam below, which is how a
//!   length-n shape enters the doubled-rank evaluations;
//! * `uniform_doubled(d, n)`: the rectangle ((d/2)^n), covering the
//!   half-integer shapes behind the free-boundary specializations.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    /// Doubled parts, weakly decreasing, all the same parity.
    doubled: Vec<i64>,
}

impl Signature {
    pub fn from_doubled(doubled: Vec<i64>) -> Result<Self> {
        if doubled.is_empty() {
            return Err(invalid("empty signature"));
        }
        for w in doubled.windows(2) {
            if w[0] < w[1] {
                return Err(invalid("signature parts must be weakly decreasing"));
            }
        }
        let parity = doubled[0].rem_euclid(2);
        if doubled.iter().any(|d| d.rem_euclid(2) != parity) {
            return Err(invalid("signature parts must share one parity"));
        }
        Ok(Signature { doubled })
    }

    /// Integer parts.
    pub fn from_parts(parts: &[i64]) -> Result<Self> {
        Self::from_doubled(parts.iter().map(|p| 2 * p).collect())
    }

    /// The rectangle (m^n).
    pub fn box_top(m: i64, n: usize) -> Self {
        Signature {
            doubled: vec![2 * m; n.max(1)],
        }
    }

    pub fn zero(n: usize) -> Self {
        Signature {
            doubled: vec![0; n.max(1)],
        }
    }

    /// All n parts equal to d/2 (d may be odd, giving half-integer parts).
    pub fn uniform_doubled(d: i64, n: usize) -> Self {
        Signature {
            doubled: vec![d; n.max(1)],
        }
    }

    /// For a partition lam of length <= n (zero-padded), the length-2n
    /// signature nu with nu_i = lam_i + 1 for i <= n and
    /// nu_{n+i} = -lam_{n+1-i} for i in 1..=n.
    pub fn staircase_merge(lam: &[i64], n: usize) -> Result<Self> {
        if lam.is_empty() {
            return Signature::zero(n).merge_reflect(n);
        }
        if lam.iter().any(|&p| p < 0) {
            return Err(invalid("negative part in a shape"));
        }
        Signature::from_parts(lam)?.merge_reflect(n)
    }

    /// Doubled-rank reflection at rank n: parts lam_i + 1 on top, the
    /// negated reversal below. Works for half-integer parts too; shorter
    /// integral signatures are zero-padded first.
    pub fn merge_reflect(&self, n: usize) -> Result<Self> {
        let padded = if self.doubled.len() == n {
            self.clone()
        } else {
            self.padded(n)?
        };
        let mut doubled = Vec::with_capacity(2 * n);
        for &d in &padded.doubled {
            doubled.push(d + 2);
        }
        for &d in padded.doubled.iter().rev() {
            doubled.push(-d);
        }
        Signature::from_doubled(doubled)
    }

    pub fn len(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doubled.is_empty()
    }

    /// True when all parts are integers.
    pub fn is_integral(&self) -> bool {
        self.doubled[0] % 2 == 0
    }

    pub fn doubled_parts(&self) -> &[i64] {
        &self.doubled
    }

    /// Integer parts; errors on a half-integer signature.
    pub fn parts(&self) -> Result<Vec<i64>> {
        if !self.is_integral() {
            return Err(invalid("half-integer signature has no integer parts"));
        }
        Ok(self.doubled.iter().map(|d| d / 2).collect())
    }

    /// Doubled strictly-decreasing exponents 2*(part_i + (n - i)), the
    /// shifted form every determinant in the crate runs on.
    pub fn doubled_shifted(&self) -> Vec<i64> {
        let n = self.doubled.len() as i64;
        self.doubled
            .iter()
            .enumerate()
            .map(|(i, &d)| d + 2 * (n - 1 - i as i64))
            .collect()
    }

    /// Shift every part down by 1/2 (doubled parts down by 1).
    pub fn shifted_half_down(&self) -> Signature {
        Signature {
            doubled: self.doubled.iter().map(|d| d - 1).collect(),
        }
    }

    /// Zero-extend an integral signature to length n (parts must be >= 0).
    pub fn padded(&self, n: usize) -> Result<Signature> {
        if n < self.doubled.len() {
            return Err(invalid("cannot pad to a shorter length"));
        }
        if *self.doubled.last().unwrap() < 0 {
            return Err(invalid("cannot zero-pad past a negative part"));
        }
        let mut doubled = self.doubled.clone();
        doubled.resize(n, 0);
        Signature::from_doubled(doubled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_and_mixed_parity() {
        assert!(Signature::from_parts(&[1, 2]).is_err());
        assert!(Signature::from_doubled(vec![3, 2]).is_err());
        assert!(Signature::from_doubled(vec![3, 1]).is_ok());
    }

    #[test]
    fn staircase_merge_matches_hand_expansion() {
        // lam = (2, 1), n = 2: nu = (3, 2, -1, -2)
        let s = Signature::staircase_merge(&[2, 1], 2).unwrap();
        assert_eq!(s.parts().unwrap(), vec![3, 2, -1, -2]);
        // lam = (1), n = 2 pads to (1, 0): nu = (2, 1, 0, -1)
        let s = Signature::staircase_merge(&[1], 2).unwrap();
        assert_eq!(s.parts().unwrap(), vec![2, 1, 0, -1]);
        // half-integer reflection: (1/2)^2 -> (3/2, 3/2, -1/2, -1/2)
        let s = Signature::uniform_doubled(1, 2).merge_reflect(2).unwrap();
        assert_eq!(s.doubled_parts(), &[3, 3, -1, -1]);
    }

    #[test]
    fn shifted_exponents() {
        let s = Signature::from_parts(&[2, 0]).unwrap();
        // l = (2+1, 0+0) = (3, 0), doubled (6, 0)
        assert_eq!(s.doubled_shifted(), vec![6, 0]);
    }

    #[test]
    fn uniform_doubled_parity() {
        let s = Signature::uniform_doubled(-1, 2);
        assert!(!s.is_integral());
        assert_eq!(s.doubled_parts(), &[-1, -1]);
        assert!(s.parts().is_err());
        assert!(Signature::uniform_doubled(2, 3).is_integral());
    }
}
