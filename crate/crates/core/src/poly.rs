//! Laurent polynomials with integer coefficients, `f = Σ c_k t^k`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, EdenError, Result};

/// Canonical form: no zero coefficient at either end; the zero polynomial
/// has no coefficients and offset 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LaurentPoly {
    coeffs: Vec<i64>,
    offset: i64,
}

impl LaurentPoly {
    pub fn new(coeffs: Vec<i64>, offset: i64) -> Self {
        let first = coeffs.iter().position(|&c| c != 0);
        match first {
            None => LaurentPoly { coeffs: Vec::new(), offset: 0 },
            Some(i) => {
                let last = coeffs.iter().rposition(|&c| c != 0).expect("nonzero");
                LaurentPoly { coeffs: coeffs[i..=last].to_vec(), offset: offset + i as i64 }
            }
        }
    }

    pub fn constant(c: i64) -> Self {
        LaurentPoly::new(vec![c], 0)
    }

    /// `c · t^k`.
    pub fn monomial(c: i64, k: i64) -> Self {
        LaurentPoly::new(vec![c], k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Lowest exponent.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Highest exponent.
    pub fn top(&self) -> i64 {
        self.offset + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> i64 {
        let i = k - self.offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            0
        } else {
            self.coeffs[i as usize]
        }
    }

    /// `(exponent, coefficient)` pairs with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.offset + i as i64, c))
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|&c| (c as f64).abs()).sum()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c as f64;
        }
        acc * z.powi(self.offset as i32)
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::new(Vec::new(), 0);
        }
        let mut c = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        LaurentPoly::new(c, self.offset + other.offset)
    }

    /// Coefficients reduced into `0..m`.
    pub fn reduce_mod(&self, m: i64) -> LaurentPoly {
        LaurentPoly::new(self.coeffs.iter().map(|c| c.rem_euclid(m)).collect(), self.offset)
    }
}

impl fmt::Display for LaurentPoly {
    /// `c_lo,...,c_hi @ offset`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 @ 0");
        }
        let cs: Vec<String> = self.coeffs.iter().map(i64::to_string).collect();
        write!(f, "{} @ {}", cs.join(","), self.offset)
    }
}

impl FromStr for LaurentPoly {
    type Err = EdenError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("f").map(|r| r.trim_start().trim_start_matches('=')).unwrap_or(s);
        let (cs, off) = match s.split_once('@') {
            Some((a, b)) => (a, b.trim().parse::<i64>().map_err(|_| invalid(format!("bad offset in `{s}`")))?),
            None => (s, 0),
        };
        let coeffs = cs
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|_| invalid(format!("bad coefficient `{c}`"))))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(invalid("polynomial has no coefficients"));
        }
        Ok(LaurentPoly::new(coeffs, off))
    }
}
