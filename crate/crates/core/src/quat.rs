//! Quaternion arithmetic over the basis `e1, e2, e3, e4`.
//!
//! `e1` is the identity and the imaginary units obey
//! `e2^2 = e3^2 = e4^2 = -e1` together with the sign rule
//! `e_i e_j = -e_j e_i = (-1)^(i+j+1) e_(9-i-j)` for `2 <= i < j <= 4`.
//! Components are stored in basis order `(c1, c2, c3, c4)`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub c: [f64; 4],
}

/// Product of two basis elements (1-based indices), returned as `(sign, index)`.
pub fn basis_product(i: usize, j: usize) -> (f64, usize) {
    debug_assert!((1..=4).contains(&i) && (1..=4).contains(&j));
    match (i, j) {
        (1, k) | (k, 1) => (1.0, k),
        (i, j) if i == j => (-1.0, 1),
        (i, j) => {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            let sign = if (lo + hi + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let sign = if i < j { sign } else { -sign };
            (sign, 9 - lo - hi)
        }
    }
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { c: [0.0; 4] };
    pub const ONE: Quaternion = Quaternion::basis(1);

    pub const fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        Quaternion {
            c: [c1, c2, c3, c4],
        }
    }

    pub const fn from_array(c: [f64; 4]) -> Self {
        Quaternion { c }
    }

    /// The basis element `e_i`, `i` in `1..=4`.
    pub const fn basis(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i - 1] = 1.0;
        Quaternion { c }
    }

    /// A real scalar embedded as `c * e1`.
    pub const fn real(c: f64) -> Self {
        Quaternion::new(c, 0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    pub fn re(&self) -> f64 {
        self.c[0]
    }

    /// Imaginary part `c2 e2 + c3 e3 + c4 e4`.
    pub fn im(&self) -> Quaternion {
        Quaternion::new(0.0, self.c[1], self.c[2], self.c[3])
    }

    /// Squared norm of the imaginary part, `c2^2 + c3^2 + c4^2`.
    pub fn rho(&self) -> f64 {
        self.c[1] * self.c[1] + self.c[2] * self.c[2] + self.c[3] * self.c[3]
    }

    pub fn conj(&self) -> Quaternion {
        Quaternion::new(self.c[0], -self.c[1], -self.c[2], -self.c[3])
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: f64) -> Quaternion {
        Quaternion::from_array(self.c.map(|x| s * x))
    }

    pub fn inv(&self) -> Result<Quaternion> {
        let n = self.norm_sq();
        if n == 0.0 {
            return Err(Error::domain("zero quaternion has no inverse"));
        }
        Ok(self.conj().scale(1.0 / n))
    }

    /// Largest absolute component of `self - other`.
    pub fn max_abs_diff(&self, other: &Quaternion) -> f64 {
        (0..4)
            .map(|k| (self.c[k] - other.c[k]).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Quaternion {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.c[k]
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::from_array(std::array::from_fn(|k| self.c[k] + rhs.c[k]))
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::from_array(std::array::from_fn(|k| self.c[k] - rhs.c[k]))
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::from_array(self.c.map(|x| -x))
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Quaternion) -> Quaternion {
        let mut out = [0.0; 4];
        for i in 1..=4 {
            for j in 1..=4 {
                let (sign, k) = basis_product(i, j);
                out[k - 1] += sign * self.c[i - 1] * rhs.c[j - 1];
            }
        }
        Quaternion::from_array(out)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;

    fn mul(self, rhs: Quaternion) -> Quaternion {
        rhs.scale(self)
    }
}

impl fmt::Display for Quaternion {
    /// Renders as `a + b i + c j + d k` with `i, j, k` standing for `e2, e3, e4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.c[0])?;
        for (k, unit) in ["i", "j", "k"].iter().enumerate() {
            let v = self.c[k + 1];
            if v.is_sign_negative() {
                write!(f, " - {} {unit}", -v)?;
            } else {
                write!(f, " + {v} {unit}")?;
            }
        }
        Ok(())
    }
}
