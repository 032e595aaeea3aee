//! First-order forward-mode differentiation over four real inputs.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Below this argument `sin(x)/x` is evaluated from its Taylor series.
pub const SINC_SERIES_THRESHOLD: f64 = 1e-4;

/// Below this `r` the functions of `sqrt(r)` switch to their series in `r`.
const SQRT_SERIES_THRESHOLD: f64 = 1e-4;

/// A value together with its partial derivatives with respect to `q1..q4`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet4 {
    pub val: f64,
    pub d: [f64; 4],
}

impl Jet4 {
    pub const fn new(val: f64, d: [f64; 4]) -> Self {
        Jet4 { val, d }
    }

    pub const fn constant(c: f64) -> Self {
        Jet4 {
            val: c,
            d: [0.0; 4],
        }
    }

    /// The coordinate function `q_i` (1-based) lifted at `point`.
    pub fn coord(i: usize, point: [f64; 4]) -> Result<Self> {
        if !(1..=4).contains(&i) {
            return Err(Error::Usage(format!("coordinate index {i} not in 1..=4")));
        }
        let mut d = [0.0; 4];
        d[i - 1] = 1.0;
        Ok(Jet4 {
            val: point[i - 1],
            d,
        })
    }

    /// All four coordinates lifted at `point`.
    pub fn coords(point: [f64; 4]) -> [Jet4; 4] {
        std::array::from_fn(|k| {
            let mut d = [0.0; 4];
            d[k] = 1.0;
            Jet4 { val: point[k], d }
        })
    }

    /// Applies a scalar function given its value and derivative at `self.val`.
    fn chain(self, val: f64, deriv: f64) -> Jet4 {
        Jet4 {
            val,
            d: self.d.map(|x| deriv * x),
        }
    }

    pub fn checked_div(self, rhs: Jet4) -> Result<Jet4> {
        if rhs.val == 0.0 {
            return Err(Error::domain(format!(
                "division by a jet with value {}",
                rhs.val
            )));
        }
        Ok(self / rhs)
    }

    pub fn exp(self) -> Jet4 {
        let e = self.val.exp();
        self.chain(e, e)
    }

    pub fn sin(self) -> Jet4 {
        self.chain(self.val.sin(), self.val.cos())
    }

    pub fn cos(self) -> Jet4 {
        self.chain(self.val.cos(), -self.val.sin())
    }

    pub fn sqrt(self) -> Result<Jet4> {
        if !(self.val > 0.0) {
            return Err(Error::domain(format!(
                "sqrt of a jet with value {}",
                self.val
            )));
        }
        let s = self.val.sqrt();
        Ok(self.chain(s, 0.5 / s))
    }

    /// `sin(x)/x` for `x >= 0`, finite with a finite derivative through `x = 0`.
    pub fn sinc_like(self) -> Result<Jet4> {
        let x = self.val;
        if !(x >= 0.0) {
            return Err(Error::domain(format!("sinc_like needs x >= 0, got {x}")));
        }
        let (v, dv) = if x < SINC_SERIES_THRESHOLD {
            let x2 = x * x;
            (1.0 - x2 / 6.0 + x2 * x2 / 120.0, -x / 3.0 + x * x2 / 30.0)
        } else {
            let (s, c) = x.sin_cos();
            (s / x, (c * x - s) / (x * x))
        };
        Ok(self.chain(v, dv))
    }
}

impl Add for Jet4 {
    type Output = Jet4;

    fn add(self, rhs: Jet4) -> Jet4 {
        Jet4 {
            val: self.val + rhs.val,
            d: std::array::from_fn(|k| self.d[k] + rhs.d[k]),
        }
    }
}

impl Sub for Jet4 {
    type Output = Jet4;

    fn sub(self, rhs: Jet4) -> Jet4 {
        Jet4 {
            val: self.val - rhs.val,
            d: std::array::from_fn(|k| self.d[k] - rhs.d[k]),
        }
    }
}

impl Mul for Jet4 {
    type Output = Jet4;

    fn mul(self, rhs: Jet4) -> Jet4 {
        Jet4 {
            val: self.val * rhs.val,
            d: std::array::from_fn(|k| self.d[k] * rhs.val + self.val * rhs.d[k]),
        }
    }
}

impl Div for Jet4 {
    type Output = Jet4;

    fn div(self, rhs: Jet4) -> Jet4 {
        let inv = 1.0 / rhs.val;
        let val = self.val * inv;
        Jet4 {
            val,
            d: std::array::from_fn(|k| (self.d[k] - val * rhs.d[k]) * inv),
        }
    }
}

impl Neg for Jet4 {
    type Output = Jet4;

    fn neg(self) -> Jet4 {
        Jet4 {
            val: -self.val,
            d: self.d.map(|x| -x),
        }
    }
}

/// Number types the axial pair rules are evaluated over: plain reals and jets.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(c: f64) -> Self;
    fn value(&self) -> f64;
    fn exp(self) -> Self;
    /// `cos(sqrt(r))` for `r >= 0`.
    fn cos_sqrt(self) -> Self;
    /// `sin(sqrt(r)) / sqrt(r)` for `r >= 0`, extended by 1 at `r = 0`.
    fn sinc_sqrt(self) -> Self;
}

/// Value and derivative of `cos(sqrt(r))` and `sin(sqrt(r))/sqrt(r)` in `r`.
///
/// Both are entire in `r`; near zero the series avoids cancellation in the
/// derivative `(cos - sinc) / (2r)`.
fn cos_sinc_sqrt(r: f64) -> (f64, f64, f64, f64) {
    if r < SQRT_SERIES_THRESHOLD {
        let c = 1.0 - r / 2.0 + r * r / 24.0 - r * r * r / 720.0;
        let s = 1.0 - r / 6.0 + r * r / 120.0 - r * r * r / 5040.0;
        let dc = -s / 2.0;
        let ds = -1.0 / 6.0 + r / 60.0 - r * r / 1680.0;
        (c, dc, s, ds)
    } else {
        let x = r.sqrt();
        let (sn, cs) = x.sin_cos();
        let s = sn / x;
        (cs, -s / 2.0, s, (cs - s) / (2.0 * r))
    }
}

impl Scalar for f64 {
    fn from_f64(c: f64) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn exp(self) -> Self {
        f64::exp(self)
    }

    fn cos_sqrt(self) -> Self {
        cos_sinc_sqrt(self).0
    }

    fn sinc_sqrt(self) -> Self {
        cos_sinc_sqrt(self).2
    }
}

impl Scalar for Jet4 {
    fn from_f64(c: f64) -> Self {
        Jet4::constant(c)
    }

    fn value(&self) -> f64 {
        self.val
    }

    fn exp(self) -> Self {
        Jet4::exp(self)
    }

    fn cos_sqrt(self) -> Self {
        let (c, dc, _, _) = cos_sinc_sqrt(self.val);
        self.chain(c, dc)
    }

    fn sinc_sqrt(self) -> Self {
        let (_, _, s, ds) = cos_sinc_sqrt(self.val);
        self.chain(s, ds)
    }
}
