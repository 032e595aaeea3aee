//! Functions in axial form `f(q) = f1(q) e1 + f0(q) (q2 e2 + q3 e3 + q4 e4)`.
//!
//! A [`RegularFn`] is an expression tree whose every node denotes such a
//! function. The pair `(f0, f1)` of each node is computed from its children
//! by closed-form pair rules, so sums, products, reciprocals and
//! compositions stay inside the axial class without symbolic manipulation.
//! Pairs evaluate over any [`Scalar`], which gives exact first partials via
//! [`Jet4`].

use crate::error::{Error, Result};
use crate::jet::{Jet4, Scalar};
use crate::quat::Quaternion;

/// Reciprocals are undefined where `N = f1^2 + f0^2 rho` is at or below this.
pub const RECIPROCAL_EPS: f64 = 1e-12;

/// A real-valued pair `(f0, f1)` of functions of `(q1, q2, q3, q4)`.
pub trait AxialPair: Send + Sync {
    /// `(f0, f1)` at a point.
    fn pair_real(&self, q: [f64; 4]) -> Result<(f64, f64)>;

    /// `(f0, f1)` with their partial derivatives at a point.
    fn pair_jet(&self, q: [f64; 4]) -> Result<(Jet4, Jet4)>;

    /// Succeeds iff the point lies in the declared open set where the pair is defined.
    fn check_domain(&self, q: [f64; 4]) -> Result<()> {
        self.pair_real(q).map(|_| ())
    }

    fn contains(&self, q: [f64; 4]) -> bool {
        self.check_domain(q).is_ok()
    }

    /// The function value `f1 e1 + f0 Im(q)`.
    fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        let (f0, f1) = self.pair_real(q.c)?;
        Ok(assemble(f0, f1, q.c))
    }

    /// The four components of the function value as jets.
    fn components_jet(&self, q: [f64; 4]) -> Result<[Jet4; 4]> {
        let (f0, f1) = self.pair_jet(q)?;
        let x = Jet4::coords(q);
        Ok([f1, x[1] * f0, x[2] * f0, x[3] * f0])
    }
}

/// `f1 e1 + f0 (q2 e2 + q3 e3 + q4 e4)`.
pub fn assemble(f0: f64, f1: f64, q: [f64; 4]) -> Quaternion {
    Quaternion::new(f1, f0 * q[1], f0 * q[2], f0 * q[3])
}

/// Expression tree over the closure operations of the axial class.
#[derive(Clone, Debug, PartialEq)]
pub enum RegularFn {
    Const(f64),
    Identity,
    /// `q^n`; negative exponents are the reciprocal of `q^-n`.
    Power(i32),
    Exp,
    Sum(Box<RegularFn>, Box<RegularFn>),
    Scale(f64, Box<RegularFn>),
    Product(Box<RegularFn>, Box<RegularFn>),
    Reciprocal(Box<RegularFn>),
    /// `Compose(g, f)` is `g ∘ f`.
    Compose(Box<RegularFn>, Box<RegularFn>),
}

pub fn sum(f: RegularFn, g: RegularFn) -> RegularFn {
    RegularFn::Sum(Box::new(f), Box::new(g))
}

pub fn scale_fn(c: f64, f: RegularFn) -> RegularFn {
    RegularFn::Scale(c, Box::new(f))
}

pub fn product(f: RegularFn, g: RegularFn) -> RegularFn {
    RegularFn::Product(Box::new(f), Box::new(g))
}

pub fn reciprocal(f: RegularFn) -> RegularFn {
    RegularFn::Reciprocal(Box::new(f))
}

/// `g ∘ f`.
pub fn compose(g: RegularFn, f: RegularFn) -> RegularFn {
    RegularFn::Compose(Box::new(g), Box::new(f))
}

fn rho<S: Scalar>(q: &[S; 4]) -> S {
    q[1] * q[1] + q[2] * q[2] + q[3] * q[3]
}

fn sum_rule<S: Scalar>((f0, f1): (S, S), (g0, g1): (S, S)) -> (S, S) {
    (f0 + g0, f1 + g1)
}

fn product_rule<S: Scalar>((f0, f1): (S, S), (g0, g1): (S, S), rho: S) -> (S, S) {
    (f1 * g0 + f0 * g1, f1 * g1 - f0 * g0 * rho)
}

fn reciprocal_rule<S: Scalar>((f0, f1): (S, S), rho: S) -> Result<(S, S)> {
    let n = f1 * f1 + f0 * f0 * rho;
    if !(n.value() > RECIPROCAL_EPS) {
        return Err(Error::domain(format!(
            "reciprocal undefined: |f|^2 = {:e} <= {RECIPROCAL_EPS:e}",
            n.value()
        )));
    }
    Ok((-f0 / n, f1 / n))
}

fn power_pair<S: Scalar>(n: u32, q1: S, rho: S) -> (S, S) {
    let (mut f0, mut f1) = (S::from_f64(0.0), S::from_f64(1.0));
    for _ in 0..n {
        (f0, f1) = (f1 + f0 * q1, f1 * q1 - f0 * rho);
    }
    (f0, f1)
}

impl RegularFn {
    /// Evaluates `(f0, f1)` over any scalar type.
    pub fn pair_at<S: Scalar>(&self, q: &[S; 4]) -> Result<(S, S)> {
        use RegularFn::*;
        Ok(match self {
            Const(c) => (S::from_f64(0.0), S::from_f64(*c)),
            Identity => (S::from_f64(1.0), q[0]),
            Power(n) if *n >= 0 => power_pair(n.unsigned_abs(), q[0], rho(q)),
            Power(n) => {
                let r = rho(q);
                reciprocal_rule(power_pair(n.unsigned_abs(), q[0], r), r)?
            }
            Exp => {
                let r = rho(q);
                let e = q[0].exp();
                (e * r.sinc_sqrt(), e * r.cos_sqrt())
            }
            Sum(f, g) => sum_rule(f.pair_at(q)?, g.pair_at(q)?),
            Scale(c, f) => {
                let (f0, f1) = f.pair_at(q)?;
                let c = S::from_f64(*c);
                (c * f0, c * f1)
            }
            Product(f, g) => product_rule(f.pair_at(q)?, g.pair_at(q)?, rho(q)),
            Reciprocal(f) => reciprocal_rule(f.pair_at(q)?, rho(q))?,
            Compose(g, f) => {
                let (f0, f1) = f.pair_at(q)?;
                let p = [f1, q[1] * f0, q[2] * f0, q[3] * f0];
                let (g0, g1) = g.pair_at(&p)?;
                (g0 * f0, g1)
            }
        })
    }

    /// Node count, used to bound generated trees.
    pub fn size(&self) -> usize {
        use RegularFn::*;
        match self {
            Const(_) | Identity | Power(_) | Exp => 1,
            Scale(_, f) | Reciprocal(f) => 1 + f.size(),
            Sum(f, g) | Product(f, g) | Compose(f, g) => 1 + f.size() + g.size(),
        }
    }
}

impl AxialPair for RegularFn {
    fn pair_real(&self, q: [f64; 4]) -> Result<(f64, f64)> {
        self.pair_at(&q)
    }

    fn pair_jet(&self, q: [f64; 4]) -> Result<(Jet4, Jet4)> {
        self.pair_at(&Jet4::coords(q))
    }

    /// The declared regularity domain: evaluability, intersected with the
    /// complement of the real axis wherever `Exp` is applied.
    fn check_domain(&self, q: [f64; 4]) -> Result<()> {
        use RegularFn::*;
        match self {
            Const(_) | Identity => Ok(()),
            Power(_) => self.pair_real(q).map(|_| ()),
            Exp => {
                if rho(&q) > 0.0 {
                    Ok(())
                } else {
                    Err(Error::domain("exp is not regular on the real axis"))
                }
            }
            Sum(f, g) | Product(f, g) => {
                f.check_domain(q)?;
                g.check_domain(q)
            }
            Scale(_, f) => f.check_domain(q),
            Reciprocal(f) => {
                f.check_domain(q)?;
                self.pair_real(q).map(|_| ())
            }
            Compose(g, f) => {
                f.check_domain(q)?;
                let (f0, f1) = f.pair_real(q)?;
                g.check_domain(assemble(f0, f1, q).c)
            }
        }
    }
}

/// A pair given directly as a function of jets, for hand-built test subjects
/// that need not lie in the axial class's regular part.
#[derive(Clone, Copy)]
pub struct JetPair {
    pub name: &'static str,
    pub pair: fn(&[Jet4; 4]) -> (Jet4, Jet4),
}

impl AxialPair for JetPair {
    fn pair_real(&self, q: [f64; 4]) -> Result<(f64, f64)> {
        let (f0, f1) = (self.pair)(&Jet4::coords(q));
        Ok((f0.val, f1.val))
    }

    fn pair_jet(&self, q: [f64; 4]) -> Result<(Jet4, Jet4)> {
        Ok((self.pair)(&Jet4::coords(q)))
    }
}

impl std::fmt::Debug for JetPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JetPair").field("name", &self.name).finish()
    }
}
