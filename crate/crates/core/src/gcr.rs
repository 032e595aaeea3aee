//! Generalized Cauchy-Riemann residuals and Fueter operators.
//!
//! Two independent routes decide whether a function is algebraic regular at
//! a point:
//!
//! * the jet route evaluates an [`AxialPair`] on [`Jet4`] inputs and reads
//!   the seven residuals and both Fueter operators off exact first partials;
//! * the black-box route sees only a map `H -> H`, recovers `(f0, f1)` by
//!   [`extract_axial`] and differentiates with a five-point stencil.
//!
//! For a pair in axial form both Fueter operators must equal `-2 f0 e1`
//! exactly when the residuals vanish, so every verdict reports the two
//! characterizations side by side.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axial::{AxialPair, JetPair, RegularFn};
use crate::error::{Error, Result};
use crate::jet::Jet4;
use crate::quat::Quaternion;
use crate::sampling::{sample_region, Region};

/// Relative disagreement between second- and fourth-order difference
/// estimates above which a derivative is declared non-smooth.
const SMOOTHNESS_LIMIT: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Residual bound on the jet route, relative to `1 + |f0| + |f1|`.
    pub jet: f64,
    /// Residual bound on the finite-difference route, same scaling.
    pub fd: f64,
    /// Points with `q2^2 + q3^2 + q4^2` below this are indeterminate.
    pub eps_rho: f64,
    /// Difference step relative to `max(1, |point|)`.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            jet: 1e-9,
            fd: 1e-5,
            eps_rho: 1e-8,
            fd_step: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn step_at(&self, point: [f64; 4]) -> f64 {
        self.fd_step * Quaternion::from_array(point).norm().max(1.0)
    }
}

/// The seven residuals of the generalized Cauchy-Riemann system:
///
/// * `r[0] = d1 f1 - (f0 + q2 d2 f0 + q3 d3 f0 + q4 d4 f0)`
/// * `r[1..4] = di f1 + qi d1 f0` for `i = 2, 3, 4`
/// * `r[4..7] = q2 d3 f0 - q3 d2 f0`, `q2 d4 f0 - q4 d2 f0`, `q3 d4 f0 - q4 d3 f0`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcrResiduals {
    pub r: [f64; 7],
}

impl GcrResiduals {
    /// Assembles the residuals from `f0`, its gradient and the gradient of `f1` at `q`.
    pub fn from_partials(q: [f64; 4], f0: f64, df0: [f64; 4], df1: [f64; 4]) -> Self {
        let mut r = [0.0; 7];
        r[0] = df1[0] - (f0 + q[1] * df0[1] + q[2] * df0[2] + q[3] * df0[3]);
        for i in 1..4 {
            r[i] = df1[i] + q[i] * df0[0];
        }
        r[4] = q[1] * df0[2] - q[2] * df0[1];
        r[5] = q[1] * df0[3] - q[3] * df0[1];
        r[6] = q[2] * df0[3] - q[3] * df0[2];
        GcrResiduals { r }
    }

    pub fn max_abs(&self) -> f64 {
        self.r.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn residuals_at(pair: &dyn AxialPair, point: [f64; 4]) -> Result<GcrResiduals> {
    let (f0, f1) = pair.pair_jet(point)?;
    Ok(GcrResiduals::from_partials(point, f0.val, f0.d, f1.d))
}

/// Partial derivatives `dF/dq_i`, `i = 1..4`, each a quaternion of component partials.
pub type Partials = [Quaternion; 4];

pub fn partials_from_jets(components: &[Jet4; 4]) -> Partials {
    std::array::from_fn(|i| Quaternion::from_array(std::array::from_fn(|c| components[c].d[i])))
}

/// `D_l F = sum_i e_i (dF/dq_i)`.
pub fn fueter_left_of(partials: &Partials) -> Quaternion {
    (0..4).fold(Quaternion::ZERO, |acc, i| {
        acc + Quaternion::basis(i + 1) * partials[i]
    })
}

/// `D_r F = sum_i (dF/dq_i) e_i`.
pub fn fueter_right_of(partials: &Partials) -> Quaternion {
    (0..4).fold(Quaternion::ZERO, |acc, i| {
        acc + partials[i] * Quaternion::basis(i + 1)
    })
}

/// A quaternion-valued map of a quaternionic variable.
pub trait QuaternionMap: Sync {
    fn apply(&self, q: Quaternion) -> Result<Quaternion>;

    /// The four components as jets, when the map can be differentiated exactly.
    fn apply_jet(&self, _q: [f64; 4]) -> Option<Result<[Jet4; 4]>> {
        None
    }
}

impl QuaternionMap for RegularFn {
    fn apply(&self, q: Quaternion) -> Result<Quaternion> {
        self.eval(q)
    }

    fn apply_jet(&self, q: [f64; 4]) -> Option<Result<[Jet4; 4]>> {
        Some(self.components_jet(q))
    }
}

impl QuaternionMap for JetPair {
    fn apply(&self, q: Quaternion) -> Result<Quaternion> {
        self.eval(q)
    }

    fn apply_jet(&self, q: [f64; 4]) -> Option<Result<[Jet4; 4]>> {
        Some(self.components_jet(q))
    }
}

/// A map known only through point evaluations.
pub struct BlackBox<F>(pub F);

impl<F> QuaternionMap for BlackBox<F>
where
    F: Fn(Quaternion) -> Result<Quaternion> + Sync,
{
    fn apply(&self, q: Quaternion) -> Result<Quaternion> {
        (self.0)(q)
    }
}

/// Five-point central difference along axis `k`, checked against the
/// three-point estimate; `g` is sampled at `point + j h e_k`, `j = -2..=2`.
fn stencil_derivative<const N: usize>(
    g: &impl Fn([f64; 4]) -> Result<[f64; N]>,
    point: [f64; 4],
    k: usize,
    h: f64,
) -> Result<[f64; N]> {
    let at = |j: f64| {
        let mut p = point;
        p[k] += j * h;
        g(p).map_err(|e| Error::Numerical(format!("difference stencil leaves the domain: {e}")))
    };
    let (m2, m1, p1, p2) = (at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?);
    let mut out = [0.0; N];
    for c in 0..N {
        let d2 = (p1[c] - m1[c]) / (2.0 * h);
        let d4 = (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / (12.0 * h);
        let spread = (d4 - d2).abs();
        if !d4.is_finite() || spread > SMOOTHNESS_LIMIT * (1.0 + d4.abs()) {
            return Err(Error::Numerical(format!(
                "non-smooth along q{}: estimates {d2} and {d4} disagree",
                k + 1
            )));
        }
        out[c] = d4;
    }
    Ok(out)
}

/// Partials of a black-box map by finite differences with step `h`.
pub fn partials_fd(map: &dyn QuaternionMap, point: [f64; 4], h: f64) -> Result<Partials> {
    let g = |p: [f64; 4]| map.apply(Quaternion::from_array(p)).map(|q| q.c);
    let mut out = [Quaternion::ZERO; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = Quaternion::from_array(stencil_derivative(&g, point, k, h)?);
    }
    Ok(out)
}

/// Partials of `map`, exact when it supports jets and by differences otherwise.
pub fn partials(map: &dyn QuaternionMap, point: [f64; 4], tol: &Tolerances) -> Result<Partials> {
    match map.apply_jet(point) {
        Some(jets) => Ok(partials_from_jets(&jets?)),
        None => partials_fd(map, point, tol.step_at(point)),
    }
}

pub fn fueter_left(map: &dyn QuaternionMap, point: [f64; 4]) -> Result<Quaternion> {
    Ok(fueter_left_of(&partials(
        map,
        point,
        &Tolerances::default(),
    )?))
}

pub fn fueter_right(map: &dyn QuaternionMap, point: [f64; 4]) -> Result<Quaternion> {
    Ok(fueter_right_of(&partials(
        map,
        point,
        &Tolerances::default(),
    )?))
}

/// `(f0, f1)` recovered from a map value, with the deviation from axial form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub f0: f64,
    pub f1: f64,
    /// `max_i |F_i - q_i f0|` over `i = 2, 3, 4`.
    pub structural_residual: f64,
}

fn extract_from_value(value: Quaternion, q: [f64; 4], eps_rho: f64) -> Result<Extraction> {
    let rho = q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
    if rho < eps_rho {
        return Err(Error::TooCloseToRealAxis { rho, eps: eps_rho });
    }
    let f0 = (q[1] * value[1] + q[2] * value[2] + q[3] * value[3]) / rho;
    let structural_residual = (1..4).fold(0.0, |m: f64, i| m.max((value[i] - q[i] * f0).abs()));
    Ok(Extraction {
        f0,
        f1: value[0],
        structural_residual,
    })
}

pub fn extract_axial(map: &dyn QuaternionMap, point: [f64; 4], eps_rho: f64) -> Result<Extraction> {
    let rho = Quaternion::from_array(point).rho();
    if rho < eps_rho {
        return Err(Error::TooCloseToRealAxis { rho, eps: eps_rho });
    }
    extract_from_value(map.apply(Quaternion::from_array(point))?, point, eps_rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Regular,
    NotRegular,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Jet,
    FiniteDifference,
}

/// Everything measured at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckDetail {
    pub f0: f64,
    pub f1: f64,
    pub residual_max: f64,
    pub residuals: GcrResiduals,
    pub structural_residual: f64,
    pub fueter_left: Quaternion,
    pub fueter_right: Quaternion,
    pub expected_fueter: Quaternion,
    /// Residual bound applied at this point after scaling.
    pub threshold: f64,
    /// The generalized Cauchy-Riemann system (and axial form) holds.
    pub gcr_ok: bool,
    /// Both Fueter operators equal `-2 f0 e1`.
    pub fueter_ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub point: [f64; 4],
    pub verdict: Verdict,
    pub method: Method,
    /// Absent when the point was too close to the real axis to measure.
    pub detail: Option<CheckDetail>,
}

impl RegularityVerdict {
    pub fn residual_max(&self) -> Option<f64> {
        self.detail.map(|d| d.residual_max)
    }

    pub fn indeterminate(point: [f64; 4], method: Method) -> Self {
        RegularityVerdict {
            point,
            verdict: Verdict::Indeterminate,
            method,
            detail: None,
        }
    }
}

struct Measurement {
    f0: f64,
    f1: f64,
    residuals: GcrResiduals,
    structural_residual: f64,
    partials: Partials,
}

fn judge(
    point: [f64; 4],
    m: Measurement,
    tol: f64,
    eps_rho: f64,
    method: Method,
) -> RegularityVerdict {
    let threshold = tol * (1.0 + m.f0.abs() + m.f1.abs());
    let fl = fueter_left_of(&m.partials);
    let fr = fueter_right_of(&m.partials);
    let expected = Quaternion::real(-2.0 * m.f0);
    let residual_max = m.residuals.max_abs();
    let gcr_ok = residual_max <= threshold && m.structural_residual <= threshold;
    let fueter_ok =
        fl.max_abs_diff(&expected) <= threshold && fr.max_abs_diff(&expected) <= threshold;
    let verdict = if Quaternion::from_array(point).rho() < eps_rho {
        Verdict::Indeterminate
    } else if gcr_ok && fueter_ok {
        Verdict::Regular
    } else {
        Verdict::NotRegular
    };
    RegularityVerdict {
        point,
        verdict,
        method,
        detail: Some(CheckDetail {
            f0: m.f0,
            f1: m.f1,
            residual_max,
            residuals: m.residuals,
            structural_residual: m.structural_residual,
            fueter_left: fl,
            fueter_right: fr,
            expected_fueter: expected,
            threshold,
            gcr_ok,
            fueter_ok,
        }),
    }
}

/// Jet-route check of a pair: residuals, both Fueter operators, and `-2 f0 e1`.
pub fn prop21_check(
    pair: &dyn AxialPair,
    point: [f64; 4],
    tol: &Tolerances,
) -> Result<RegularityVerdict> {
    pair.check_domain(point)?;
    let (f0, f1) = pair.pair_jet(point)?;
    let x = Jet4::coords(point);
    let components = [f1, x[1] * f0, x[2] * f0, x[3] * f0];
    let m = Measurement {
        f0: f0.val,
        f1: f1.val,
        residuals: GcrResiduals::from_partials(point, f0.val, f0.d, f1.d),
        structural_residual: 0.0,
        partials: partials_from_jets(&components),
    };
    Ok(judge(point, m, tol.jet, tol.eps_rho, Method::Jet))
}

/// Finite-difference check of a map known only by its values.
pub fn check_black_box(
    map: &dyn QuaternionMap,
    point: [f64; 4],
    h: f64,
    tol: &Tolerances,
) -> Result<RegularityVerdict> {
    let centre = extract_axial(map, point, tol.eps_rho)?;
    let values = |p: [f64; 4]| -> Result<[f64; 6]> {
        let v = map.apply(Quaternion::from_array(p))?;
        let e = extract_from_value(v, p, tol.eps_rho)?;
        Ok([e.f0, e.f1, v[0], v[1], v[2], v[3]])
    };
    let mut df0 = [0.0; 4];
    let mut df1 = [0.0; 4];
    let mut partials = [Quaternion::ZERO; 4];
    for k in 0..4 {
        let d = stencil_derivative(&values, point, k, h)?;
        df0[k] = d[0];
        df1[k] = d[1];
        partials[k] = Quaternion::new(d[2], d[3], d[4], d[5]);
    }
    let m = Measurement {
        f0: centre.f0,
        f1: centre.f1,
        residuals: GcrResiduals::from_partials(point, centre.f0, df0, df1),
        structural_residual: centre.structural_residual,
        partials,
    };
    Ok(judge(
        point,
        m,
        tol.fd,
        tol.eps_rho,
        Method::FiniteDifference,
    ))
}

/// Checks a function at one point by the chosen route, mapping the
/// real-axis exclusion to an indeterminate verdict.
pub fn check_point(
    f: &RegularFn,
    point: [f64; 4],
    method: Method,
    tol: &Tolerances,
) -> Result<RegularityVerdict> {
    match method {
        Method::Jet => prop21_check(f, point, tol),
        Method::FiniteDifference => {
            f.check_domain(point)?;
            match check_black_box(f, point, tol.step_at(point), tol) {
                Err(Error::TooCloseToRealAxis { .. }) => {
                    Ok(RegularityVerdict::indeterminate(point, method))
                }
                other => other,
            }
        }
    }
}

/// The check at one sampled point, or the reason it could not be made.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub check: RegularityVerdict,
    /// Set when the check failed to run; the verdict is then `not_regular`.
    pub error: Option<String>,
}

impl SampleOutcome {
    pub fn from_result(
        index: usize,
        point: [f64; 4],
        method: Method,
        result: Result<RegularityVerdict>,
    ) -> Self {
        match result {
            Ok(check) => SampleOutcome {
                index,
                check,
                error: None,
            },
            Err(e) => SampleOutcome {
                index,
                check: RegularityVerdict {
                    point,
                    verdict: Verdict::NotRegular,
                    method,
                    detail: None,
                },
                error: Some(e.to_string()),
            },
        }
    }
}

/// Outcomes at quasi-random points of a region intersected with the domain of `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionCheck {
    pub samples: Vec<SampleOutcome>,
    pub draws: usize,
}

/// Samples `n` points of `region` inside the declared domain of `f` and
/// checks each one. Sampling is sequential and checks run in parallel;
/// outcomes come back in sample order.
pub fn check_region(
    f: &RegularFn,
    region: &Region,
    n: usize,
    seed: u64,
    method: Method,
    tol: &Tolerances,
) -> RegionCheck {
    let sample = sample_region(region, n, seed, n.saturating_mul(100).max(1000), |p| {
        f.contains(p)
    });
    let samples = sample
        .points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| SampleOutcome::from_result(i, p, method, check_point(f, p, method, tol)))
        .collect();
    RegionCheck {
        samples,
        draws: sample.draws,
    }
}
