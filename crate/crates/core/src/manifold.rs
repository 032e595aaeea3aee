//! Charts, atlases and the regularity of their transition maps.
//!
//! A four-manifold is regular when every transition map `phi_a ∘ phi_b^-1`
//! is algebraic regular on `phi_b(U_a ∩ U_b)`. Only that condition is
//! checked here: the charts themselves are trusted to be homeomorphisms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcr::{check_black_box, BlackBox, Method, SampleOutcome, Tolerances, Verdict};
use crate::quat::Quaternion;

type Pred<T> = Box<dyn Fn(&T) -> bool + Send + Sync>;
type MapTo<A, B> = Box<dyn Fn(A) -> Result<B> + Send + Sync>;

/// A chart `phi: U -> H` on manifold points of type `P`.
pub struct Chart<P> {
    pub label: String,
    pub domain: Pred<P>,
    pub to_h: MapTo<P, Quaternion>,
    pub from_h: MapTo<Quaternion, P>,
    /// Membership in `phi(U)`.
    pub image: Pred<Quaternion>,
}

impl<P> Chart<P> {
    pub fn apply(&self, p: P) -> Result<Quaternion> {
        if !(self.domain)(&p) {
            return Err(Error::ChartDomain {
                chart: self.label.clone(),
                reason: "point outside U".into(),
            });
        }
        (self.to_h)(p)
    }

    pub fn invert(&self, q: Quaternion) -> Result<P> {
        if !(self.image)(&q) {
            return Err(Error::ChartDomain {
                chart: self.label.clone(),
                reason: format!("{q} outside phi(U)"),
            });
        }
        (self.from_h)(q)
    }
}

/// Draws candidate points of `phi_beta(U_alpha ∩ U_beta)`.
pub type OverlapSampler = Box<dyn Fn(&mut ChaCha8Rng) -> Quaternion + Send + Sync>;

pub struct Overlap {
    pub alpha: usize,
    pub beta: usize,
    pub sampler: OverlapSampler,
}

pub struct Atlas<P> {
    pub name: String,
    pub charts: Vec<Chart<P>>,
    /// Ordered chart pairs `(alpha, beta)`, `alpha != beta`, with nonempty overlap.
    pub overlaps: Vec<Overlap>,
}

/// The transition map `phi_alpha ∘ phi_beta^-1` on `phi_beta(U_alpha ∩ U_beta)`.
pub fn transition<'a, P>(
    atlas: &'a Atlas<P>,
    alpha: usize,
    beta: usize,
) -> Result<impl Fn(Quaternion) -> Result<Quaternion> + Sync + 'a> {
    let (a, b) = (&atlas.charts[alpha], &atlas.charts[beta]);
    if alpha != beta
        && !atlas
            .overlaps
            .iter()
            .any(|o| o.alpha == alpha && o.beta == beta)
    {
        return Err(Error::EmptyOverlap {
            alpha: a.label.clone(),
            beta: b.label.clone(),
        });
    }
    Ok(move |q: Quaternion| a.apply(b.invert(q)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub alpha: String,
    pub beta: String,
    pub samples: Vec<SampleOutcome>,
    /// Candidate points drawn, including those excluded near the real axis.
    pub draws: usize,
    pub excluded: usize,
}

impl TransitionReport {
    pub fn excluded_fraction(&self) -> f64 {
        if self.draws == 0 {
            0.0
        } else {
            self.excluded as f64 / self.draws as f64
        }
    }

    pub fn label(&self) -> String {
        format!("{}<-{}", self.alpha, self.beta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasReport {
    pub atlas: String,
    pub n_charts: usize,
    pub transitions: Vec<TransitionReport>,
    pub pass: bool,
    pub warnings: Vec<String>,
}

/// Checks every transition map at `samples_per_pair` overlap points by
/// finite differences. A point in the `eps_rho` tube around the real axis
/// is excluded and counted, never judged.
pub fn validate_atlas<P>(
    atlas: &Atlas<P>,
    samples_per_pair: usize,
    seed: u64,
    tol: &Tolerances,
) -> AtlasReport {
    let mut warnings = Vec::new();
    if samples_per_pair == 0 {
        warnings.push("no samples requested; pass is vacuous".to_string());
    }
    if atlas.overlaps.is_empty() {
        warnings.push(format!("atlas {} has no transitions to check", atlas.name));
    }
    let mut transitions = Vec::new();
    for (n, overlap) in atlas.overlaps.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n as u64);
        let max_draws = samples_per_pair.saturating_mul(100);
        let mut points = Vec::with_capacity(samples_per_pair);
        let mut draws = 0;
        while points.len() < samples_per_pair && draws < max_draws {
            draws += 1;
            let q = (overlap.sampler)(&mut rng);
            if q.rho() >= tol.eps_rho {
                points.push(q.c);
            }
        }
        let map = transition(atlas, overlap.alpha, overlap.beta).expect("declared overlap");
        let black_box = BlackBox(&map);
        let samples = points
            .par_iter()
            .enumerate()
            .map(|(index, &p)| {
                let result = check_black_box(&black_box, p, tol.step_at(p), tol);
                SampleOutcome::from_result(index, p, Method::FiniteDifference, result)
            })
            .collect::<Vec<_>>();
        transitions.push(TransitionReport {
            alpha: atlas.charts[overlap.alpha].label.clone(),
            beta: atlas.charts[overlap.beta].label.clone(),
            excluded: draws - points.len(),
            samples,
            draws,
        });
    }
    let pass = transitions
        .iter()
        .flat_map(|t| &t.samples)
        .all(|s| s.check.verdict == Verdict::Regular);
    AtlasReport {
        atlas: atlas.name.clone(),
        n_charts: atlas.charts.len(),
        transitions,
        pass,
        warnings,
    }
}

/// `H` with the single chart `id_H`.
pub fn quaternion_atlas() -> Atlas<Quaternion> {
    Atlas {
        name: "H".into(),
        charts: vec![Chart {
            label: "id".into(),
            domain: Box::new(|_| true),
            to_h: Box::new(Ok),
            from_h: Box::new(Ok),
            image: Box::new(|_| true),
        }],
        overlaps: Vec::new(),
    }
}

/// `H` with charts `id` and `conj`; its transition map `conj` is not regular.
pub fn conjugate_atlas() -> Atlas<Quaternion> {
    let box_sampler = || -> OverlapSampler {
        Box::new(|rng: &mut ChaCha8Rng| {
            Quaternion::from_array(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
        })
    };
    Atlas {
        name: "H-conj".into(),
        charts: vec![
            Chart {
                label: "id".into(),
                domain: Box::new(|_| true),
                to_h: Box::new(Ok),
                from_h: Box::new(Ok),
                image: Box::new(|_| true),
            },
            Chart {
                label: "conj".into(),
                domain: Box::new(|_| true),
                to_h: Box::new(|p: Quaternion| Ok(p.conj())),
                from_h: Box::new(|q: Quaternion| Ok(q.conj())),
                image: Box::new(|_| true),
            },
        ],
        overlaps: vec![
            Overlap {
                alpha: 0,
                beta: 1,
                sampler: box_sampler(),
            },
            Overlap {
                alpha: 1,
                beta: 0,
                sampler: box_sampler(),
            },
        ],
    }
}

/// A point of the right projective line: the class of `(x1, x2) != (0, 0)`
/// under `(x1, x2) ~ (x1 q, x2 q)`, `q != 0`.
///
/// Stored with the larger slot scaled to `e1` (`x1` on ties).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HpPoint {
    x1: Quaternion,
    x2: Quaternion,
}

impl HpPoint {
    pub fn new(x1: Quaternion, x2: Quaternion) -> Result<HpPoint> {
        if !(x1.is_finite() && x2.is_finite()) {
            return Err(Error::domain("projective coordinates must be finite"));
        }
        let (n1, n2) = (x1.norm_sq(), x2.norm_sq());
        if n1 == 0.0 && n2 == 0.0 {
            return Err(Error::domain("(0, 0) is not a point of HP"));
        }
        Ok(if n1 >= n2 {
            let s = x1.inv()?;
            HpPoint {
                x1: Quaternion::ONE,
                x2: x2 * s,
            }
        } else {
            let s = x2.inv()?;
            HpPoint {
                x1: x1 * s,
                x2: Quaternion::ONE,
            }
        })
    }

    pub fn x1(&self) -> Quaternion {
        self.x1
    }

    pub fn x2(&self) -> Quaternion {
        self.x2
    }

    pub fn in_u1(&self) -> bool {
        self.x1.norm_sq() > 0.0
    }

    pub fn in_u2(&self) -> bool {
        self.x2.norm_sq() > 0.0
    }

    /// `phi1 = x2 x1^-1` on `U1 = {x1 != 0}`.
    pub fn phi1(&self) -> Result<Quaternion> {
        if !self.in_u1() {
            return Err(Error::ChartDomain {
                chart: "phi1".into(),
                reason: "x1 = 0".into(),
            });
        }
        Ok(self.x2 * self.x1.inv()?)
    }

    /// `phi2 = x1 x2^-1` on `U2 = {x2 != 0}`.
    pub fn phi2(&self) -> Result<Quaternion> {
        if !self.in_u2() {
            return Err(Error::ChartDomain {
                chart: "phi2".into(),
                reason: "x2 = 0".into(),
            });
        }
        Ok(self.x1 * self.x2.inv()?)
    }

    /// Equality of classes up to `tol`, robust to representatives that
    /// pivot on different slots.
    pub fn approx_eq(&self, other: &HpPoint, tol: f64) -> bool {
        let close = |a: Result<Quaternion>, b: Result<Quaternion>| match (a, b) {
            (Ok(a), Ok(b)) => a.max_abs_diff(&b) <= tol * (1.0 + a.norm().max(b.norm())),
            _ => false,
        };
        if self.x1 == Quaternion::ONE && other.in_u1() {
            close(self.phi1(), other.phi1())
        } else {
            close(self.phi2(), other.phi2())
        }
    }
}

pub fn hp_new(x1: Quaternion, x2: Quaternion) -> Result<HpPoint> {
    HpPoint::new(x1, x2)
}

/// Uniform in volume on the shell `r0 <= |q| <= r1`.
fn shell_sampler(r0: f64, r1: f64) -> OverlapSampler {
    Box::new(move |rng: &mut ChaCha8Rng| {
        let dir: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let dir = Quaternion::from_array(dir);
        let u: f64 = rng.gen();
        let r = (r0.powi(4) + u * (r1.powi(4) - r0.powi(4))).powf(0.25);
        dir.scale(r / dir.norm())
    })
}

/// `HP` with charts `phi1` on `U1` and `phi2` on `U2`; both transition maps are `q -> q^-1`.
pub fn projective_atlas() -> Atlas<HpPoint> {
    Atlas {
        name: "HP1".into(),
        charts: vec![
            Chart {
                label: "phi1".into(),
                domain: Box::new(HpPoint::in_u1),
                to_h: Box::new(|p: HpPoint| p.phi1()),
                from_h: Box::new(|q| HpPoint::new(Quaternion::ONE, q)),
                image: Box::new(|q| q.is_finite()),
            },
            Chart {
                label: "phi2".into(),
                domain: Box::new(HpPoint::in_u2),
                to_h: Box::new(|p: HpPoint| p.phi2()),
                from_h: Box::new(|q| HpPoint::new(q, Quaternion::ONE)),
                image: Box::new(|q| q.is_finite()),
            },
        ],
        overlaps: vec![
            Overlap {
                alpha: 0,
                beta: 1,
                sampler: shell_sampler(0.2, 5.0),
            },
            Overlap {
                alpha: 1,
                beta: 0,
                sampler: shell_sampler(0.2, 5.0),
            },
        ],
    }
}
