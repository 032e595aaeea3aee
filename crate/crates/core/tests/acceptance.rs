//! Acceptance criteria, one line of output per criterion.
//!
//! Run with `cargo test -p regulus --test acceptance`.

#![allow(clippy::type_complexity, clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regulus::axial::{compose, product, reciprocal, scale_fn, sum, AxialPair, JetPair, RegularFn};
use regulus::expr::{parse, print, random_tree};
use regulus::gcr::{
    check_black_box, prop21_check, BlackBox, QuaternionMap, RegularityVerdict, Tolerances, Verdict,
};
use regulus::manifold::{
    conjugate_atlas, hp_new, projective_atlas, quaternion_atlas, transition, validate_atlas,
};
use regulus::sampling::{sample_region, Region};
use regulus::{Jet4, Quaternion};

type Outcome = Result<String, String>;

const JET_TOL: f64 = 1e-9;
const FD_TOL: f64 = 1e-5;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rho(p: [f64; 4]) -> f64 {
    p[1] * p[1] + p[2] * p[2] + p[3] * p[3]
}

fn builtins() -> Vec<(String, RegularFn)> {
    let mut fs: Vec<_> = (0..=8)
        .chain(-3..=-1)
        .map(|n| (format!("q^{n}"), RegularFn::Power(n)))
        .collect();
    fs.push(("exp(q)".into(), RegularFn::Exp));
    fs
}

/// Points of `[-2, 2]^4` in the declared domain of `f` with `rho >= min_rho`.
fn domain_points(f: &dyn AxialPair, n: usize, seed: u64, min_rho: f64) -> Vec<[f64; 4]> {
    sample_region(&Region::cube(-2.0, 2.0), n, seed, 100 * n, |p| {
        rho(p) >= min_rho && f.contains(p)
    })
    .points
}

fn fueter_spread(v: &RegularityVerdict) -> f64 {
    let d = v.detail.expect("measured");
    d.fueter_left
        .max_abs_diff(&d.expected_fueter)
        .max(d.fueter_right.max_abs_diff(&d.expected_fueter))
        .max(d.fueter_left.max_abs_diff(&d.fueter_right))
}

struct Worst {
    jet_residual: f64,
    fd_residual: f64,
    jet_fueter: f64,
    fd_fueter: f64,
}

/// Shared by criteria 1 and 2: both routes at 200 points for every built-in.
fn builtin_sweep() -> Result<Worst, String> {
    let tol = Tolerances::default();
    let mut w = Worst {
        jet_residual: 0.0,
        fd_residual: 0.0,
        jet_fueter: 0.0,
        fd_fueter: 0.0,
    };
    for (name, f) in builtins() {
        let pts = domain_points(&f, 200, 1, 1e-4);
        ensure(pts.len() == 200, || {
            format!("{name}: only {} domain points", pts.len())
        })?;
        for p in pts {
            let jet = prop21_check(&f, p, &tol).map_err(|e| format!("{name} at {p:?}: {e}"))?;
            let fd = check_black_box(&BlackBox(|q| f.eval(q)), p, tol.step_at(p), &tol)
                .map_err(|e| format!("{name} at {p:?}: {e}"))?;
            let (jr, fr) = (jet.residual_max().unwrap(), fd.residual_max().unwrap());
            ensure(jr <= JET_TOL, || {
                format!("{name} at {p:?}: jet residual {jr:e}")
            })?;
            ensure(fr <= FD_TOL, || {
                format!("{name} at {p:?}: fd residual {fr:e}")
            })?;
            let (jf, ff) = (fueter_spread(&jet), fueter_spread(&fd));
            ensure(jf <= JET_TOL, || {
                format!("{name} at {p:?}: jet Fueter spread {jf:e}")
            })?;
            ensure(ff <= FD_TOL, || {
                format!("{name} at {p:?}: fd Fueter spread {ff:e}")
            })?;
            w.jet_residual = w.jet_residual.max(jr);
            w.fd_residual = w.fd_residual.max(fr);
            w.jet_fueter = w.jet_fueter.max(jf);
            w.fd_fueter = w.fd_fueter.max(ff);
        }
    }
    Ok(w)
}

fn criterion_1() -> Outcome {
    let w = builtin_sweep()?;
    Ok(format!(
        "13 functions x 200 points; worst residual jet {:.2e} (<= 1e-9), fd {:.2e} (<= 1e-5)",
        w.jet_residual, w.fd_residual
    ))
}

const BROKEN: JetPair = JetPair {
    name: "(f0, f1) = (q1, 0)",
    pair: |x| (x[0], Jet4::constant(0.0)),
};

fn criterion_2() -> Outcome {
    let w = builtin_sweep()?;
    let tol = Tolerances::default();
    let conj = BlackBox(|q: Quaternion| Ok(q.conj()));
    let left_e2 = BlackBox(|q: Quaternion| Ok(Quaternion::basis(2) * q));
    let negatives: [(&str, &dyn QuaternionMap); 3] =
        [("conj", &conj), ("e2 q", &left_e2), (BROKEN.name, &BROKEN)];
    let pts = sample_region(&Region::cube(-2.0, 2.0), 200, 2, 100_000, |p| {
        rho(p) >= 1e-2
    })
    .points;
    let mut judged = 0;
    for (name, map) in negatives {
        for &p in &pts {
            let fd = check_black_box(map, p, tol.step_at(p), &tol)
                .map_err(|e| format!("{name} at {p:?}: {e}"))?;
            let mut verdicts = vec![fd];
            if map.apply_jet(p).is_some() {
                verdicts.push(prop21_check(&BROKEN, p, &tol).map_err(|e| e.to_string())?);
            }
            for v in verdicts {
                let d = v.detail.unwrap();
                ensure(
                    v.verdict == Verdict::NotRegular && !d.gcr_ok && !d.fueter_ok,
                    || {
                        format!(
                            "{name} at {p:?}: gcr_ok {} fueter_ok {}",
                            d.gcr_ok, d.fueter_ok
                        )
                    },
                )?;
                judged += 1;
            }
        }
    }
    Ok(format!(
        "Fueter spread jet {:.2e}, fd {:.2e}; {judged} negative-corpus checks all rejected by both characterizations",
        w.jet_fueter, w.fd_fueter
    ))
}

/// Points of `[-1, 1]^4` where `f` is in its declared domain, finite, and `accept` holds.
fn closure_points(f: &RegularFn, seed: u64, accept: impl Fn([f64; 4]) -> bool) -> Vec<[f64; 4]> {
    sample_region(&Region::cube(-1.0, 1.0), 50, seed, 20_000, |p| {
        rho(p) >= 1e-4
            && f.contains(p)
            && f.eval(Quaternion::from_array(p))
                .map(|v| v.norm() < 1e12)
                .unwrap_or(false)
            && accept(p)
    })
    .points
}

fn criterion_3() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut pairs, mut redrawn, mut checks) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    while pairs < 50 {
        let f = random_tree(&mut rng, 4, true);
        let g = random_tree(&mut rng, 4, true);
        let c = [0.5, -2.0, 3.0, -0.25][rng.gen_range(0..4)];
        let n_of_f = |p: [f64; 4]| {
            f.eval(Quaternion::from_array(p))
                .map(|v| v.norm_sq() > 1e-6)
                .unwrap_or(false)
        };
        let cases: Vec<(&str, RegularFn, Box<dyn Fn([f64; 4]) -> bool>)> = vec![
            ("f+g", sum(f.clone(), g.clone()), Box::new(|_| true)),
            ("cf", scale_fn(c, f.clone()), Box::new(|_| true)),
            ("fg", product(f.clone(), g.clone()), Box::new(|_| true)),
            ("1/f", reciprocal(f.clone()), Box::new(n_of_f)),
            ("g∘f", compose(g.clone(), f.clone()), Box::new(|_| true)),
        ];
        let samples: Vec<_> = cases
            .iter()
            .map(|(_, h, acc)| closure_points(h, pairs as u64, acc))
            .collect();
        if samples.iter().any(|s| s.len() < 50) {
            redrawn += 1;
            continue;
        }
        for ((name, h, _), pts) in cases.iter().zip(&samples) {
            for &p in pts {
                let v = prop21_check(h, p, &tol)
                    .map_err(|e| format!("{name} for f = {f}, g = {g}: {e}"))?;
                let d = v.detail.unwrap();
                ensure(v.verdict == Verdict::Regular, || {
                    format!(
                        "{name} for f = {f}, g = {g} at {p:?}: residual {:e} > {:e}",
                        d.residual_max, d.threshold
                    )
                })?;
                worst = worst.max(d.residual_max / (1.0 + d.f0.abs() + d.f1.abs()));
                checks += 1;
            }
        }
        pairs += 1;
    }
    Ok(format!(
        "50 pairs x 5 constructions x 50 points = {checks} jet checks; worst scaled residual {worst:.2e}; {redrawn} pair(s) redrawn for lack of domain points"
    ))
}

fn rel_err(a: Quaternion, b: Quaternion) -> f64 {
    a.max_abs_diff(&b) / b.norm().max(f64::MIN_POSITIVE)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let point = |rng: &mut ChaCha8Rng| {
        Quaternion::from_array(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
    };
    let mut worst: f64 = 0.0;
    let mut record = |what: &str, a: Quaternion, b: Quaternion| -> Result<(), String> {
        let e = rel_err(a, b);
        worst = worst.max(e);
        ensure(e <= 1e-9, || {
            format!("{what}: pair form {a} vs direct {b} (relative {e:e})")
        })
    };
    for n in 0..=12u32 {
        for _ in 0..100 {
            let q = point(&mut rng);
            let direct = (0..n).fold(Quaternion::ONE, |acc, _| acc * q);
            record(
                &format!("q^{n} at {q}"),
                RegularFn::Power(n as i32).eval(q).unwrap(),
                direct,
            )?;
        }
    }
    for case in 0..10 {
        let f = random_tree(&mut rng, 3, true);
        let g = random_tree(&mut rng, 3, true);
        let (fg, gf) = (product(f.clone(), g.clone()), compose(g.clone(), f.clone()));
        let mut done = 0;
        while done < 100 {
            let q = point(&mut rng);
            let (Ok(fq), Ok(gq)) = (f.eval(q), g.eval(q)) else {
                continue;
            };
            let Ok(g_of_fq) = g.eval(fq) else { continue };
            if !(fq.norm() < 1e12 && gq.norm() < 1e12 && g_of_fq.norm() < 1e12) {
                continue;
            }
            record(
                &format!("case {case}: ({f}) * ({g}) at {q}"),
                fg.eval(q).unwrap(),
                fq * gq,
            )?;
            record(
                &format!("case {case}: ({g}) o ({f}) at {q}"),
                gf.eval(q).unwrap(),
                g_of_fq,
            )?;
            done += 1;
        }
    }
    // outer powers checked against repeated multiplication of the inner value
    for n in 1..=6u32 {
        let f = random_tree(&mut rng, 3, true);
        let h = compose(RegularFn::Power(n as i32), f.clone());
        let mut done = 0;
        while done < 100 {
            let q = point(&mut rng);
            let Ok(fq) = f.eval(q) else { continue };
            if !(fq.norm() < 1e6) {
                continue;
            }
            let direct = (0..n).fold(Quaternion::ONE, |acc, _| acc * fq);
            record(&format!("({f})^{n} at {q}"), h.eval(q).unwrap(), direct)?;
            done += 1;
        }
    }
    Ok(format!("powers 0..=12, 10 products, 10 compositions, 6 outer powers x 100 points; worst relative {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let tol = Tolerances::default();
    let h = validate_atlas(&quaternion_atlas(), 200, 5, &tol);
    ensure(
        h.pass && h.n_charts == 1 && h.transitions.is_empty(),
        || "atlas H did not pass".into(),
    )?;

    let atlas = projective_atlas();
    let hp = validate_atlas(&atlas, 200, 11, &tol);
    let n_hp: usize = hp.transitions.iter().map(|t| t.samples.len()).sum();
    ensure(hp.pass, || "atlas HP1 did not pass".into())?;
    ensure(
        hp.transitions.iter().all(|t| t.samples.len() == 200),
        || "HP1 sample shortfall".into(),
    )?;
    let recip = reciprocal(RegularFn::Identity);
    let mut worst: f64 = 0.0;
    for t in &hp.transitions {
        let (a, b) = if t.alpha == "phi1" { (0, 1) } else { (1, 0) };
        let map = transition(&atlas, a, b).map_err(|e| e.to_string())?;
        for s in &t.samples {
            let q = Quaternion::from_array(s.check.point);
            let d = map(q).unwrap().max_abs_diff(&recip.eval(q).unwrap());
            worst = worst.max(d);
            ensure(d <= 1e-12, || {
                format!(
                    "{} at {q}: transition differs from recip(q) by {d:e}",
                    t.label()
                )
            })?;
        }
    }

    let broken = validate_atlas(&conjugate_atlas(), 200, 13, &tol);
    let n_broken: usize = broken.transitions.iter().map(|t| t.samples.len()).sum();
    ensure(!broken.pass && n_broken == 400, || {
        "conj atlas was not checked at 400 points".into()
    })?;
    for s in broken.transitions.iter().flat_map(|t| &t.samples) {
        ensure(s.check.verdict == Verdict::NotRegular, || {
            format!("conj atlas accepted {:?}", s.check.point)
        })?;
    }
    Ok(format!(
        "H passes (no transitions); HP1 passes at {n_hp} samples, |transition - recip| <= {worst:.2e}; conj atlas rejected at {n_broken}/{n_broken}"
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let quat = |rng: &mut ChaCha8Rng| {
        Quaternion::from_array(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
    };
    let bases = [
        (
            Quaternion::new(0.5, -1.0, 0.25, 2.0),
            Quaternion::new(1.5, 0.3, -0.7, 0.1),
        ),
        (
            Quaternion::new(1.0, 1.0, 0.0, -1.0),
            Quaternion::new(-0.2, 0.4, 0.9, 0.6),
        ),
    ];
    let mut worst: f64 = 0.0;
    for (x1, x2) in bases {
        let base = hp_new(x1, x2).unwrap();
        let (p1, p2) = (base.phi1().unwrap(), base.phi2().unwrap());
        let mut done = 0;
        while done < 100 {
            let q = quat(&mut rng);
            if q.norm_sq() < 1e-2 {
                continue;
            }
            let moved = hp_new(x1 * q, x2 * q).unwrap();
            let d = moved
                .phi1()
                .unwrap()
                .max_abs_diff(&p1)
                .max(moved.phi2().unwrap().max_abs_diff(&p2));
            worst = worst.max(d);
            ensure(d <= 1e-12, || {
                format!("rescaling by {q} moved a chart value by {d:e}")
            })?;
            done += 1;
        }
    }
    for _ in 0..1000 {
        let p = hp_new(quat(&mut rng), quat(&mut rng)).unwrap();
        ensure(hp_new(p.x1(), p.x2()).unwrap() == p, || {
            format!("canonical form not idempotent at {p:?}")
        })?;
    }
    Ok(format!("chart values move by at most {worst:.2e} under 200 rescalings; canonical form idempotent on 1000 points"))
}

fn criterion_7() -> Outcome {
    use RegularFn::*;
    let b = Box::new;
    ensure(
        parse("q^2 + 1") == Ok(Sum(b(Power(2)), b(Const(1.0)))),
        || "q^2 + 1".into(),
    )?;
    ensure(
        parse("exp(q^3)") == Ok(Compose(b(Exp), b(Power(3)))),
        || "exp(q^3)".into(),
    )?;
    ensure(
        parse("recip(q)*q") == Ok(Product(b(Reciprocal(b(Identity))), b(Identity))),
        || "recip(q)*q".into(),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let t = random_tree(&mut rng, 6, false);
        let text = print(&t);
        let once = parse(&text).map_err(|e| format!("{text}: {e}"))?;
        let twice = parse(&print(&once)).map_err(|e| format!("{text}: {e}"))?;
        ensure(once == t && twice == once, || {
            format!("round trip changed {text}")
        })?;
    }
    Ok("three grammar examples exact; 500 generated trees are parse/print fixed points".into())
}

fn criterion_8() -> Outcome {
    let dir = std::env::temp_dir().join(format!("regulus-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_regulus"))
            .args(["check", "--expr", "q^3", "--seed", "42", "--json"])
            .arg(&out)
            .env_remove("REGULUS_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || {
            format!("exit status {}", status.status)
        })?;
        std::fs::read(&out).map_err(|e| e.to_string())
    };
    let (a, b) = (run("a.json")?, run("b.json")?);
    let _ = std::fs::remove_dir_all(&dir);
    ensure(!a.is_empty() && a == b, || "reports differ".into())?;
    Ok(format!("two runs wrote identical {}-byte reports", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("AC1 built-in regularity", criterion_1),
        ("AC2 Fueter characterization", criterion_2),
        ("AC3 closure constructions", criterion_3),
        ("AC4 representation soundness", criterion_4),
        ("AC5 manifold validation", criterion_5),
        ("AC6 HP1 well-definedness", criterion_6),
        ("AC7 parser round trip", criterion_7),
        ("AC8 report determinism", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
