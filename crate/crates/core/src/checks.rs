//! Seeded property suites behind `relinv check`.
//!
//! Every property draws its instances from its own [`InstanceSampler`] seeded
//! with the suite seed, so a report can be reproduced from `(seed, trials)`
//! alone. Each property records exactly `trials` trials.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;

use crate::cocycle::{d0, d1, describe, gauge_from_multiplier, Cochain, ProjectiveFrame};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::frame::{
    closed_form_frame, extended_action, extended_frame, frame_equivariance_check, invariantize_config, solve_frame,
    ExtendedPoint, FrameDenominator,
};
use crate::invariants::{
    fundamental_invariants, invariant_vector, invariantized_jacobian_closed, invariantized_jacobian_direct,
    relative_invariant,
};
use crate::projective::{
    apply_config, base_deltas, cubed_delta_check, delta, delta_transform_check, mixed_transform_check, Homography,
    PointConfig,
};
use crate::report::PropertyReport;
use crate::sampling::InstanceSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Cocycle,
    Frame,
    Weight,
    Extended,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 5] = ["cocycle", "frame", "weight", "extended", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cocycle" => Suite::Cocycle,
            "frame" => Suite::Frame,
            "weight" => Suite::Weight,
            "extended" => Suite::Extended,
            "all" => Suite::All,
            other => return Err(Error::InvalidSpec(format!("unknown suite {other:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [Suite::Cocycle, Suite::Frame, Suite::Weight, Suite::Extended, Suite::All]
            .iter()
            .position(|s| s == self)
            .unwrap_or(0);
        f.write_str(Suite::NAMES[i])
    }
}

/// Parameters shared by all suites. `multiplier` is the 1-cochain under test in
/// the cocycle and extended suites; it defaults to the total Jacobian.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub seed: u64,
    pub trials: usize,
    pub multiplier: Cochain,
}

impl CheckConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        Self { seed, trials, multiplier: Cochain::total_jacobian() }
    }

    pub fn with_multiplier(mut self, multiplier: Cochain) -> Self {
        self.multiplier = multiplier;
        self
    }
}

/// `det(g)·(1 + x₁)`: fails the cocycle identity. Used as a negative control.
pub fn faulty_multiplier() -> Cochain {
    Cochain::one_cochain("det*(1+x1)", |g, x| Ok(g.representative().matrix.determinant() * (1.0 + x.point(1).x)))
}

/// Runs `trial` `trials` times; `trial` returns the residual and a description
/// of the instance used for the counterexample.
fn property<F>(name: &str, cfg: &CheckConfig, tolerance: f64, mut trial: F) -> PropertyReport
where
    F: FnMut(usize, &mut InstanceSampler) -> (Result<f64>, String),
{
    let mut report = PropertyReport::new(name, cfg.seed, tolerance);
    let mut sampler = InstanceSampler::new(cfg.seed);
    for t in 0..cfg.trials.max(1) {
        let (residual, instance) = trial(t, &mut sampler);
        match residual {
            Ok(r) => report.record(r, || instance),
            Err(e) => report.record_error(e, || instance),
        }
    }
    report
}

fn rel(actual: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        actual.abs()
    } else {
        (actual - expected).abs() / expected.abs()
    }
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| rel(*x, *y)).fold(0.0, f64::max)
}

fn max_abs_coord(a: &PointConfig, b: &PointConfig) -> f64 {
    a.points()
        .iter()
        .zip(b.points())
        .map(|(p, q)| ((p.x - q.x).abs() / q.x.abs().max(1.0)).max((p.y - q.y).abs() / q.y.abs().max(1.0)))
        .fold(0.0, f64::max)
}

/// Configuration size cycling through 4, 5, 6.
fn cycle_n(t: usize) -> usize {
    4 + t % 3
}

/// `(g₁, g₂, x)` with `g₂` admissible on `x` and `g₁` admissible on `g₂·x`.
fn triple(s: &mut InstanceSampler, n: usize) -> (Homography, Homography, PointConfig) {
    let (g2, x) = s.pair(n);
    let moved = apply_config(&g2, &x).expect("admissible homography");
    let g1 = s.homography_for(&moved);
    (g1, g2, x)
}

/// A rational gauge factor from the seeded family used for the exactness check.
fn rational_gauge(a: f64, b: f64, c: f64) -> Cochain {
    Cochain::gauge(format!("gauge({a:.3},{b:.3},{c:.3})"), move |x| {
        let (p, q) = (x.point(1), x.point(2));
        Ok(delta(x, 1, 2, 3)? * (1.0 + a * p.x * p.x + b * q.y * q.y) / (2.0 + c * p.x * q.y))
    })
}

pub fn cocycle_suite(cfg: &CheckConfig) -> Vec<PropertyReport> {
    let mu = cfg.multiplier.clone();
    let name = mu.name().to_string();
    let dmu = d1(&mu);
    let id = Homography::identity();
    let mut out = Vec::new();

    out.push(property(&format!("cocycle_identity({name})"), cfg, 1e-9, |t, s| {
        let (g1, g2, x) = triple(s, cycle_n(t));
        let gs = [g1, g2];
        let r = dmu.clone().and_then(|d| d.evaluate(&gs, &x)).map(|v| rel(v, 1.0));
        (r, describe(&gs, &x))
    }));

    out.push(property(&format!("identity_normalization({name})"), cfg, 1e-12, |t, s| {
        let x = s.config(cycle_n(t));
        (mu.at1(&id, &x).map(|v| rel(v, 1.0)), describe(&[id], &x))
    }));

    out.push(property("coboundary_exactness", cfg, 1e-9, |_, s| {
        let f = rational_gauge(s.uniform(0.0, 2.0), s.uniform(0.0, 2.0), s.uniform(-1.0, 1.0));
        let (g1, g2, x) = triple(s, 3);
        let gs = [g1, g2];
        let r = d0(&f).and_then(|m| d1(&m)).and_then(|dd| dd.evaluate(&gs, &x)).map(|v| rel(v, 1.0));
        (r, format!("{} {}", f.name(), describe(&gs, &x)))
    }));

    let round_trip = gauge_from_multiplier(&mu, ProjectiveFrame).and_then(|f| d0(&f));
    out.push(property(&format!("classification_round_trip({name})"), cfg, 1e-8, |t, s| {
        let (g, x) = s.pair(cycle_n(t));
        let r = round_trip
            .clone()
            .and_then(|m| Ok(rel(m.at1(&g, &x)?, mu.at1(&g, &x)?)));
        (r, describe(&[g], &x))
    }));
    out
}

pub fn frame_suite(cfg: &CheckConfig) -> Vec<PropertyReport> {
    let mut out = Vec::new();
    out.push(property("frame_equivariance", cfg, 1e-8, |t, s| {
        let (g, x) = s.pair(cycle_n(t));
        (frame_equivariance_check(&x, &g), describe(&[g], &x))
    }));
    out.push(property("frame_normalization", cfg, 1e-9, |t, s| {
        let x = s.config(cycle_n(t));
        (solve_frame(&x).map(|f| f.residual), describe(&[], &x))
    }));
    out.push(property("invariantization_idempotence", cfg, 1e-9, |t, s| {
        let x = s.config(cycle_n(t));
        let r = invariantize_config(&x).and_then(|once| Ok(max_abs_coord(&invariantize_config(&once)?, &once)));
        (r, describe(&[], &x))
    }));
    out.push(property("explicit_frame_parameters", cfg, 1e-8, |t, s| {
        let x = s.config(cycle_n(t));
        let r = closed_form_frame(&x, FrameDenominator::Corrected)
            .and_then(|c| Ok(c.projective_distance(&solve_frame(&x)?.rho)));
        (r, describe(&[], &x))
    }));
    out
}

/// Weight-`ω` test functions of the absolute invariants of five points.
pub const EXPRESSION_FAMILY: [&str; 5] =
    ["1", "I1_5", "I2_5^2 + 1", "(I1_5 - I2_5) / (1 + I1_5^2)", "3*I1_5*I2_5 - 2"];

pub fn weight_suite(cfg: &CheckConfig) -> Vec<PropertyReport> {
    let mut out = Vec::new();
    let mu = Cochain::total_jacobian();

    out.push(property("jinv_weight_minus_one", cfg, 1e-8, |t, s| {
        let (g, x) = s.pair(cycle_n(t));
        let r = (|| {
            let after = invariantized_jacobian_direct(&apply_config(&g, &x)?)?;
            Ok(rel(after * mu.at1(&g, &x)?, invariantized_jacobian_direct(&x)?))
        })();
        (r, describe(&[g], &x))
    }));

    out.push(property("jinv_reinvariantized", cfg, 1e-10, |t, s| {
        let x = s.config(cycle_n(t));
        let r = invariantize_config(&x).and_then(|y| invariantized_jacobian_direct(&y)).map(|v| rel(v, 1.0));
        (r, describe(&[], &x))
    }));

    out.push(property("jinv_closed_form", cfg, 1e-8, |t, s| {
        let x = s.config(cycle_n(t));
        let r = (|| {
            let direct = invariantized_jacobian_direct(&x)?.abs();
            let closed = invariantized_jacobian_closed(&x)?.abs();
            let mut r = rel(closed, direct);
            if x.len() == 4 {
                let p: f64 = base_deltas(&x).iter().product();
                r = r.max(rel(1.0 / p.abs(), direct));
            }
            Ok(r)
        })();
        (r, describe(&[], &x))
    }));

    out.push(property("absolute_invariance", cfg, 1e-8, |t, s| {
        let (g, x) = s.pair(5 + t % 2);
        let r = (|| {
            let (a1, a2) = fundamental_invariants(&x)?;
            let (b1, b2) = fundamental_invariants(&apply_config(&g, &x)?)?;
            Ok(max_rel(&b1, &a1).max(max_rel(&b2, &a2)))
        })();
        (r, describe(&[g], &x))
    }));

    let family: Vec<Expr> = EXPRESSION_FAMILY.iter().map(|e| e.parse().expect("valid expression")).collect();
    out.push(property("relative_invariant_weights", cfg, 1e-7, |t, s| {
        let weight = Rational64::from_integer(t as i64 % 5 - 2);
        let f = &family[(t / 5) % family.len()];
        let (g, x) = s.pair(5);
        let r = (|| {
            let eval = |v: &crate::invariants::InvariantVector| f.eval(v);
            let before = relative_invariant(weight, eval, &x)?;
            let after = relative_invariant(weight, eval, &apply_config(&g, &x)?)?;
            let j = mu.at1(&g, &x)?;
            Ok(rel(after, j.powi(*weight.numer() as i32) * before))
        })();
        (r, format!("weight={weight} F={} {}", f.source(), describe(&[g], &x)))
    }));

    out.push(property("delta_transform", cfg, 1e-9, |t, s| {
        let (g, x) = s.pair(cycle_n(t));
        let r = (|| {
            let mut worst: f64 = 0.0;
            for (i, j, k) in [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)] {
                worst = worst.max(delta_transform_check(&g, &x, i, j, k)?);
            }
            Ok(worst)
        })();
        (r, describe(&[g], &x))
    }));

    out.push(property("mixed_transform", cfg, 1e-9, |t, s| {
        let (g, x) = s.pair(5 + t % 2);
        let r = (5..=x.len()).try_fold(0.0_f64, |acc, i| Ok(acc.max(mixed_transform_check(&g, &x, i)?)));
        (r, describe(&[g], &x))
    }));

    out.push(property("cubed_delta_three_points", cfg, 1e-9, |_, s| {
        let (g, x) = s.pair(3);
        (cubed_delta_check(&g, &x), describe(&[g], &x))
    }));

    out.push(property("generator_count", cfg, 0.0, |t, s| {
        let x = s.config(cycle_n(t));
        let r = invariant_vector(&x).map(|v| (v.absolute_count() as f64 - 2.0 * (x.len() as f64 - 4.0)).abs());
        (r, describe(&[], &x))
    }));
    out
}

fn random_fiber(s: &mut InstanceSampler) -> f64 {
    let v = s.uniform(0.5, 2.0);
    if s.uniform(0.0, 1.0) < 0.5 {
        -v
    } else {
        v
    }
}

fn extended_gap(a: &ExtendedPoint, b: &ExtendedPoint) -> f64 {
    max_abs_coord(&a.base, &b.base).max(rel(a.fiber(), b.fiber()))
}

pub fn extended_suite(cfg: &CheckConfig) -> Vec<PropertyReport> {
    let mu = cfg.multiplier.clone();
    let name = mu.name().to_string();
    let id = Homography::identity();
    let mut out = Vec::new();

    out.push(property(&format!("extended_identity({name})"), cfg, 1e-12, |t, s| {
        let x = s.config(cycle_n(t));
        let r = ExtendedPoint::new(x.clone(), random_fiber(s))
            .and_then(|xp| Ok(extended_gap(&extended_action(&id, &xp, &mu)?, &xp)));
        (r, describe(&[id], &x))
    }));

    out.push(property(&format!("extended_action_law({name})"), cfg, 1e-9, |t, s| {
        let (g, h, x) = triple(s, cycle_n(t));
        let fiber = random_fiber(s);
        let r = (|| {
            let xp = ExtendedPoint::new(x.clone(), fiber)?;
            let stepwise = extended_action(&g, &extended_action(&h, &xp, &mu)?, &mu)?;
            let direct = extended_action(&g.compose(&h), &xp, &mu)?;
            Ok(extended_gap(&stepwise, &direct))
        })();
        (r, format!("fiber={fiber:.17e} {}", describe(&[g, h], &x)))
    }));

    out.push(property("extended_frame_equivariance", cfg, 1e-8, |t, s| {
        let (g, x) = s.pair(cycle_n(t));
        let fiber = random_fiber(s);
        let r = (|| {
            let xp = ExtendedPoint::new(x.clone(), fiber)?;
            let moved = extended_action(&g, &xp, &mu)?;
            let lhs = extended_frame(&moved, &mu)?.frame.rho;
            let rhs = extended_frame(&xp, &mu)?.frame.rho * g.inverse();
            Ok(lhs.projective_distance(&rhs))
        })();
        (r, describe(&[g], &x))
    }));

    out.push(property("extended_gauge_preservation", cfg, 1e-8, |t, s| {
        let (g, x) = s.pair(cycle_n(t));
        let fiber = random_fiber(s);
        let r = (|| {
            let xp = ExtendedPoint::new(x.clone(), fiber)?;
            let moved = extended_action(&g, &xp, &mu)?;
            Ok(rel(extended_frame(&moved, &mu)?.gauge_value, extended_frame(&xp, &mu)?.gauge_value))
        })();
        (r, format!("fiber={fiber:.17e} {}", describe(&[g], &x)))
    }));

    out.push(property("lifted_cross_section", cfg, 1e-9, |t, s| {
        let x = s.config(cycle_n(t));
        let fiber = random_fiber(s);
        let r = (|| {
            let xp = ExtendedPoint::new(x.clone(), fiber)?;
            let frame = extended_frame(&xp, &mu)?;
            let normalized = extended_action(&frame.frame.rho, &xp, &mu)?;
            let again = extended_frame(&normalized, &mu)?;
            Ok(again.frame.rho.projective_distance(&id).max(rel(normalized.fiber(), frame.gauge_value)))
        })();
        (r, format!("fiber={fiber:.17e} {}", describe(&[], &x)))
    }));
    out
}

pub fn run_suite(suite: Suite, cfg: &CheckConfig) -> Vec<PropertyReport> {
    match suite {
        Suite::Cocycle => cocycle_suite(cfg),
        Suite::Frame => frame_suite(cfg),
        Suite::Weight => weight_suite(cfg),
        Suite::Extended => extended_suite(cfg),
        Suite::All => [Suite::Cocycle, Suite::Frame, Suite::Weight, Suite::Extended]
            .into_iter()
            .flat_map(|s| run_suite(s, cfg))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn all_suites_pass_at_default_seed() {
        let reports = run_suite(Suite::All, &CheckConfig::new(crate::DEFAULT_SEED, 30));
        for r in &reports {
            assert!(r.pass, "{r}");
            assert_eq!(r.trials, 30);
        }
    }

    #[test]
    fn single_trial_is_counted_once() {
        for r in run_suite(Suite::Frame, &CheckConfig::new(3, 1)) {
            assert_eq!(r.trials, 1);
        }
    }

    #[test]
    fn faulty_multiplier_is_caught() {
        let cfg = CheckConfig::new(7, 10).with_multiplier(faulty_multiplier());
        let reports = cocycle_suite(&cfg);
        assert!(!reports[0].pass);
        assert!(reports[0].counterexample.as_deref().unwrap().contains("g1="));
        let ext = extended_suite(&cfg);
        assert!(!ext[1].pass, "{}", ext[1]);
    }
}
