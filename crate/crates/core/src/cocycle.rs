//! Multiplicative inhomogeneous bar complex `Cᵏ = Map(Gᵏ × M, ℝ^×)` of the
//! projective action on configurations.
//!
//! Cochains are evaluatable closures; identities between them (`d∘d = 1`, the
//! cocycle condition, the coboundary round trip) are checked by seeded random
//! evaluation.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::solve_frame;
use crate::projective::{apply_config, jacobian_point, total_jacobian, Homography, PointConfig};
use crate::report::PropertyReport;
use crate::sampling::InstanceSampler;

type EvalFn = dyn Fn(&[Homography], &PointConfig) -> Result<f64> + Send + Sync;

/// A `k`-cochain `(g₁, …, g_k, x) ↦ c(g₁, …, g_k; x) ∈ ℝ^×`.
#[derive(Clone)]
pub struct Cochain {
    arity: usize,
    name: String,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cochain").field("arity", &self.arity).field("name", &self.name).finish()
    }
}

impl Cochain {
    pub fn new<F>(arity: usize, name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&[Homography], &PointConfig) -> Result<f64> + Send + Sync + 'static,
    {
        Self { arity, name: name.into(), eval: Arc::new(eval) }
    }

    /// A 0-cochain, i.e. a gauge factor `f ∈ F(M)^×`.
    pub fn gauge<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&PointConfig) -> Result<f64> + Send + Sync + 'static,
    {
        Self::new(0, name, move |_, x| f(x))
    }

    pub fn one_cochain<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Homography, &PointConfig) -> Result<f64> + Send + Sync + 'static,
    {
        Self::new(1, name, move |gs, x| f(&gs[0], x))
    }

    pub fn constant(arity: usize, value: f64) -> Self {
        Self::new(arity, format!("const({value})"), move |_, _| Ok(value))
    }

    /// The Jacobian multiplier `∏ det(g)/sᵢ³` of the diagonal action.
    pub fn total_jacobian() -> Self {
        Self::one_cochain("total_jacobian", |g, x| Ok(total_jacobian(g, x)?.value()))
    }

    /// `det(g)/s³` at the first point; a multiplier on one-point configurations.
    pub fn point_jacobian() -> Self {
        Self::one_cochain("point_jacobian", |g, x| Ok(jacobian_point(g, x.point(1))?.value()))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate(&self, gs: &[Homography], x: &PointConfig) -> Result<f64> {
        if gs.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: gs.len() });
        }
        (self.eval)(gs, x)
    }

    pub fn at0(&self, x: &PointConfig) -> Result<f64> {
        self.evaluate(&[], x)
    }

    pub fn at1(&self, g: &Homography, x: &PointConfig) -> Result<f64> {
        self.evaluate(std::slice::from_ref(g), x)
    }

    fn expect_arity(&self, arity: usize) -> Result<()> {
        if self.arity == arity {
            Ok(())
        } else {
            Err(Error::ArityMismatch { expected: arity, got: self.arity })
        }
    }
}

fn nonzero(value: f64, what: &str) -> Result<f64> {
    if value == 0.0 || !value.is_finite() {
        Err(Error::DivisionByZero(format!("{what} = {value}")))
    } else {
        Ok(value)
    }
}

/// `(d⁰f)(g, x) = f(g·x) / f(x)`.
pub fn d0(f: &Cochain) -> Result<Cochain> {
    f.expect_arity(0)?;
    let f = f.clone();
    let name = format!("d0({})", f.name);
    Ok(Cochain::new(1, name, move |gs, x| {
        let below = nonzero(f.at0(x)?, &f.name)?;
        let moved = apply_config(&gs[0], x)?;
        Ok(f.at0(&moved)? / below)
    }))
}

/// `(d¹c)(g₁, g₂, x) = c(g₁, g₂·x) c(g₂, x) / c(g₁g₂, x)`.
pub fn d1(c: &Cochain) -> Result<Cochain> {
    c.expect_arity(1)?;
    let c = c.clone();
    let name = format!("d1({})", c.name);
    Ok(Cochain::new(2, name, move |gs, x| {
        let (g1, g2) = (&gs[0], &gs[1]);
        let moved = apply_config(g2, x)?;
        let num = c.at1(g1, &moved)? * c.at1(g2, x)?;
        let den = nonzero(c.at1(&g1.compose(g2), x)?, &c.name)?;
        Ok(num / den)
    }))
}

/// General coboundary for `k ∈ {1, 2, 3}`:
///
/// `(dᵏc)(g₁..g_{k+1}; x) = c(g₂..g_{k+1}; x) · ∏ᵢ c(.., gᵢg_{i+1}, ..; x)^{(-1)ⁱ}
///  · c(g₁..g_k; g_{k+1}·x)^{(-1)^{k+1}}`.
///
/// Factors with exponent `+1` are multiplied into a numerator and the others
/// into a denominator, which is divided once at the end.
pub fn dn(c: &Cochain) -> Result<Cochain> {
    let k = c.arity;
    if !(1..=3).contains(&k) {
        return Err(Error::UnsupportedArity(k));
    }
    let c = c.clone();
    let name = format!("d{k}({})", c.name);
    Ok(Cochain::new(k + 1, name, move |gs, x| {
        let mut num = Vec::with_capacity(k + 2);
        let mut den = Vec::with_capacity(k + 2);
        num.push(c.evaluate(&gs[1..], x)?);
        for i in 1..=k {
            let mut merged: Vec<Homography> = Vec::with_capacity(k);
            merged.extend_from_slice(&gs[..i - 1]);
            merged.push(gs[i - 1].compose(&gs[i]));
            merged.extend_from_slice(&gs[i + 1..]);
            let v = c.evaluate(&merged, x)?;
            if i % 2 == 0 { num.push(v) } else { den.push(v) }
        }
        let moved = apply_config(&gs[k], x)?;
        let last = c.evaluate(&gs[..k], &moved)?;
        if (k + 1) % 2 == 0 { num.push(last) } else { den.push(last) }
        let numerator: f64 = num.iter().product();
        let denominator = nonzero(den.iter().product(), &c.name)?;
        Ok(numerator / denominator)
    }))
}

/// Classification direction (i): every gauge factor yields the multiplier `d⁰f`.
pub fn multiplier_from_gauge(f: &Cochain) -> Result<Cochain> {
    d0(f)
}

/// Source of moving frames used to invariantize a multiplier.
pub trait FrameSolver: Send + Sync {
    fn frame(&self, x: &PointConfig) -> Result<Homography>;
}

/// The projective moving frame of [`crate::frame::solve_frame`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ProjectiveFrame;

impl FrameSolver for ProjectiveFrame {
    fn frame(&self, x: &PointConfig) -> Result<Homography> {
        solve_frame(x).map(|f| f.rho).map_err(|e| match e {
            Error::FrameSolveFailure(m) => Error::FrameSolveFailure(m),
            other => Error::FrameSolveFailure(other.to_string()),
        })
    }
}

/// Classification direction (ii): a gauge `f(x) = μ(ρ(x), x)⁻¹` with `d⁰f = μ`.
pub fn gauge_from_multiplier<S>(mu: &Cochain, frame: S) -> Result<Cochain>
where
    S: FrameSolver + 'static,
{
    mu.expect_arity(1)?;
    let mu = mu.clone();
    let name = format!("gauge({})", mu.name);
    Ok(Cochain::gauge(name, move |x| {
        let rho = frame.frame(x)?;
        let v = nonzero(mu.at1(&rho, x)?, &mu.name)?;
        Ok(1.0 / v)
    }))
}

pub(crate) fn rel_dev_from_one(v: f64) -> f64 {
    (v - 1.0).abs()
}

pub(crate) fn describe(gs: &[Homography], x: &PointConfig) -> String {
    let mut out = String::new();
    for (i, g) in gs.iter().enumerate() {
        let m = g.matrix();
        let entries: Vec<String> = (0..9).map(|k| format!("{:.17e}", m[(k / 3, k % 3)])).collect();
        out.push_str(&format!("g{}=[{}] ", i + 1, entries.join(",")));
    }
    let pts: Vec<String> = x.points().iter().map(|p| format!("({:.17e},{:.17e})", p.x, p.y)).collect();
    out.push_str(&format!("x=[{}]", pts.join(",")));
    out
}

/// Tolerance used by [`is_multiplier`].
pub const MULTIPLIER_TOL: f64 = 1e-9;

/// Checks `d¹c = 1` and `c(e, x) = 1` on `trials` seeded instances of
/// `points`-point configurations.
pub fn is_multiplier(c: &Cochain, points: usize, trials: usize, seed: u64) -> PropertyReport {
    let mut report = PropertyReport::new(format!("is_multiplier({})", c.name), seed, MULTIPLIER_TOL);
    let dc = match d1(c) {
        Ok(dc) => dc,
        Err(e) => {
            report.record_error(e, || "arity".into());
            return report;
        }
    };
    let mut sampler = InstanceSampler::new(seed);
    let id = Homography::identity();
    for _ in 0..trials.max(1) {
        let x = sampler.config(points);
        let g2 = sampler.homography_for(&x);
        let moved = apply_config(&g2, &x).expect("compatible homography");
        let g1 = sampler.homography_for(&moved);
        let gs = [g1, g2];
        let residual = dc.evaluate(&gs, &x).and_then(|v| Ok(rel_dev_from_one(v).max(rel_dev_from_one(c.at1(&id, &x)?))));
        match residual {
            Ok(r) => report.record(r, || describe(&gs, &x)),
            Err(e) => report.record_error(e, || describe(&gs, &x)),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::delta;

    fn unit_triangle() -> PointConfig {
        PointConfig::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap()
    }

    fn delta123() -> Cochain {
        Cochain::gauge("delta_123", |x| delta(x, 1, 2, 3))
    }

    #[test]
    fn d0_examples() {
        let x = unit_triangle();
        let g = Homography::diag(2.0, 2.0, 1.0).unwrap();
        assert_eq!(d0(&Cochain::constant(0, 1.0)).unwrap().at1(&g, &x).unwrap(), 1.0);
        assert_eq!(d0(&delta123()).unwrap().at1(&g, &x).unwrap(), 4.0);
        let sq = Cochain::gauge("delta_123^2", |x| Ok(delta(x, 1, 2, 3)?.powi(2)));
        assert_eq!(d0(&sq).unwrap().at1(&Homography::identity(), &x).unwrap(), 1.0);
        assert_eq!(multiplier_from_gauge(&delta123()).unwrap().at1(&g, &x).unwrap(), 4.0);
    }

    #[test]
    fn d0_of_vanishing_gauge_is_division_by_zero() {
        let line = PointConfig::from_coords(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).unwrap();
        let err = d0(&delta123()).unwrap().at1(&Homography::identity(), &line).unwrap_err();
        assert!(matches!(err, Error::DivisionByZero(_)));
    }

    #[test]
    fn arity_is_enforced() {
        assert!(matches!(d0(&Cochain::total_jacobian()), Err(Error::ArityMismatch { .. })));
        assert!(matches!(d1(&delta123()), Err(Error::ArityMismatch { .. })));
        assert!(matches!(dn(&Cochain::constant(4, 1.0)), Err(Error::UnsupportedArity(4))));
        assert!(matches!(dn(&delta123()), Err(Error::UnsupportedArity(0))));
        let c = Cochain::total_jacobian();
        assert!(matches!(c.evaluate(&[], &unit_triangle()), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn dn_specializes_to_d1_bitwise() {
        let c = Cochain::one_cochain("det_plus", |g, x| Ok(g.representative().matrix.determinant() * (2.0 + x.point(1).x)));
        let a = d1(&c).unwrap();
        let b = dn(&c).unwrap();
        let mut s = InstanceSampler::new(21);
        for _ in 0..50 {
            let (g2, x) = s.pair(4);
            let g1 = s.homography();
            assert_eq!(a.evaluate(&[g1, g2], &x).unwrap(), b.evaluate(&[g1, g2], &x).unwrap());
        }
    }

    #[test]
    fn det_is_not_a_multiplier_of_configurations() {
        let c = Cochain::one_cochain("det", |g, _| Ok(g.representative().matrix.determinant()));
        let dc = d1(&c).unwrap();
        let mut s = InstanceSampler::new(0xC0FFEE);
        let (g2, x) = s.pair(4);
        let g1 = s.homography();
        let v = dc.evaluate(&[g1, g2], &x).unwrap();
        assert!((v - 1.0).abs() > 1e-3, "d1(det) = {v}");
    }

    #[test]
    fn identity_cascade_through_d3() {
        // five faces, three in the numerator: d³c(e,e,e,e; x) = c(e,e,e; x)
        let c = Cochain::new(3, "mix", |gs, x| {
            let t: f64 = gs.iter().map(|g| g.representative().matrix.trace()).sum();
            Ok(1.0 + 0.1 * t * t + x.point(1).x.powi(2))
        });
        let d3 = dn(&c).unwrap();
        let id = Homography::identity();
        let x = unit_triangle();
        let v = d3.evaluate(&[id, id, id, id], &x).unwrap();
        let expected = c.evaluate(&[id, id, id], &x).unwrap();
        assert!((v - expected).abs() < 4.0 * f64::EPSILON * expected, "{v}");
    }

    #[test]
    fn coboundary_squares_to_one() {
        let c1 = Cochain::one_cochain("c1", |g, x| {
            Ok(1.5 + (g.representative().matrix[(0, 1)] + x.point(2).y).sin())
        });
        let c2 = Cochain::new(2, "c2", |gs, x| {
            let a = gs[0].representative().matrix;
            let b = gs[1].representative().matrix;
            Ok(2.0 + (a[(1, 0)] - 0.5 * b[(2, 1)] + x.point(1).x).cos())
        });
        let dd1 = dn(&d1(&c1).unwrap()).unwrap();
        let dd2 = dn(&dn(&c2).unwrap()).unwrap();
        let mut s = InstanceSampler::new(77);
        for _ in 0..30 {
            let x = s.config(3);
            let gs: Vec<Homography> = (0..4).map(|_| s.homography()).collect();
            let Ok(v) = dd1.evaluate(&gs[..3], &x) else { continue };
            assert!(rel_dev_from_one(v) < 1e-12, "{v}");
            if let Ok(v) = dd2.evaluate(&gs, &x) {
                assert!(rel_dev_from_one(v) < 1e-12, "{v}");
            }
        }
    }

    #[test]
    fn total_jacobian_is_a_multiplier() {
        let r = is_multiplier(&Cochain::total_jacobian(), 5, 100, 1);
        assert!(r.pass, "{r}");
        assert_eq!(r.trials, 100);
    }

    #[test]
    fn point_jacobian_on_single_points() {
        let r = is_multiplier(&Cochain::point_jacobian(), 1, 100, 2);
        assert!(r.pass, "{r}");
    }

    #[test]
    fn perturbed_determinant_fails_with_counterexample() {
        let c = Cochain::one_cochain("det(1+x1)", |g, x| Ok(g.representative().matrix.determinant() * (1.0 + x.point(1).x)));
        let r = is_multiplier(&c, 4, 20, 3);
        assert!(!r.pass);
        assert!(r.counterexample.as_deref().unwrap().starts_with("g1=["));
    }

    #[test]
    fn trivial_multiplier_has_trivial_gauge() {
        let f = gauge_from_multiplier(&Cochain::constant(1, 1.0), ProjectiveFrame).unwrap();
        let mut s = InstanceSampler::new(4);
        for _ in 0..5 {
            assert_eq!(f.at0(&s.config(5)).unwrap(), 1.0);
        }
    }

    #[test]
    fn gauge_needs_a_frame() {
        let f = gauge_from_multiplier(&Cochain::total_jacobian(), ProjectiveFrame).unwrap();
        let line = PointConfig::from_coords(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (0.0, 1.0)]).unwrap();
        assert!(matches!(f.at0(&line), Err(Error::FrameSolveFailure(_))));
    }
}
