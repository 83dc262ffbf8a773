//! Joint invariants of `n` points under PGL(3,ℝ) with the Jacobian multiplier.
//!
//! The absolute invariants are generated by
//!
//! ```text
//! I1_i = δ₁₃₄δ₁₂₄δ₂₃ᵢ / (δ₂₃₄δ₁₂₃δ₁₄ᵢ)      I2_i = δ₂₃₄δ₁₄ᵢ / (δ₁₂₄δ₃₄ᵢ)      i = 5..n
//! ```
//!
//! and every relative invariant of weight `ω` is `J⁻ʷ · F(I1, I2)` where `J` is
//! the invariantized Jacobian `μ(ρ(x), x)`, a relative invariant of weight −1.
//!
//! The closed form of `J` is
//!
//! ```text
//! n = 4:  (δ₁₂₃δ₁₂₄δ₁₃₄δ₂₃₄)⁻¹
//! n > 4:  (δ₁₂₃δ₁₂₄δ₁₃₄δ₂₃₄)^(2n−9) · ∏ᵢ (δ₁₂₃δ₂₃₄δ₁₄ᵢ + δ₁₂₄δ₁₃₄δ₂₃ᵢ)⁻³
//! ```
//!
//! which equals the direct evaluation times `(−1)^(n−4)`: each point beyond the
//! fourth contributes one factor `−1` through its per-point multiplier.

use std::fmt;

use nalgebra::DMatrix;
use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::frame::solve_frame;
use crate::projective::{
    base_deltas, check_general_position, delta, mixed_combination, total_jacobian, Point2, PointConfig,
};

/// Absolute generators `I1_i, I2_i` (`i = 5..n`) and the weight generator `jinv`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantVector {
    pub n: usize,
    pub i1: Vec<f64>,
    pub i2: Vec<f64>,
    pub jinv: f64,
}

impl InvariantVector {
    /// `I1_i` for a 1-based point index `i ≥ 5`.
    pub fn i1(&self, i: usize) -> f64 {
        self.i1[i - 5]
    }

    pub fn i2(&self, i: usize) -> f64 {
        self.i2[i - 5]
    }

    /// Number of absolute generators, `2(n − 4)`.
    pub fn absolute_count(&self) -> usize {
        self.i1.len() + self.i2.len()
    }

    /// `(name, value)` pairs `I1_5, I2_5, …` in output order.
    pub fn named(&self) -> Vec<(String, f64)> {
        let mut out = Vec::with_capacity(self.absolute_count());
        for (k, (a, b)) in self.i1.iter().zip(&self.i2).enumerate() {
            out.push((format!("I1_{}", k + 5), *a));
            out.push((format!("I2_{}", k + 5), *b));
        }
        out
    }
}

impl fmt::Display for InvariantVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n: {}", self.n)?;
        for (name, v) in self.named() {
            writeln!(f, "{name}: {v:.16e}")?;
        }
        writeln!(f, "jinv: {:.16e}", self.jinv)
    }
}

fn need_points(cfg: &PointConfig, needed: usize) -> Result<()> {
    if cfg.len() < needed {
        Err(Error::TooFewPoints { needed, got: cfg.len() })
    } else {
        Ok(())
    }
}

fn nonzero_delta(cfg: &PointConfig, i: usize, j: usize, k: usize) -> Result<f64> {
    let d = delta(cfg, i, j, k)?;
    if d == 0.0 {
        return Err(Error::DegenerateConfiguration { quantity: format!("delta_{i}{j}{k}"), value: d });
    }
    Ok(d)
}

/// `(I1_5..I1_n, I2_5..I2_n)`; both lists are empty for `n = 4`.
pub fn fundamental_invariants(cfg: &PointConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    need_points(cfg, 4)?;
    check_general_position(cfg)?;
    let [d123, d124, d134, d234] = base_deltas(cfg);
    let mut i1 = Vec::with_capacity(cfg.len().saturating_sub(4));
    let mut i2 = Vec::with_capacity(i1.capacity());
    for i in 5..=cfg.len() {
        let d23i = delta(cfg, 2, 3, i)?;
        let d14i = nonzero_delta(cfg, 1, 4, i)?;
        let d34i = nonzero_delta(cfg, 3, 4, i)?;
        i1.push(d134 * d124 * d23i / (d234 * d123 * d14i));
        i2.push(d234 * d14i / (d124 * d34i));
    }
    Ok((i1, i2))
}

/// `μ(ρ(x), x)` with `μ` the total Jacobian and `ρ` the moving frame.
pub fn invariantized_jacobian_direct(cfg: &PointConfig) -> Result<f64> {
    let frame = solve_frame(cfg)?;
    Ok(total_jacobian(&frame.rho, cfg)?.value())
}

/// Exponent of `δ₁₂₃δ₁₂₄δ₁₃₄δ₂₃₄` in the closed form of the invariantized Jacobian.
pub const fn closed_form_exponent(n: usize) -> i32 {
    2 * n as i32 - 9
}

/// Closed-form invariantized Jacobian; `(−1)^(n−4)` times the direct value.
pub fn invariantized_jacobian_closed(cfg: &PointConfig) -> Result<f64> {
    need_points(cfg, 4)?;
    check_general_position(cfg)?;
    let n = cfg.len();
    let prod: f64 = base_deltas(cfg).iter().product();
    let mut value = prod.powi(closed_form_exponent(n));
    for i in 5..=n {
        value /= mixed_combination(cfg, i)?.powi(3);
    }
    Ok(value)
}

/// `ι(det(g)/sᵢ³)` for every point, from the closed forms.
pub fn per_point_invariantized_multipliers(cfg: &PointConfig) -> Result<Vec<f64>> {
    need_points(cfg, 4)?;
    check_general_position(cfg)?;
    let [d123, d124, d134, d234] = base_deltas(cfg);
    let prod = d123 * d124 * d134 * d234;
    let mut out = vec![
        -d234 * d234 / (d123 * d124 * d134),
        d134 * d134 / (d123 * d124 * d234),
        d124 * d124 / (d123 * d234 * d134),
        -d123 * d123 / (d124 * d134 * d234),
    ];
    for i in 5..=cfg.len() {
        out.push(-(prod * prod) / mixed_combination(cfg, i)?.powi(3));
    }
    Ok(out)
}

/// Full invariant vector, with `jinv` the direct (signed) invariantized Jacobian.
pub fn invariant_vector(cfg: &PointConfig) -> Result<InvariantVector> {
    let (i1, i2) = fundamental_invariants(cfg)?;
    let jinv = invariantized_jacobian_direct(cfg)?;
    if jinv == 0.0 {
        return Err(Error::DegenerateConfiguration { quantity: "jinv".into(), value: jinv });
    }
    Ok(InvariantVector { n: cfg.len(), i1, i2, jinv })
}

/// `jinv^(−ω)`; fractional weights require `jinv > 0`.
pub fn weight_factor(jinv: f64, weight: Rational64) -> Result<f64> {
    let exponent = -weight;
    if exponent.is_integer() {
        let e = exponent.to_integer();
        let e = i32::try_from(e).map_err(|_| Error::EvaluationError(format!("weight {weight} out of range")))?;
        return Ok(jinv.powi(e));
    }
    let e = exponent.to_f64().unwrap_or(f64::NAN);
    if jinv < 0.0 {
        return Err(Error::FractionalPowerOfNegative { base: jinv, exponent: e });
    }
    Ok(jinv.powf(e))
}

/// Relative invariant of weight `ω` in normal form: `jinv^(−ω) · F(I1, I2)`.
/// Transforms as `A(g·x) = J(g,x)^ω · A(x)`.
pub fn relative_invariant<F>(weight: Rational64, f: F, cfg: &PointConfig) -> Result<f64>
where
    F: Fn(&InvariantVector) -> Result<f64>,
{
    let v = invariant_vector(cfg)?;
    let factor = weight_factor(v.jinv, weight)?;
    Ok(factor * f(&v)?)
}

/// Central-difference Jacobian of the `2(n−4)` absolute generators with respect
/// to the `2n` coordinates, rows scaled to unit norm.
pub fn generator_jacobian(cfg: &PointConfig, step: f64) -> Result<DMatrix<f64>> {
    let n = cfg.len();
    need_points(cfg, 5)?;
    let rows = 2 * (n - 4);
    let mut jac = DMatrix::zeros(rows, 2 * n);
    let eval = |c: &PointConfig| -> Result<Vec<f64>> {
        let (a, b) = fundamental_invariants(c)?;
        Ok(a.into_iter().chain(b).collect())
    };
    for col in 0..2 * n {
        let shifted = |h: f64| -> Result<Vec<f64>> {
            let mut pts: Vec<Point2> = cfg.points().to_vec();
            let p = &mut pts[col / 2];
            if col % 2 == 0 { p.x += h } else { p.y += h }
            eval(&PointConfig::new(pts)?)
        };
        let plus = shifted(step)?;
        let minus = shifted(-step)?;
        for r in 0..rows {
            jac[(r, col)] = (plus[r] - minus[r]) / (2.0 * step);
        }
    }
    for mut row in jac.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{invariantize_config, CROSS_SECTION};
    use crate::projective::{apply_config, jacobian_point};
    use crate::sampling::InstanceSampler;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cross_section_values() {
        let cfg = CROSS_SECTION.config();
        assert_eq!(base_deltas(&cfg), [-1.0, 1.0, 1.0, -1.0]);
        assert_eq!(invariantized_jacobian_closed(&cfg).unwrap(), 1.0);
        assert_eq!(invariantized_jacobian_direct(&cfg).unwrap(), 1.0);
        let per = per_point_invariantized_multipliers(&cfg).unwrap();
        assert_eq!(per, vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(per.iter().product::<f64>(), 1.0);
        let v = invariant_vector(&cfg).unwrap();
        assert!(v.i1.is_empty() && v.i2.is_empty());
        assert_eq!(v.jinv, 1.0);
    }

    #[test]
    fn per_point_forms_match_frame() {
        let mut s = InstanceSampler::new(31);
        for n in 4..=6 {
            let cfg = s.config(n);
            let rho = solve_frame(&cfg).unwrap().rho;
            let per = per_point_invariantized_multipliers(&cfg).unwrap();
            for (k, v) in per.iter().enumerate() {
                let direct = jacobian_point(&rho, cfg.point(k + 1)).unwrap().value();
                assert!(rel(*v, direct) < 1e-9, "n={n} point {}", k + 1);
            }
        }
    }

    #[test]
    fn closed_form_sign_is_alternating_in_n() {
        let mut s = InstanceSampler::new(32);
        for n in 4..=7 {
            let cfg = s.config(n);
            let closed = invariantized_jacobian_closed(&cfg).unwrap();
            let direct = invariantized_jacobian_direct(&cfg).unwrap();
            let sign = if (n - 4) % 2 == 0 { 1.0 } else { -1.0 };
            assert!(rel(closed, sign * direct) < 1e-9, "n={n}");
        }
    }

    #[test]
    fn exponent_2n_minus_1_does_not_match() {
        let mut s = InstanceSampler::new(33);
        let cfg = s.config(5);
        let prod: f64 = base_deltas(&cfg).iter().product();
        let naive = prod.powi(2 * 5 - 1) / mixed_combination(&cfg, 5).unwrap().powi(3);
        let direct = invariantized_jacobian_direct(&cfg).unwrap();
        assert!(rel(naive.abs(), direct.abs()) > 1e-3);
    }

    #[test]
    fn normalized_coordinates_relation() {
        let mut s = InstanceSampler::new(34);
        let cfg = s.config(6);
        let (i1, i2) = fundamental_invariants(&cfg).unwrap();
        let normalized = invariantize_config(&cfg).unwrap();
        for i in 5..=6 {
            let q = normalized.point(i);
            assert!(rel(1.0 / q.x, 1.0 + i1[i - 5]) < 1e-9);
            assert!(rel(q.x / q.y, -i2[i - 5]) < 1e-9);
        }
    }

    #[test]
    fn swapping_extra_points_swaps_invariants() {
        let mut s = InstanceSampler::new(35);
        let cfg = s.config(6);
        let (a1, a2) = fundamental_invariants(&cfg).unwrap();
        let (b1, b2) = fundamental_invariants(&cfg.swapped(5, 6)).unwrap();
        assert_eq!((a1[0], a1[1], a2[0], a2[1]), (b1[1], b1[0], b2[1], b2[0]));
    }

    #[test]
    fn degenerate_point_is_named() {
        let cfg = PointConfig::from_coords(&[(0.0, -1.0), (1.0, 1.0), (1.0, 0.0), (0.0, 0.0), (2.0, 0.0)]).unwrap();
        match fundamental_invariants(&cfg) {
            Err(Error::DegenerateConfiguration { quantity, .. }) => assert_eq!(quantity, "delta_345"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weight_examples() {
        let mut s = InstanceSampler::new(36);
        let (g, cfg) = s.pair(5);
        let moved = apply_config(&g, &cfg).unwrap();
        let j = total_jacobian(&g, &cfg).unwrap().value();
        let zero = |cfg: &PointConfig| relative_invariant(Rational64::from(0), |v| Ok(v.i1(5)), cfg).unwrap();
        assert!(rel(zero(&moved), zero(&cfg)) < 1e-8);
        let gen = |cfg: &PointConfig| relative_invariant(Rational64::from(-1), |_| Ok(1.0), cfg).unwrap();
        assert_eq!(gen(&cfg), invariantized_jacobian_direct(&cfg).unwrap());
        let two = |cfg: &PointConfig| relative_invariant(Rational64::from(2), |_| Ok(1.0), cfg).unwrap();
        assert!(rel(two(&moved) / two(&cfg), j * j) < 1e-7);
    }

    #[test]
    fn fractional_weight_needs_positive_jinv() {
        assert!(matches!(
            weight_factor(-2.0, Rational64::new(1, 3)),
            Err(Error::FractionalPowerOfNegative { .. })
        ));
        assert!((weight_factor(8.0, Rational64::new(1, 3)).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(weight_factor(-2.0, Rational64::from(3)).unwrap(), -0.125);
    }

    #[test]
    fn serialization_layout() {
        let v = InvariantVector { n: 5, i1: vec![0.5], i2: vec![-2.0], jinv: 1.0 };
        assert_eq!(
            v.to_string(),
            "n: 5\nI1_5: 5.0000000000000000e-1\nI2_5: -2.0000000000000000e0\njinv: 1.0000000000000000e0\n"
        );
        assert_eq!(v.absolute_count(), 2);
    }
}
