//! Right moving frame for the diagonal projective action on configurations of
//! `n ≥ 4` points, the invariantization it induces, and the lift of both to the
//! extended manifold `M × ℝ^×` with the twisted action.
//!
//! The frame `ρ(x)` is the homography sending the first four points to the
//! cross-section targets `(0,-1), (1,1), (1,0), (0,0)`. It is obtained from the
//! eight normalization equations, which become linear in
//! `(a₁,a₂,a₃,b₁,b₂,b₃,c₁,c₂)` once `c₃ = 1` is fixed and denominators are cleared.

use nalgebra::Matrix3;

use crate::cocycle::Cochain;
use crate::error::{Error, Result};
use crate::projective::{
    apply_config, base_deltas, check_general_position, is_negligible, Homography, Point2, PointConfig,
};

/// The cross-section `x₁=0, y₁=-1, x₂=1, y₂=1, x₃=1, y₃=0, x₄=0, y₄=0`, lifted
/// by `x_{m+1} = 1` on the extended manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSection {
    pub targets: [Point2; 4],
    pub fiber_target: f64,
}

pub const CROSS_SECTION: CrossSection = CrossSection {
    targets: [Point2::new(0.0, -1.0), Point2::new(1.0, 1.0), Point2::new(1.0, 0.0), Point2::new(0.0, 0.0)],
    fiber_target: 1.0,
};

impl CrossSection {
    /// The four-point configuration lying on the cross-section.
    pub fn config(&self) -> PointConfig {
        PointConfig::new(self.targets.to_vec()).expect("finite targets")
    }
}

/// Relative pivot threshold of the normalization solve.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct FrameResult {
    /// `ρ(x)` in the `c₃ = 1` representative.
    pub rho: Homography,
    /// Largest deviation of `ρ(x)·pᵢ` from the targets over the eight equations.
    pub residual: f64,
}

/// Solves `a·x = b` in place by Gaussian elimination with partial pivoting.
/// Fails when a pivot drops below `RANK_TOL` times the largest pivot seen.
fn solve_linear<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Result<[f64; N]> {
    let mut largest = 0.0_f64;
    for col in 0..N {
        let (piv, mag) = (col..N)
            .map(|r| (r, a[r][col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        largest = largest.max(mag);
        if !(mag > RANK_TOL * largest) {
            return Err(Error::SingularSystem { pivot: mag });
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..N {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..N {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = [0.0; N];
    for r in (0..N).rev() {
        let tail: f64 = (r + 1..N).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    Ok(x)
}

fn check_first_four(cfg: &PointConfig) -> Result<()> {
    if cfg.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: cfg.len() });
    }
    let four = PointConfig::new(cfg.points()[..4].to_vec())?;
    check_general_position(&four)
}

/// Computes the moving frame `ρ(x)`.
pub fn solve_frame(cfg: &PointConfig) -> Result<FrameResult> {
    check_first_four(cfg)?;
    let mut a = [[0.0; 8]; 8];
    let mut b = [0.0; 8];
    for (k, (p, t)) in cfg.points()[..4].iter().zip(CROSS_SECTION.targets.iter()).enumerate() {
        let (x, y) = (p.x, p.y);
        a[2 * k] = [x, y, 1.0, 0.0, 0.0, 0.0, -t.x * x, -t.x * y];
        b[2 * k] = t.x;
        a[2 * k + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -t.y * x, -t.y * y];
        b[2 * k + 1] = t.y;
    }
    let v = solve_linear(a, b)?;
    let rho = Homography::new(Matrix3::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], 1.0))?;
    let moved = apply_config(&rho, &PointConfig::new(cfg.points()[..4].to_vec())?)?;
    let residual = moved
        .points()
        .iter()
        .zip(CROSS_SECTION.targets.iter())
        .map(|(p, t)| (p.x - t.x).abs().max((p.y - t.y).abs()))
        .fold(0.0, f64::max);
    if !(residual < 1e-8 * cfg.scale().max(1.0)) {
        return Err(Error::FrameSolveFailure(format!("normalization residual {residual:e}")));
    }
    Ok(FrameResult { rho, residual })
}

/// Projective distance between `ρ(g·x)` and `ρ(x)·g⁻¹`.
pub fn frame_equivariance_check(cfg: &PointConfig, g: &Homography) -> Result<f64> {
    let moved = apply_config(g, cfg)?;
    let lhs = solve_frame(&moved)?.rho;
    let rhs = solve_frame(cfg)?.rho * g.inverse();
    Ok(lhs.projective_distance(&rhs))
}

/// The normalization `ρ(x)·x`: the first four points land on the cross-section
/// and the remaining coordinates become `ι(xᵢ), ι(yᵢ)`.
pub fn invariantize_config(cfg: &PointConfig) -> Result<PointConfig> {
    let frame = solve_frame(cfg)?;
    apply_config(&frame.rho, cfg)
}

/// `ι(F)(x) = F(ρ(x)·x)`.
pub fn invariantize_function<F>(f: F, cfg: &PointConfig) -> Result<f64>
where
    F: Fn(&PointConfig) -> Result<f64>,
{
    let normalized = invariantize_config(cfg)?;
    f(&normalized)
}

/// Closed-form `ι(xᵢ)` and `ι(yᵢ)` for a 1-based index `i ≥ 5`.
pub fn invariantized_coordinates(cfg: &PointConfig, i: usize) -> Result<Point2> {
    let m = crate::projective::mixed_combination(cfg, i)?;
    if is_negligible(m, cfg.scale_of(&[1, 2, 3, 4, i]), 6) {
        return Err(Error::DegenerateConfiguration { quantity: format!("mixed_sum_{i}"), value: m });
    }
    let [d123, d124, _d134, d234] = base_deltas(cfg);
    let d14i = crate::projective::delta(cfg, 1, 4, i)?;
    let d34i = crate::projective::delta(cfg, 3, 4, i)?;
    Ok(Point2::new(d234 * d123 * d14i / m, -d124 * d123 * d34i / m))
}

/// Which denominator to use in the explicit frame-parameter formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDenominator {
    /// `δ₁₂₃δ₂₃₄|x₁ y₁; x₄ y₄| + δ₁₃₄δ₁₂₄|x₂ y₂; x₂ y₂|`: the second minor has two
    /// equal rows, so that expression drops a term.
    RepeatedRow,
    /// `δ₁₂₃δ₂₃₄|x₁ y₁; x₄ y₄| + δ₁₃₄δ₁₂₄|x₂ y₂; x₃ y₃|`, which reproduces the solve.
    Corrected,
}

fn minor(p: Point2, q: Point2) -> f64 {
    p.x * q.y - p.y * q.x
}

/// Explicit rational expressions for the frame parameters (`c₃ = 1`). Kept as a
/// cross-check of [`solve_frame`]; the frame itself always comes from the solve.
pub fn closed_form_frame(cfg: &PointConfig, denominator: FrameDenominator) -> Result<Homography> {
    check_first_four(cfg)?;
    let [p1, p2, p3, p4] = [cfg.point(1), cfg.point(2), cfg.point(3), cfg.point(4)];
    let [d123, d124, d134, d234] = base_deltas(cfg);
    let second = match denominator {
        FrameDenominator::RepeatedRow => minor(p2, p2),
        FrameDenominator::Corrected => minor(p2, p3),
    };
    let big = d123 * d234 * minor(p1, p4) + d134 * d124 * second;
    if big == 0.0 {
        return Err(Error::DivisionByZero("frame parameter denominator".into()));
    }
    let a1 = (p1.y - p4.y) * d123 * d234 / big;
    let a2 = -(p1.x - p4.x) * d234 * d123 / big;
    let a3 = d123 * d234 * minor(p1, p4) / big;
    let b1 = -(p3.y - p4.y) * d123 * d124 / big;
    let b2 = (p3.x - p4.x) * d123 * d124 / big;
    let b3 = -d123 * d124 * minor(p3, p4) / big;
    let c1 = ((p1.y - p4.y) * d123 * d234 + (p2.y - p3.y) * d124 * d134) / big;
    let c2 = -((p1.x - p4.x) * d123 * d234 + (p2.x - p3.x) * d124 * d134) / big;
    Homography::new(Matrix3::new(a1, a2, a3, b1, b2, b3, c1, c2, 1.0))
}

/// A point of the extended manifold: a configuration plus a nonzero fiber
/// coordinate `x_{m+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPoint {
    pub base: PointConfig,
    fiber: f64,
}

impl ExtendedPoint {
    pub fn new(base: PointConfig, fiber: f64) -> Result<Self> {
        if fiber == 0.0 || !fiber.is_finite() {
            return Err(Error::EvaluationError(format!("fiber coordinate must be nonzero, got {fiber}")));
        }
        Ok(Self { base, fiber })
    }

    pub fn fiber(&self) -> f64 {
        self.fiber
    }
}

/// Twisted action `g·(x, t) = (g·x, t·μ(g,x))`. `mu` must be a multiplier for
/// this to be a group action; that is not checked here.
pub fn extended_action(g: &Homography, xp: &ExtendedPoint, mu: &Cochain) -> Result<ExtendedPoint> {
    let factor = mu.at1(g, &xp.base)?;
    if factor == 0.0 {
        return Err(Error::DivisionByZero(format!("{} vanished", mu.name())));
    }
    ExtendedPoint::new(apply_config(g, &xp.base)?, xp.fiber * factor)
}

#[derive(Debug, Clone, Copy)]
pub struct ExtendedFrame {
    pub frame: FrameResult,
    /// `x_{m+1} · μ(ρ(x), x)`, the fiber coordinate after normalization.
    pub gauge_value: f64,
}

/// Frame on the extended manifold. It coincides with the base frame; the fiber
/// only determines the reported gauge value.
pub fn extended_frame(xp: &ExtendedPoint, mu: &Cochain) -> Result<ExtendedFrame> {
    let frame = solve_frame(&xp.base)?;
    let gauge_value = xp.fiber * mu.at1(&frame.rho, &xp.base)?;
    Ok(ExtendedFrame { frame, gauge_value })
}
