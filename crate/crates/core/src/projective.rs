//! The planar projective group PGL(3,ℝ), its diagonal action on ordered point
//! configurations, the Jacobian multiplier of that action, and the signed-area
//! determinants `δ_ijk` every invariant in this crate is built from.
//!
//! Point indices in the public API are 1-based (`delta(cfg, 1, 2, 3)`), matching
//! the usual labelling of the normalized points.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Relative tolerance of the zero test for determinants and denominators.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// A determinant-like quantity `d` homogeneous of `degree` in coordinates of
/// magnitude at most `scale` counts as zero when `|d| <= 1e-10 * scale^degree`.
pub fn is_negligible(value: f64, scale: f64, degree: i32) -> bool {
    !(value.abs() > DEGENERACY_TOL * scale.powi(degree))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Ordered list of planar points, a point of the configuration space (ℝ²)ⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    pts: Vec<Point2>,
}

impl PointConfig {
    /// Builds a configuration from finite points. At least one point is
    /// required; operations that need more (frames need four) check for it.
    pub fn new(pts: Vec<Point2>) -> Result<Self> {
        if pts.is_empty() {
            return Err(Error::TooFewPoints { needed: 1, got: 0 });
        }
        if let Some(i) = pts.iter().position(|p| !p.is_finite()) {
            return Err(Error::EvaluationError(format!("point {} is not finite", i + 1)));
        }
        Ok(Self { pts })
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().copied().map(Point2::from).collect())
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.pts
    }

    /// 1-based access.
    pub fn point(&self, i: usize) -> Point2 {
        self.pts[i - 1]
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.pts
    }

    /// Largest coordinate magnitude over the given 1-based indices.
    pub fn scale_of(&self, idx: &[usize]) -> f64 {
        idx.iter().map(|&i| self.pts[i - 1].max_abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self) -> f64 {
        self.pts.iter().map(Point2::max_abs).fold(0.0, f64::max)
    }

    /// Copy with points `i` and `j` (1-based) exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut pts = self.pts.clone();
        pts.swap(i - 1, j - 1);
        Self { pts }
    }
}

impl FromStr for PointConfig {
    type Err = Error;

    /// One point per line, `x y`; blank lines and lines starting with `#` are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut pts = Vec::new();
        let mut offset = 0;
        for line in s.split_inclusive('\n') {
            let body = line.trim();
            if !body.is_empty() && !body.starts_with('#') {
                let fields = parse_floats(line, offset)?;
                if fields.len() != 2 {
                    return Err(Error::ParseError {
                        offset,
                        message: format!("expected 2 coordinates, found {}", fields.len()),
                    });
                }
                pts.push(Point2::new(fields[0], fields[1]));
            }
            offset += line.len();
        }
        if pts.is_empty() {
            return Err(Error::ParseError { offset, message: "no points".into() });
        }
        PointConfig::new(pts)
    }
}

impl fmt::Display for PointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pts {
            writeln!(f, "{:.17e} {:.17e}", p.x, p.y)?;
        }
        Ok(())
    }
}

fn parse_floats(text: &str, base: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut pos = 0;
    for tok in text.split_whitespace() {
        let at = pos + text[pos..].find(tok).unwrap_or(0);
        pos = at + tok.len();
        let v: f64 = tok.parse().map_err(|_| Error::ParseError {
            offset: base + at,
            message: format!("invalid number {tok:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::ParseError { offset: base + at, message: format!("non-finite value {tok:?}") });
        }
        out.push(v);
    }
    Ok(out)
}

/// Which normalization produced a [`Representative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    /// Scaled so that `c₃ = 1`.
    UnitC3,
    /// `c₃` vanishes: scaled so the largest entry of row `c` is 1. Non-generic.
    UnitRowC,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Representative {
    pub matrix: Matrix3<f64>,
    pub gauge: Gauge,
}

impl Representative {
    pub fn is_generic(&self) -> bool {
        self.gauge == Gauge::UnitC3
    }
}

/// An element of PGL(3,ℝ): an invertible 3×3 matrix up to a nonzero factor.
#[derive(Debug, Clone, Copy)]
pub struct Homography {
    m: Matrix3<f64>,
}

impl Homography {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::EvaluationError("non-finite matrix entry".into()));
        }
        let det = m.determinant();
        let norm = m.norm();
        if !(det.abs() > 1e-12 * norm.powi(3)) {
            return Err(Error::SingularHomography { det });
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(Matrix3::from_fn(|r, c| rows[r][c]))
    }

    pub fn from_row_slice(v: &[f64; 9]) -> Result<Self> {
        Self::new(Matrix3::from_row_slice(v))
    }

    pub fn identity() -> Self {
        Self { m: Matrix3::identity() }
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&Vector3::new(a, b, c)))
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self { m: Matrix3::new(1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0) }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn det(&self) -> f64 {
        self.m.determinant()
    }

    /// Bottom row `(c₁, c₂, c₃)`.
    pub fn row_c(&self) -> [f64; 3] {
        [self.m[(2, 0)], self.m[(2, 1)], self.m[(2, 2)]]
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.m * lambda)
    }

    pub fn compose(&self, other: &Homography) -> Homography {
        Homography { m: self.m * other.m }
    }

    pub fn inverse(&self) -> Homography {
        // invertibility is a construction invariant
        let inv = self.m.try_inverse().expect("homography is invertible");
        Homography { m: inv }
    }

    /// Canonical matrix used by every multiplier evaluation: `c₃ = 1` when
    /// `|c₃| > 1e-9 · max|mᵢⱼ|`, otherwise the largest entry of row `c` is 1.
    pub fn representative(&self) -> Representative {
        let max = self.m.amax();
        let c3 = self.m[(2, 2)];
        if c3.abs() > 1e-9 * max {
            Representative { matrix: self.m / c3, gauge: Gauge::UnitC3 }
        } else {
            let row = self.row_c();
            let pivot = row.iter().copied().fold(0.0_f64, |a, v| if v.abs() > a.abs() { v } else { a });
            Representative { matrix: self.m / pivot, gauge: Gauge::UnitRowC }
        }
    }

    /// Unit Frobenius norm, sign fixed so the first nonzero entry (row-major) is positive.
    pub fn canonical_unit(&self) -> Matrix3<f64> {
        let mut u = self.m / self.m.norm();
        let first = (0..9).map(|k| u[(k / 3, k % 3)]).find(|v| v.abs() > 1e-12).unwrap_or(1.0);
        if first < 0.0 {
            u = -u;
        }
        u
    }

    /// Largest entrywise difference of the unit-norm matrices, minimized over the
    /// overall sign.
    pub fn projective_distance(&self, other: &Homography) -> f64 {
        let a = self.m / self.m.norm();
        let b = other.m / other.m.norm();
        (a - b).amax().min((a + b).amax())
    }

    pub fn approx_eq(&self, other: &Homography, tol: f64) -> bool {
        self.projective_distance(other) <= tol
    }

    /// Projective denominator `s = c₁x + c₂y + c₃` of the given matrix at `p`,
    /// checked against `|s| > 1e-12 · ‖(x,y,1)‖ · ‖c‖`.
    fn denominator(m: &Matrix3<f64>, p: Point2, index: usize) -> Result<f64> {
        let s = m[(2, 0)] * p.x + m[(2, 1)] * p.y + m[(2, 2)];
        let c_norm = (m[(2, 0)].powi(2) + m[(2, 1)].powi(2) + m[(2, 2)].powi(2)).sqrt();
        let p_norm = (p.x * p.x + p.y * p.y + 1.0).sqrt();
        if !(s.abs() > 1e-12 * p_norm * c_norm) {
            return Err(Error::PointAtInfinity { index, denominator: s });
        }
        Ok(s)
    }
}

impl Mul for Homography {
    type Output = Homography;
    fn mul(self, rhs: Homography) -> Homography {
        self.compose(&rhs)
    }
}

impl<'a> Mul<&'a Homography> for &'a Homography {
    type Output = Homography;
    fn mul(self, rhs: &Homography) -> Homography {
        self.compose(rhs)
    }
}

impl PartialEq for Homography {
    /// Equality in PGL(3): matrices agree up to a nonzero factor.
    fn eq(&self, other: &Self) -> bool {
        self.projective_distance(other) <= 1e-12
    }
}

impl FromStr for Homography {
    type Err = Error;

    /// Nine whitespace-separated numbers, row-major. `#` comment lines are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut vals = Vec::new();
        let mut offset = 0;
        for line in s.split_inclusive('\n') {
            if !line.trim_start().starts_with('#') {
                vals.extend(parse_floats(line, offset)?);
            }
            offset += line.len();
        }
        let arr: [f64; 9] = vals.as_slice().try_into().map_err(|_| Error::ParseError {
            offset,
            message: format!("expected 9 matrix entries, found {}", vals.len()),
        })?;
        Homography::from_row_slice(&arr)
    }
}

impl fmt::Display for Homography {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..3 {
            writeln!(f, "{:.17e} {:.17e} {:.17e}", self.m[(r, 0)], self.m[(r, 1)], self.m[(r, 2)])?;
        }
        Ok(())
    }
}

/// Value of a multiplier; never zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MultiplierValue(f64);

impl MultiplierValue {
    pub fn new(value: f64) -> Result<Self> {
        if value == 0.0 || !value.is_finite() {
            return Err(Error::DivisionByZero(format!("multiplier value {value}")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn apply_matrix(m: &Matrix3<f64>, p: Point2, index: usize) -> Result<Point2> {
    let s = Homography::denominator(m, p, index)?;
    Ok(Point2 {
        x: (m[(0, 0)] * p.x + m[(0, 1)] * p.y + m[(0, 2)]) / s,
        y: (m[(1, 0)] * p.x + m[(1, 1)] * p.y + m[(1, 2)]) / s,
    })
}

/// `g · p`.
pub fn apply_homography(g: &Homography, p: Point2) -> Result<Point2> {
    apply_matrix(g.matrix(), p, 1)
}

/// Diagonal action `g · (p₁, …, pₙ)`; errors carry the 1-based index of the
/// first point sent to infinity.
pub fn apply_config(g: &Homography, cfg: &PointConfig) -> Result<PointConfig> {
    let pts = cfg
        .points()
        .iter()
        .enumerate()
        .map(|(i, &p)| apply_matrix(g.matrix(), p, i + 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointConfig { pts })
}

/// Per-point denominators `sᵢ` of the canonical representative of `g`.
pub fn denominators(g: &Homography, cfg: &PointConfig) -> Result<Vec<f64>> {
    let rep = g.representative();
    cfg.points()
        .iter()
        .enumerate()
        .map(|(i, &p)| Homography::denominator(&rep.matrix, p, i + 1))
        .collect()
}

/// Jacobian of `p ↦ g·p`: `det(g)/s³`, evaluated on the canonical representative.
pub fn jacobian_point(g: &Homography, p: Point2) -> Result<MultiplierValue> {
    let rep = g.representative();
    let s = Homography::denominator(&rep.matrix, p, 1)?;
    MultiplierValue::new(rep.matrix.determinant() / (s * s * s))
}

/// Jacobian multiplier of the diagonal action, `∏ det(g)/sᵢ³`.
pub fn total_jacobian(g: &Homography, cfg: &PointConfig) -> Result<MultiplierValue> {
    let rep = g.representative();
    let det = rep.matrix.determinant();
    let mut acc = 1.0;
    for (i, &p) in cfg.points().iter().enumerate() {
        let s = Homography::denominator(&rep.matrix, p, i + 1)?;
        acc *= det / (s * s * s);
    }
    MultiplierValue::new(acc)
}

/// Twice the signed area of the triangle `(p, q, r)`, i.e. the determinant of
/// their homogeneous coordinates.
pub fn delta_points(p: Point2, q: Point2, r: Point2) -> f64 {
    (q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y)
}

/// `δ_ijk` with 1-based, pairwise distinct indices.
pub fn delta(cfg: &PointConfig, i: usize, j: usize, k: usize) -> Result<f64> {
    let n = cfg.len();
    let ok = |a: usize| (1..=n).contains(&a);
    if !(ok(i) && ok(j) && ok(k)) || i == j || j == k || i == k {
        return Err(Error::IndexError { i, j, k, n });
    }
    Ok(delta_points(cfg.point(i), cfg.point(j), cfg.point(k)))
}

fn delta_unchecked(cfg: &PointConfig, i: usize, j: usize, k: usize) -> f64 {
    delta_points(cfg.point(i), cfg.point(j), cfg.point(k))
}

/// The four determinants over the first four points, in the order
/// `(δ₁₂₃, δ₁₂₄, δ₁₃₄, δ₂₃₄)`.
pub fn base_deltas(cfg: &PointConfig) -> [f64; 4] {
    [
        delta_unchecked(cfg, 1, 2, 3),
        delta_unchecked(cfg, 1, 2, 4),
        delta_unchecked(cfg, 1, 3, 4),
        delta_unchecked(cfg, 2, 3, 4),
    ]
}

/// The mixed combination `δ₁₂₃δ₂₃₄δ₁₄ᵢ + δ₁₂₄δ₁₃₄δ₂₃ᵢ` for a 1-based index `i ≥ 5`.
pub fn mixed_combination(cfg: &PointConfig, i: usize) -> Result<f64> {
    if cfg.len() < 5 || i < 5 || i > cfg.len() {
        return Err(Error::IndexError { i, j: 1, k: 4, n: cfg.len() });
    }
    let [d123, d124, d134, d234] = base_deltas(cfg);
    Ok(d123 * d234 * delta_unchecked(cfg, 1, 4, i) + d124 * d134 * delta_unchecked(cfg, 2, 3, i))
}

fn require_nonzero(name: String, value: f64, scale: f64, degree: i32) -> Result<()> {
    if is_negligible(value, scale, degree) {
        Err(Error::DegenerateConfiguration { quantity: name, value })
    } else {
        Ok(())
    }
}

/// Checks general position and names the first vanishing quantity.
///
/// For three points this is `δ₁₂₃ ≠ 0`; from four points on, all four
/// determinants of the first four points must be nonzero, and every extra
/// point `i` additionally needs `δ₁₄ᵢ`, `δ₃₄ᵢ` and the mixed combination
/// nonzero (the denominators of the fundamental invariants and of the
/// invariantized Jacobian).
pub fn check_general_position(cfg: &PointConfig) -> Result<()> {
    let n = cfg.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let triples: &[(usize, usize, usize)] =
        if n == 3 { &[(1, 2, 3)] } else { &[(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)] };
    for &(i, j, k) in triples {
        let d = delta_unchecked(cfg, i, j, k);
        require_nonzero(format!("delta_{i}{j}{k}"), d, cfg.scale_of(&[i, j, k]), 2)?;
    }
    for i in 5..=n {
        for (a, b) in [(1, 4), (3, 4)] {
            let d = delta_unchecked(cfg, a, b, i);
            require_nonzero(format!("delta_{a}{b}{i}"), d, cfg.scale_of(&[a, b, i]), 2)?;
        }
        let m = mixed_combination(cfg, i)?;
        require_nonzero(format!("mixed_sum_{i}"), m, cfg.scale_of(&[1, 2, 3, 4, i]), 6)?;
    }
    Ok(())
}

pub fn general_position(cfg: &PointConfig) -> bool {
    check_general_position(cfg).is_ok()
}

fn relative_residual(actual: f64, expected: f64) -> f64 {
    let denom = expected.abs();
    if denom == 0.0 {
        (actual - expected).abs()
    } else {
        (actual - expected).abs() / denom
    }
}

/// Relative residual of `δ_ijk(g·x) = det(g)/(sᵢsⱼsₖ) · δ_ijk(x)`.
pub fn delta_transform_check(g: &Homography, cfg: &PointConfig, i: usize, j: usize, k: usize) -> Result<f64> {
    let before = delta(cfg, i, j, k)?;
    require_nonzero(format!("delta_{i}{j}{k}"), before, cfg.scale_of(&[i, j, k]), 2)?;
    let moved = apply_config(g, cfg)?;
    let after = delta(&moved, i, j, k)?;
    let s = denominators(g, cfg)?;
    let det = g.representative().matrix.determinant();
    let predicted = det / (s[i - 1] * s[j - 1] * s[k - 1]) * before;
    Ok(relative_residual(after, predicted))
}

/// Relative residual of the transformation law of the mixed combination:
/// factor `det(g)³ / (s₁²s₂²s₃²s₄² sᵢ)`.
pub fn mixed_transform_check(g: &Homography, cfg: &PointConfig, i: usize) -> Result<f64> {
    let before = mixed_combination(cfg, i)?;
    let moved = apply_config(g, cfg)?;
    let after = mixed_combination(&moved, i)?;
    let s = denominators(g, cfg)?;
    let det = g.representative().matrix.determinant();
    let base: f64 = s[..4].iter().map(|v| v * v).product();
    let predicted = det.powi(3) / (base * s[i - 1]) * before;
    Ok(relative_residual(after, predicted))
}

/// Relative residual of `δ₁₂₃(g·x)³ = J(g,x) · δ₁₂₃(x)³` on a 3-point
/// configuration, i.e. `δ₁₂₃` is relative of weight `1/3`.
pub fn cubed_delta_check(g: &Homography, cfg: &PointConfig) -> Result<f64> {
    if cfg.len() != 3 {
        return Err(Error::ArityMismatch { expected: 3, got: cfg.len() });
    }
    let before = delta(cfg, 1, 2, 3)?;
    require_nonzero("delta_123".into(), before, cfg.scale(), 2)?;
    let after = delta(&apply_config(g, cfg)?, 1, 2, 3)?;
    let j = total_jacobian(g, cfg)?.value();
    Ok(relative_residual(after.powi(3), j * before.powi(3)))
}
