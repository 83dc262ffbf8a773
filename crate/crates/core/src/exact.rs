//! Exact rational arithmetic for the same quantities as the floating-point path.
//!
//! Every formula in the crate is rational in the coordinates, so evaluating it
//! over `BigRational` from exactly converted inputs gives drift-free reference
//! values. This is slow and meant for small oracle checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::frame::CROSS_SECTION;
use crate::projective::{Homography, PointConfig};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Exact value of a finite double.
pub fn from_f64(v: f64) -> Q {
    Q::from_float(v).expect("finite value")
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactConfig {
    pts: Vec<(Q, Q)>,
}

pub type ExactMatrix = [[Q; 3]; 3];

impl ExactConfig {
    pub fn new(pts: Vec<(Q, Q)>) -> Self {
        Self { pts }
    }

    pub fn from_config(cfg: &PointConfig) -> Self {
        Self { pts: cfg.points().iter().map(|p| (from_f64(p.x), from_f64(p.y))).collect() }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn point(&self, i: usize) -> &(Q, Q) {
        &self.pts[i - 1]
    }

    pub fn to_config(&self) -> Result<PointConfig> {
        PointConfig::from_coords(&self.pts.iter().map(|(x, y)| (to_f64(x), to_f64(y))).collect::<Vec<_>>())
    }

    /// `δ_ijk`, 1-based.
    pub fn delta(&self, i: usize, j: usize, k: usize) -> Q {
        let (p, r, s) = (self.point(i), self.point(j), self.point(k));
        (&r.0 - &p.0) * (&s.1 - &p.1) - (&s.0 - &p.0) * (&r.1 - &p.1)
    }

    fn base_product(&self) -> Q {
        self.delta(1, 2, 3) * self.delta(1, 2, 4) * self.delta(1, 3, 4) * self.delta(2, 3, 4)
    }

    pub fn mixed(&self, i: usize) -> Q {
        self.delta(1, 2, 3) * self.delta(2, 3, 4) * self.delta(1, 4, i)
            + self.delta(1, 2, 4) * self.delta(1, 3, 4) * self.delta(2, 3, i)
    }

    /// Exact moving frame in the `c₃ = 1` representative, by Gauss–Jordan
    /// elimination of the eight normalization equations.
    pub fn solve_frame(&self) -> Result<ExactMatrix> {
        if self.len() < 4 {
            return Err(Error::TooFewPoints { needed: 4, got: self.len() });
        }
        let mut rows: Vec<Vec<Q>> = Vec::with_capacity(8);
        for (k, t) in CROSS_SECTION.targets.iter().enumerate() {
            let (x, y) = self.point(k + 1);
            let (tx, ty) = (from_f64(t.x), from_f64(t.y));
            let z = Q::zero;
            rows.push(vec![x.clone(), y.clone(), Q::one(), z(), z(), z(), -(&tx * x), -(&tx * y), tx.clone()]);
            rows.push(vec![z(), z(), z(), x.clone(), y.clone(), Q::one(), -(&ty * x), -(&ty * y), ty.clone()]);
        }
        for col in 0..8 {
            let piv = (col..8)
                .find(|&r| !rows[r][col].is_zero())
                .ok_or(Error::SingularSystem { pivot: 0.0 })?;
            rows.swap(col, piv);
            let p = rows[col][col].clone();
            for v in rows[col].iter_mut() {
                *v = &*v / &p;
            }
            for r in 0..8 {
                if r != col && !rows[r][col].is_zero() {
                    let f = rows[r][col].clone();
                    for c in col..9 {
                        let sub = &f * &rows[col][c];
                        rows[r][c] -= sub;
                    }
                }
            }
        }
        let v: Vec<Q> = rows.iter().map(|r| r[8].clone()).collect();
        Ok([
            [v[0].clone(), v[1].clone(), v[2].clone()],
            [v[3].clone(), v[4].clone(), v[5].clone()],
            [v[6].clone(), v[7].clone(), Q::one()],
        ])
    }

    pub fn apply(&self, m: &ExactMatrix) -> Result<ExactConfig> {
        let pts = self
            .pts
            .iter()
            .enumerate()
            .map(|(i, (x, y))| {
                let s = &m[2][0] * x + &m[2][1] * y + &m[2][2];
                if s.is_zero() {
                    return Err(Error::PointAtInfinity { index: i + 1, denominator: 0.0 });
                }
                let u = (&m[0][0] * x + &m[0][1] * y + &m[0][2]) / &s;
                let w = (&m[1][0] * x + &m[1][1] * y + &m[1][2]) / &s;
                Ok((u, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactConfig { pts })
    }

    /// `∏ det(m)/sᵢ³` after rescaling `m` to `c₃ = 1`.
    pub fn total_jacobian(&self, m: &ExactMatrix) -> Result<Q> {
        let m = normalize_c3(m)?;
        let d = det(&m);
        let mut acc = Q::one();
        for (i, (x, y)) in self.pts.iter().enumerate() {
            let s = &m[2][0] * x + &m[2][1] * y + &m[2][2];
            if s.is_zero() {
                return Err(Error::PointAtInfinity { index: i + 1, denominator: 0.0 });
            }
            acc = acc * &d / (&s * &s * &s);
        }
        Ok(acc)
    }

    pub fn invariantized_jacobian_direct(&self) -> Result<Q> {
        let rho = self.solve_frame()?;
        self.total_jacobian(&rho)
    }

    pub fn invariantized_jacobian_closed(&self) -> Result<Q> {
        let prod = self.base_product();
        if prod.is_zero() {
            return Err(Error::DegenerateConfiguration { quantity: "delta product".into(), value: 0.0 });
        }
        let n = self.len();
        let mut v = pow(&prod, 2 * n as i32 - 9);
        for i in 5..=n {
            let m = self.mixed(i);
            if m.is_zero() {
                return Err(Error::DegenerateConfiguration { quantity: format!("mixed_sum_{i}"), value: 0.0 });
            }
            v /= pow(&m, 3);
        }
        Ok(v)
    }

    /// `(I1_i, I2_i)` for `i = 5..n`.
    pub fn fundamental_invariants(&self) -> Result<Vec<(Q, Q)>> {
        let (d123, d124, d134, d234) = (self.delta(1, 2, 3), self.delta(1, 2, 4), self.delta(1, 3, 4), self.delta(2, 3, 4));
        (5..=self.len())
            .map(|i| {
                let d14i = self.delta(1, 4, i);
                let d34i = self.delta(3, 4, i);
                let den1 = &d234 * &d123 * &d14i;
                let den2 = &d124 * &d34i;
                if den1.is_zero() || den2.is_zero() {
                    return Err(Error::DegenerateConfiguration { quantity: format!("denominator at {i}"), value: 0.0 });
                }
                Ok((&d134 * &d124 * self.delta(2, 3, i) / den1, &d234 * &d14i / den2))
            })
            .collect()
    }
}

pub fn pow(v: &Q, e: i32) -> Q {
    let mut acc = Q::one();
    for _ in 0..e.unsigned_abs() {
        acc *= v;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

pub fn det(m: &ExactMatrix) -> Q {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

pub fn normalize_c3(m: &ExactMatrix) -> Result<ExactMatrix> {
    let c3 = m[2][2].clone();
    if c3.is_zero() {
        return Err(Error::EvaluationError("exact mode needs c3 != 0".into()));
    }
    Ok(std::array::from_fn(|r| std::array::from_fn(|c| &m[r][c] / &c3)))
}

pub fn matrix_from(g: &Homography) -> ExactMatrix {
    let m = g.matrix();
    std::array::from_fn(|r| std::array::from_fn(|c| from_f64(m[(r, c)])))
}

pub fn is_identity(m: &ExactMatrix) -> bool {
    (0..3).all(|r| (0..3).all(|c| if r == c { m[r][c].is_one() } else { m[r][c].is_zero() }))
}

pub fn abs(v: &Q) -> Q {
    v.abs()
}
