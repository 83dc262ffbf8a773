//! Integral projective invariants of grayscale images.
//!
//! For a tuple of `n` points the integrand is
//!
//! ```text
//! J(x) · ∏_{i>4} I1_i(x)^αᵢ · I2_i(x)^βᵢ · ∏ᵢ u(xᵢ, yᵢ)
//! ```
//!
//! with `J` the closed-form invariantized Jacobian. Under a homography the
//! Lebesgue measure picks up `|J(g,x)|` and `|J|` picks up `|J(g,x)|⁻¹`, so the
//! integral over `ℝ²ⁿ` does not change when the image is warped. It is estimated
//! by plain Monte Carlo over the image support rectangle.
//!
//! Sampling uses one ChaCha8 stream per block of [`BLOCK_SAMPLES`] samples,
//! keyed by `(seed, block index)`. Blocks can be evaluated on any number of
//! workers; their statistics are merged pairwise in block order, so the result
//! is bit-for-bit independent of the worker count.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::projective::{
    apply_homography, base_deltas, check_general_position, delta_points, is_negligible, mixed_combination,
    Homography, Point2, PointConfig,
};

/// Grayscale image on a rectangle of the plane; zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    origin: (f64, f64),
    spacing: (f64, f64),
    data: Vec<f64>,
}

impl ImageGrid {
    /// Image occupying `[0,1]×[0,1]`; `data` is row-major with row `j` at
    /// plane height `(j + ½)/height`.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidSpec("image must have at least one pixel".into()));
        }
        Self::with_geometry(width, height, (0.0, 0.0), (1.0 / width as f64, 1.0 / height as f64), data)
    }

    pub fn with_geometry(
        width: usize,
        height: usize,
        origin: (f64, f64),
        spacing: (f64, f64),
        data: Vec<f64>,
    ) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::InvalidSpec(format!("{} values for a {width}x{height} image", data.len())));
        }
        if !(spacing.0 > 0.0 && spacing.1 > 0.0) {
            return Err(Error::InvalidSpec("pixel spacing must be positive".into()));
        }
        if data.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidSpec("intensities must be finite and nonnegative".into()));
        }
        Ok(Self { width, height, origin, spacing, data })
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(width: usize, height: usize, f: F) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                let x = (i as f64 + 0.5) / width as f64;
                let y = (j as f64 + 0.5) / height as f64;
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    /// Smooth isotropic blob centred in `[0,1]²`, cut to zero within `margin`
    /// of the border so that small warps keep it inside the frame.
    pub fn gaussian_blob(width: usize, height: usize, sigma: f64, margin: f64) -> Result<Self> {
        Self::from_fn(width, height, |x, y| {
            let r2 = (x - 0.5).powi(2) + (y - 0.5).powi(2);
            let edge = (0.5 - margin).max(0.0);
            if (x - 0.5).abs() > edge || (y - 0.5).abs() > edge {
                0.0
            } else {
                (-r2 / (2.0 * sigma * sigma)).exp()
            }
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixel(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.width + i]
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn spacing(&self) -> (f64, f64) {
        self.spacing
    }

    pub fn pixel_center(&self, i: usize, j: usize) -> Point2 {
        Point2::new(
            self.origin.0 + (i as f64 + 0.5) * self.spacing.0,
            self.origin.1 + (j as f64 + 0.5) * self.spacing.1,
        )
    }

    /// `(x_min, y_min, x_max, y_max)` of the support rectangle.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.origin.0,
            self.origin.1,
            self.origin.0 + self.width as f64 * self.spacing.0,
            self.origin.1 + self.height as f64 * self.spacing.1,
        )
    }

    pub fn area(&self) -> f64 {
        self.width as f64 * self.spacing.0 * self.height as f64 * self.spacing.1
    }

    pub fn corners(&self) -> [Point2; 4] {
        let (x0, y0, x1, y1) = self.bounds();
        [Point2::new(x0, y0), Point2::new(x1, y0), Point2::new(x1, y1), Point2::new(x0, y1)]
    }

    /// `∑ u · pixel area`.
    pub fn mass(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.spacing.0 * self.spacing.1
    }

    /// Same geometry, intensities multiplied by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::with_geometry(self.width, self.height, self.origin, self.spacing, self.data.iter().map(|v| v * c).collect())
    }

    /// Bilinear interpolation between pixel centres (constant extension to the
    /// rectangle edge), exactly zero outside the support rectangle.
    pub fn sample(&self, p: Point2) -> f64 {
        let (x0, y0, x1, y1) = self.bounds();
        if !(p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1) {
            return 0.0;
        }
        let fx = ((p.x - x0) / self.spacing.0 - 0.5).clamp(0.0, (self.width - 1) as f64);
        let fy = ((p.y - y0) / self.spacing.1 - 0.5).clamp(0.0, (self.height - 1) as f64);
        let i0 = (fx.floor() as usize).min(self.width - 1);
        let j0 = (fy.floor() as usize).min(self.height - 1);
        let i1 = (i0 + 1).min(self.width - 1);
        let j1 = (j0 + 1).min(self.height - 1);
        let tx = fx - i0 as f64;
        let ty = fy - j0 as f64;
        let top = self.pixel(i0, j0) * (1.0 - tx) + self.pixel(i1, j0) * tx;
        let bottom = self.pixel(i0, j1) * (1.0 - tx) + self.pixel(i1, j1) * tx;
        top * (1.0 - ty) + bottom * ty
    }

    /// Binary (P5) PGM with the given maxval; intensities are clamped to `[0,1]`.
    pub fn to_pgm(&self, maxval: u16) -> Vec<u8> {
        let maxval = maxval.max(1);
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, maxval).into_bytes();
        for v in &self.data {
            let q = (v.clamp(0.0, 1.0) * f64::from(maxval)).round() as u16;
            if maxval > 255 {
                out.extend_from_slice(&q.to_be_bytes());
            } else {
                out.push(q as u8);
            }
        }
        out
    }
}

/// `sample_intensity` as a free function.
pub fn sample_intensity(img: &ImageGrid, p: Point2) -> f64 {
    img.sample(p)
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            let message = if self.pos >= self.bytes.len() {
                format!("unexpected end of data, expected {what}")
            } else {
                format!("expected {what}")
            };
            return Err(Error::ParseError { offset: start, message });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::ParseError { offset: start, message: format!("{what} out of range") })
    }
}

/// Parses a P2 (ASCII) or P5 (binary) PGM. Intensities are divided by maxval and
/// the image is placed on `[0,1]²`.
pub fn parse_pgm(bytes: &[u8]) -> Result<ImageGrid> {
    if bytes.len() < 2 {
        return Err(Error::ParseError { offset: bytes.len(), message: "missing magic number".into() });
    }
    let binary = match &bytes[..2] {
        b"P5" => true,
        b"P2" => false,
        other if other[0] == b'P' => {
            return Err(Error::UnsupportedFormat(format!("PNM type {}", String::from_utf8_lossy(other))))
        }
        _ => return Err(Error::UnsupportedFormat("not a PGM file".into())),
    };
    let mut r = HeaderReader { bytes, pos: 2 };
    let width = r.number("width")? as usize;
    let height = r.number("height")? as usize;
    let maxval = r.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::ParseError { offset: r.pos, message: "zero image dimension".into() });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::UnsupportedFormat(format!("maxval {maxval}")));
    }
    let count = width * height;
    let scale = f64::from(maxval);
    let mut data = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        if r.pos >= bytes.len() || !bytes[r.pos].is_ascii_whitespace() {
            return Err(Error::ParseError { offset: r.pos, message: "missing raster separator".into() });
        }
        let start = r.pos + 1;
        let bpp = if maxval > 255 { 2 } else { 1 };
        let need = count * bpp;
        if bytes.len() < start + need {
            return Err(Error::ParseError {
                offset: bytes.len(),
                message: format!("raster truncated: {} of {need} bytes", bytes.len().saturating_sub(start)),
            });
        }
        for k in 0..count {
            let at = start + k * bpp;
            let v = if bpp == 2 { u32::from(u16::from_be_bytes([bytes[at], bytes[at + 1]])) } else { u32::from(bytes[at]) };
            if v > maxval {
                return Err(Error::ParseError { offset: at, message: format!("sample {v} exceeds maxval") });
            }
            data.push(f64::from(v) / scale);
        }
    } else {
        for _ in 0..count {
            r.skip_space_and_comments();
            let at = r.pos;
            let v = r.number("sample")?;
            if v > maxval {
                return Err(Error::ParseError { offset: at, message: format!("sample {v} exceeds maxval") });
            }
            data.push(f64::from(v) / scale);
        }
    }
    ImageGrid::new(width, height, data)
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<ImageGrid> {
    parse_pgm(&std::fs::read(path)?)
}

/// Denominator signs of `g` at the four support corners must agree, otherwise
/// the line sent to infinity crosses the (convex) support.
fn check_horizon(g: &Homography, corners: &[Point2; 4]) -> Result<()> {
    let m = g.representative().matrix;
    let s: Vec<f64> = corners.iter().map(|p| m[(2, 0)] * p.x + m[(2, 1)] * p.y + m[(2, 2)]).collect();
    let positive = s.iter().all(|v| *v > 0.0);
    let negative = s.iter().all(|v| *v < 0.0);
    if positive || negative {
        Ok(())
    } else {
        Err(Error::HorizonCrossesSupport)
    }
}

/// Pull-back warp: output pixel at plane point `q` takes `u(g⁻¹·q)`. The output
/// covers the same plane rectangle as the input with `out_dims` pixels.
pub fn warp_image(img: &ImageGrid, g: &Homography, out_dims: (usize, usize)) -> Result<ImageGrid> {
    check_horizon(g, &img.corners())?;
    let (w, h) = out_dims;
    let (x0, y0, x1, y1) = img.bounds();
    let spacing = ((x1 - x0) / w as f64, (y1 - y0) / h as f64);
    let inv = g.inverse();
    let mut data = Vec::with_capacity(w * h);
    for j in 0..h {
        for i in 0..w {
            let q = Point2::new(x0 + (i as f64 + 0.5) * spacing.0, y0 + (j as f64 + 0.5) * spacing.1);
            data.push(apply_homography(&inv, q).map(|p| img.sample(p)).unwrap_or(0.0));
        }
    }
    ImageGrid::with_geometry(w, h, img.origin, spacing, data)
}

/// Whether `g` maps every nonzero pixel cell of `img` into the support rectangle.
pub fn support_stays_inside(img: &ImageGrid, g: &Homography) -> bool {
    let (x0, y0, x1, y1) = img.bounds();
    let (sx, sy) = img.spacing;
    for j in 0..img.height {
        for i in 0..img.width {
            if img.pixel(i, j) == 0.0 {
                continue;
            }
            let c = img.pixel_center(i, j);
            for (dx, dy) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
                let corner = Point2::new(c.x + dx * sx, c.y + dy * sy);
                match apply_homography(g, corner) {
                    Ok(q) if q.x >= x0 && q.x <= x1 && q.y >= y0 && q.y <= y1 => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPolicy {
    /// Integrand uses `|J|` (default).
    Absolute,
    /// Integrand uses the signed closed form.
    Signed,
}

impl fmt::Display for SignPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignPolicy::Absolute => "absolute",
            SignPolicy::Signed => "signed",
        })
    }
}

/// Largest |exponent| accepted in `alpha`/`beta`.
pub const MAX_EXPONENT: i32 = 2;
/// Mixed combinations below `1e-6 · scale⁶` reject the tuple.
pub const MIXED_REJECT_TOL: f64 = 1e-6;
/// Samples per RNG stream.
pub const BLOCK_SAMPLES: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSpec {
    pub n: usize,
    pub alpha: Vec<i32>,
    pub beta: Vec<i32>,
    pub samples: u64,
    pub seed: u64,
    pub sign_policy: SignPolicy,
}

impl IntegralSpec {
    /// All exponents zero.
    pub fn plain(n: usize, samples: u64, seed: u64) -> Self {
        Self { n, alpha: vec![0; n], beta: vec![0; n], samples, seed, sign_policy: SignPolicy::Absolute }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidSpec(format!("n = {} < 4", self.n)));
        }
        if self.alpha.len() != self.n || self.beta.len() != self.n {
            return Err(Error::InvalidSpec("alpha and beta need one exponent per point".into()));
        }
        if self.alpha[..4].iter().chain(&self.beta[..4]).any(|&e| e != 0) {
            return Err(Error::InvalidSpec("exponents of the first four points must be 0".into()));
        }
        if self.alpha.iter().chain(&self.beta).any(|e| e.abs() > MAX_EXPONENT) {
            return Err(Error::InvalidSpec(format!("exponents are limited to |e| <= {MAX_EXPONENT}")));
        }
        if self.samples == 0 {
            return Err(Error::InvalidSpec("samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub accepted_fraction: f64,
    pub samples: u64,
    pub seed: u64,
    pub sign_policy: SignPolicy,
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "value: {:.17e}", self.value)?;
        writeln!(f, "stderr: {:.17e}", self.stderr)?;
        writeln!(f, "samples: {}", self.samples)?;
        writeln!(f, "accepted_fraction: {:.17e}", self.accepted_fraction)?;
        writeln!(f, "seed: {}", self.seed)?;
        writeln!(f, "sign_policy: {}", self.sign_policy)
    }
}

/// Value of the integrand at one tuple, or `None` when the tuple is rejected as
/// degenerate. Tuples with a zero intensity contribute 0 without a geometry test.
pub fn integrand(img: &ImageGrid, spec: &IntegralSpec, cfg: &PointConfig) -> Option<f64> {
    let mut weight = 1.0;
    for p in cfg.points() {
        let u = img.sample(*p);
        if u == 0.0 {
            return Some(0.0);
        }
        weight *= u;
    }
    check_general_position(cfg).ok()?;
    let n = cfg.len();
    let [d123, d124, d134, d234] = base_deltas(cfg);
    let prod = d123 * d124 * d134 * d234;
    let mut value = prod.powi(crate::invariants::closed_form_exponent(n));
    for i in 5..=n {
        let m = mixed_combination(cfg, i).ok()?;
        if !(m.abs() > MIXED_REJECT_TOL * cfg.scale_of(&[1, 2, 3, 4, i]).powi(6)) {
            return None;
        }
        value /= m.powi(3);
        let (a, b) = (spec.alpha[i - 1], spec.beta[i - 1]);
        if a != 0 {
            let d23i = delta_points(cfg.point(2), cfg.point(3), cfg.point(i));
            let d14i = delta_points(cfg.point(1), cfg.point(4), cfg.point(i));
            if a < 0 && is_negligible(d23i, cfg.scale_of(&[2, 3, i]), 2) {
                return None;
            }
            value *= (d134 * d124 * d23i / (d234 * d123 * d14i)).powi(a);
        }
        if b != 0 {
            let d14i = delta_points(cfg.point(1), cfg.point(4), cfg.point(i));
            let d34i = delta_points(cfg.point(3), cfg.point(4), cfg.point(i));
            if b < 0 && is_negligible(d14i, cfg.scale_of(&[1, 4, i]), 2) {
                return None;
            }
            value *= (d234 * d14i / (d124 * d34i)).powi(b);
        }
    }
    if spec.sign_policy == SignPolicy::Absolute {
        value = value.abs();
    }
    let out = value * weight;
    out.is_finite().then_some(out)
}

/// Running statistics of one block, merged with Chan's pairwise update.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BlockStats {
    count: u64,
    accepted: u64,
    mean: f64,
    m2: f64,
}

impl BlockStats {
    const EMPTY: BlockStats = BlockStats { count: 0, accepted: 0, mean: 0.0, m2: 0.0 };

    fn push(&mut self, v: f64, accepted: bool) {
        self.count += 1;
        self.accepted += u64::from(accepted);
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(a: BlockStats, b: BlockStats) -> BlockStats {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        let mean = a.mean + delta * (b.count as f64 / count as f64);
        let m2 = a.m2 + b.m2 + delta * delta * (a.count as f64 * b.count as f64 / count as f64);
        BlockStats { count, accepted: a.accepted + b.accepted, mean, m2 }
    }
}

fn pairwise(stats: &[BlockStats]) -> BlockStats {
    match stats.len() {
        0 => BlockStats::EMPTY,
        1 => stats[0],
        len => {
            let (l, r) = stats.split_at(len / 2);
            BlockStats::merge(pairwise(l), pairwise(r))
        }
    }
}

fn run_block(img: &ImageGrid, spec: &IntegralSpec, block: u64) -> BlockStats {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(block);
    let start = block * BLOCK_SAMPLES;
    let end = (start + BLOCK_SAMPLES).min(spec.samples);
    let (x0, y0, x1, y1) = img.bounds();
    let mut stats = BlockStats::EMPTY;
    let mut pts = Vec::with_capacity(spec.n);
    for _ in start..end {
        pts.clear();
        for _ in 0..spec.n {
            let x = x0 + rng.gen::<f64>() * (x1 - x0);
            let y = y0 + rng.gen::<f64>() * (y1 - y0);
            pts.push(Point2::new(x, y));
        }
        let cfg = PointConfig::new(std::mem::take(&mut pts)).expect("finite samples");
        match integrand(img, spec, &cfg) {
            Some(v) => stats.push(v, true),
            None => stats.push(0.0, false),
        }
        pts = cfg.into_points();
    }
    stats
}

/// Monte-Carlo estimate on a single stream of work.
pub fn integral_invariant(img: &ImageGrid, spec: &IntegralSpec) -> Result<Estimate> {
    integral_invariant_with_workers(img, spec, 1)
}

/// Monte-Carlo estimate with the blocks spread over `workers` threads. The
/// result does not depend on `workers`.
pub fn integral_invariant_with_workers(img: &ImageGrid, spec: &IntegralSpec, workers: usize) -> Result<Estimate> {
    spec.validate()?;
    let blocks = spec.samples.div_ceil(BLOCK_SAMPLES);
    let stats: Vec<BlockStats> = if workers <= 1 {
        (0..blocks).map(|b| run_block(img, spec, b)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::EvaluationError(e.to_string()))?;
        pool.install(|| (0..blocks).into_par_iter().map(|b| run_block(img, spec, b)).collect())
    };
    let total = pairwise(&stats);
    let volume = img.area().powi(spec.n as i32);
    let n = total.count as f64;
    let variance = if total.count > 1 { total.m2 / (n - 1.0) } else { 0.0 };
    let accepted_fraction = total.accepted as f64 / n;
    if accepted_fraction < 0.5 {
        return Err(Error::InsufficientAcceptance { accepted: accepted_fraction });
    }
    Ok(Estimate {
        value: volume * total.mean,
        stderr: volume * (variance / n).sqrt(),
        accepted_fraction,
        samples: spec.samples,
        seed: spec.seed,
        sign_policy: spec.sign_policy,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub original: Estimate,
    pub warped: Estimate,
    pub difference: f64,
    pub combined_err: f64,
    /// `max(3 · combined_err, 0.05 · |original|)`.
    pub threshold: f64,
    pub support_inside: bool,
    pub pass: bool,
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "value: {:.17e}", self.original.value)?;
        writeln!(f, "stderr: {:.17e}", self.original.stderr)?;
        writeln!(f, "warped_value: {:.17e}", self.warped.value)?;
        writeln!(f, "warped_stderr: {:.17e}", self.warped.stderr)?;
        writeln!(f, "difference: {:.17e}", self.difference)?;
        writeln!(f, "combined_err: {:.17e}", self.combined_err)?;
        writeln!(f, "threshold: {:.17e}", self.threshold)?;
        writeln!(f, "samples: {}", self.original.samples)?;
        writeln!(f, "accepted_fraction: {:.17e}", self.original.accepted_fraction)?;
        writeln!(f, "warped_accepted_fraction: {:.17e}", self.warped.accepted_fraction)?;
        writeln!(f, "seed: {}", self.original.seed)?;
        writeln!(f, "warped_seed: {}", self.warped.seed)?;
        writeln!(f, "sign_policy: {}", self.original.sign_policy)?;
        writeln!(f, "support_inside: {}", self.support_inside)?;
        writeln!(f, "pass: {}", self.pass)
    }
}

/// Seed of the warped run, derived from the original one.
pub fn warped_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

/// Estimates the invariant on `img` and on its warp by `g` with independent
/// seeds and compares them.
pub fn invariance_experiment(
    img: &ImageGrid,
    spec: &IntegralSpec,
    g: &Homography,
    workers: usize,
) -> Result<InvarianceReport> {
    let warped_img = warp_image(img, g, (img.width, img.height))?;
    let original = integral_invariant_with_workers(img, spec, workers)?;
    let warped_spec = IntegralSpec { seed: warped_seed(spec.seed), ..spec.clone() };
    let warped = integral_invariant_with_workers(&warped_img, &warped_spec, workers)?;
    let difference = (original.value - warped.value).abs();
    let combined_err = original.stderr.hypot(warped.stderr);
    let threshold = (3.0 * combined_err).max(0.05 * original.value.abs());
    Ok(InvarianceReport {
        original,
        warped,
        difference,
        combined_err,
        threshold,
        support_inside: support_stays_inside(img, g),
        pass: difference < threshold || difference == 0.0,
    })
}
