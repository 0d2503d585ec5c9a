//! Discretized star bodies: spherical grids, sampled radial functions,
//! volumes and dual quermassintegrals, inclusion and convexity tests, and
//! the Banach–Mazur lower bound for radial mean bodies of cubes.

use crate::error::{Error, Result};
use crate::linalg::normalize;
use crate::specfun::{binom_general, harmonic};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

/// One radial evaluation: value may be `+∞` (a divergence marker).
#[derive(Clone, Copy, Debug)]
pub struct RadialValue {
    pub value: f64,
    pub err: f64,
}

impl RadialValue {
    pub fn exact(value: f64) -> Self {
        RadialValue { value, err: 0.0 }
    }
    pub fn infinite() -> Self {
        RadialValue { value: f64::INFINITY, err: f64::INFINITY }
    }
}

/// How the direction grid was built; interpolation and quadrature weights
/// depend on it.
#[derive(Clone, Debug, PartialEq)]
pub enum GridKind {
    /// angles `2πj/m` in the plane, `m` even
    UniformCircle { m: usize },
    /// symmetrized Fibonacci lattice on the 2-sphere
    FibonacciSym { m: usize },
    /// colatitude × longitude product grid on the 2-sphere
    ProductSphere { n_theta: usize, n_phi: usize },
    Custom,
}

/// A star-shaped set sampled on a spherical grid closed under negation.
#[derive(Clone, Debug)]
pub struct StarSample {
    pub n: usize,
    pub grid: GridKind,
    pub dirs: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub err: Vec<f64>,
}

/// Uniform circle grid `θ_j = 2πj/m`, closed under negation for even `m`.
pub fn circle_grid(m: usize) -> Vec<Vec<f64>> {
    assert!(m >= 8 && m % 2 == 0, "grid must be even and at least 8");
    (0..m)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / m as f64;
            vec![a.cos(), a.sin()]
        })
        .collect()
}

/// Fibonacci lattice on the upper hemisphere, symmetrized by appending the
/// antipodes; near-uniform and closed under negation.
pub fn fibonacci_sym_grid(m: usize) -> Vec<Vec<f64>> {
    assert!(m >= 8 && m % 2 == 0);
    let half = m / 2;
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut dirs = Vec::with_capacity(m);
    for k in 0..half {
        // z stratified over (0, 1): upper hemisphere only
        let z = (k as f64 + 0.5) / half as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = 2.0 * PI * (k as f64 / golden).fract();
        dirs.push(vec![r * phi.cos(), r * phi.sin(), z]);
    }
    for k in 0..half {
        let d = &dirs[k];
        dirs.push(vec![-d[0], -d[1], -d[2]]);
    }
    dirs
}

/// Colatitude×longitude product grid (midpoint colatitudes), closed under
/// negation when `n_phi` is even.
pub fn product_sphere_grid(n_theta: usize, n_phi: usize) -> Vec<Vec<f64>> {
    assert!(n_phi % 2 == 0);
    let mut dirs = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let th = PI * (i as f64 + 0.5) / n_theta as f64;
        for j in 0..n_phi {
            let ph = 2.0 * PI * j as f64 / n_phi as f64;
            dirs.push(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
        }
    }
    dirs
}

/// Evaluate a radial function over a grid. Per-direction failures become
/// infinity markers with infinite error, never a hard failure of the sample.
pub fn sample_star<F>(n: usize, grid: GridKind, eval: F) -> StarSample
where
    F: Fn(&[f64]) -> Result<RadialValue>,
{
    let dirs = match &grid {
        GridKind::UniformCircle { m } => circle_grid(*m),
        GridKind::FibonacciSym { m } => fibonacci_sym_grid(*m),
        GridKind::ProductSphere { n_theta, n_phi } => product_sphere_grid(*n_theta, *n_phi),
        GridKind::Custom => panic!("custom grids are built directly"),
    };
    let mut radii = Vec::with_capacity(dirs.len());
    let mut err = Vec::with_capacity(dirs.len());
    for d in &dirs {
        match eval(d) {
            Ok(v) => {
                radii.push(v.value);
                err.push(v.err);
            }
            Err(_) => {
                radii.push(f64::INFINITY);
                err.push(f64::INFINITY);
            }
        }
    }
    StarSample { n, grid, dirs, radii, err }
}

impl StarSample {
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn has_markers(&self) -> bool {
        self.radii.iter().any(|r| !r.is_finite())
    }

    fn same_grid(&self, other: &StarSample) -> bool {
        self.len() == other.len()
            && self
                .dirs
                .iter()
                .zip(&other.dirs)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12))
    }

    /// Periodic Catmull-Rom interpolation of the radius at an arbitrary
    /// direction (uniform circle grids only).
    pub fn interpolate_2d(&self, theta: &[f64]) -> Result<f64> {
        let GridKind::UniformCircle { m } = self.grid else {
            return Err(Error::Unsupported("interpolation needs a uniform circle grid".into()));
        };
        let ang = theta[1].atan2(theta[0]).rem_euclid(2.0 * PI);
        let t = ang / (2.0 * PI) * m as f64;
        let j = t.floor() as usize % m;
        let u = t - t.floor();
        let idx = |k: isize| -> f64 { self.radii[((j as isize + k).rem_euclid(m as isize)) as usize] };
        let (p0, p1, p2, p3) = (idx(-1), idx(0), idx(1), idx(2));
        if !(p0.is_finite() && p1.is_finite() && p2.is_finite() && p3.is_finite()) {
            return Err(Error::Resolution("interpolation across an infinite radius".into()));
        }
        Ok(0.5
            * (2.0 * p1
                + (-p0 + p2) * u
                + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u
                + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u))
    }

    /// Bilinear interpolation on a product sphere grid.
    pub fn interpolate_3d(&self, theta: &[f64]) -> Result<f64> {
        let GridKind::ProductSphere { n_theta, n_phi } = self.grid else {
            return Err(Error::Unsupported("3-D interpolation needs a product grid".into()));
        };
        let d = normalize(theta);
        let col = d[2].clamp(-1.0, 1.0).acos();
        let lon = d[1].atan2(d[0]).rem_euclid(2.0 * PI);
        let ti = col / PI * n_theta as f64 - 0.5;
        let pj = lon / (2.0 * PI) * n_phi as f64;
        let i0 = ti.floor();
        let j0 = pj.floor();
        let (du, dv) = (ti - i0, pj - j0);
        let at = |i: isize, j: isize| -> f64 {
            // clamp colatitude rows, wrap longitude
            let i = i.clamp(0, n_theta as isize - 1) as usize;
            let j = j.rem_euclid(n_phi as isize) as usize;
            self.radii[i * n_phi + j]
        };
        let i0 = i0 as isize;
        let j0 = j0 as isize;
        let v = at(i0, j0) * (1.0 - du) * (1.0 - dv)
            + at(i0 + 1, j0) * du * (1.0 - dv)
            + at(i0, j0 + 1) * (1.0 - du) * dv
            + at(i0 + 1, j0 + 1) * du * dv;
        if !v.is_finite() {
            return Err(Error::Resolution("interpolation across an infinite radius".into()));
        }
        Ok(v)
    }

    /// Largest angular gap of the grid, radians (used for resolution checks).
    pub fn angular_gap(&self) -> f64 {
        match self.grid {
            GridKind::UniformCircle { m } => 2.0 * PI / m as f64,
            GridKind::FibonacciSym { m } => (4.0 * PI / m as f64).sqrt() * 1.5,
            GridKind::ProductSphere { n_theta, n_phi } => {
                (PI / n_theta as f64).max(2.0 * PI / n_phi as f64)
            }
            GridKind::Custom => f64::INFINITY,
        }
    }
}

/// Outcome of a star volume computation.
#[derive(Clone, Copy, Debug)]
pub struct VolumeResult {
    pub value: f64,
    pub err: f64,
    /// true when infinite radii were skipped without an envelope model
    pub lower_bound_only: bool,
}

/// Local model for the volume integrand `ρⁿ` next to an infinite-radius
/// marker: `a·|Δθ|^{-exponent} + b`, with `exponent = 0` meaning the
/// logarithmic case `a·ln(1/|Δθ|) + b`. Only integrable profiles
/// (`exponent < 1`) are meaningful.
#[derive(Clone, Copy, Debug)]
pub struct VolumeEnvelope {
    pub exponent: f64,
}

/// `Vol_n(M) = (1/n) ∫ ρ_M^n dθ` by periodic trapezoid (plane) or
/// equal-weight sphere averages.
pub fn star_volume(m: &StarSample) -> VolumeResult {
    star_volume_enveloped(m, None)
}

pub fn star_volume_enveloped(m: &StarSample, envelope: Option<VolumeEnvelope>) -> VolumeResult {
    let n = m.n as f64;
    let count = m.len() as f64;
    let weight = match m.grid {
        GridKind::UniformCircle { .. } => 2.0 * PI / count,
        _ => 4.0 * PI / count,
    };
    let mut acc = 0.0;
    let mut err = 0.0;
    let mut lower_bound_only = false;
    for (i, (&r, &e)) in m.radii.iter().zip(&m.err).enumerate() {
        if r.is_finite() {
            acc += r.powf(n);
            if e.is_finite() && r > 0.0 {
                err += n * r.powf(n - 1.0) * e;
            }
            continue;
        }
        let Some(env) = envelope else {
            lower_bound_only = true;
            continue;
        };
        // fit the local model from the nearest finite neighbors (plane only)
        let GridKind::UniformCircle { m: grid_m } = m.grid else {
            lower_bound_only = true;
            continue;
        };
        let h = 2.0 * PI / grid_m as f64;
        let get = |k: isize| -> Option<f64> {
            let idx = ((i as isize + k).rem_euclid(grid_m as isize)) as usize;
            let v = m.radii[idx];
            v.is_finite().then(|| v.powf(n))
        };
        let (Some(y1a), Some(y1b), Some(y2a), Some(y2b)) =
            (get(1), get(-1), get(2), get(-2))
        else {
            lower_bound_only = true;
            continue;
        };
        let y1 = 0.5 * (y1a + y1b);
        let y2 = 0.5 * (y2a + y2b);
        let gamma = env.exponent;
        let panel = if gamma.abs() < 1e-12 {
            // ρⁿ ≈ a ln(1/t) + b
            let a = (y1 - y2) / std::f64::consts::LN_2;
            let b = y1 + a * h.ln();
            a * h * (1.0 + (2.0 / h).ln()) + b * h
        } else {
            let a = (y1 - y2) / (h.powf(-gamma) - (2.0 * h).powf(-gamma));
            let b = y1 - a * h.powf(-gamma);
            2.0 * (a * (0.5 * h).powf(1.0 - gamma) / (1.0 - gamma) + b * 0.5 * h)
        };
        // panel replaces the trapezoid cell r^n * h
        acc += panel / weight;
        err += 0.3 * panel.abs() / weight;
    }
    VolumeResult { value: weight * acc / n, err: weight * err / n, lower_bound_only }
}

/// Dual quermassintegral `W̃_{n-p}(M) = (1/n) ∫ ρ_M^p dθ`.
pub fn dual_quermass(m: &StarSample, p: f64) -> f64 {
    let count = m.len() as f64;
    let weight = match m.grid {
        GridKind::UniformCircle { .. } => 2.0 * PI / count,
        _ => 4.0 * PI / count,
    };
    weight * m.radii.iter().map(|r| r.powf(p)).sum::<f64>() / m.n as f64
}

/// Dual mixed volume `Ṽ_{n-p}(D, M) = (1/n) ∫ ρ_D^p ρ_M^{n-p} dθ`
/// on a shared grid.
pub fn dual_mixed_volume(d: &StarSample, m: &StarSample, p: f64) -> Result<f64> {
    if !d.same_grid(m) {
        return Err(Error::GridMismatch);
    }
    let count = d.len() as f64;
    let weight = match d.grid {
        GridKind::UniformCircle { .. } => 2.0 * PI / count,
        _ => 4.0 * PI / count,
    };
    let n = d.n as f64;
    let acc: f64 = d
        .radii
        .iter()
        .zip(&m.radii)
        .map(|(rd, rm)| rd.powf(p) * rm.powf(n - p))
        .sum();
    Ok(weight * acc / n)
}

#[derive(Clone, Debug)]
pub struct InclusionReport {
    pub included: bool,
    /// most-violating signed excess `ρ_A - ρ_B` over the grid
    pub worst_margin: f64,
    pub worst_dir: Vec<f64>,
}

/// Pointwise inclusion `A ⊆ B` on a shared grid: `ρ_A ≤ ρ_B + tol`.
pub fn inclusion_check(a: &StarSample, b: &StarSample, tol: f64) -> Result<InclusionReport> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch);
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_dir = a.dirs[0].clone();
    for ((ra, rb), d) in a.radii.iter().zip(&b.radii).zip(&a.dirs) {
        let margin = match (ra.is_finite(), rb.is_finite()) {
            (true, true) => ra - rb,
            (true, false) => f64::NEG_INFINITY, // anything fits under +∞
            (false, true) => f64::INFINITY,
            (false, false) => 0.0,
        };
        if margin > worst {
            worst = margin;
            worst_dir = d.clone();
        }
    }
    Ok(InclusionReport { included: worst <= tol, worst_margin: worst, worst_dir })
}

#[derive(Clone, Debug)]
pub struct ConvexityReport {
    pub convex: bool,
    pub min_curvature_proxy: f64,
    pub argmin_angle: f64,
    /// set when infinite radii preclude the test
    pub not_applicable: bool,
    pub hull_gap: f64,
}

/// Planar convexity through the polar curvature expression
/// `ρ² + 2ρ′² - ρρ″ ≥ 0`, second-order differences Richardson-extrapolated
/// over strides h and 2h, cross-validated against the convex hull of the
/// sampled boundary.
pub fn convexity_check_2d(m: &StarSample, tol: f64) -> Result<ConvexityReport> {
    let GridKind::UniformCircle { m: grid_m } = m.grid else {
        return Err(Error::Unsupported("convexity test needs a circle grid".into()));
    };
    if grid_m < 256 {
        return Err(Error::Resolution("convexity test needs a grid of 256 or more".into()));
    }
    if m.has_markers() {
        return Ok(ConvexityReport {
            convex: false,
            min_curvature_proxy: f64::NAN,
            argmin_angle: f64::NAN,
            not_applicable: true,
            hull_gap: f64::NAN,
        });
    }
    let h = 2.0 * PI / grid_m as f64;
    let r = &m.radii;
    let at = |j: isize| r[(j.rem_euclid(grid_m as isize)) as usize];
    let mut min_proxy = f64::INFINITY;
    let mut argmin = 0.0;
    let mut max_disc = 0.0f64;
    for j in 0..grid_m as isize {
        let proxy_with = |s: isize| {
            let hs = h * s as f64;
            let d1 = (at(j + s) - at(j - s)) / (2.0 * hs);
            let d2 = (at(j + s) - 2.0 * at(j) + at(j - s)) / (hs * hs);
            let rho = at(j);
            rho * rho + 2.0 * d1 * d1 - rho * d2
        };
        let p1 = proxy_with(1);
        let p2 = proxy_with(2);
        let proxy = (4.0 * p1 - p2) / 3.0;
        let disc = (p1 - p2).abs() / 3.0 + 1e-12 * at(j) * at(j);
        max_disc = max_disc.max(disc);
        if proxy < min_proxy {
            min_proxy = proxy;
            argmin = h * j as f64;
        }
    }
    // hull cross-validation
    let pts: Vec<[f64; 2]> = m
        .dirs
        .iter()
        .zip(r)
        .map(|(d, rho)| [rho * d[0], rho * d[1]])
        .collect();
    let hull = convex_hull(&pts);
    let scale = r.iter().cloned().fold(0.0f64, f64::max);
    let mut hull_gap = 0.0f64;
    for p in &pts {
        hull_gap = hull_gap.max(distance_outside_hull(&hull, p));
    }
    let proxy_ok = min_proxy >= -10.0 * max_disc;
    let hull_ok = hull_gap <= tol.max(1e-9) * scale;
    Ok(ConvexityReport {
        convex: proxy_ok && hull_ok,
        min_curvature_proxy: min_proxy,
        argmin_angle: argmin,
        not_applicable: false,
        hull_gap,
    })
}

/// Monotone-chain convex hull, counterclockwise without repetition.
pub fn convex_hull(pts: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = pts.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    if p.len() < 3 {
        return p;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::with_capacity(p.len());
    for &pt in &p {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], &pt) <= 0.0
        {
            lower.pop();
        }
        lower.push(pt);
    }
    let mut upper: Vec<[f64; 2]> = Vec::with_capacity(p.len());
    for &pt in p.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], &pt) <= 0.0
        {
            upper.pop();
        }
        upper.push(pt);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// How far `p` sits outside the hull (0 when inside).
fn distance_outside_hull(hull: &[[f64; 2]], p: &[f64; 2]) -> f64 {
    let m = hull.len();
    if m < 3 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..m {
        let a = hull[i];
        let b = hull[(i + 1) % m];
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let len = (ex * ex + ey * ey).sqrt();
        if len < 1e-300 {
            continue;
        }
        // signed distance to the hull edge, positive outside (hull is CCW)
        let d = (-(ey) * (p[0] - a[0]) + ex * (p[1] - a[1])) / len;
        let d = -d;
        if d > worst {
            // outside this edge: candidate violation
            worst = d;
        }
    }
    worst
}

/// Lower bound `√n ((p+1)/C(n+p,n))^{1/p} ≤ d_BM(R_p Q_n, B_2^n)`;
/// the limit at `p = 0` is `√n · e^{1-H_n}`.
pub fn bm_lower_cube(n: u32, p: f64) -> f64 {
    let root = (n as f64).sqrt();
    if p == 0.0 {
        root * (1.0 - harmonic(n)).exp()
    } else {
        root * ((p + 1.0) / binom_general(n as f64, p)).powf(1.0 / p)
    }
}

/// Serialize a star sample as CSV: `dir_0,...,dir_{n-1},rho,err_est`,
/// seventeen significant digits, `inf` for divergence markers.
pub fn write_csv<W: Write>(m: &StarSample, w: &mut W) -> std::io::Result<()> {
    let header: Vec<String> = (0..m.n).map(|i| format!("dir_{i}")).collect();
    writeln!(w, "{},rho,err_est", header.join(","))?;
    let fmt = |x: f64| {
        if x.is_finite() {
            format!("{x:.16e}")
        } else {
            "inf".to_string()
        }
    };
    for ((d, r), e) in m.dirs.iter().zip(&m.radii).zip(&m.err) {
        let cols: Vec<String> = d.iter().map(|x| fmt(*x)).collect();
        writeln!(w, "{},{},{}", cols.join(","), fmt(*r), fmt(*e))?;
    }
    Ok(())
}

/// Parse the CSV star-sample format back (grid kind becomes `Custom` unless
/// the directions match a uniform circle grid bit-for-bit).
pub fn read_csv<R: BufRead>(r: R) -> Result<StarSample> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty csv".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[cols.len() - 2] != "rho" {
        return Err(Error::Parse("expected dir_*,rho,err_est header".into()));
    }
    let n = cols.len() - 2;
    let mut dirs = Vec::new();
    let mut radii = Vec::new();
    let mut err = Vec::new();
    let parse = |s: &str| -> Result<f64> {
        if s == "inf" {
            Ok(f64::INFINITY)
        } else {
            s.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))
        }
    };
    for line in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<&str> = line.split(',').collect();
        if vals.len() != n + 2 {
            return Err(Error::Parse(format!("row has {} columns, expected {}", vals.len(), n + 2)));
        }
        let d: Result<Vec<f64>> = vals[..n].iter().map(|s| parse(s)).collect();
        dirs.push(d?);
        radii.push(parse(vals[n])?);
        err.push(parse(vals[n + 1])?);
    }
    // recognize the uniform circle grid so interpolation keeps working
    let m = dirs.len();
    let grid = if n == 2 && m >= 8 && m % 2 == 0 {
        let reference = circle_grid(m);
        let matches = reference
            .iter()
            .zip(&dirs)
            .all(|(a, b)| (a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
        if matches {
            GridKind::UniformCircle { m }
        } else {
            GridKind::Custom
        }
    } else {
        GridKind::Custom
    };
    Ok(StarSample { n, grid, dirs, radii, err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::omega;

    fn unit_circle_sample(m: usize) -> StarSample {
        sample_star(2, GridKind::UniformCircle { m }, |_| Ok(RadialValue::exact(1.0)))
    }

    #[test]
    fn grids_closed_under_negation() {
        for dirs in [circle_grid(16), fibonacci_sym_grid(64)] {
            for d in &dirs {
                let neg: Vec<f64> = d.iter().map(|x| -x).collect();
                let found = dirs
                    .iter()
                    .any(|e| e.iter().zip(&neg).all(|(a, b)| (a - b).abs() < 1e-12));
                assert!(found, "grid not symmetric at {d:?}");
            }
        }
        let prod = product_sphere_grid(8, 16);
        for d in &prod {
            let neg: Vec<f64> = d.iter().map(|x| -x).collect();
            assert!(prod
                .iter()
                .any(|e| e.iter().zip(&neg).all(|(a, b)| (a - b).abs() < 1e-12)));
        }
    }

    #[test]
    fn circle_volume_and_quermass() {
        let s = unit_circle_sample(512);
        let v = star_volume(&s);
        assert!((v.value - PI).abs() < 1e-10, "got {}", v.value);
        assert!(!v.lower_bound_only);
        // W̃_{n-p}(B) = ω_n for any p when ρ ≡ 1
        for &p in &[-0.5, 0.7, 2.0] {
            assert!((dual_quermass(&s, p) - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_volume_fibonacci() {
        let s = sample_star(3, GridKind::FibonacciSym { m: 4096 }, |_| {
            Ok(RadialValue::exact(1.0))
        });
        let v = star_volume(&s);
        assert!((v.value - omega(3.0)).abs() < 1e-10 * omega(3.0));
    }

    #[test]
    fn dual_mixed_volume_endpoints() {
        // Ṽ_n(D,M) = Vol(M), Ṽ_0(D,M) = Vol(D)
        let d = sample_star(2, GridKind::UniformCircle { m: 1024 }, |_| {
            Ok(RadialValue::exact(2.0))
        });
        let m = sample_star(2, GridKind::UniformCircle { m: 1024 }, |dir| {
            Ok(RadialValue::exact(1.0 + 0.3 * dir[0] * dir[0]))
        });
        let vol_m = star_volume(&m).value;
        let vol_d = star_volume(&d).value;
        assert!((dual_mixed_volume(&d, &m, 0.0).unwrap() - vol_m).abs() < 1e-10);
        assert!((dual_mixed_volume(&d, &m, 2.0).unwrap() - vol_d).abs() < 1e-10);
        // grid mismatch is an error
        let other = unit_circle_sample(512);
        assert!(matches!(dual_mixed_volume(&d, &other, 1.0), Err(Error::GridMismatch)));
    }

    #[test]
    fn dual_mixed_holder_inequality() {
        // Vol(D)^{p/n} Vol(M)^{(n-p)/n} ≥ Ṽ_{n-p}(D,M) for 0 < p < n
        let mut state = 3u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10 {
            let (a, b, c, e) = (0.5 + rnd(), rnd(), 0.5 + rnd(), rnd());
            let d = sample_star(2, GridKind::UniformCircle { m: 512 }, |dir| {
                Ok(RadialValue::exact(a + b * dir[0] * dir[0]))
            });
            let m = sample_star(2, GridKind::UniformCircle { m: 512 }, |dir| {
                Ok(RadialValue::exact(c + e * dir[1] * dir[1]))
            });
            for &p in &[0.5, 1.0, 1.5] {
                let lhs = star_volume(&d).value.powf(p / 2.0)
                    * star_volume(&m).value.powf((2.0 - p) / 2.0);
                let rhs = dual_mixed_volume(&d, &m, p).unwrap();
                assert!(lhs >= rhs - 1e-9, "p={p}: {lhs} < {rhs}");
            }
        }
    }

    #[test]
    fn inclusion_reports_margins() {
        let a = unit_circle_sample(64);
        let b = sample_star(2, GridKind::UniformCircle { m: 64 }, |_| {
            Ok(RadialValue::exact(1.1))
        });
        let r = inclusion_check(&a, &b, 1e-12).unwrap();
        assert!(r.included);
        assert!((r.worst_margin + 0.1).abs() < 1e-12);
        let r = inclusion_check(&b, &a, 1e-12).unwrap();
        assert!(!r.included);
        assert!((r.worst_margin - 0.1).abs() < 1e-12);
        // identical samples: zero margin
        let r = inclusion_check(&a, &a, 0.0).unwrap();
        assert!(r.included && r.worst_margin.abs() < 1e-15);
    }

    #[test]
    fn convexity_circle_and_ellipses() {
        let s = unit_circle_sample(512);
        let r = convexity_check_2d(&s, 1e-7).unwrap();
        assert!(r.convex, "circle should be convex: {r:?}");
        assert!(r.min_curvature_proxy > 0.9);
        // random centered ellipses stay convex
        let mut state = 17u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let (a, b, phi) = (0.5 + 2.0 * rnd(), 0.5 + 2.0 * rnd(), PI * rnd());
            let s = sample_star(2, GridKind::UniformCircle { m: 512 }, |d| {
                let c = (d[1].atan2(d[0]) - phi).cos();
                let sn = (d[1].atan2(d[0]) - phi).sin();
                let rho = 1.0 / ((c / a).powi(2) + (sn / b).powi(2)).sqrt();
                Ok(RadialValue::exact(rho))
            });
            let r = convexity_check_2d(&s, 1e-7).unwrap();
            assert!(r.convex, "ellipse a={a} b={b}: {r:?}");
        }
        // a plainly nonconvex star
        let s = sample_star(2, GridKind::UniformCircle { m: 512 }, |d| {
            let ang = d[1].atan2(d[0]);
            Ok(RadialValue::exact(1.0 + 0.4 * (4.0 * ang).cos()))
        });
        let r = convexity_check_2d(&s, 1e-7).unwrap();
        assert!(!r.convex);
        // infinite radii make the test not applicable
        let s = sample_star(2, GridKind::UniformCircle { m: 512 }, |d| {
            if d[0].abs() > 0.999999 {
                Ok(RadialValue::infinite())
            } else {
                Ok(RadialValue::exact(1.0))
            }
        });
        assert!(convexity_check_2d(&s, 1e-7).unwrap().not_applicable);
    }

    #[test]
    fn bm_lower_bound_values() {
        // frozen: n=2, p=1 → √2·(2/3); n=4, p=3 → 2 (4/35)^{1/3}
        assert!((bm_lower_cube(2, 1.0) - 2.0f64.sqrt() * 2.0 / 3.0).abs() < 1e-13);
        assert!((bm_lower_cube(4, 3.0) - 2.0 * (4.0f64 / 35.0).powf(1.0 / 3.0)).abs() < 1e-13);
        // John: the bound never exceeds √n
        for n in 1..=4u32 {
            for &p in &[0.0, 0.5, 1.0, 2.0, 5.0] {
                assert!(bm_lower_cube(n, p) <= (n as f64).sqrt() + 1e-12);
            }
        }
        // p → 0 limit agrees with the 0 branch
        assert!((bm_lower_cube(3, 1e-8) - bm_lower_cube(3, 0.0)).abs() < 1e-6);
    }

    #[test]
    fn csv_round_trip_preserves_bits() {
        let s = sample_star(2, GridKind::UniformCircle { m: 16 }, |d| {
            if d[0] > 0.99 {
                Ok(RadialValue::infinite())
            } else {
                Ok(RadialValue { value: 1.0 + d[1] * 0.123456789012345, err: 1e-9 })
            }
        });
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let back = read_csv(std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(back.grid, GridKind::UniformCircle { m: 16 });
        for i in 0..s.len() {
            assert!(
                s.radii[i] == back.radii[i]
                    || (s.radii[i].is_infinite() && back.radii[i].is_infinite()),
                "radius {i} not preserved"
            );
            assert_eq!(s.dirs[i][0].to_bits(), back.dirs[i][0].to_bits());
        }
        // star volume agrees bit for bit after the round trip
        let v1 = star_volume_enveloped(&s, Some(VolumeEnvelope { exponent: 0.0 }));
        let v2 = star_volume_enveloped(&back, Some(VolumeEnvelope { exponent: 0.0 }));
        assert_eq!(v1.value.to_bits(), v2.value.to_bits());
    }

    #[test]
    fn envelope_assisted_volume_log_model() {
        // ρ² = ln(1/|Δθ|) + 2 near two antipodal markers; compare against a
        // dense quadrature of the same profile
        let m = 1024usize;
        let profile = |ang: f64| -> f64 {
            let d = (ang.rem_euclid(PI)).min(PI - ang.rem_euclid(PI));
            (2.0 + (1.0 / d).ln()).sqrt()
        };
        let s = sample_star(2, GridKind::UniformCircle { m }, |d| {
            let ang = d[1].atan2(d[0]).rem_euclid(2.0 * PI);
            let dist = (ang.rem_euclid(PI)).min(PI - ang.rem_euclid(PI));
            if dist < 1e-12 {
                Ok(RadialValue::infinite())
            } else {
                Ok(RadialValue::exact(profile(ang)))
            }
        });
        assert!(s.has_markers());
        let v = star_volume_enveloped(&s, Some(VolumeEnvelope { exponent: 0.0 }));
        assert!(!v.lower_bound_only);
        // reference: (1/2)∫ρ² with the log singularity integrated finely
        let fine = 1_000_000;
        let mut acc = 0.0;
        for k in 0..fine {
            let ang = 2.0 * PI * (k as f64 + 0.5) / fine as f64;
            acc += profile(ang).powi(2);
        }
        let reference = acc * (2.0 * PI / fine as f64) / 2.0;
        assert!(
            (v.value - reference).abs() < 5e-3 * reference,
            "{} vs {reference}",
            v.value
        );
        // without the envelope the value is flagged as a lower bound
        let bare = star_volume(&s);
        assert!(bare.lower_bound_only && bare.value < v.value);
    }

    #[test]
    fn interpolation_accuracy() {
        let s = sample_star(2, GridKind::UniformCircle { m: 1024 }, |d| {
            Ok(RadialValue::exact(2.0 + 0.5 * d[0] + 0.25 * d[1] * d[1]))
        });
        for &ang in &[0.123f64, 1.9, 4.4] {
            let th = [ang.cos(), ang.sin()];
            let exact = 2.0 + 0.5 * th[0] + 0.25 * th[1] * th[1];
            let got = s.interpolate_2d(&th).unwrap();
            assert!((got - exact).abs() < 1e-8, "{got} vs {exact}");
        }
        let s3 = sample_star(3, GridKind::ProductSphere { n_theta: 128, n_phi: 256 }, |d| {
            Ok(RadialValue::exact(1.0 + 0.2 * d[2] * d[2]))
        });
        let th = normalize(&[0.4, -0.3, 0.85]);
        let exact = 1.0 + 0.2 * th[2] * th[2];
        assert!((s3.interpolate_3d(&th).unwrap() - exact).abs() < 1e-4);
    }
}
