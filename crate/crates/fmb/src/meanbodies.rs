//! Radial-function evaluators for the body families built from a convex
//! body `K`:
//!
//! - radial p-th mean bodies `R_p K` (Mellin means of the covariogram
//!   along rays, three branches over `p > -1`),
//! - Fourier p-th mean bodies `F_p K` (Mellin integrals of `|χ̂_K|²`),
//! - polar p-th mean zonoids `Z°_p K` (inverse moments of the normalized
//!   covariogram),
//! - polar L^q centroid bodies of star samples and one-dimensional
//!   densities,
//! - intersection bodies of star samples in dimensions two and three.
//!
//! Ray integrals exploit that the covariogram is piecewise polynomial along
//! rays for boxes and polygons: panels split at the exact breakpoints, the
//! panel touching zero integrates monomial-by-monomial against the
//! fractional weight, everything else is Gauss–Kronrod.

use crate::bodies::{difference_body_radial, sample_uniform, BodySpec};
use crate::covariogram::{covariogram_seeded, ray_breakpoints};
use crate::error::{Error, Result};
use crate::fourier::{mellin_ghat, MellinResult};
use crate::linalg::{dot, norm, normalize, Mat};
use crate::quad::{adaptive_segmented, gk15, ray_power_integral, QuadConfig, RayWeight};
use crate::specfun::{cos_half_pi, digamma, gamma, ln_gamma};
use crate::starops::{sample_star, star_volume, GridKind, RadialValue, StarSample};
use std::f64::consts::PI;

/// Which family a [`RadialEvaluator`] evaluates.
#[derive(Clone, Debug)]
pub enum Family {
    /// `R_p K`
    RadialMean { p: f64 },
    /// `F_p K` through the chosen computation route
    FourierMean { p: f64, route: FourierRoute },
    /// `Z°_p K`
    PolarMeanZonoid { p: f64 },
    /// `Γ°_q K` of the body itself
    PolarCentroid { q: f64 },
    /// `I K`, plane and space only
    Intersection,
    /// the body's own radial function
    Body,
    /// the difference body `DK`
    Difference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierRoute {
    /// Mellin integral of `ĝ` (the definition)
    Direct,
    /// `F_p K = (Γ(1+p) cos(πp/2) Vol K)^{1/p} Z°_{-p} K`, `p ∈ (0,1)`
    ZRoute,
    /// `F_1 K = π I(R_{n-1} K)`
    IRoute,
}

/// A body/family/order bundle evaluating `ρ(θ)` on demand.
#[derive(Clone, Debug)]
pub struct RadialEvaluator {
    pub body: BodySpec,
    pub family: Family,
    pub quad: QuadConfig,
}

impl RadialEvaluator {
    pub fn new(body: BodySpec, family: Family, quad: QuadConfig) -> Self {
        RadialEvaluator { body, family, quad }
    }

    pub fn eval(&self, theta: &[f64]) -> Result<RadialValue> {
        match &self.family {
            Family::RadialMean { p } => radial_r(&self.body, *p, theta, &self.quad),
            Family::FourierMean { p, route } => {
                radial_f(&self.body, *p, theta, &self.quad, *route)
            }
            Family::PolarMeanZonoid { p } => radial_z(&self.body, *p, theta, &self.quad),
            Family::PolarCentroid { q } => gamma_polar_body(&self.body, *q, theta, &self.quad),
            Family::Intersection => intersection_of_body(&self.body, theta, &self.quad),
            Family::Body => Ok(RadialValue::exact(self.body.radial(theta))),
            Family::Difference => Ok(RadialValue::exact(difference_body_radial(&self.body, theta))),
        }
    }

    /// Sample onto the canonical grid for the body's dimension.
    pub fn sample(&self, grid_size: usize) -> StarSample {
        let n = self.body.dim();
        let grid = match n {
            2 => GridKind::UniformCircle { m: grid_size },
            3 => GridKind::FibonacciSym { m: grid_size },
            _ => panic!("sampling supports n = 2 or 3"),
        };
        sample_star(n, grid, |d| self.eval(d))
    }
}

// ---------------------------------------------------------------- ray work

/// `∫_0^∞ f(g(rθ)) r^α (ln r)^k dr` specialised to `f = identity`:
/// covariogram against a power (and optionally log) weight along a ray.
fn g_ray_integral(
    body: &BodySpec,
    theta: &[f64],
    alpha: f64,
    weight: RayWeight,
    quad: &QuadConfig,
) -> (f64, f64) {
    let breaks = ray_breakpoints(body, theta);
    let rmax = *breaks.last().unwrap();
    if rmax <= 0.0 {
        return (0.0, 0.0);
    }
    let g = |r: f64| covariogram_seeded(body, &scale_dir(theta, r), quad.mc_samples, quad.seed).value;
    let degree = match body {
        BodySpec::Box { half_widths } => Some(half_widths.len()),
        BodySpec::Polygon { .. } => Some(2),
        BodySpec::Simplex { .. } if body.dim() == 2 => Some(2),
        _ => None,
    };
    match degree {
        Some(d) => {
            // first panel: exact monomial integration of the polynomial piece
            let b1 = breaks[0];
            let (mut total, mut err) = poly_panel_power(&g, d, 0.0, b1, alpha, weight);
            // remaining panels never touch zero; GK panels are spectral there
            let mut prev = b1;
            for &b in &breaks[1..] {
                if b <= prev {
                    continue;
                }
                let f = |r: f64| {
                    let w = match weight {
                        RayWeight::Power => r.powf(alpha),
                        RayWeight::PowerLog => r.powf(alpha) * r.ln(),
                    };
                    g(r) * w
                };
                let (v, e) = adaptive_segmented(&f, &[prev, b], quad.tol * 0.25);
                total += v;
                err += e;
                prev = b;
            }
            (total, err)
        }
        None => ray_power_integral(&g, alpha, weight, &breaks, quad.tol),
    }
}

fn scale_dir(theta: &[f64], r: f64) -> Vec<f64> {
    theta.iter().map(|t| t * r).collect()
}

/// Exact `∫_0^b poly(r) r^α (ln r)^k dr` for a polynomial sampled at
/// Chebyshev nodes of `[0, b]` (the covariogram piece is a polynomial of
/// known degree there).
fn poly_panel_power(
    g: &dyn Fn(f64) -> f64,
    degree: usize,
    a: f64,
    b: f64,
    alpha: f64,
    weight: RayWeight,
) -> (f64, f64) {
    debug_assert!(a == 0.0);
    let m = degree + 1;
    let nodes: Vec<f64> = (0..m)
        .map(|k| {
            let t = (PI * (k as f64 + 0.5) / m as f64).cos();
            0.5 * b * (1.0 + t)
        })
        .collect();
    let vals: Vec<f64> = nodes.iter().map(|&r| g(r)).collect();
    // monomial coefficients by solving the small Vandermonde system
    let rows: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&r| (0..m).map(|k| r.powi(k as i32)).collect())
        .collect();
    let mat = Mat::from_rows(&rows).expect("square");
    let Ok(inv) = mat.inverse() else {
        // degenerate panel; integrate numerically instead
        let f = |r: f64| {
            let w = match weight {
                RayWeight::Power => r.powf(alpha),
                RayWeight::PowerLog => r.powf(alpha) * r.ln(),
            };
            g(r) * w
        };
        return ray_power_integral(&f, 0.0, RayWeight::Power, &[b], 1e-10);
    };
    let coeffs = inv.matvec(&vals);
    let mut total = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        let e = alpha + k as f64 + 1.0;
        let term = match weight {
            RayWeight::Power => c * b.powf(e) / e,
            RayWeight::PowerLog => c * b.powf(e) / e * (b.ln() - 1.0 / e),
        };
        total += term;
    }
    (total, 1e-14 * total.abs() + 1e-300)
}

// ---------------------------------------------------------------- R_p K

/// `ρ_{R_p K}(θ)` for `p > -1`.
pub fn radial_r(body: &BodySpec, p: f64, theta: &[f64], quad: &QuadConfig) -> Result<RadialValue> {
    if p <= -1.0 {
        return Err(Error::Domain(format!("radial mean bodies need p > -1, got {p}")));
    }
    let vol = body.volume();
    let rmax = difference_body_radial(body, theta);
    if p > 0.0 {
        let (i, e) = g_ray_integral(body, theta, p - 1.0, RayWeight::Power, quad);
        let val = (p * i / vol).powf(1.0 / p);
        let err = if i > 0.0 { val / p * (e / i) } else { 0.0 };
        Ok(RadialValue { value: val, err })
    } else if p == 0.0 {
        // exp(∫ (-∂_r g/V) ln r dr) = R · exp(-∫ (1 - g/V)/r dr)
        // (integration by parts; the covariogram is continuous, so the
        // boundary terms collapse to ln R)
        let g =
            |r: f64| covariogram_seeded(body, &scale_dir(theta, r), quad.mc_samples, quad.seed).value;
        let f = |r: f64| {
            if r == 0.0 {
                // one-sided slope of 1 - g/V at the origin
                let h = 1e-7 * rmax;
                return (1.0 - g(h) / vol) / h;
            }
            (1.0 - g(r) / vol) / r
        };
        let breaks = ray_breakpoints(body, theta);
        let (i, e) = ray_power_integral(&f, 0.0, RayWeight::Power, &breaks, quad.tol);
        let val = rmax * (-i).exp();
        Ok(RadialValue { value: val, err: val * e })
    } else {
        // p ∈ (-1, 0): p ∫_0^R (g/V - 1) r^{p-1} dr + R^p, then the 1/p root
        let g =
            |r: f64| covariogram_seeded(body, &scale_dir(theta, r), quad.mc_samples, quad.seed).value;
        let f = |r: f64| {
            if r == 0.0 {
                let h = 1e-7 * rmax;
                return (g(h) / vol - 1.0) / h;
            }
            (g(r) / vol - 1.0) / r
        };
        let breaks = ray_breakpoints(body, theta);
        let (i, e) = ray_power_integral(&f, p, RayWeight::Power, &breaks, quad.tol);
        let base = p * i + rmax.powf(p);
        let val = base.powf(1.0 / p);
        Ok(RadialValue { value: val, err: val / p.abs() * ((p.abs() * e) / base).abs() })
    }
}

// ---------------------------------------------------------------- F_p K

/// `ρ_{F_p K}(θ)` for `p > 0`; `+∞` marks divergence past the per-direction
/// decay exponent.
pub fn radial_f(
    body: &BodySpec,
    p: f64,
    theta: &[f64],
    quad: &QuadConfig,
    route: FourierRoute,
) -> Result<RadialValue> {
    if p <= 0.0 {
        return Err(Error::Domain(format!("Fourier mean bodies need p > 0, got {p}")));
    }
    match route {
        FourierRoute::Direct => {
            let m: MellinResult = mellin_ghat(body, theta, p, quad)?;
            if m.is_diverged() {
                return Ok(RadialValue::infinite());
            }
            let val = m.value.powf(1.0 / p);
            Ok(RadialValue { value: val, err: val / p * (m.err / m.value) })
        }
        FourierRoute::ZRoute => {
            if !(0.0 < p && p < 1.0) {
                return Err(Error::Domain("the zonoid route needs p in (0,1)".into()));
            }
            let c = (gamma(1.0 + p) * cos_half_pi(p) * body.volume()).powf(1.0 / p);
            let z = radial_z(body, -p, theta, quad)?;
            Ok(RadialValue { value: c * z.value, err: c * z.err })
        }
        FourierRoute::IRoute => {
            if (p - 1.0).abs() > 1e-12 {
                return Err(Error::Domain("the intersection route is the p = 1 case".into()));
            }
            let n = body.dim();
            match n {
                2 => {
                    let perp = [-theta[1], theta[0]];
                    let r = radial_r(body, 1.0, &perp, quad)?;
                    // evenness of R_p K gives ρ(θ⊥) + ρ(-θ⊥) = 2ρ(θ⊥)
                    Ok(RadialValue { value: 2.0 * PI * r.value, err: 2.0 * PI * r.err })
                }
                3 => {
                    let (d1, d2) = plane_basis(theta);
                    let m = 96;
                    let mut acc = 0.0;
                    let mut err = 0.0;
                    for k in 0..m {
                        let a = 2.0 * PI * k as f64 / m as f64;
                        let u: Vec<f64> = (0..3)
                            .map(|i| a.cos() * d1[i] + a.sin() * d2[i])
                            .collect();
                        let r = radial_r(body, 2.0, &u, quad)?;
                        acc += r.value * r.value;
                        err += 2.0 * r.value * r.err;
                    }
                    let w = 2.0 * PI / m as f64;
                    Ok(RadialValue { value: PI * 0.5 * w * acc, err: PI * 0.5 * w * err })
                }
                _ => Err(Error::Unsupported("intersection route needs n = 2 or 3".into())),
            }
        }
    }
}

fn plane_basis(theta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let seed = if theta[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let proj = dot(&seed, theta);
    let v: Vec<f64> = (0..3).map(|i| seed[i] - proj * theta[i]).collect();
    let d1 = normalize(&v);
    let d2 = vec![
        theta[1] * d1[2] - theta[2] * d1[1],
        theta[2] * d1[0] - theta[0] * d1[2],
        theta[0] * d1[1] - theta[1] * d1[0],
    ];
    (d1, d2)
}

// ---------------------------------------------------------------- Z°_p K

/// `ρ_{Z°_p K}(θ)` = inverse p-th moment of `g_K / Vol²` against `|⟨θ,·⟩|`.
pub fn radial_z(body: &BodySpec, p: f64, theta: &[f64], quad: &QuadConfig) -> Result<RadialValue> {
    if p <= -1.0 {
        return Err(Error::Domain(format!("polar mean zonoids need p > -1, got {p}")));
    }
    let vol = body.volume();
    let v2 = vol * vol;
    if p == 0.0 {
        let (i, e) = log_moment_against_g(body, theta, quad)?;
        let val = (-i / v2).exp();
        return Ok(RadialValue { value: val, err: val * e / v2 });
    }
    let (i, e) = abs_moment_against_g(body, p, theta, quad)?;
    let val = (i / v2).powf(-1.0 / p);
    Ok(RadialValue { value: val, err: val / p.abs() * (e / i) })
}

/// `∫ |⟨θ,z⟩|^p g_K(z) dz`.
fn abs_moment_against_g(
    body: &BodySpec,
    p: f64,
    theta: &[f64],
    quad: &QuadConfig,
) -> Result<(f64, f64)> {
    let n = body.dim();
    match body {
        BodySpec::Ellipsoid { matrix, .. } => {
            // reduce to the ball: det² s^p ∫|⟨e₁,w⟩|^p g_B(w) dw, s = |Tᵗθ|
            let t = Mat::from_rows(matrix).expect("validated");
            let s = norm(&t.tr_matvec(theta));
            let det = t.det().abs();
            let sphere = sphere_abs_moment(n, p);
            let lens = |r: f64| crate::covariogram::ball_lens(n, r);
            let (rad, re) =
                ray_power_integral(&lens, p + n as f64 - 1.0, RayWeight::Power, &[2.0], quad.tol);
            Ok((det * det * s.powf(p) * sphere * rad, det * det * s.powf(p) * sphere * re))
        }
        _ if n == 1 => {
            let g = |r: f64| {
                covariogram_seeded(body, &[r * theta[0]], quad.mc_samples, quad.seed).value
            };
            let breaks = ray_breakpoints(body, theta);
            let (i, e) = ray_power_integral(&g, p, RayWeight::Power, &breaks, quad.tol);
            Ok((2.0 * theta[0].abs().powf(p) * i, 2.0 * e))
        }
        _ if n == 2 => {
            let inner = |u: &[f64]| {
                g_ray_integral(body, u, p + 1.0, RayWeight::Power, quad)
            };
            planar_cosine_moment(theta, p, &inner, quad)
        }
        _ if n == 3 => {
            // polar over a symmetric Fibonacci grid with exact ray integrals
            let dirs = crate::starops::fibonacci_sym_grid(2048);
            let w = 4.0 * PI / dirs.len() as f64;
            let mut acc = 0.0;
            let mut err = 0.0;
            for u in &dirs {
                let c = dot(theta, u).abs();
                let (gi, ge) = g_ray_integral(body, u, p + 2.0, RayWeight::Power, quad);
                acc += c.powf(p) * gi;
                err += c.powf(p) * ge;
            }
            // equal-weight lattice error dominates; report it honestly
            Ok((w * acc, w * err + 2e-4 * w * acc))
        }
        _ => Err(Error::Unsupported("polar mean zonoids cover n <= 3".into())),
    }
}

/// `∫ ln|⟨θ,z⟩| g_K(z) dz`.
fn log_moment_against_g(body: &BodySpec, theta: &[f64], quad: &QuadConfig) -> Result<(f64, f64)> {
    let n = body.dim();
    match body {
        BodySpec::Ellipsoid { matrix, .. } => {
            let t = Mat::from_rows(matrix).expect("validated");
            let s = norm(&t.tr_matvec(theta));
            let det = t.det().abs();
            let lens = |r: f64| crate::covariogram::ball_lens(n, r);
            let (g0, e0) =
                ray_power_integral(&lens, n as f64 - 1.0, RayWeight::Power, &[2.0], quad.tol);
            let (gl, el) =
                ray_power_integral(&lens, n as f64 - 1.0, RayWeight::PowerLog, &[2.0], quad.tol);
            let surf = sphere_abs_moment(n, 0.0);
            // ∫_S ln|⟨e₁,u⟩| du = surf · (ψ(1/2) - ψ(n/2)) / 2
            let logcos = surf * 0.5 * (digamma(0.5) - digamma(0.5 * n as f64));
            let val = det * det * (surf * (s.ln() * g0 + gl) + logcos * g0);
            Ok((val, det * det * surf * (e0 * (1.0 + s.ln().abs()) + el)))
        }
        _ if n == 2 => {
            let inner0 = |u: &[f64]| g_ray_integral(body, u, 1.0, RayWeight::Power, quad);
            let (base, be) = planar_cosine_moment(theta, 0.0, &inner0, quad)?;
            let _ = base; // p = 0 cosine moment is just ∫ G du; recompute with log terms below
            let mut total = 0.0;
            let mut err = be;
            // Σ over the four half-arcs of ln|cos| G₀ + the plain ∫ G₀log
            let phi0 = theta[1].atan2(theta[0]);
            for k in 0..4 {
                let (z, sign) = match k {
                    0 => (phi0 + 0.5 * PI, 1.0),
                    1 => (phi0 + 0.5 * PI, -1.0),
                    2 => (phi0 - 0.5 * PI, 1.0),
                    _ => (phi0 - 0.5 * PI, -1.0),
                };
                let g0_of = |t: f64| {
                    let a = z + sign * t;
                    let u = [a.cos(), a.sin()];
                    g_ray_integral(body, &u, 1.0, RayWeight::Power, quad).0
                };
                // ∫_0^{π/2} ln(sin t) G₀ dt = ∫ ln t G₀ + ∫ ln(sinc t) G₀
                let (log_part, e1) =
                    ray_power_integral(&g0_of, 0.0, RayWeight::PowerLog, &[0.5 * PI], quad.tol);
                let smooth = |t: f64| {
                    if t < 1e-8 {
                        0.0
                    } else {
                        (t.sin() / t).ln() * g0_of(t)
                    }
                };
                let (smooth_part, e2) = adaptive_segmented(&smooth, &[0.0, 0.5 * PI], quad.tol);
                total += log_part + smooth_part;
                err += e1 + e2;
            }
            let glog_of = |a: f64| {
                let u = [a.cos(), a.sin()];
                g_ray_integral(body, &u, 1.0, RayWeight::PowerLog, quad).0
            };
            let m = 128;
            let pts: Vec<f64> = (0..=m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
            let (glog, e3) = adaptive_segmented(&glog_of, &pts, quad.tol);
            total += glog;
            err += e3;
            Ok((total, err))
        }
        _ => Err(Error::Unsupported("log moments cover n = 2 and ellipsoids".into())),
    }
}

/// `∫_{S^{n-1}} |⟨e₁,u⟩|^p du` in closed form.
fn sphere_abs_moment(n: usize, p: f64) -> f64 {
    2.0 * PI.powf(0.5 * (n as f64 - 1.0))
        * (ln_gamma(0.5 * (p + 1.0)) - ln_gamma(0.5 * (n as f64 + p))).exp()
}

/// `∫_{S¹} |⟨θ,u⟩|^p G(u) du` with the `|cos|^p` endpoints resolved by the
/// substitution `|cos(φ-φ₀)| = sin t` on each half-arc.
fn planar_cosine_moment(
    theta: &[f64],
    p: f64,
    inner: &dyn Fn(&[f64]) -> (f64, f64),
    quad: &QuadConfig,
) -> Result<(f64, f64)> {
    let phi0 = theta[1].atan2(theta[0]);
    let mut total = 0.0;
    let mut err = 0.0;
    for k in 0..4 {
        let (z, sign) = match k {
            0 => (phi0 + 0.5 * PI, 1.0),
            1 => (phi0 + 0.5 * PI, -1.0),
            2 => (phi0 - 0.5 * PI, 1.0),
            _ => (phi0 - 0.5 * PI, -1.0),
        };
        let f = |t: f64| {
            let a = z + sign * t;
            let u = [a.cos(), a.sin()];
            let (g, _) = inner(&u);
            let sinc = if t < 1e-8 { 1.0 - t * t / 6.0 } else { t.sin() / t };
            sinc.powf(p) * g
        };
        let (v, e) = ray_power_integral(&f, p, RayWeight::Power, &[0.5 * PI], quad.tol);
        total += v;
        err += e;
    }
    Ok((total, err))
}

// ------------------------------------------------- polar centroid bodies

/// One-dimensional even probability density used by the equality tests.
#[derive(Clone, Debug)]
pub enum DensitySpec1D {
    /// `(1+s)/(2s) · ρ (1 - ρ|t|)₊^{1/s}`
    SAffine { s: f64, rho: f64 },
    /// even tabulated density on a symmetric grid, linearly interpolated
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

impl DensitySpec1D {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            DensitySpec1D::SAffine { s, rho } => {
                let u = 1.0 - rho * t.abs();
                if u <= 0.0 {
                    0.0
                } else {
                    (1.0 + s) / (2.0 * s) * rho * u.powf(1.0 / s)
                }
            }
            DensitySpec1D::Tabulated { grid, values } => {
                let t = t.abs();
                match grid.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                    Ok(i) => values[i],
                    Err(0) => values[0],
                    Err(i) if i >= grid.len() => 0.0,
                    Err(i) => {
                        let w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
                        values[i - 1] * (1.0 - w) + values[i] * w
                    }
                }
            }
        }
    }

    fn support_radius(&self) -> f64 {
        match self {
            DensitySpec1D::SAffine { rho, .. } => 1.0 / rho,
            DensitySpec1D::Tabulated { grid, .. } => *grid.last().unwrap(),
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match self {
            DensitySpec1D::SAffine { rho, .. } => vec![1.0 / rho],
            DensitySpec1D::Tabulated { grid, .. } => grid.clone(),
        }
    }
}

/// Source argument of [`radial_gamma_polar`].
pub enum GammaSource<'a> {
    Star(&'a StarSample),
    Density(&'a DensitySpec1D),
}

/// Polar `L^q` centroid radius:
/// `((1/V) ∫_M |⟨x,θ⟩|^q dx)^{-1/q}` over a star sample, or the
/// probability-density analogue `(∫ |t|^q g)^{-1/q}` in one dimension
/// (`θ = ±1`). `q = 0` takes the logarithmic branch.
pub fn radial_gamma_polar(source: GammaSource, q: f64, theta: &[f64]) -> Result<RadialValue> {
    if q <= -1.0 {
        return Err(Error::Domain(format!("polar centroid bodies need q > -1, got {q}")));
    }
    match source {
        GammaSource::Density(g) => {
            let r = g.support_radius();
            let breaks = g.breaks();
            let f = |t: f64| g.eval(t);
            if q == 0.0 {
                let (i, e) = ray_power_integral(&f, 0.0, RayWeight::PowerLog, &breaks, 1e-11);
                let val = (-2.0 * i).exp();
                return Ok(RadialValue { value: val, err: val * 2.0 * e });
            }
            let (i, e) = ray_power_integral(&f, q, RayWeight::Power, &breaks, 1e-11);
            let moment = 2.0 * i;
            let val = moment.powf(-1.0 / q);
            let _ = r;
            Ok(RadialValue { value: val, err: val / q.abs() * (2.0 * e / moment) })
        }
        GammaSource::Star(m) => {
            if m.n != 2 {
                return Err(Error::Unsupported(
                    "centroid bodies of star samples cover the plane".into(),
                ));
            }
            let nq = m.n as f64 + q;
            let vol = star_volume(m).value;
            let quad = QuadConfig::default();
            if q == 0.0 {
                // (1/V)∫_M ln|⟨x,θ⟩| dx over polar coordinates
                let inner = |u: &[f64]| {
                    let rho = m.interpolate_2d(u).unwrap_or(0.0);
                    ((rho.powi(2) / 2.0) * (rho.ln() - 0.5), 0.0)
                };
                let (base, e1) = planar_cosine_moment(theta, 0.0, &inner, &quad)?;
                let inner0 = |u: &[f64]| {
                    let rho = m.interpolate_2d(u).unwrap_or(0.0);
                    (rho.powi(2) / 2.0, 0.0)
                };
                let (logpart, e2) = planar_logcos_moment(theta, &inner0, &quad)?;
                let val = (-(base + logpart) / vol).exp();
                return Ok(RadialValue { value: val, err: val * (e1 + e2) / vol });
            }
            let inner = |u: &[f64]| {
                let rho = m.interpolate_2d(u).unwrap_or(0.0);
                (rho.powf(nq) / nq, 0.0)
            };
            let (i, e) = planar_cosine_moment(theta, q, &inner, &quad)?;
            let val = (i / vol).powf(-1.0 / q);
            Ok(RadialValue { value: val, err: val / q.abs() * (e / i + 1e-7) })
        }
    }
}

/// `∫_{S¹} ln|⟨θ,u⟩| G(u) du`.
fn planar_logcos_moment(
    theta: &[f64],
    inner: &dyn Fn(&[f64]) -> (f64, f64),
    quad: &QuadConfig,
) -> Result<(f64, f64)> {
    let phi0 = theta[1].atan2(theta[0]);
    let mut total = 0.0;
    let mut err = 0.0;
    for k in 0..4 {
        let (z, sign) = match k {
            0 => (phi0 + 0.5 * PI, 1.0),
            1 => (phi0 + 0.5 * PI, -1.0),
            2 => (phi0 - 0.5 * PI, 1.0),
            _ => (phi0 - 0.5 * PI, -1.0),
        };
        let g_of = |t: f64| {
            let a = z + sign * t;
            inner(&[a.cos(), a.sin()]).0
        };
        let (log_part, e1) =
            ray_power_integral(&g_of, 0.0, RayWeight::PowerLog, &[0.5 * PI], quad.tol);
        let smooth = |t: f64| if t < 1e-8 { 0.0 } else { (t.sin() / t).ln() * g_of(t) };
        let (smooth_part, e2) = adaptive_segmented(&smooth, &[0.0, 0.5 * PI], quad.tol);
        total += log_part + smooth_part;
        err += e1 + e2;
    }
    Ok((total, err))
}

/// `Γ°_q` of a body through its exact radial function.
fn gamma_polar_body(
    body: &BodySpec,
    q: f64,
    theta: &[f64],
    quad: &QuadConfig,
) -> Result<RadialValue> {
    if body.dim() != 2 {
        return Err(Error::Unsupported("body centroid evaluator covers the plane".into()));
    }
    if q <= -1.0 {
        return Err(Error::Domain(format!("polar centroid bodies need q > -1, got {q}")));
    }
    let nq = 2.0 + q;
    let vol = body.volume();
    if q == 0.0 {
        let inner = |u: &[f64]| {
            let rho = body.radial(u);
            ((rho.powi(2) / 2.0) * (rho.ln() - 0.5), 0.0)
        };
        let (base, e1) = planar_cosine_moment(theta, 0.0, &inner, quad)?;
        let inner0 = |u: &[f64]| (body.radial(u).powi(2) / 2.0, 0.0);
        let (logpart, e2) = planar_logcos_moment(theta, &inner0, quad)?;
        let val = (-(base + logpart) / vol).exp();
        return Ok(RadialValue { value: val, err: val * (e1 + e2) / vol });
    }
    let inner = |u: &[f64]| (body.radial(u).powf(nq) / nq, 0.0);
    let (i, e) = planar_cosine_moment(theta, q, &inner, quad)?;
    let val = (i / vol).powf(-1.0 / q);
    Ok(RadialValue { value: val, err: val / q.abs() * (e / i) })
}

// ------------------------------------------------- intersection bodies

/// `ρ_{IM}(θ) = Vol_{n-1}(M ∩ θ^⊥)` from a star sample:
/// opposite chord radii in the plane, a great-circle integral in space.
pub fn intersection_body_radial(m: &StarSample, theta: &[f64]) -> Result<RadialValue> {
    if m.angular_gap() > 5.0f64.to_radians() {
        return Err(Error::Resolution(format!(
            "angular gap {:.2}° exceeds 5°",
            m.angular_gap().to_degrees()
        )));
    }
    if m.has_markers() {
        return Err(Error::Resolution("intersection body needs finite radii".into()));
    }
    match m.n {
        2 => {
            let perp = [-theta[1], theta[0]];
            let a = m.interpolate_2d(&perp)?;
            let b = m.interpolate_2d(&[-perp[0], -perp[1]])?;
            Ok(RadialValue { value: a + b, err: 1e-3 * (a + b) * m.angular_gap().powi(2) })
        }
        3 => {
            let (d1, d2) = plane_basis(theta);
            let grid = 720;
            let mut acc = 0.0;
            for k in 0..grid {
                let a = 2.0 * PI * k as f64 / grid as f64;
                let u: Vec<f64> =
                    (0..3).map(|i| a.cos() * d1[i] + a.sin() * d2[i]).collect();
                let rho = m.interpolate_3d(&u)?;
                acc += rho * rho;
            }
            let val = 0.5 * acc * 2.0 * PI / grid as f64;
            Ok(RadialValue { value: val, err: val * m.angular_gap().powi(2) })
        }
        _ => Err(Error::Unsupported("intersection bodies cover n = 2 and 3".into())),
    }
}

/// Exact intersection body of a body spec (no sampling).
fn intersection_of_body(body: &BodySpec, theta: &[f64], quad: &QuadConfig) -> Result<RadialValue> {
    match body.dim() {
        2 => {
            let perp = [-theta[1], theta[0]];
            let a = body.radial(&perp);
            let b = body.radial(&[-perp[0], -perp[1]]);
            Ok(RadialValue::exact(a + b))
        }
        3 => {
            let (d1, d2) = plane_basis(theta);
            let f = |a: f64| {
                let u: Vec<f64> = (0..3).map(|i| a.cos() * d1[i] + a.sin() * d2[i]).collect();
                let r = body.radial(&u);
                0.5 * r * r
            };
            let pts: Vec<f64> = (0..=64).map(|k| 2.0 * PI * k as f64 / 64.0).collect();
            let (v, e) = adaptive_segmented(&f, &pts, quad.tol);
            Ok(RadialValue { value: v, err: e })
        }
        _ => Err(Error::Unsupported("intersection bodies cover n = 2 and 3".into())),
    }
}

// ------------------------------------------------- misc helpers for tests

/// Monte-Carlo moment oracle `∫_K |⟨x,θ⟩|^q dx`, used by tests and the
/// dual-volume cross checks.
pub fn mc_abs_moment(body: &BodySpec, q: f64, theta: &[f64], samples: usize, seed: u64) -> f64 {
    let pts = sample_uniform(body, samples, seed);
    let vol = body.volume();
    vol * pts.iter().map(|x| dot(x, theta).abs().powf(q)).sum::<f64>() / samples as f64
}
