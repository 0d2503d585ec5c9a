//! The covariogram `g_K(x) = Vol(K ∩ (K + x))`, parallel section functions
//! `A_{K,θ}(t)`, and the Radon transform of `g_K`, per body variant.
//!
//! Boxes factor through the interval covariogram `(2a - |t|)₊`; planar
//! polygons go through exact convex clipping; ellipsoids reduce to the
//! spherical lens volume; simplices in three or more dimensions fall back to
//! seeded Monte Carlo and are flagged as inexact.

use crate::bodies::{difference_body_radial, sample_uniform, BodySpec};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub, Mat};
use crate::quad::{adaptive_segmented, QuadConfig};
use crate::specfun::omega;

/// One covariogram evaluation.
#[derive(Clone, Copy, Debug)]
pub struct CovariogramValue {
    pub value: f64,
    pub exact: bool,
    /// standard error for Monte-Carlo values, 0 otherwise
    pub std_err: f64,
}

impl CovariogramValue {
    fn exact(value: f64) -> Self {
        CovariogramValue { value, exact: true, std_err: 0.0 }
    }
}

/// `g_K(x) = Vol_n(K ∩ (K + x))`. Zero outside the difference body DK.
pub fn covariogram(body: &BodySpec, x: &[f64]) -> CovariogramValue {
    covariogram_seeded(body, x, 200_000, 42)
}

/// Covariogram with explicit Monte-Carlo policy (only simplices in n ≥ 3
/// take the stochastic path).
pub fn covariogram_seeded(body: &BodySpec, x: &[f64], mc: usize, seed: u64) -> CovariogramValue {
    match body {
        BodySpec::Box { half_widths } => {
            let mut v = 1.0;
            for (a, xi) in half_widths.iter().zip(x) {
                let f = 2.0 * a - xi.abs();
                if f <= 0.0 {
                    return CovariogramValue::exact(0.0);
                }
                v *= f;
            }
            CovariogramValue::exact(v)
        }
        BodySpec::Ellipsoid { matrix, center: _ } => {
            let t = Mat::from_rows(matrix).expect("validated");
            let inv = t.inverse().expect("validated");
            let d = norm(&inv.matvec(x));
            let n = body.dim();
            CovariogramValue::exact(t.det().abs() * ball_lens(n, d))
        }
        BodySpec::Polygon { vertices } => {
            let shifted: Vec<[f64; 2]> =
                vertices.iter().map(|v| [v[0] + x[0], v[1] + x[1]]).collect();
            CovariogramValue::exact(convex_clip_area(vertices, &shifted))
        }
        BodySpec::Simplex { vertices } => {
            if body.dim() == 2 {
                let poly: Vec<[f64; 2]> = ccw_triangle(vertices);
                let shifted: Vec<[f64; 2]> =
                    poly.iter().map(|v| [v[0] + x[0], v[1] + x[1]]).collect();
                return CovariogramValue::exact(convex_clip_area(&poly, &shifted));
            }
            // MC: fraction of y ∈ K with y - x ∈ K
            let vol = body.volume();
            let pts = sample_uniform(body, mc, seed);
            let hits = pts.iter().filter(|p| body.contains(&sub(p, x))).count();
            let f = hits as f64 / mc as f64;
            CovariogramValue {
                value: vol * f,
                exact: false,
                std_err: vol * (f * (1.0 - f) / mc as f64).sqrt(),
            }
        }
    }
}

fn ccw_triangle(vertices: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut v: Vec<[f64; 2]> = vertices.iter().map(|p| [p[0], p[1]]).collect();
    let area2 = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
        - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]);
    if area2 < 0.0 {
        v.swap(1, 2);
    }
    v
}

/// Volume of the intersection of two unit balls at center distance `d`:
/// `2 ω_{n-1} ∫_{d/2}^1 (1-t²)^{(n-1)/2} dt`. Elementary for n ≤ 3.
pub fn ball_lens(n: usize, d: f64) -> f64 {
    if d >= 2.0 {
        return 0.0;
    }
    let u = 0.5 * d;
    match n {
        1 => 2.0 - d,
        2 => 2.0 * (u.acos() - u * (1.0 - u * u).sqrt()),
        3 => 2.0 * std::f64::consts::PI * (2.0 / 3.0 - u + u * u * u / 3.0),
        _ => {
            let e = (n as f64 - 1.0) / 2.0;
            let f = move |t: f64| (1.0 - t * t).max(0.0).powf(e);
            let (v, _) = adaptive_segmented(&f, &[u, 1.0], 1e-13);
            2.0 * omega(n as f64 - 1.0) * v
        }
    }
}

/// Sutherland–Hodgman clip of convex `subject` against convex `clip`
/// (both counterclockwise), returning the intersection area by shoelace.
/// Touching boundaries carry no area, so ties need no special casing.
pub fn convex_clip_area(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> f64 {
    let mut poly: Vec<[f64; 2]> = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if poly.is_empty() {
            return 0.0;
        }
        let a = clip[i];
        let b = clip[(i + 1) % m];
        let inside = |p: &[f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(poly.len() + 2);
        for j in 0..poly.len() {
            let cur = poly[j];
            let nxt = poly[(j + 1) % poly.len()];
            let dc = inside(&cur);
            let dn = inside(&nxt);
            if dc >= 0.0 {
                out.push(cur);
            }
            if (dc > 0.0 && dn < 0.0) || (dc < 0.0 && dn > 0.0) {
                let t = dc / (dc - dn);
                out.push([cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])]);
            }
        }
        poly = out;
    }
    let mut area = 0.0;
    for j in 0..poly.len() {
        let p = poly[j];
        let q = poly[(j + 1) % poly.len()];
        area += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * area.abs()
}

/// Radii where `r ↦ g_K(rθ)` loses smoothness, plus the endpoint `ρ_DK(θ)`.
/// Quadrature panels split here recover spectral convergence.
pub fn ray_breakpoints(body: &BodySpec, theta: &[f64]) -> Vec<f64> {
    let rmax = difference_body_radial(body, theta);
    let mut pts: Vec<f64> = Vec::new();
    match body {
        BodySpec::Box { half_widths } => {
            // interior factor roots 2a_i/|θ_i| at or beyond rmax; none interior
            for (a, th) in half_widths.iter().zip(theta) {
                if th.abs() > 1e-300 {
                    let r = 2.0 * a / th.abs();
                    if r < rmax * (1.0 - 1e-12) {
                        pts.push(r);
                    }
                }
            }
        }
        BodySpec::Polygon { vertices } => {
            polygon_ray_kinks(vertices, theta, rmax, &mut pts);
        }
        BodySpec::Simplex { vertices } if body.dim() == 2 => {
            let tri = ccw_triangle(vertices);
            polygon_ray_kinks(&tri, theta, rmax, &mut pts);
        }
        _ => {}
    }
    pts.push(rmax);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * rmax);
    pts
}

fn polygon_ray_kinks(vertices: &[[f64; 2]], theta: &[f64], rmax: f64, pts: &mut Vec<f64>) {
    let m = vertices.len();
    for i in 0..m {
        let a = vertices[i];
        let b = vertices[(i + 1) % m];
        let nx = b[1] - a[1];
        let ny = a[0] - b[0];
        let c = nx * a[0] + ny * a[1];
        let denom = nx * theta[0] + ny * theta[1];
        if denom.abs() < 1e-14 {
            continue;
        }
        for v in vertices {
            // vertex of P + rθ crossing the edge line of P, and the mirrored case
            let r1 = (c - (nx * v[0] + ny * v[1])) / denom;
            let r2 = -r1;
            for r in [r1, r2] {
                if r > 1e-12 * rmax && r < rmax * (1.0 - 1e-12) {
                    pts.push(r);
                }
            }
        }
    }
}

/// Parallel section function `A_{K,θ}(t) = Vol_{n-1}(K ∩ {⟨x,θ⟩ = t})`.
pub fn parallel_section(body: &BodySpec, theta: &[f64], t: f64) -> f64 {
    match body {
        BodySpec::Box { half_widths } => box_section(half_widths, theta, t),
        BodySpec::Ellipsoid { matrix, center } => {
            let tm = Mat::from_rows(matrix).expect("validated");
            let u = tm.tr_matvec(theta);
            let un = norm(&u);
            let h = (t - dot(center, theta)) / un;
            if h.abs() >= 1.0 {
                return 0.0;
            }
            let n = body.dim();
            tm.det().abs() / un
                * omega(n as f64 - 1.0)
                * (1.0 - h * h).powf((n as f64 - 1.0) / 2.0)
        }
        BodySpec::Polygon { vertices } => polygon_chord(vertices, theta, t),
        BodySpec::Simplex { vertices } => match body.dim() {
            2 => polygon_chord(&ccw_triangle(vertices), theta, t),
            3 => tetra_section(vertices, theta, t),
            _ => {
                // thin-slab Monte Carlo estimate
                let h = 1e-3 * body.diameter();
                let pts = sample_uniform(body, 200_000, 42);
                let hits = pts
                    .iter()
                    .filter(|p| (dot(p, theta) - t).abs() < 0.5 * h)
                    .count();
                body.volume() * hits as f64 / (200_000.0 * h)
            }
        },
    }
}

/// Box slice area as the convolution of interval indicators: an
/// Irwin–Hall-type piecewise polynomial of degree m-1 in the m coordinates
/// not orthogonal to θ.
fn box_section(half_widths: &[f64], theta: &[f64], t: f64) -> f64 {
    let mut ortho_factor = 1.0;
    let mut c: Vec<f64> = Vec::new();
    let mut vol_active = 1.0;
    for (a, th) in half_widths.iter().zip(theta) {
        let ci = a * th.abs();
        if ci < 1e-14 {
            ortho_factor *= 2.0 * a;
        } else {
            c.push(ci);
            vol_active *= 2.0 * a;
        }
    }
    let m = c.len();
    if m == 0 {
        return 0.0; // θ = 0 is outside the contract
    }
    let total: f64 = c.iter().sum();
    if t.abs() >= total {
        return 0.0;
    }
    // density of Σ c_i U_i (U_i uniform on [-1,1]) by inclusion-exclusion;
    // the convention s⁰ = χ(s > 0) makes the m = 1 indicator come out right
    let mut fact = 1.0;
    for k in 2..m {
        fact *= k as f64;
    }
    let mut acc = 0.0;
    for mask in 0u32..(1 << m) {
        let mut s = t + total;
        let mut sign = 1.0;
        for (i, ci) in c.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s -= 2.0 * ci;
                sign = -sign;
            }
        }
        if s > 0.0 {
            acc += sign * s.powi(m as i32 - 1);
        }
    }
    let dens = acc / (fact * c.iter().map(|x| 2.0 * x).product::<f64>());
    ortho_factor * vol_active * dens
}

fn polygon_chord(vertices: &[[f64; 2]], theta: &[f64], t: f64) -> f64 {
    // parametrize the line t·θ + s·θ⊥ and clip s against each edge half-plane
    let perp = [-theta[1], theta[0]];
    let base = [t * theta[0], t * theta[1]];
    let m = vertices.len();
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..m {
        let a = vertices[i];
        let b = vertices[(i + 1) % m];
        // inside: cross(b-a, x-a) >= 0
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let f0 = ex * (base[1] - a[1]) - ey * (base[0] - a[0]);
        let fs = ex * perp[1] - ey * perp[0];
        if fs.abs() < 1e-15 {
            if f0 < 0.0 {
                return 0.0;
            }
            continue;
        }
        let s = -f0 / fs;
        if fs > 0.0 {
            lo = lo.max(s);
        } else {
            hi = hi.min(s);
        }
    }
    (hi - lo).max(0.0)
}

fn tetra_section(vertices: &[Vec<f64>], theta: &[f64], t: f64) -> f64 {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    let h: Vec<f64> = vertices.iter().map(|v| dot(v, theta) - t).collect();
    for i in 0..4 {
        for j in i + 1..4 {
            let (hi, hj) = (h[i], h[j]);
            if (hi > 0.0 && hj < 0.0) || (hi < 0.0 && hj > 0.0) {
                let w = hi / (hi - hj);
                let p: Vec<f64> = (0..3)
                    .map(|k| vertices[i][k] + w * (vertices[j][k] - vertices[i][k]))
                    .collect();
                pts.push(p);
            }
        }
    }
    if pts.len() < 3 {
        return 0.0;
    }
    // orthonormal basis of θ⊥
    let e1 = if theta[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d1 = {
        let proj = dot(&e1, theta);
        let v: Vec<f64> = (0..3).map(|k| e1[k] - proj * theta[k]).collect();
        let nv = norm(&v);
        vec![v[0] / nv, v[1] / nv, v[2] / nv]
    };
    let d2 = vec![
        theta[1] * d1[2] - theta[2] * d1[1],
        theta[2] * d1[0] - theta[0] * d1[2],
        theta[0] * d1[1] - theta[1] * d1[0],
    ];
    let centroid: Vec<f64> = (0..3)
        .map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / pts.len() as f64)
        .collect();
    let mut planar: Vec<(f64, [f64; 2])> = pts
        .iter()
        .map(|p| {
            let rel = sub(p, &centroid);
            let u = dot(&rel, &d1);
            let v = dot(&rel, &d2);
            (v.atan2(u), [u, v])
        })
        .collect();
    planar.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut area = 0.0;
    for i in 0..planar.len() {
        let p = planar[i].1;
        let q = planar[(i + 1) % planar.len()].1;
        area += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * area.abs()
}

/// Heights where `t ↦ A_{K,θ}(t)` has kinks, plus the support endpoints.
pub fn section_breakpoints(body: &BodySpec, theta: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = theta.iter().map(|x| -x).collect();
    let hi = body.support(theta);
    let lo = -body.support(&neg);
    let mut pts = vec![lo, hi];
    match body {
        BodySpec::Box { half_widths } => {
            let c: Vec<f64> = half_widths
                .iter()
                .zip(theta)
                .map(|(a, th)| a * th.abs())
                .filter(|&x| x > 1e-14)
                .collect();
            let m = c.len();
            for mask in 0u32..(1 << m) {
                let mut s = 0.0;
                for (i, ci) in c.iter().enumerate() {
                    s += if mask & (1 << i) != 0 { -ci } else { *ci };
                }
                if s > lo + 1e-13 && s < hi - 1e-13 {
                    pts.push(s);
                }
            }
        }
        BodySpec::Polygon { vertices } => {
            for v in vertices {
                let s = v[0] * theta[0] + v[1] * theta[1];
                if s > lo + 1e-13 && s < hi - 1e-13 {
                    pts.push(s);
                }
            }
        }
        BodySpec::Simplex { vertices } => {
            for v in vertices {
                let s = dot(v, theta);
                if s > lo + 1e-13 && s < hi - 1e-13 {
                    pts.push(s);
                }
            }
        }
        BodySpec::Ellipsoid { .. } => {}
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (hi - lo));
    pts
}

/// Radon transform of the covariogram via the convolution identity
/// `R g_K(θ; t) = (A_{K,θ} * A_{K,θ}(-·))(t)`, by adaptive quadrature over
/// the compact overlap with panels split at the section kinks.
pub fn radon_covariogram(body: &BodySpec, theta: &[f64], t: f64, quad: &QuadConfig) -> Result<f64> {
    if body.dim() < 2 {
        return Err(Error::Unsupported("radon transform needs n >= 2".into()));
    }
    let base = section_breakpoints(body, theta);
    let (lo_a, hi_a) = (base[0], *base.last().unwrap());
    // supp A(·-t) = supp A + t; integrand s ↦ A(s) A(s - t)
    let lo = lo_a.max(lo_a + t);
    let hi = hi_a.min(hi_a + t);
    if lo >= hi {
        return Ok(0.0);
    }
    let mut pts: Vec<f64> = Vec::with_capacity(2 * base.len());
    for &b in &base {
        for cand in [b, b + t] {
            if cand > lo - 1e-13 && cand < hi + 1e-13 {
                pts.push(cand.clamp(lo, hi));
            }
        }
    }
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (hi - lo).max(1.0));
    let f = |s: f64| parallel_section(body, theta, s) * parallel_section(body, theta, s - t);
    let (v, _) = adaptive_segmented(&f, &pts, quad.tol);
    Ok(v)
}
