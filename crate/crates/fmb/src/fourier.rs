//! Fourier transforms of body indicators, `|χ̂_K|²`, and the Mellin
//! integrals `p ∫_0^∞ |χ̂_K(rθ)|² r^{p-1} dr / Vol(K)` behind the Fourier
//! mean bodies.
//!
//! Sign convention is `χ̂(ξ) = ∫ e^{-i⟨x,ξ⟩} dx` throughout.
//!
//! For boxes and polygons `|χ̂(rθ)|²` is an exact finite cosine sum times a
//! power of `r` (vertex regrouping of the boundary integrals), so the Mellin
//! tail integrates term by term. Balls carry the same structure
//! asymptotically through the Hankel expansion of `J_{n/2}²`. A segment-sum
//! fallback with sequence acceleration covers directions where the cosine
//! decomposition degenerates.

use crate::bodies::BodySpec;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Mat};
use crate::quad::{
    ray_power_integral, segmented_tail, OscSum, OscTail, OscTerm, QuadConfig, RayWeight,
};
use crate::specfun::{bessel_j, bessel_mellin_sq, gamma, hankel_square_series, omega};
use std::f64::consts::PI;

/// Barebones complex number; this module only needs modulus and products.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }
    pub fn abs2(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    fn cis(phi: f64) -> Self {
        Complex { re: phi.cos(), im: phi.sin() }
    }
    fn mul(self, o: Complex) -> Complex {
        Complex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
    fn scale(self, c: f64) -> Complex {
        Complex { re: c * self.re, im: c * self.im }
    }
    fn add(self, o: Complex) -> Complex {
        Complex { re: self.re + o.re, im: self.im + o.im }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 * (1.0 - x * x / 20.0)
    } else {
        x.sin() / x
    }
}

/// `χ̂_K(ξ)`. Boxes are sinc products, ellipsoids reduce to the radial
/// Bessel form, polygons are exact boundary sums with the edge-parallel
/// singularity removed analytically; `χ̂_K(0) = Vol(K)`.
pub fn chi_hat(body: &BodySpec, xi: &[f64]) -> Result<Complex> {
    match body {
        BodySpec::Box { half_widths } => {
            let mut v = 1.0;
            for (a, x) in half_widths.iter().zip(xi) {
                v *= 2.0 * a * sinc(a * x);
            }
            Ok(Complex::new(v, 0.0))
        }
        BodySpec::Ellipsoid { matrix, center } => {
            let t = Mat::from_rows(matrix).expect("validated");
            let u = norm(&t.tr_matvec(xi));
            let n = center.len() as f64;
            let radial = if u < 1e-6 {
                // (2π/u)^{n/2} J_{n/2}(u) → ω_n as u → 0
                omega(n) * (1.0 - u * u / (2.0 * n + 4.0))
            } else {
                (2.0 * PI / u).powf(0.5 * n) * bessel_j(0.5 * n, u)
            };
            let phase = Complex::cis(-dot(center, xi));
            Ok(phase.scale(t.det().abs() * radial))
        }
        BodySpec::Polygon { vertices } => Ok(polygon_chi_hat(vertices, xi)),
        BodySpec::Simplex { vertices } => {
            if body.dim() == 2 {
                let mut v: Vec<[f64; 2]> = vertices.iter().map(|p| [p[0], p[1]]).collect();
                let area2 = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
                    - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]);
                if area2 < 0.0 {
                    v.swap(1, 2);
                }
                Ok(polygon_chi_hat(&v, xi))
            } else {
                Err(Error::Unsupported(
                    "chi_hat for simplices is only available in the plane".into(),
                ))
            }
        }
    }
}

fn polygon_chi_hat(vertices: &[[f64; 2]], xi: &[f64]) -> Complex {
    let m = vertices.len();
    let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    let scale: f64 = vertices.iter().map(|v| v[0].abs().max(v[1].abs())).fold(0.0, f64::max);
    if r * scale < 1e-5 {
        // Taylor head: χ̂ ≈ V - i⟨ξ, ∫x⟩ - ½ ξᵗMξ
        let body = BodySpec::Polygon { vertices: vertices.to_vec() };
        let vol = body.volume();
        let c = body.centroid();
        let mm = body.centered().second_moment();
        let q = mm.at(0, 0) * xi[0] * xi[0]
            + 2.0 * mm.at(0, 1) * xi[0] * xi[1]
            + mm.at(1, 1) * xi[1] * xi[1];
        return Complex::cis(-dot(&c, xi)).scale(vol - 0.5 * q);
    }
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..m {
        let a = vertices[i];
        let b = vertices[(i + 1) % m];
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let len = (ex * ex + ey * ey).sqrt();
        let d = [ex / len, ey / len];
        let nrm = [d[1], -d[0]]; // outward for counterclockwise order
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let xin = xi[0] * nrm[0] + xi[1] * nrm[1];
        let xid = xi[0] * d[0] + xi[1] * d[1];
        let phase = Complex::cis(-(mid[0] * xi[0] + mid[1] * xi[1]));
        // (i/|ξ|²) ⟨ξ,n̂⟩ L sinc(⟨ξ,d̂⟩L/2) e^{-i⟨ξ,m⟩}
        let w = xin * len * sinc(0.5 * xid * len) / (r * r);
        acc = acc.add(Complex::new(0.0, w).mul(phase));
    }
    acc
}

/// `ĝ_K(ξ) = |χ̂_K(ξ)|²`; equals `Vol(K)²` at the origin.
pub fn g_hat(body: &BodySpec, xi: &[f64]) -> Result<f64> {
    Ok(chi_hat(body, xi)?.abs2())
}

/// Outcome of a Mellin evaluation: the value is
/// `ρ_{F_p K}(θ)^p = p ∫_0^∞ ĝ(rθ) r^{p-1} dr / Vol(K)`.
#[derive(Clone, Copy, Debug)]
pub struct MellinResult {
    pub value: f64,
    pub err: f64,
    pub route: MellinRoute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MellinRoute {
    ClosedForm,
    SplitQuadrature,
    Diverged,
}

impl MellinResult {
    fn diverged() -> Self {
        MellinResult { value: f64::INFINITY, err: f64::INFINITY, route: MellinRoute::Diverged }
    }
    pub fn is_diverged(&self) -> bool {
        self.route == MellinRoute::Diverged
    }
}

/// Interval factor `∫_0^∞ sin²(u) u^{p-3} du` for `0 < p < 2`.
fn sin_sq_mellin(p: f64) -> f64 {
    gamma(0.5 * p) * PI.sqrt() / (2.0 * (2.0 - p) * gamma(0.5 * (3.0 - p)))
}

/// `d_p · ((x1-x2)^{4-p} + (x1+x2)^{4-p} - 2x1^{4-p} - 2x2^{4-p})`,
/// the closed form of `p ∫ sin²(x1 r) sin²(x2 r) r^{p-5} dr`, continued to
/// all of `0 < p < 4` with series branches across the removable points.
pub fn sin_sq_pair_mellin(p: f64, x1: f64, x2: f64) -> f64 {
    assert!(x1 > 0.0 && x2 > 0.0 && 0.0 < p && p < 4.0);
    let (x1, x2) = if x1 >= x2 { (x1, x2) } else { (x2, x1) };
    let (dsplit, _) = crate::specfun::d_p_split(p);
    if (p - 2.0).abs() <= 0.05 {
        // d_p has a simple pole at 2 cancelled by a zero of the bracket:
        // expand the bracket around p = 2 and divide analytically.
        let bases = [x1 - x2, x1 + x2, x1, x2];
        let coefs = [1.0, 1.0, -2.0, -2.0];
        let mut sum = 0.0;
        let mut kfact = 1.0;
        for k in 1..=9 {
            kfact *= k as f64;
            let mut der = 0.0;
            for (y, c) in bases.iter().zip(coefs) {
                if *y > 0.0 {
                    der += c * y * y * (-(y.ln())).powi(k);
                }
            }
            sum += der * (p - 2.0).powi(k - 1) / kfact;
        }
        return -dsplit * sum;
    }
    let d_p = dsplit / (2.0 - p);
    let bracket = if x2 < 1e-3 * x1 {
        // expansion in x2 avoids the (x1±x2) cancellation near the axes
        let f2 = (4.0 - p) * (3.0 - p) * x1.powf(2.0 - p);
        let f4 = (4.0 - p) * (3.0 - p) * (2.0 - p) * (1.0 - p) * x1.powf(-p) / 12.0;
        f2 * x2 * x2 - 2.0 * x2.powf(4.0 - p) + f4 * x2.powi(4)
    } else {
        (x1 - x2).powf(4.0 - p) + (x1 + x2).powf(4.0 - p)
            - 2.0 * x1.powf(4.0 - p)
            - 2.0 * x2.powf(4.0 - p)
    };
    d_p * bracket
}

/// Exact cosine-sum representation of `ĝ(rθ)` along a ray, when available.
/// Boxes and polygons are exact; balls/ellipsoids asymptotic from
/// `valid_from` outward.
pub fn ghat_osc_sum(body: &BodySpec, theta: &[f64]) -> Result<OscSum> {
    match body {
        BodySpec::Box { half_widths } => Ok(box_osc_sum(half_widths, theta)),
        BodySpec::Polygon { vertices } => Ok(polygon_osc_sum(vertices, theta)),
        BodySpec::Simplex { vertices } if body.dim() == 2 => {
            let mut v: Vec<[f64; 2]> = vertices.iter().map(|p| [p[0], p[1]]).collect();
            let area2 = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
                - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]);
            if area2 < 0.0 {
                v.swap(1, 2);
            }
            Ok(polygon_osc_sum(&v, theta))
        }
        BodySpec::Ellipsoid { matrix, .. } => {
            let t = Mat::from_rows(matrix).expect("validated");
            let s = norm(&t.tr_matvec(theta));
            let det = t.det().abs();
            Ok(ball_osc_sum(body.dim(), s, det))
        }
        BodySpec::Simplex { .. } => Err(Error::Unsupported(
            "no Fourier representation for simplices beyond the plane".into(),
        )),
    }
}

fn push_cos(terms: &mut Vec<(f64, f64, f64)>, freq: f64, phase: f64, coeff: f64) {
    // fold cos(-fr + φ) = cos(fr - φ) and near-zero frequencies into DC
    let (freq, phase) = if freq < 0.0 { (-freq, -phase) } else { (freq, phase) };
    if freq < 1e-12 {
        terms.push((0.0, 0.0, coeff * phase.cos()));
    } else {
        terms.push((freq, phase, coeff));
    }
}

fn merge_terms(raw: Vec<(f64, f64, f64)>, power_of: impl Fn(usize) -> f64) -> Vec<OscTerm> {
    let _ = power_of;
    raw.into_iter()
        .map(|(omega, phase, coeff)| OscTerm { coeff, power: 0.0, omega, phase })
        .collect()
}

fn box_osc_sum(half_widths: &[f64], theta: &[f64]) -> OscSum {
    // |χ̂|² = Π_inactive (2a)² · Π_active 4 sin²(a|θ| r)/(θ² r²)
    let mut constant = 1.0;
    let mut c: Vec<f64> = Vec::new();
    for (a, th) in half_widths.iter().zip(theta) {
        if (a * th).abs() < 1e-14 {
            constant *= 4.0 * a * a;
        } else {
            constant *= 4.0 / (th * th);
            c.push(a * th.abs());
        }
    }
    let m = c.len();
    // expand Π sin²(c_i r) into a cosine sum
    let mut terms: Vec<(f64, f64)> = vec![(0.0, 1.0)]; // (freq, coeff), phase 0 throughout
    for &ci in &c {
        let mut next: Vec<(f64, f64)> = Vec::with_capacity(terms.len() * 3);
        for &(f, a) in &terms {
            // multiply by (1 - cos(2c r))/2
            next.push((f, 0.5 * a));
            if f == 0.0 {
                next.push((2.0 * ci, -0.5 * a));
            } else {
                next.push((f + 2.0 * ci, -0.25 * a));
                next.push(((f - 2.0 * ci).abs(), -0.25 * a));
            }
        }
        // merge equal frequencies
        next.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(next.len());
        for (f, a) in next {
            if let Some(last) = merged.last_mut() {
                if (f - last.0).abs() < 1e-12 {
                    last.1 += a;
                    continue;
                }
            }
            merged.push((f, a));
        }
        terms = merged;
    }
    let power = 2.0 * m as f64;
    let osc_terms = terms
        .into_iter()
        .filter(|(_, a)| a.abs() > 1e-16)
        .map(|(f, a)| OscTerm { coeff: constant * a, power, omega: f, phase: 0.0 })
        .collect();
    OscSum { terms: osc_terms, valid_from: 0.0, trunc_rel: 0.0 }
}

fn polygon_osc_sum(vertices: &[[f64; 2]], theta: &[f64]) -> OscSum {
    let m = vertices.len();
    let deg_tol = 1e-7;
    // vertex weights w_v = q_out - q_in with q_e = ⟨θ,n̂⟩/⟨θ,d̂⟩,
    // degenerate edges (θ ⟂ d̂) kept as slab-order r^{-1} contributions
    let mut w = vec![0.0f64; m];
    let mut slabs: Vec<(f64, f64)> = Vec::new(); // (G = ⟨θ,n̂⟩L, μ = ⟨θ,mid⟩)
    for i in 0..m {
        let a = vertices[i];
        let b = vertices[(i + 1) % m];
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let len = (ex * ex + ey * ey).sqrt();
        let d = [ex / len, ey / len];
        let nrm = [d[1], -d[0]];
        let td = theta[0] * d[0] + theta[1] * d[1];
        let tn = theta[0] * nrm[0] + theta[1] * nrm[1];
        if td.abs() < deg_tol {
            slabs.push((tn * len, theta[0] * 0.5 * (a[0] + b[0]) + theta[1] * 0.5 * (a[1] + b[1])));
        } else {
            let q = tn / td;
            w[i] += q; // vertex a of this edge
            w[(i + 1) % m] -= q; // vertex b
        }
    }
    let phis: Vec<f64> = vertices.iter().map(|v| v[0] * theta[0] + v[1] * theta[1]).collect();
    let mut raw: Vec<(f64, f64, f64)> = Vec::new();
    // field F(r) = Σ w_v e^{-i r φ_v} + Σ i r G e^{-i r μ}; |χ̂|² = |F|²/r⁴
    for i in 0..m {
        for j in 0..m {
            if w[i] == 0.0 || w[j] == 0.0 {
                continue;
            }
            if i == j {
                raw.push((0.0, 0.0, w[i] * w[i]));
            } else if i < j {
                push_cos(&mut raw, phis[i] - phis[j], 0.0, 2.0 * w[i] * w[j]);
            }
        }
    }
    let mut terms: Vec<OscTerm> =
        merge_terms(raw, |_| 4.0).into_iter().map(|mut t| {
            t.power = 4.0;
            t
        }).collect();
    // slab-order cross terms
    for (k, &(g, mu)) in slabs.iter().enumerate() {
        // |i r G|² with itself and other slabs: power 2
        for (l, &(g2, mu2)) in slabs.iter().enumerate() {
            if k == l {
                terms.push(OscTerm { coeff: g * g, power: 2.0, omega: 0.0, phase: 0.0 });
            } else if k < l {
                let mut raw2 = Vec::new();
                push_cos(&mut raw2, mu - mu2, 0.0, 2.0 * g * g2);
                for (f, ph, c) in raw2 {
                    terms.push(OscTerm { coeff: c, power: 2.0, omega: f, phase: ph });
                }
            }
        }
        // cross with vertex terms: 2 r G w sin(r(μ - φ)) → power 3 with phase -π/2
        for i in 0..m {
            if w[i] == 0.0 {
                continue;
            }
            let mut raw2 = Vec::new();
            // sin(x) = cos(x - π/2); sin is odd so folding flips amplitude sign
            let f = mu - phis[i];
            let (f, sign) = if f < 0.0 { (-f, -1.0) } else { (f, 1.0) };
            push_cos(&mut raw2, f, -0.5 * PI, sign * 2.0 * g * w[i]);
            for (fr, ph, c) in raw2 {
                terms.push(OscTerm { coeff: c, power: 3.0, omega: fr, phase: ph });
            }
        }
    }
    OscSum { terms, valid_from: 0.0, trunc_rel: if slabs.is_empty() { 0.0 } else { 1e-9 } }
}

fn ball_osc_sum(n: usize, scale: f64, det: f64) -> OscSum {
    // ĝ(rθ) = det² (2π/u)ⁿ J_{n/2}(u)², u = scale·r, expanded by Hankel:
    // J² = (1/(πu)) [ (P²+Q²) + (P²-Q²)cos(2u+φ₀) - 2PQ cos(2u+φ₀-π/2) ]
    let mu = 0.5 * n as f64;
    let layers = 12usize;
    let (sum, diff, cross) = hankel_square_series(mu, layers);
    let phi0 = -PI * mu - 0.5 * PI;
    let c0 = det * det * (2.0 * PI).powf(n as f64) / PI;
    let mut terms = Vec::new();
    for k in 0..=layers {
        // u^{-n-1-k} = scale^{-n-1-k} r^{-n-1-k}
        let pw = n as f64 + 1.0 + k as f64;
        let sc = c0 * scale.powf(-pw);
        if sum[k].abs() > 1e-16 {
            terms.push(OscTerm { coeff: sc * sum[k], power: pw, omega: 0.0, phase: 0.0 });
        }
        if diff[k].abs() > 1e-16 {
            terms.push(OscTerm { coeff: sc * diff[k], power: pw, omega: 2.0 * scale, phase: phi0 });
        }
        if cross[k].abs() > 1e-16 {
            terms.push(OscTerm {
                coeff: -sc * cross[k],
                power: pw,
                omega: 2.0 * scale,
                phase: phi0 - 0.5 * PI,
            });
        }
    }
    let valid = 25.0 / scale;
    let trunc = sum[layers].abs() * valid.powf(-(layers as f64)) / sum[0].abs().max(1e-300);
    OscSum { terms, valid_from: valid, trunc_rel: trunc }
}

/// The Mellin integral behind `ρ_{F_p K}(θ)^p`, routed through closed forms
/// where they exist and split quadrature otherwise.
pub fn mellin_ghat(body: &BodySpec, theta: &[f64], p: f64, quad: &QuadConfig) -> Result<MellinResult> {
    mellin_ghat_routed(body, theta, p, quad, false)
}

/// Same with `force_split = true` to exercise the quadrature route where a
/// closed form would normally answer.
pub fn mellin_ghat_routed(
    body: &BodySpec,
    theta: &[f64],
    p: f64,
    quad: &QuadConfig,
    force_split: bool,
) -> Result<MellinResult> {
    if p <= 0.0 {
        return Err(Error::Domain(format!("mellin_ghat requires p > 0, got {p}")));
    }
    let vol = body.volume();
    if !force_split {
        match body {
            BodySpec::Box { half_widths } => {
                let active: Vec<(f64, f64)> = half_widths
                    .iter()
                    .zip(theta)
                    .filter(|(a, th)| (*a * *th).abs() >= 1e-14)
                    .map(|(a, th)| (*a, th.abs()))
                    .collect();
                let inactive: f64 = half_widths
                    .iter()
                    .zip(theta)
                    .filter(|(a, th)| (*a * *th).abs() < 1e-14)
                    .map(|(a, _)| 4.0 * a * a)
                    .product();
                match active.len() {
                    1 => {
                        let (a, th) = active[0];
                        if p >= 2.0 {
                            return Ok(MellinResult::diverged());
                        }
                        // ∫ 4 sin²(a th r)/(th² r²) r^{p-1} dr = 4 (a th)^{2-p} I_p / th²
                        let ath = a * th;
                        let integral =
                            inactive * 4.0 * ath.powf(2.0 - p) / (th * th) * sin_sq_mellin(p);
                        return Ok(MellinResult {
                            value: p * integral / vol,
                            err: 1e-13 * p * integral / vol,
                            route: MellinRoute::ClosedForm,
                        });
                    }
                    2 => {
                        if p >= 4.0 {
                            return Ok(MellinResult::diverged());
                        }
                        let (a1, t1) = active[0];
                        let (a2, t2) = active[1];
                        // p ∫ 16 sin²sin²/(t1² t2² r⁴) r^{p-1} = 16 dpB/(t1² t2²)
                        let dpb = sin_sq_pair_mellin(p, a1 * t1, a2 * t2);
                        let value = inactive * 16.0 * dpb / (t1 * t1 * t2 * t2) / vol;
                        return Ok(MellinResult {
                            value,
                            err: 1e-12 * value.abs(),
                            route: MellinRoute::ClosedForm,
                        });
                    }
                    _ => {} // n = 3 boxes go through the split route
                }
            }
            BodySpec::Ellipsoid { matrix, .. } => {
                let n = body.dim();
                if p >= n as f64 + 1.0 {
                    return Ok(MellinResult::diverged());
                }
                let t = Mat::from_rows(matrix).expect("validated");
                let s = norm(&t.tr_matvec(theta));
                let det = t.det().abs();
                // p/V · det² s^{-p} (2π)ⁿ ∫ J_{n/2}² u^{p-n-1} du
                let mellin = bessel_mellin_sq(0.5 * n as f64, p - n as f64)?;
                let value =
                    p / vol * det * det * s.powf(-p) * (2.0 * PI).powf(n as f64) * mellin;
                return Ok(MellinResult { value, err: 1e-12 * value, route: MellinRoute::ClosedForm });
            }
            _ => {}
        }
    }
    // split quadrature: adaptive head + analytic cosine-sum tail
    let osc = ghat_osc_sum(body, theta)?;
    let dc_decay = osc.dc_decay();
    if p >= dc_decay - 1e-9 {
        return Ok(MellinResult::diverged());
    }
    let omega_max = osc.terms.iter().map(|t| t.omega).fold(0.0, f64::max);
    let r0 = quad.r0.unwrap_or(32.0 / omega_max.max(1e-9)).max(osc.valid_from).max(1.0);
    let ghat = |r: f64| -> f64 {
        if r == 0.0 {
            vol * vol
        } else {
            let xi: Vec<f64> = theta.iter().map(|t| t * r).collect();
            chi_hat(body, &xi).map(|c| c.abs2()).unwrap_or(0.0)
        }
    };
    // head on [0, r0] with oscillation-resolving panels
    let mut breaks: Vec<f64> = Vec::new();
    let step = if omega_max > 0.0 { PI / omega_max } else { r0 };
    let mut x = step.min(r0);
    while x < r0 {
        breaks.push(x);
        x += step;
    }
    breaks.push(r0);
    let (head, head_err) = ray_power_integral(&ghat, p - 1.0, RayWeight::Power, &breaks, quad.tol);
    let (tail, tail_err) = match osc.tail_integral(p, r0, quad.tol) {
        OscTail::Finite { value, err } => (value, err),
        OscTail::Divergent => return Ok(MellinResult::diverged()),
    };
    let value = p * (head + tail) / vol;
    let err = p * (head_err + tail_err) / vol;
    Ok(MellinResult { value, err, route: MellinRoute::SplitQuadrature })
}

/// Mellin value through segment summation with sequence acceleration;
/// the fallback route for integrands without a usable cosine sum. Also used
/// as an engine self-check.
pub fn mellin_ghat_segmented(
    body: &BodySpec,
    theta: &[f64],
    p: f64,
    quad: &QuadConfig,
) -> Result<MellinResult> {
    if p <= 0.0 {
        return Err(Error::Domain(format!("mellin_ghat requires p > 0, got {p}")));
    }
    let vol = body.volume();
    let osc = ghat_osc_sum(body, theta).ok();
    let omega_max = osc
        .as_ref()
        .map(|o| o.terms.iter().map(|t| t.omega).fold(0.0, f64::max))
        .unwrap_or(2.0);
    let ghat = |r: f64| -> f64 {
        if r == 0.0 {
            vol * vol
        } else {
            let xi: Vec<f64> = theta.iter().map(|t| t * r).collect();
            chi_hat(body, &xi).map(|c| c.abs2()).unwrap_or(0.0)
        }
    };
    let f = |r: f64| ghat(r) * r.powf(p - 1.0);
    let r0 = 16.0 / omega_max.max(1e-9);
    let mut breaks: Vec<f64> = Vec::new();
    let step = PI / omega_max.max(1e-9);
    let mut x = step.min(r0);
    while x < r0 {
        breaks.push(x);
        x += step;
    }
    breaks.push(r0);
    let (head, head_err) = ray_power_integral(&ghat, p - 1.0, RayWeight::Power, &breaks, quad.tol);
    // full period of the dominant oscillation keeps the segment sums smooth
    let period = 2.0 * PI / omega_max.max(1e-9);
    match segmented_tail(&f, r0, period, quad.max_segments, quad.tol) {
        None => Ok(MellinResult::diverged()),
        Some((tail, tail_err)) => {
            let value = p * (head + tail) / vol;
            Ok(MellinResult {
                value,
                err: p * (head_err + tail_err) / vol,
                route: MellinRoute::SplitQuadrature,
            })
        }
    }
}

/// Optimal decay exponent of `ĝ(rθ)`: 2 for boxes, n+1 for ellipsoids;
/// polygons and planar simplices get a numeric lower estimate from log-log
/// regression of directional maxima, flagged as such.
#[derive(Clone, Copy, Debug)]
pub struct FourierIndex {
    pub value: f64,
    pub estimated: bool,
}

pub fn fourier_index(body: &BodySpec) -> Result<FourierIndex> {
    match body {
        BodySpec::Box { .. } => Ok(FourierIndex { value: 2.0, estimated: false }),
        BodySpec::Ellipsoid { .. } => {
            Ok(FourierIndex { value: body.dim() as f64 + 1.0, estimated: false })
        }
        BodySpec::Polygon { .. } | BodySpec::Simplex { .. } => {
            if body.dim() != 2 {
                return Err(Error::Unsupported("index estimate needs a planar body".into()));
            }
            let body = body.centered();
            // direction grid plus the exact edge normals (the slow directions)
            let mut dirs: Vec<[f64; 2]> = (0..96)
                .map(|k| {
                    let a = PI * (k as f64 + 0.5) / 96.0;
                    [a.cos(), a.sin()]
                })
                .collect();
            if let BodySpec::Polygon { vertices } = &body {
                let m = vertices.len();
                for i in 0..m {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    let d = [b[0] - a[0], b[1] - a[1]];
                    let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
                    dirs.push([d[1] / l, -d[0] / l]);
                }
            }
            let diam = body.diameter();
            let radii: Vec<f64> = (0..14).map(|k| 20.0 / diam * 1.6f64.powi(k)).collect();
            let mut pts: Vec<(f64, f64)> = Vec::new();
            for &r in &radii {
                // local max of ĝ over a window in r dodges the zeros
                let mut best: f64 = 0.0;
                for th in &dirs {
                    for j in 0..8 {
                        let rr = r * (1.0 + 0.12 * j as f64 / 8.0);
                        let v = g_hat(&body, &[rr * th[0], rr * th[1]])?;
                        best = best.max(v);
                    }
                }
                pts.push((r.ln(), best.max(1e-300).ln()));
            }
            let n = pts.len() as f64;
            let sx: f64 = pts.iter().map(|p| p.0).sum();
            let sy: f64 = pts.iter().map(|p| p.1).sum();
            let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
            let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            Ok(FourierIndex { value: (-slope).max(2.0), estimated: true })
        }
    }
}

/// Closed-form sanity value: `g_{B_2^n}` check through the Fourier side,
/// kept here because tests for both modules use it.
pub fn ball_ghat_reference(n: usize, r: f64) -> f64 {
    if r < 1e-9 {
        return omega(n as f64).powi(2);
    }
    let c = (2.0 * PI / r).powf(0.5 * n as f64) * bessel_j(0.5 * n as f64, r);
    c * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{unit_ball, unit_cube, AffineMap};
    use crate::covariogram::{covariogram, section_breakpoints};
    use crate::linalg::normalize;
    use crate::quad::adaptive_segmented;

    #[test]
    fn chi_hat_box_values() {
        let b = BodySpec::Box { half_widths: vec![1.0, 1.0] };
        assert!((chi_hat(&b, &[0.0, 0.0]).unwrap().re - 4.0).abs() < 1e-14);
        assert!(chi_hat(&b, &[PI, 0.0]).unwrap().re.abs() < 1e-14);
        let v = chi_hat(&b, &[1.3, -0.4]).unwrap();
        let expect = 4.0 * (1.3f64.sin() / 1.3) * (0.4f64.sin() / 0.4);
        assert!((v.re - expect).abs() < 1e-13 && v.im.abs() < 1e-15);
    }

    #[test]
    fn chi_hat_ball_limit_and_value() {
        let b2 = unit_ball(2);
        let near0 = chi_hat(&b2, &[1e-8, 0.0]).unwrap();
        assert!((near0.re - PI).abs() < 1e-9);
        // ĝ at |ξ| = 5: (2π/5)² J₁(5)², frozen from the Bessel oracle
        let g = g_hat(&b2, &[5.0, 0.0]).unwrap();
        let expect = (2.0 * PI / 5.0).powi(2) * 0.32757913759146522f64.powi(2);
        assert!((g - expect).abs() < 1e-12, "{g} vs {expect}");
        assert!((g - 0.169_454_145_761_208_67).abs() < 1e-10);
    }

    #[test]
    fn polygon_square_matches_box_product() {
        let square = BodySpec::Polygon {
            vertices: vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]],
        };
        let b = BodySpec::Box { half_widths: vec![1.0, 1.0] };
        let mut state = 123u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 12.0 - 6.0
        };
        for _ in 0..40 {
            let xi = [rnd(), rnd()];
            let a = chi_hat(&square, &xi).unwrap();
            let c = chi_hat(&b, &xi).unwrap();
            assert!(
                (a.re - c.re).abs() < 1e-10 && (a.im - c.im).abs() < 1e-10,
                "xi {xi:?}: ({},{}) vs ({},{})",
                a.re,
                a.im,
                c.re,
                c.im
            );
        }
        // edge-parallel ξ goes through the sinc limit without blowing up
        let v = chi_hat(&square, &[3.0, 0.0]).unwrap();
        let expect = chi_hat(&b, &[3.0, 0.0]).unwrap();
        assert!((v.re - expect.re).abs() < 1e-12);
    }

    #[test]
    fn chi_hat_contravariance() {
        // χ̂_{TK}(ξ) = |det T| χ̂_K(Tᵗξ) for linear T
        let t = Mat::from_rows(&[vec![1.4, 0.3], vec![-0.2, 0.8]]).unwrap();
        let map = AffineMap { linear: t.clone(), shift: vec![0.0, 0.0] };
        let det = t.det().abs();
        for body in [
            unit_ball(2),
            BodySpec::Polygon { vertices: vec![[1.0, 0.0], [-0.2, 0.9], [-0.8, -0.4]] },
        ] {
            let img = crate::bodies::apply_affine(&map, &body).unwrap();
            for xi in [[0.7, 1.9], [3.0, -2.0], [0.03, 0.01]] {
                let lhs = chi_hat(&img, &xi).unwrap();
                let txi = t.tr_matvec(&xi);
                let rhs = chi_hat(&body, &txi).unwrap();
                assert!(
                    (lhs.re - det * rhs.re).abs() < 1e-9 && (lhs.im - det * rhs.im).abs() < 1e-9,
                    "contravariance fails for {body:?} at {xi:?}"
                );
            }
        }
    }

    #[test]
    fn g_hat_basics() {
        let q2 = unit_cube(2);
        assert!((g_hat(&q2, &[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-13);
        // sinc zeros of the scaled cube [-1,1]²
        let big = BodySpec::Box { half_widths: vec![1.0, 1.0] };
        assert!(g_hat(&big, &[2.0 * PI, 2.0 * PI]).unwrap() < 1e-25);
        // evenness
        let tri = BodySpec::Polygon { vertices: vec![[1.0, 0.0], [-0.2, 0.9], [-0.8, -0.4]] };
        for xi in [[1.1, 0.3], [4.0, -2.5]] {
            let a = g_hat(&tri, &xi).unwrap();
            let b = g_hat(&tri, &[-xi[0], -xi[1]]).unwrap();
            assert!((a - b).abs() < 1e-12 * (a.abs() + 1e-12));
        }
    }

    #[test]
    fn ghat_matches_parallel_section_transform() {
        // ĝ(rθ) = |1-D transform of A_{K,θ} at r|²
        let q2 = unit_cube(2);
        let th = normalize(&[2.0, 1.0]);
        let pts = section_breakpoints(&q2, &th);
        for &r in &[0.8, 2.0, 5.5] {
            let re_f = |s: f64| crate::covariogram::parallel_section(&q2, &th, s) * (r * s).cos();
            let im_f = |s: f64| -crate::covariogram::parallel_section(&q2, &th, s) * (r * s).sin();
            let (re, _) = adaptive_segmented(&re_f, &pts, 1e-11);
            let (im, _) = adaptive_segmented(&im_f, &pts, 1e-11);
            let lhs = g_hat(&q2, &[r * th[0], r * th[1]]).unwrap();
            let rhs = re * re + im * im;
            assert!((lhs - rhs).abs() < 1e-9, "r={r}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn osc_sum_reproduces_ghat_box_polygon() {
        let q2 = unit_cube(2);
        let tri =
            BodySpec::Polygon { vertices: vec![[1.0, 0.0], [-0.2, 0.9], [-0.8, -0.4]] }.centered();
        for (body, dirs) in [
            (&q2, vec![normalize(&[1.0, 0.3]), normalize(&[1.0, 1.0]), normalize(&[0.2, -0.9])]),
            (&tri, vec![normalize(&[0.9, 0.1]), normalize(&[-0.3, 0.8])]),
        ] {
            for th in dirs {
                let osc = ghat_osc_sum(body, &th).unwrap();
                for &r in &[3.0, 7.7, 19.2, 54.3] {
                    let direct = g_hat(body, &[r * th[0], r * th[1]]).unwrap();
                    let sum = osc.eval(r);
                    assert!(
                        (direct - sum).abs() < 1e-10 * (1.0 + direct.abs()),
                        "{body:?} r={r}: {direct} vs {sum}"
                    );
                }
            }
        }
    }

    #[test]
    fn osc_sum_matches_hankel_ball() {
        let b2 = unit_ball(2);
        let osc = ghat_osc_sum(&b2, &[1.0, 0.0]).unwrap();
        for &r in &[30.0, 60.0, 200.0] {
            let direct = ball_ghat_reference(2, r);
            let sum = osc.eval(r);
            assert!(
                (direct - sum).abs() < 1e-10 * direct.abs().max(1e-6),
                "r={r}: {direct} vs {sum}"
            );
        }
    }

    #[test]
    fn mellin_interval_closed_form() {
        // ρ_{F_p[-1,1]} = ((p/(2-p)) Γ(p/2)Γ(1/2)/Γ((3-p)/2))^{1/p}; π at p=1
        let seg = BodySpec::Box { half_widths: vec![1.0] };
        let quad = QuadConfig::default();
        let m = mellin_ghat(&seg, &[1.0], 1.0, &quad).unwrap();
        assert_eq!(m.route, MellinRoute::ClosedForm);
        assert!((m.value - PI).abs() < 1e-12, "got {}", m.value);
        for &p in &[0.3, 0.9, 1.5, 1.9] {
            let m = mellin_ghat(&seg, &[1.0], p, &quad).unwrap();
            let expect =
                p / (2.0 - p) * gamma(0.5 * p) * gamma(0.5) / gamma(0.5 * (3.0 - p));
            assert!((m.value - expect).abs() < 1e-10 * expect, "p={p}");
        }
        assert!(mellin_ghat(&seg, &[1.0], 2.0, &quad).unwrap().is_diverged());
    }

    #[test]
    fn mellin_ball_closed_form_16_over_3() {
        let b2 = unit_ball(2);
        let quad = QuadConfig::default();
        let m = mellin_ghat(&b2, &[1.0, 0.0], 1.0, &quad).unwrap();
        assert!((m.value - 16.0 / 3.0).abs() < 1e-10, "got {}", m.value);
        // the ω-ratio form of the same constant
        let by_omegas = (2.0 * PI).powf(1.0) * omega(3.0) * omega(1.0).powi(2)
            / (omega(2.0) * omega(1.0) * omega(2.0));
        assert!((m.value - by_omegas).abs() < 1e-10);
        assert!(mellin_ghat(&b2, &[1.0, 0.0], 3.0, &quad).unwrap().is_diverged());
        assert!(!mellin_ghat(&b2, &[1.0, 0.0], 2.9, &quad).unwrap().is_diverged());
    }

    #[test]
    fn mellin_box_axis_divergence_and_diagonal() {
        let sq = BodySpec::Box { half_widths: vec![1.0, 1.0] };
        let quad = QuadConfig::default();
        // axis: diverges at p = 2
        assert!(mellin_ghat(&sq, &[1.0, 0.0], 2.0, &quad).unwrap().is_diverged());
        let ok = mellin_ghat(&sq, &[1.0, 0.0], 1.5, &quad).unwrap();
        assert!(!ok.is_diverged());
        // off-axis converges beyond p = 2
        let d = normalize(&[1.0, 1.0]);
        assert!(!mellin_ghat(&sq, &d, 2.5, &quad).unwrap().is_diverged());
        assert!(mellin_ghat(&sq, &d, 4.0, &quad).unwrap().is_diverged());
    }

    #[test]
    fn mellin_square_closed_vs_split() {
        let sq = BodySpec::Box { half_widths: vec![1.0, 1.0] };
        let quad = QuadConfig::default();
        for ang in [0.2f64, 0.5, PI / 4.0, 1.1] {
            let th = [ang.cos(), ang.sin()];
            for &p in &[0.5, 1.0, 1.5, 2.0, 2.5] {
                let closed = mellin_ghat(&sq, &th, p, &quad).unwrap();
                let split = mellin_ghat_routed(&sq, &th, p, &quad, true).unwrap();
                assert_eq!(closed.route, MellinRoute::ClosedForm);
                assert_eq!(split.route, MellinRoute::SplitQuadrature);
                assert!(
                    (closed.value - split.value).abs() < 1e-7 * closed.value.max(1.0),
                    "ang={ang} p={p}: closed {} vs split {}",
                    closed.value,
                    split.value
                );
            }
        }
    }

    #[test]
    fn mellin_selftest_interval_and_ball() {
        // split-quadrature route matches the closed forms on a p grid up to
        // index - 0.1
        let quad = QuadConfig::default();
        let seg = BodySpec::Box { half_widths: vec![1.0] };
        for &p in &[0.25, 0.75, 1.25, 1.7, 1.9] {
            let closed = mellin_ghat(&seg, &[1.0], p, &quad).unwrap();
            let split = mellin_ghat_routed(&seg, &[1.0], p, &quad, true).unwrap();
            assert!(
                (closed.value - split.value).abs() < 1e-6 * closed.value.max(1.0),
                "interval p={p}: {} vs {}",
                closed.value,
                split.value
            );
        }
        let b2 = unit_ball(2);
        for &p in &[0.5, 1.0, 1.5, 2.0, 2.5, 2.9] {
            let closed = mellin_ghat(&b2, &[1.0, 0.0], p, &quad).unwrap();
            let split = mellin_ghat_routed(&b2, &[1.0, 0.0], p, &quad, true).unwrap();
            assert!(
                (closed.value - split.value).abs() < 1e-6 * closed.value.max(1.0),
                "ball p={p}: {} vs {}",
                closed.value,
                split.value
            );
        }
    }

    #[test]
    fn mellin_segmented_engine_selftest() {
        let quad = QuadConfig::default();
        let seg = BodySpec::Box { half_widths: vec![1.0] };
        for &p in &[0.5, 1.0, 1.5] {
            let closed = mellin_ghat(&seg, &[1.0], p, &quad).unwrap();
            let segm = mellin_ghat_segmented(&seg, &[1.0], p, &quad).unwrap();
            assert!(
                (closed.value - segm.value).abs() < 1e-5 * closed.value.max(1.0),
                "interval p={p}: {} vs {} (err {})",
                closed.value,
                segm.value,
                segm.err
            );
        }
        // divergence heuristic trips at the index
        assert!(mellin_ghat_segmented(&seg, &[1.0], 2.0, &quad).unwrap().is_diverged());
        let b2 = unit_ball(2);
        for &p in &[1.0, 2.0] {
            let closed = mellin_ghat(&b2, &[1.0, 0.0], p, &quad).unwrap();
            let segm = mellin_ghat_segmented(&b2, &[1.0, 0.0], p, &quad).unwrap();
            assert!(
                (closed.value - segm.value).abs() < 1e-5 * closed.value.max(1.0),
                "ball p={p}: {} vs {}",
                closed.value,
                segm.value
            );
        }
    }

    #[test]
    fn mellin_polygon_two_representations() {
        // polygon square equals the box closed form through the osc-sum route
        let square = BodySpec::Polygon {
            vertices: vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]],
        };
        let sq = BodySpec::Box { half_widths: vec![1.0, 1.0] };
        let quad = QuadConfig::default();
        for ang in [0.35f64, 0.9] {
            let th = [ang.cos(), ang.sin()];
            for &p in &[0.5, 1.0, 1.5] {
                let a = mellin_ghat(&square, &th, p, &quad).unwrap();
                let b = mellin_ghat(&sq, &th, p, &quad).unwrap();
                assert!(
                    (a.value - b.value).abs() < 1e-6 * b.value.max(1.0),
                    "ang={ang} p={p}: polygon {} vs box {}",
                    a.value,
                    b.value
                );
            }
        }
        // edge-normal direction of the polygon square: slab order, diverges at 2
        assert!(mellin_ghat(&square, &[1.0, 0.0], 2.0, &quad).unwrap().is_diverged());
        let fine = mellin_ghat(&square, &[1.0, 0.0], 1.0, &quad).unwrap();
        let reference = mellin_ghat(&sq, &[1.0, 0.0], 1.0, &quad).unwrap();
        assert!(
            (fine.value - reference.value).abs() < 1e-6 * reference.value,
            "slab route {} vs {}",
            fine.value,
            reference.value
        );
    }

    #[test]
    fn fourier_index_known_and_estimated() {
        assert_eq!(fourier_index(&unit_cube(2)).unwrap().value, 2.0);
        assert_eq!(fourier_index(&unit_ball(2)).unwrap().value, 3.0);
        assert_eq!(fourier_index(&unit_ball(3)).unwrap().value, 4.0);
        // regular hexagon: estimate ≥ 2 and flagged
        let hexagon = BodySpec::Polygon {
            vertices: (0..6)
                .map(|k| {
                    let a = PI * k as f64 / 3.0;
                    [a.cos(), a.sin()]
                })
                .collect(),
        };
        let idx = fourier_index(&hexagon).unwrap();
        assert!(idx.estimated);
        assert!(idx.value >= 2.0 && idx.value < 3.0, "estimate {}", idx.value);
    }

    #[test]
    fn ghat_is_transform_of_covariogram() {
        // ĝ should agree with a direct 2-D transform of g_K on a grid
        let q2 = unit_cube(2);
        let th = normalize(&[1.0, 0.7]);
        let r = 3.0;
        let xi = [r * th[0], r * th[1]];
        // ∫ g(x) cos(⟨x,ξ⟩) dx over the difference body (g even kills the sin part)
        let n = 400;
        let mut acc = 0.0;
        let h = 2.0 / n as f64;
        for i in 0..n {
            let x = -1.0 + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = -1.0 + (j as f64 + 0.5) * h;
                acc += covariogram(&q2, &[x, y]).value * (x * xi[0] + y * xi[1]).cos();
            }
        }
        acc *= h * h;
        let direct = g_hat(&q2, &xi).unwrap();
        assert!((acc - direct).abs() < 1e-4, "{acc} vs {direct}");
    }
}
