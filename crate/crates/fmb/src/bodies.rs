//! Exact representations of the convex bodies everything else computes with:
//! axis-aligned boxes, ellipsoids (linear images of the unit ball), strictly
//! convex planar polygons, and simplices. Volumes, supports, membership,
//! radial functions and affine images are all closed-form; uniform sampling
//! is rejection from the bounding box; the isotropic normalization whitens
//! the second-moment matrix and rescales to volume one.

use crate::error::{Error, Result};
use crate::linalg::{cross2, dot, norm, sub, Mat};
use crate::specfun::omega;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A convex body, described exactly.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BodySpec {
    /// `Π [-a_i, a_i]`, half-widths positive.
    Box { half_widths: Vec<f64> },
    /// `T B_2^n + center` with `det T > 0`.
    Ellipsoid { matrix: Vec<Vec<f64>>, center: Vec<f64> },
    /// Strictly convex, counterclockwise vertex list in the plane.
    Polygon { vertices: Vec<[f64; 2]> },
    /// `n+1` affinely independent vertices in `n` dimensions.
    Simplex { vertices: Vec<Vec<f64>> },
}

/// An invertible affine map `x ↦ Lx + shift`.
#[derive(Clone, Debug)]
pub struct AffineMap {
    pub linear: Mat,
    pub shift: Vec<f64>,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        AffineMap { linear: Mat::identity(n), shift: vec![0.0; n] }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.linear.matvec(x);
        for (yi, si) in y.iter_mut().zip(&self.shift) {
            *yi += si;
        }
        y
    }
}

impl BodySpec {
    pub fn dim(&self) -> usize {
        match self {
            BodySpec::Box { half_widths } => half_widths.len(),
            BodySpec::Ellipsoid { center, .. } => center.len(),
            BodySpec::Polygon { .. } => 2,
            BodySpec::Simplex { vertices } => vertices.len().saturating_sub(1),
        }
    }

    /// Validate invariants: positive volume, strict convexity, invertibility.
    pub fn validate(&self) -> Result<()> {
        match self {
            BodySpec::Box { half_widths } => {
                if half_widths.is_empty() || half_widths.iter().any(|&a| !(a > 0.0)) {
                    return Err(Error::InvalidBody("box half-widths must be positive".into()));
                }
            }
            BodySpec::Ellipsoid { matrix, center } => {
                let n = center.len();
                if matrix.len() != n || matrix.iter().any(|r| r.len() != n) || n == 0 {
                    return Err(Error::InvalidBody("ellipsoid matrix shape mismatch".into()));
                }
                let t = Mat::from_rows(matrix)?;
                if !(t.det() > 0.0) {
                    return Err(Error::InvalidBody(
                        "ellipsoid matrix must have positive determinant".into(),
                    ));
                }
            }
            BodySpec::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::InvalidBody("polygon needs at least 3 vertices".into()));
                }
                let m = vertices.len();
                let scale: f64 = vertices
                    .iter()
                    .map(|v| v[0].abs().max(v[1].abs()))
                    .fold(0.0, f64::max);
                for i in 0..m {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    let c = vertices[(i + 2) % m];
                    let cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
                    // float-safe strict convexity with area-scaled slack
                    if cr <= 1e-12 * scale * scale {
                        return Err(Error::InvalidBody(format!(
                            "polygon not strictly convex/counterclockwise at vertex {i}"
                        )));
                    }
                }
            }
            BodySpec::Simplex { vertices } => {
                let n = self.dim();
                if n == 0 || vertices.len() != n + 1 || vertices.iter().any(|v| v.len() != n) {
                    return Err(Error::InvalidBody("simplex needs n+1 vertices in R^n".into()));
                }
                if self.volume() <= 0.0 {
                    return Err(Error::InvalidBody("degenerate simplex".into()));
                }
            }
        }
        if !(self.volume() > 0.0) {
            return Err(Error::InvalidBody("body must have positive volume".into()));
        }
        Ok(())
    }

    /// Exact volume: product, determinant, shoelace, `|det|/n!`.
    pub fn volume(&self) -> f64 {
        match self {
            BodySpec::Box { half_widths } => half_widths.iter().map(|a| 2.0 * a).product(),
            BodySpec::Ellipsoid { matrix, center } => {
                let t = Mat::from_rows(matrix).expect("validated");
                t.det().abs() * omega(center.len() as f64)
            }
            BodySpec::Polygon { vertices } => {
                let m = vertices.len();
                let mut area = 0.0;
                for i in 0..m {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    area += a[0] * b[1] - b[0] * a[1];
                }
                0.5 * area
            }
            BodySpec::Simplex { vertices } => {
                let n = self.dim();
                let rows: Vec<Vec<f64>> =
                    (1..=n).map(|i| sub(&vertices[i], &vertices[0])).collect();
                let m = Mat::from_rows(&rows).expect("validated");
                let mut fact = 1.0;
                for k in 2..=n {
                    fact *= k as f64;
                }
                m.det().abs() / fact
            }
        }
    }

    /// Exact centroid.
    pub fn centroid(&self) -> Vec<f64> {
        match self {
            BodySpec::Box { half_widths } => vec![0.0; half_widths.len()],
            BodySpec::Ellipsoid { center, .. } => center.clone(),
            BodySpec::Polygon { vertices } => {
                let m = vertices.len();
                let mut cx = 0.0;
                let mut cy = 0.0;
                let mut area = 0.0;
                for i in 0..m {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    let w = a[0] * b[1] - b[0] * a[1];
                    area += w;
                    cx += (a[0] + b[0]) * w;
                    cy += (a[1] + b[1]) * w;
                }
                vec![cx / (3.0 * area), cy / (3.0 * area)]
            }
            BodySpec::Simplex { vertices } => {
                let n = self.dim();
                (0..n)
                    .map(|j| vertices.iter().map(|v| v[j]).sum::<f64>() / (n + 1) as f64)
                    .collect()
            }
        }
    }

    /// Translate so the centroid sits at the origin. The mean-body families
    /// are translation invariant, so this is the canonical position.
    pub fn centered(&self) -> BodySpec {
        let c = self.centroid();
        if norm(&c) == 0.0 {
            return self.clone();
        }
        match self {
            BodySpec::Box { .. } => self.clone(),
            BodySpec::Ellipsoid { matrix, center } => BodySpec::Ellipsoid {
                matrix: matrix.clone(),
                center: vec![0.0; center.len()],
            },
            BodySpec::Polygon { vertices } => BodySpec::Polygon {
                vertices: vertices.iter().map(|v| [v[0] - c[0], v[1] - c[1]]).collect(),
            },
            BodySpec::Simplex { vertices } => BodySpec::Simplex {
                vertices: vertices.iter().map(|v| sub(v, &c)).collect(),
            },
        }
    }

    /// Support function `h_K(u) = max_{x∈K} ⟨x,u⟩` (u need not be unit).
    pub fn support(&self, u: &[f64]) -> f64 {
        match self {
            BodySpec::Box { half_widths } => {
                half_widths.iter().zip(u).map(|(a, ui)| a * ui.abs()).sum()
            }
            BodySpec::Ellipsoid { matrix, center } => {
                let t = Mat::from_rows(matrix).expect("validated");
                norm(&t.tr_matvec(u)) + dot(center, u)
            }
            BodySpec::Polygon { vertices } => vertices
                .iter()
                .map(|v| v[0] * u[0] + v[1] * u[1])
                .fold(f64::NEG_INFINITY, f64::max),
            BodySpec::Simplex { vertices } => {
                vertices.iter().map(|v| dot(v, u)).fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            BodySpec::Box { half_widths } => {
                half_widths.iter().zip(x).all(|(a, xi)| xi.abs() <= *a)
            }
            BodySpec::Ellipsoid { matrix, center } => {
                let t = Mat::from_rows(matrix).expect("validated");
                let inv = t.inverse().expect("validated");
                norm(&inv.matvec(&sub(x, center))) <= 1.0
            }
            BodySpec::Polygon { vertices } => {
                let m = vertices.len();
                (0..m).all(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= -1e-12
                })
            }
            BodySpec::Simplex { vertices } => {
                // barycentric coordinates via a linear solve
                let n = self.dim();
                let rows: Vec<Vec<f64>> =
                    (1..=n).map(|i| sub(&vertices[i], &vertices[0])).collect();
                let m = Mat::from_rows(&rows).expect("validated").transpose();
                let Ok(inv) = m.inverse() else { return false };
                let lam = inv.matvec(&sub(x, &vertices[0]));
                let s: f64 = lam.iter().sum();
                lam.iter().all(|&l| l >= -1e-12) && s <= 1.0 + 1e-12
            }
        }
    }

    /// Radial function `ρ_K(θ) = sup{t > 0 : tθ ∈ K}` for bodies with the
    /// origin in the interior.
    pub fn radial(&self, theta: &[f64]) -> f64 {
        match self {
            BodySpec::Box { half_widths } => {
                let mut t = f64::INFINITY;
                for (a, th) in half_widths.iter().zip(theta) {
                    if th.abs() > 0.0 {
                        t = t.min(a / th.abs());
                    }
                }
                t
            }
            BodySpec::Ellipsoid { matrix, center } => {
                // solve |T^{-1}(tθ - c)| = 1 for the positive root
                let t = Mat::from_rows(matrix).expect("validated");
                let inv = t.inverse().expect("validated");
                let d = inv.matvec(theta);
                let e = inv.matvec(center);
                let a = dot(&d, &d);
                let b = -2.0 * dot(&d, &e);
                let c = dot(&e, &e) - 1.0;
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    return 0.0;
                }
                (-b + disc.sqrt()) / (2.0 * a)
            }
            BodySpec::Polygon { vertices } => {
                let m = vertices.len();
                let mut best = f64::INFINITY;
                for i in 0..m {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    // outward normal of edge a->b is (by-ay, ax-bx) rotated; use line eq
                    let nx = b[1] - a[1];
                    let ny = a[0] - b[0];
                    let denom = nx * theta[0] + ny * theta[1];
                    let c = nx * a[0] + ny * a[1];
                    if denom < -1e-300 {
                        // pointing away; skip
                        continue;
                    }
                    if denom > 0.0 {
                        let t = c / denom;
                        if t > 0.0 {
                            best = best.min(t);
                        }
                    }
                }
                best
            }
            BodySpec::Simplex { vertices } => {
                // faces: for each dropped vertex, the hyperplane of the rest
                let n = self.dim();
                let mut best = f64::INFINITY;
                for drop in 0..=n {
                    let face: Vec<&Vec<f64>> =
                        (0..=n).filter(|&i| i != drop).map(|i| &vertices[i]).collect();
                    // normal via solving; use n=dim system: normal ⟂ spans
                    let rows: Vec<Vec<f64>> =
                        (1..n).map(|i| sub(face[i], face[0])).collect();
                    let nrm = hyperplane_normal(&rows, n);
                    let c = dot(&nrm, face[0]);
                    let inside = dot(&nrm, &vertices[drop]);
                    // orient outward: interior side has smaller value
                    let (nrm, c) = if inside > c {
                        (nrm.iter().map(|x| -x).collect::<Vec<_>>(), -c)
                    } else {
                        (nrm, c)
                    };
                    let denom = dot(&nrm, theta);
                    if denom > 1e-300 {
                        let t = c / denom;
                        if t > 0.0 {
                            best = best.min(t);
                        }
                    }
                }
                best
            }
        }
    }

    /// Axis-aligned bounding half-widths around the origin-centered body
    /// (assumes the body is centered; callers center first).
    pub fn bounding_halfwidths(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let hi = self.support(&e);
                e[i] = -1.0;
                let lo = self.support(&e);
                hi.max(lo)
            })
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        // cheap over-estimate via the bounding box diagonal
        2.0 * norm(&self.bounding_halfwidths())
    }

    /// Second moment matrix `M_ij = ∫_K x_i x_j dx` (exact, body centered).
    pub fn second_moment(&self) -> Mat {
        match self {
            BodySpec::Box { half_widths } => {
                let vol = self.volume();
                Mat::diag(
                    &half_widths.iter().map(|a| vol * a * a / 3.0).collect::<Vec<_>>(),
                )
            }
            BodySpec::Ellipsoid { matrix, center } => {
                let n = center.len() as f64;
                let t = Mat::from_rows(matrix).expect("validated");
                let det = t.det().abs();
                // ∫_B y yᵗ dy = ω_n/(n+2) I
                t.matmul(&t.transpose()).scale(det * omega(n) / (n + 2.0))
            }
            BodySpec::Polygon { vertices } => {
                let m = vertices.len();
                let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    let w = cross2(&a, &b);
                    sxx += w * (a[0] * a[0] + a[0] * b[0] + b[0] * b[0]);
                    syy += w * (a[1] * a[1] + a[1] * b[1] + b[1] * b[1]);
                    sxy += w * (2.0 * a[0] * a[1] + a[0] * b[1] + b[0] * a[1] + 2.0 * b[0] * b[1]);
                }
                Mat::from_rows(&[vec![sxx / 12.0, sxy / 24.0], vec![sxy / 24.0, syy / 12.0]])
                    .expect("2x2")
            }
            BodySpec::Simplex { vertices } => {
                let n = self.dim();
                let vol = self.volume();
                let denom = ((n + 1) * (n + 2)) as f64;
                let mut m = Mat::zeros(n);
                let mut s = vec![0.0; n];
                for v in vertices {
                    for i in 0..n {
                        s[i] += v[i];
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = s[i] * s[j];
                        for v in vertices {
                            acc += v[i] * v[j];
                        }
                        m.set(i, j, vol * acc / denom);
                    }
                }
                m
            }
        }
    }
}

fn hyperplane_normal(spanning: &[Vec<f64>], n: usize) -> Vec<f64> {
    match n {
        2 => {
            let d = &spanning[0];
            vec![-d[1], d[0]]
        }
        3 => {
            let a = &spanning[0];
            let b = &spanning[1];
            vec![
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        }
        _ => {
            // generalized cross product via cofactor expansion
            let mut nrm = vec![0.0; n];
            for j in 0..n {
                let mut rows = Vec::with_capacity(n - 1);
                for r in spanning {
                    let mut row = Vec::with_capacity(n - 1);
                    for (k, &x) in r.iter().enumerate() {
                        if k != j {
                            row.push(x);
                        }
                    }
                    rows.push(row);
                }
                let minor = Mat::from_rows(&rows).expect("square minor").det();
                nrm[j] = if j % 2 == 0 { minor } else { -minor };
            }
            nrm
        }
    }
}

/// Image of a body under an invertible affine map, staying within the exact
/// variant families. Non-diagonal linear images of boxes in n ≥ 3 have no
/// exact representative here and are rejected.
pub fn apply_affine(map: &AffineMap, body: &BodySpec) -> Result<BodySpec> {
    let n = body.dim();
    if map.linear.n != n {
        return Err(Error::UnsupportedTransform("dimension mismatch".into()));
    }
    let det = map.linear.det();
    if det == 0.0 {
        return Err(Error::UnsupportedTransform("singular linear part".into()));
    }
    Ok(match body {
        BodySpec::Box { half_widths } => {
            if n == 2 {
                let a = half_widths;
                let corners = [
                    [a[0], a[1]],
                    [-a[0], a[1]],
                    [-a[0], -a[1]],
                    [a[0], -a[1]],
                ];
                let mut verts: Vec<[f64; 2]> = corners
                    .iter()
                    .map(|c| {
                        let y = map.apply(&[c[0], c[1]]);
                        [y[0], y[1]]
                    })
                    .collect();
                if det < 0.0 {
                    verts.reverse();
                }
                // rotate to canonical start (not required, keeps output stable)
                BodySpec::Polygon { vertices: verts }
            } else {
                let diag_only = (0..n).all(|i| {
                    (0..n).all(|j| i == j || map.linear.at(i, j).abs() < 1e-14)
                });
                if !diag_only {
                    return Err(Error::UnsupportedTransform(
                        "general linear image of a box in n >= 3 is not exactly representable"
                            .into(),
                    ));
                }
                BodySpec::Box {
                    half_widths: half_widths
                        .iter()
                        .enumerate()
                        .map(|(i, a)| a * map.linear.at(i, i).abs())
                        .collect(),
                }
            }
        }
        BodySpec::Ellipsoid { matrix, center } => {
            let t = Mat::from_rows(matrix)?;
            let mut lt = map.linear.matmul(&t);
            if lt.det() < 0.0 {
                // flip one column of the ball preimage; same ellipsoid
                for i in 0..n {
                    let v = lt.at(i, 0);
                    lt.set(i, 0, -v);
                }
            }
            BodySpec::Ellipsoid { matrix: lt.rows(), center: map.apply(center) }
        }
        BodySpec::Polygon { vertices } => {
            let mut verts: Vec<[f64; 2]> = vertices
                .iter()
                .map(|v| {
                    let y = map.apply(&[v[0], v[1]]);
                    [y[0], y[1]]
                })
                .collect();
            if det < 0.0 {
                verts.reverse();
            }
            BodySpec::Polygon { vertices: verts }
        }
        BodySpec::Simplex { vertices } => BodySpec::Simplex {
            vertices: vertices.iter().map(|v| map.apply(v)).collect(),
        },
    })
}

/// Deterministic uniform samples by rejection from the bounding box
/// (exact for boxes). The stream is a function of the seed alone.
pub fn sample_uniform(body: &BodySpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = body.dim();
    let c = body.centroid();
    let centered = body.centered();
    let hw = centered.bounding_halfwidths();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> =
            (0..n).map(|i| rng.random_range(-hw[i]..hw[i])).collect();
        if centered.contains(&x) {
            out.push(x.iter().zip(&c).map(|(xi, ci)| xi + ci).collect());
        }
    }
    out
}

/// Result of the isotropic normalization.
#[derive(Clone, Debug)]
pub struct IsotropicData {
    pub normalizing_map: AffineMap,
    pub l_k: f64,
    /// Monte-Carlo standard error of the covariance entries (0 when exact).
    pub mc_err: f64,
}

/// Affine map sending the centered body to isotropic position: volume one
/// and direction-independent second moments `L_K²`.
///
/// Covariance is exact for boxes and ellipsoids; polygons and simplices are
/// estimated by seeded Monte Carlo.
pub fn isotropic_position(body: &BodySpec, mc_samples: usize, seed: u64) -> Result<IsotropicData> {
    let body = body.centered();
    let n = body.dim();
    let vol = body.volume();
    let (m, mc_err) = match &body {
        BodySpec::Box { .. } | BodySpec::Ellipsoid { .. } => (body.second_moment(), 0.0),
        _ => {
            let pts = sample_uniform(&body, mc_samples, seed);
            let mut m = Mat::zeros(n);
            for x in &pts {
                for i in 0..n {
                    for j in 0..n {
                        let v = m.at(i, j) + x[i] * x[j];
                        m.set(i, j, v);
                    }
                }
            }
            let scale = vol / mc_samples as f64;
            let m = m.scale(scale);
            // entrywise standard error ~ Vol * std(x_i x_j)/sqrt(N)
            let spread = m.at(0, 0).abs().max(1e-300);
            (m, spread / (mc_samples as f64).sqrt() * 2.0)
        }
    };
    let white = m.sym_inv_sqrt()?;
    // scale so the image has volume 1
    let det_w = white.det();
    let c = (det_w * vol).powf(-1.0 / n as f64);
    let linear = white.scale(c);
    let l_k2 = c * c / vol;
    Ok(IsotropicData {
        normalizing_map: AffineMap { linear, shift: vec![0.0; n] },
        l_k: l_k2.sqrt(),
        mc_err,
    })
}

/// Radial function of the difference body `DK = K + (-K)`:
/// `ρ_{DK}(θ) = h_K(θ) + h_K(-θ)`.
pub fn difference_body_radial(body: &BodySpec, theta: &[f64]) -> f64 {
    let neg: Vec<f64> = theta.iter().map(|x| -x).collect();
    body.support(theta) + body.support(&neg)
}

/// Unit ball as an ellipsoid spec.
pub fn unit_ball(n: usize) -> BodySpec {
    BodySpec::Ellipsoid { matrix: Mat::identity(n).rows(), center: vec![0.0; n] }
}

/// The cube `[-1/2, 1/2]^n`.
pub fn unit_cube(n: usize) -> BodySpec {
    BodySpec::Box { half_widths: vec![0.5; n] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::normalize;

    fn triangle() -> BodySpec {
        BodySpec::Simplex { vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]] }
    }

    #[test]
    fn volumes_exact() {
        assert!((BodySpec::Box { half_widths: vec![1.0, 1.0] }.volume() - 4.0).abs() < 1e-15);
        assert!((unit_ball(2).volume() - std::f64::consts::PI).abs() < 1e-14);
        assert!((triangle().volume() - 0.5).abs() < 1e-15);
        let pentagon = BodySpec::Polygon {
            vertices: vec![[1.0, 0.0], [0.31, 0.95], [-0.81, 0.59], [-0.81, -0.59], [0.31, -0.95]],
        };
        pentagon.validate().unwrap();
        assert!(pentagon.volume() > 0.0);
    }

    #[test]
    fn validation_rejects_degenerate() {
        assert!(BodySpec::Box { half_widths: vec![1.0, -1.0] }.validate().is_err());
        assert!(BodySpec::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]
        }
        .validate()
        .is_err());
        // clockwise polygon rejected
        assert!(BodySpec::Polygon {
            vertices: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]
        }
        .validate()
        .is_err());
        assert!(BodySpec::Ellipsoid {
            matrix: vec![vec![1.0, 0.0], vec![1.0, 0.0]],
            center: vec![0.0, 0.0]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn support_and_contains() {
        let b = BodySpec::Box { half_widths: vec![1.0, 1.0] };
        assert!((b.support(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!((b.support(&normalize(&[1.0, 1.0])) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!(unit_ball(2).contains(&[0.5, 0.5]));
        assert!(!unit_ball(2).contains(&[0.8, 0.8]));
        assert!(triangle().contains(&[0.2, 0.2]));
        assert!(!triangle().contains(&[0.8, 0.8]));
    }

    #[test]
    fn radial_functions() {
        let q2 = unit_cube(2);
        assert!((q2.radial(&[1.0, 0.0]) - 0.5).abs() < 1e-15);
        let d = normalize(&[1.0, 1.0]);
        assert!((q2.radial(&d) - 0.5 * 2.0f64.sqrt()).abs() < 1e-15);
        assert!((unit_ball(3).radial(&normalize(&[1.0, 2.0, -1.0])) - 1.0).abs() < 1e-14);
        let tri = triangle().centered();
        // radial at a few angles agrees with support-based containment
        for k in 0..12 {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / 12.0;
            let th = [ang.cos(), ang.sin()];
            let r = tri.radial(&th);
            assert!(tri.contains(&[0.999 * r * th[0], 0.999 * r * th[1]]));
            assert!(!tri.contains(&[1.001 * r * th[0], 1.001 * r * th[1]]));
        }
    }

    #[test]
    fn affine_identity_and_volume_covariance() {
        let map = AffineMap::identity(2);
        let tri = triangle();
        let img = apply_affine(&map, &tri).unwrap();
        assert_eq!(img, tri);
        let t = AffineMap {
            linear: Mat::from_rows(&[vec![2.0, 1.0], vec![0.0, 1.5]]).unwrap(),
            shift: vec![0.3, -0.7],
        };
        let det = t.linear.det().abs();
        for body in [
            unit_cube(2),
            unit_ball(2),
            BodySpec::Polygon { vertices: vec![[1.0, 0.0], [-0.2, 0.9], [-0.8, -0.4]] },
            triangle(),
        ] {
            let img = apply_affine(&t, &body).unwrap();
            assert!(
                (img.volume() - det * body.volume()).abs() < 1e-12 * img.volume(),
                "volume covariance for {body:?}"
            );
        }
    }

    #[test]
    fn affine_support_covariance() {
        // h_{TK}(θ) = h_K(Tᵗθ)
        let t = Mat::from_rows(&[vec![1.2, 0.4], vec![-0.3, 0.9]]).unwrap();
        let map = AffineMap { linear: t.clone(), shift: vec![0.0, 0.0] };
        let mut state = 7u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for body in [unit_cube(2), unit_ball(2), triangle()] {
            let img = apply_affine(&map, &body).unwrap();
            for _ in 0..20 {
                let th = normalize(&[rnd(), rnd()]);
                let lhs = img.support(&th);
                let rhs = body.support(&t.tr_matvec(&th));
                assert!((lhs - rhs).abs() < 1e-10, "support covariance {body:?}");
            }
        }
    }

    #[test]
    fn box_rejects_shear_in_3d() {
        let mut shear = Mat::identity(3);
        shear.set(0, 1, 0.5);
        let map = AffineMap { linear: shear, shift: vec![0.0; 3] };
        assert!(matches!(
            apply_affine(&map, &unit_cube(3)),
            Err(Error::UnsupportedTransform(_))
        ));
        // diagonal maps stay boxes
        let d = AffineMap { linear: Mat::diag(&[2.0, 1.0, 0.5]), shift: vec![0.0; 3] };
        assert!(matches!(apply_affine(&d, &unit_cube(3)).unwrap(), BodySpec::Box { .. }));
    }

    #[test]
    fn sampling_statistics() {
        // mean near centroid
        let b = BodySpec::Box { half_widths: vec![1.0, 1.0] };
        let pts = sample_uniform(&b, 100_000, 42);
        let mean: Vec<f64> = (0..2)
            .map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / pts.len() as f64)
            .collect();
        assert!(mean[0].abs() < 0.02 && mean[1].abs() < 0.02, "mean {mean:?}");
        // determinism
        let again = sample_uniform(&b, 64, 42);
        assert_eq!(&pts[..64], &again[..]);
        // triangle samples are inside
        let tri = triangle();
        assert!(sample_uniform(&tri, 2000, 7).iter().all(|p| tri.contains(p)));
    }

    #[test]
    fn ellipsoid_acceptance_rate() {
        // acceptance ratio ω_n / 2ⁿ within 3σ of the binomial oracle
        let n = 2;
        let trials = 200_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let ball = unit_ball(n);
        let mut hits = 0usize;
        for _ in 0..trials {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            if ball.contains(&x) {
                hits += 1;
            }
        }
        let p = omega(n as f64) / 4.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let got = hits as f64 / trials as f64;
        assert!((got - p).abs() < 3.0 * sigma, "rate {got} vs {p} (sigma {sigma})");
    }

    #[test]
    fn isotropic_cube_is_identity() {
        let data = isotropic_position(&unit_cube(2), 0, 0).unwrap();
        // unit cube is already isotropic: map = identity, L² = 1/12
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((data.normalizing_map.linear.at(i, j) - expect).abs() < 1e-12);
            }
        }
        assert!((data.l_k * data.l_k - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn isotropic_ellipse_matches_ball_value() {
        // volume-1 ball in the plane: L² = π r⁴/4 with r = π^{-1/2}
        let e = BodySpec::Ellipsoid {
            matrix: vec![vec![3.0, 0.0], vec![0.4, 0.5]],
            center: vec![0.0, 0.0],
        };
        let data = isotropic_position(&e, 0, 0).unwrap();
        let r = std::f64::consts::PI.powf(-0.5);
        let expect = (std::f64::consts::PI * r.powi(4) / 4.0).sqrt();
        assert!((data.l_k - expect).abs() < 1e-12, "L_K {} vs {}", data.l_k, expect);
        // idempotence: applying the map again is the identity within tolerance
        let img = apply_affine(&data.normalizing_map, &e).unwrap();
        let again = isotropic_position(&img, 0, 0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((again.normalizing_map.linear.at(i, j) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn isotropic_polygon_mc_constant_moments() {
        let pent = BodySpec::Polygon {
            vertices: vec![[1.3, 0.0], [0.31, 0.95], [-0.81, 0.59], [-0.81, -0.59], [0.31, -0.95]],
        };
        let data = isotropic_position(&pent, 200_000, 42).unwrap();
        let img = apply_affine(&data.normalizing_map, &pent.centered()).unwrap();
        assert!((img.volume() - 1.0).abs() < 1e-10);
        // ∫⟨x,θ⟩² constant over sampled θ within 3x the MC standard error
        let m = img.second_moment();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..32 {
            let ang = std::f64::consts::PI * k as f64 / 32.0;
            let th = [ang.cos(), ang.sin()];
            let v = m.at(0, 0) * th[0] * th[0]
                + 2.0 * m.at(0, 1) * th[0] * th[1]
                + m.at(1, 1) * th[1] * th[1];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(hi - lo <= 3.0 * data.mc_err, "spread {} vs err {}", hi - lo, data.mc_err);
    }

    #[test]
    fn difference_body_values() {
        let q2 = unit_cube(2);
        assert!((difference_body_radial(&q2, &[1.0, 0.0]) - 1.0).abs() < 1e-15);
        let d = normalize(&[1.0, 1.0]);
        assert!((difference_body_radial(&q2, &d) - 2.0f64.sqrt()).abs() < 1e-14);
        let th = normalize(&[0.3, -0.8]);
        assert!((difference_body_radial(&unit_ball(2), &th) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip_bit_exact() {
        let bodies = vec![
            BodySpec::Box { half_widths: vec![0.5, 0.5] },
            BodySpec::Ellipsoid {
                matrix: vec![vec![1.0, 0.125], vec![0.0, 0.7]],
                center: vec![0.1, -0.2],
            },
            BodySpec::Polygon { vertices: vec![[1.0, 0.0], [-0.2, 0.9], [-0.8, -0.4]] },
            BodySpec::Simplex {
                vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            },
        ];
        for b in bodies {
            let s = serde_json::to_string(&b).unwrap();
            let back: BodySpec = serde_json::from_str(&s).unwrap();
            assert_eq!(b, back);
            let s2 = serde_json::to_string(&back).unwrap();
            assert_eq!(s, s2);
        }
        // schema spot check
        let s = serde_json::to_string(&BodySpec::Box { half_widths: vec![0.5] }).unwrap();
        assert_eq!(s, r#"{"type":"box","half_widths":[0.5]}"#);
    }

    #[test]
    fn second_moment_polygon_matches_mc() {
        let tri = triangle().centered();
        let m = tri.second_moment();
        let pts = sample_uniform(&tri, 400_000, 5);
        let vol = tri.volume();
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            let mc: f64 =
                pts.iter().map(|p| p[i] * p[j]).sum::<f64>() / pts.len() as f64 * vol;
            assert!((m.at(i, j) - mc).abs() < 5e-4, "M[{i}{j}] {} vs MC {}", m.at(i, j), mc);
        }
    }
}
