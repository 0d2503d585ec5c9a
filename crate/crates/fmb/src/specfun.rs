//! Special functions and the named scalar coefficients used by the body
//! families: Gamma/digamma, Bessel `J_μ`, the Mellin transform of `J_μ²`,
//! the Dirichlet-type sine integral, and the coefficient bundle
//! (`m`, `κ`, `κ_s`, `λ`, `d_p`, binomial radii, ball volumes `ω_q`).
//!
//! All routines are pure `f64` with no global state.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Lanczos coefficients (Pugh's 11-term set, g = 10.900511), giving close to
/// full double accuracy on the positive axis.
const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];
const LANCZOS_R: f64 = 10.900_511;
const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_7;

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |s, (i, &d)| s + d / (x + i as f64 - 1.0))
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `cos(πx/2)` reduced to the nearest integer multiple of π/2, so the value
/// is exact at integers and fully accurate near them (plain `cos` loses
/// eight digits close to odd integers).
pub fn cos_half_pi(x: f64) -> f64 {
    let k = x.round();
    let d = x - k; // exact, |d| ≤ 1/2
    match (k as i64).rem_euclid(4) {
        0 => (0.5 * PI * d).cos(),
        1 => -(0.5 * PI * d).sin(),
        2 => -(0.5 * PI * d).cos(),
        _ => (0.5 * PI * d).sin(),
    }
}

/// `sin(πx/2)` with the same reduction.
pub fn sin_half_pi(x: f64) -> f64 {
    let k = x.round();
    let d = x - k;
    match (k as i64).rem_euclid(4) {
        0 => (0.5 * PI * d).sin(),
        1 => (0.5 * PI * d).cos(),
        2 => -(0.5 * PI * d).sin(),
        _ => -(0.5 * PI * d).cos(),
    }
}

/// Gamma function. Reflection below 1/2, Lanczos otherwise.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (i, &d)| s + d / (i as f64 - x));
        PI / ((PI * x).sin()
            * s
            * TWO_SQRT_E_OVER_PI
            * ((0.5 - x + LANCZOS_R) / std::f64::consts::E).powf(0.5 - x))
    } else {
        lanczos_sum(x)
            * TWO_SQRT_E_OVER_PI
            * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).powf(x - 0.5)
    }
}

/// `ln |Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI.ln() - (PI * x).sin().abs().ln() - ln_gamma(1.0 - x)
    } else {
        let s = lanczos_sum(x);
        s.ln() + TWO_SQRT_E_OVER_PI.ln()
            + (x - 0.5) * ((x - 0.5 + LANCZOS_R).ln() - 1.0)
    }
}

/// Digamma ψ(x): recurrence up to x ≥ 8, then the asymptotic series;
/// reflection for negative non-integer arguments.
pub fn digamma(x: f64) -> f64 {
    if x < 0.0 {
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 8.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // Bernoulli-number asymptotics.
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + x.ln() - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2
                    * (1.0 / 120.0
                        - inv2
                            * (1.0 / 252.0
                                - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))))
}

/// Trigamma ψ′(x) for x > 0: recurrence then asymptotics.
pub fn trigamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 8.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv * (1.0 + 0.5 * inv + inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0))))
}

/// Tetragamma ψ″(x) for x > 0.
fn tetragamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 8.0 {
        acc -= 2.0 / (x * x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc - inv2 * (1.0 + inv + inv2 * (0.5 - inv2 * (1.0 / 6.0 - inv2 * 0.3)))
}

/// Γ, ln Γ and ψ at one point, rejecting poles explicitly.
pub fn gamma_family(x: f64) -> Result<GammaTriple> {
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    Ok(GammaTriple { gamma: gamma(x), ln_gamma: ln_gamma(x), digamma: digamma(x) })
}

#[derive(Clone, Copy, Debug)]
pub struct GammaTriple {
    pub gamma: f64,
    pub ln_gamma: f64,
    pub digamma: f64,
}

/// n-th harmonic number.
pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Volume of the unit ball in (possibly fractional) dimension `q > -2`:
/// `ω_q = π^{q/2} / Γ(1 + q/2)`.
pub fn omega(q: f64) -> f64 {
    PI.powf(0.5 * q) / gamma(1.0 + 0.5 * q)
}

/// Generalized binomial `C(a + p, p) = Γ(a+p+1)/(Γ(a+1) Γ(p+1))`.
pub fn binom_general(a: f64, p: f64) -> f64 {
    (ln_gamma(a + p + 1.0) - ln_gamma(a + 1.0) - ln_gamma(p + 1.0)).exp()
}

/// Bessel function of the first kind, μ ≥ 0, t ≥ 0.
///
/// Power series below `max(12, 2μ)`, Hankel asymptotics above; both branches
/// agree to ~1e-11 in the overlap.
pub fn bessel_j(mu: f64, t: f64) -> f64 {
    assert!(mu >= 0.0 && t >= 0.0);
    if t == 0.0 {
        return if mu == 0.0 { 1.0 } else { 0.0 };
    }
    if t < (2.0 * mu).max(12.0) {
        bessel_j_series(mu, t)
    } else {
        bessel_j_asymptotic(mu, t)
    }
}

fn bessel_j_series(mu: f64, t: f64) -> f64 {
    let half = 0.5 * t;
    // leading coefficient via logs to dodge overflow for large mu
    let mut term = (mu * half.ln() - ln_gamma(mu + 1.0)).exp();
    let mut sum = term;
    let q = half * half;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * (mu + kf));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel expansion coefficients a_k(μ) = Π (4μ² - (2i-1)²) / (k! 8^k).
fn hankel_coeffs(mu: f64, n: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(n + 1);
    a.push(1.0);
    let mu2 = 4.0 * mu * mu;
    for k in 1..=n {
        let prev = a[k - 1];
        let odd = (2 * k - 1) as f64;
        a.push(prev * (mu2 - odd * odd) / (8.0 * k as f64));
    }
    a
}

fn bessel_j_asymptotic(mu: f64, t: f64) -> f64 {
    let a = hankel_coeffs(mu, 14);
    let mut p = 0.0;
    let mut q = 0.0;
    let inv = 1.0 / t;
    let mut powk = 1.0;
    let mut best_p = f64::INFINITY;
    for (k, &ak) in a.iter().enumerate() {
        let term = ak * powk;
        if term.abs() > best_p {
            break; // asymptotic series turned; stop at smallest term
        }
        best_p = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        powk *= inv;
    }
    let chi = t - 0.5 * mu * PI - 0.25 * PI;
    (2.0 / (PI * t)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `P² ± Q²` and `2PQ` coefficient series (in 1/t) of the Hankel expansion;
/// used by the numeric Mellin tail for ball transforms.
pub fn hankel_square_series(mu: f64, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let a = hankel_coeffs(mu, n);
    // P(t) = Σ (-1)^k a_{2k} t^{-2k},  Q(t) = Σ (-1)^k a_{2k+1} t^{-2k-1}
    let mut pc = vec![0.0; n + 1];
    let mut qc = vec![0.0; n + 1];
    for k in 0..=n {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pc[k] = sign * a[k];
        } else {
            qc[k] = sign * a[k];
        }
    }
    let conv = |x: &[f64], y: &[f64]| {
        let mut out = vec![0.0; n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                out[i + j] += x[i] * y[j];
            }
        }
        out
    };
    let pp = conv(&pc, &pc);
    let qq = conv(&qc, &qc);
    let pq = conv(&pc, &qc);
    let sum: Vec<f64> = pp.iter().zip(&qq).map(|(a, b)| a + b).collect();
    let diff: Vec<f64> = pp.iter().zip(&qq).map(|(a, b)| a - b).collect();
    let cross: Vec<f64> = pq.iter().map(|x| 2.0 * x).collect();
    (sum, diff, cross)
}

/// Mellin transform of `J_μ²`:
/// `∫_0^∞ J_μ²(t) t^{ν-1} dt` on the sharp strip `-1/2 < -ν/2 < μ`.
pub fn bessel_mellin_sq(mu: f64, nu: f64) -> Result<f64> {
    if !(-0.5 < -0.5 * nu) {
        return Err(Error::Domain(format!(
            "bessel_mellin_sq requires -1/2 < -nu/2, got nu = {nu}"
        )));
    }
    if !(-0.5 * nu < mu) {
        return Err(Error::Domain(format!(
            "bessel_mellin_sq requires -nu/2 < mu, got mu = {mu}, nu = {nu}"
        )));
    }
    let value = (ln_gamma(1.0 - nu) - (1.0 - nu) * std::f64::consts::LN_2
        - 2.0 * ln_gamma(1.0 - 0.5 * nu)
        + ln_gamma(mu + 0.5 * nu)
        - ln_gamma(mu + 1.0 - 0.5 * nu))
    .exp();
    Ok(value)
}

/// Closed form of the Dirichlet-type integral `∫_0^∞ x^{p-2} sin(ax) dx`
/// for `a > 0`, `1 < p < 2`:  `a^{1-p} Γ(p) cos(πp/2) / (1-p)`.
pub fn dirichlet_sine(a: f64, p: f64) -> Result<f64> {
    if !(1.0 < p && p < 2.0) {
        return Err(Error::Domain(format!("dirichlet_sine requires 1 < p < 2, got {p}")));
    }
    if a <= 0.0 {
        return Err(Error::Domain(format!("dirichlet_sine requires a > 0, got {a}")));
    }
    Ok(a.powf(1.0 - p) * gamma(p) * cos_half_pi(p) / (1.0 - p))
}

/// Coefficient `m(p)` tied to the cosine-transform inversion at order `p-n`.
///
/// Even non-negative integer offsets use the exact factorial branch
/// (`m(n) = 1`); negative integer offsets hit genuine Gamma poles and are
/// reported as not applicable.
pub fn m_coeff(n: u32, p: f64) -> Option<f64> {
    let off = p - n as f64;
    let k = off.round();
    if (off - k).abs() < 1e-12 {
        let k = k as i64;
        if k >= 0 && k % 2 == 0 {
            // (p-n)! (-1)^{(p-n)/2}
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            return Some(fact * sign);
        }
        if k >= 0 {
            // odd positive offset: sine branch is finite, fall through
        } else {
            return None; // Γ(p-n+1) pole without a cancelling sine zero
        }
    }
    Some(-2.0 / PI * gamma(off + 1.0) * sin_half_pi(off))
}

/// `κ(p) = C(2n+p, p)^{-1/p}` with the limit `e^{-H_{2n}}` at `p = 0`.
pub fn kappa(n: u32, p: f64) -> f64 {
    kappa_s(n, p, 1.0 / n as f64)
}

/// `κ_s(p) = C(1/s + n + p, p)^{-1/p}`; at `p = 0` the limit
/// `exp(ψ(1) - ψ(1/s + n + 1))`. Tiny `|p|` goes through the digamma
/// series so the ratio stays accurate across the branch point.
pub fn kappa_s(n: u32, p: f64, s: f64) -> f64 {
    let a = 1.0 / s + n as f64;
    if p.abs() < 1e-4 {
        // ln C(a+p, p)/p = Σ_k p^{k-1} (ψ^{(k-1)}(a+1) - ψ^{(k-1)}(1)) / k!
        let lead = digamma(a + 1.0) - digamma(1.0);
        let c1 = 0.5 * (trigamma(a + 1.0) - trigamma(1.0));
        let c2 = (tetragamma(a + 1.0) - tetragamma(1.0)) / 6.0;
        (-(lead + p * (c1 + p * c2))).exp()
    } else {
        binom_general(a, p).powf(-1.0 / p)
    }
}

/// `λ(p) = ( C(2n-p, 2n) / (Γ(p+1) cos(πp/2)) )^{1/p}` on `(0,1)`,
/// `λ(1) = 1/(πn)` by continuity.
pub fn lambda(n: u32, p: f64) -> Result<f64> {
    if !(0.0 < p && p <= 1.0) {
        return Err(Error::Domain(format!("lambda defined on (0,1], got {p}")));
    }
    if p == 1.0 {
        return Ok(1.0 / (PI * n as f64));
    }
    let two_n = 2.0 * n as f64;
    let binom = binom_general(two_n - p, -p).recip(); // C(2n-p, 2n) = C(2n-p, -p)^{-1}? avoid; compute directly
    // C(2n-p, 2n) = Γ(2n-p+1) / (Γ(2n+1) Γ(1-p))
    let _ = binom;
    let c = (ln_gamma(two_n - p + 1.0) - ln_gamma(two_n + 1.0) - ln_gamma(1.0 - p)).exp();
    Ok((c / (gamma(p + 1.0) * cos_half_pi(p))).powf(1.0 / p))
}

/// `d_p = cos(πp/2) Γ(p+1) 2^{1-p} / ((4-p)(3-p)(2-p)(1-p))`.
///
/// The removable points at p = 1 and p = 3 are evaluated through
/// `cos(πp/2) = ±sin(π(1∓p)/2)` paired with the matching root of the
/// denominator; p = 2 is a genuine pole of `d_p` alone.
pub fn d_p(p: f64) -> Result<f64> {
    if !(0.0 < p && p < 4.0) || (p - 2.0).abs() < 1e-14 {
        return Err(Error::Domain(format!("d_p defined on (0,4) \\ {{2}}, got {p}")));
    }
    Ok(d_p_split(p).0 / (2.0 - p))
}

/// `d_p * (2-p)` (analytic across p = 2) and a flag that is true when the
/// sinc pairing used p = 1 rather than p = 3.
pub(crate) fn d_p_split(p: f64) -> (f64, bool) {
    let g = gamma(p + 1.0) * (1.0 - p).exp2();
    // cos(πp/2) = sin(π(1-p)/2) = -sin(π(3-p)/2): pair with the nearer root.
    if (p - 1.0).abs() <= (p - 3.0).abs() {
        let u = 0.5 * PI * (1.0 - p);
        let sinc = if u.abs() < 1e-8 { 1.0 - u * u / 6.0 } else { u.sin() / u };
        // cos(πp/2)/(1-p) = (π/2) sinc(u)
        (0.5 * PI * sinc * g / ((4.0 - p) * (3.0 - p)), true)
    } else {
        let u = 0.5 * PI * (3.0 - p);
        let sinc = if u.abs() < 1e-8 { 1.0 - u * u / 6.0 } else { u.sin() / u };
        // cos(πp/2)/(3-p) = -(π/2) sinc(u)
        (-0.5 * PI * sinc * g / ((4.0 - p) * (1.0 - p)), false)
    }
}

/// `C(n+p, n)^{1/p}` with the `p → 0` limit `e^{H_n}`.
pub fn binom_radial(n: u32, p: f64) -> f64 {
    if p == 0.0 {
        harmonic(n).exp()
    } else {
        binom_general(n as f64, p).powf(1.0 / p)
    }
}

/// All named scalar coefficients at a given dimension and order.
/// Fields outside their branch's domain carry `None`.
#[derive(Clone, Debug)]
pub struct CoeffBundle {
    pub n: u32,
    pub p: f64,
    pub m_p: Option<f64>,
    pub kappa_p: f64,
    pub kappa_s_p: Option<f64>,
    pub lambda_p: Option<f64>,
    pub d_p: Option<f64>,
    pub binom_radial: f64,
    pub omega_n: f64,
    /// `ψ(1) + H_q` at `q = p - n` for even non-negative integer offsets.
    pub alpha_q: Option<f64>,
}

/// Evaluate the coefficient bundle; `s` parameterizes `κ_s` when given.
pub fn coefficients(n: u32, p: f64, s: Option<f64>) -> CoeffBundle {
    assert!(n >= 1);
    let alpha_q = {
        let off = p - n as f64;
        let k = off.round();
        if (off - k).abs() < 1e-12 && k >= 0.0 && (k as i64) % 2 == 0 {
            Some(digamma(1.0) + harmonic(k as u32))
        } else {
            None
        }
    };
    CoeffBundle {
        n,
        p,
        m_p: m_coeff(n, p),
        kappa_p: kappa(n, p),
        kappa_s_p: s.map(|s| kappa_s(n, p, s)),
        lambda_p: lambda(n, p).ok(),
        d_p: d_p(p).ok(),
        binom_radial: binom_radial(n, p),
        omega_n: omega(n as f64),
        alpha_q,
    }
}
