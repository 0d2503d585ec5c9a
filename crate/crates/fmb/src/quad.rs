//! One-dimensional quadrature kernels used throughout the crate.
//!
//! Three layers:
//! - a 7/15 Gauss–Kronrod panel rule with adaptive bisection,
//! - power-weighted ray integrals `∫ f(r) r^α (log r)^k dr` with dyadic
//!   panels toward `r = 0`, so endpoint singularities with `α > -1` are
//!   resolved to machine accuracy,
//! - oscillatory tails `∫_R^∞ r^σ cos(ωr + φ) dr` evaluated by a finite
//!   Gauss–Kronrod stretch plus integration-by-parts recursion, and the
//!   `OscSum` representation (decaying cosine sums) whose Mellin tails are
//!   integrated term by term.
//!
//! Sequence acceleration (Wynn epsilon, Levin u) backs the segment-summed
//! fallback for tails that have no usable cosine-sum form.

/// Quadrature and Monte-Carlo policy shared by the evaluators.
#[derive(Clone, Debug)]
pub struct QuadConfig {
    /// absolute tolerance target for one-dimensional integrals
    pub tol: f64,
    /// angular / spherical grid size for sampled objects
    pub grid: usize,
    /// Monte-Carlo sample count for stochastic fallbacks
    pub mc_samples: usize,
    pub seed: u64,
    /// override for the oscillatory split radius (body-scaled default)
    pub r0: Option<f64>,
    /// segment budget of the accelerated tail fallback
    pub max_segments: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: 1e-8,
            grid: 1024,
            mc_samples: 200_000,
            seed: 42,
            r0: None,
            max_segments: 320,
        }
    }
}

/// Kronrod abscissae for the 7-15 pair, positive half.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_3,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// 7-point Gauss weights (for the error estimate).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod panel on `[a, b]`. Returns `(value, err_estimate)`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * h;
    // Scaled error heuristic as in QUADPACK's rescale.
    let mut resabs = 0.0;
    for (j, &x) in fv.iter().enumerate() {
        let w = if j <= 7 { WGK[j] } else { WGK[14 - j] };
        resabs += w * x.abs();
    }
    resabs *= h.abs();
    let raw = ((kronrod - gauss) * h).abs();
    let err = if resabs > 0.0 && raw > 0.0 {
        let scale = (200.0 * raw / resabs).powf(1.5);
        if scale < 1.0 {
            resabs * scale
        } else {
            raw
        }
    } else {
        raw
    };
    (value, err.max(f64::EPSILON * resabs))
}

/// Adaptive Gauss–Kronrod over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    adaptive_segmented(f, &[a, b], tol)
}

/// Adaptive quadrature over a pre-split panel list (sorted breakpoints).
/// Splitting at known kinks restores the spectral panel convergence.
pub fn adaptive_segmented<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], tol: f64) -> (f64, f64) {
    #[derive(PartialEq)]
    struct Panel {
        err: f64,
        a: f64,
        b: f64,
        val: f64,
    }
    impl Eq for Panel {}
    impl PartialOrd for Panel {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Panel {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.err.partial_cmp(&other.err).unwrap_or(std::cmp::Ordering::Equal)
        }
    }
    let mut heap = std::collections::BinaryHeap::new();
    let mut total = 0.0;
    let mut toterr = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(f, w[0], w[1]);
        total += v;
        toterr += e;
        heap.push(Panel { err: e, a: w[0], b: w[1], val: v });
    }
    let mut evals = breaks.len().max(2) - 1;
    while toterr > tol && evals < 20_000 {
        let Some(worst) = heap.pop() else { break };
        if worst.err < 1e-3 * tol / (heap.len() as f64 + 1.0) {
            heap.push(worst);
            break;
        }
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Panel at floating-point resolution; keep its estimate.
            total += 0.0;
            toterr -= worst.err * 0.0;
            break;
        }
        let (v1, e1) = gk15(f, worst.a, m);
        let (v2, e2) = gk15(f, m, worst.b);
        total += v1 + v2 - worst.val;
        toterr += e1 + e2 - worst.err;
        heap.push(Panel { err: e1, a: worst.a, b: m, val: v1 });
        heap.push(Panel { err: e2, a: m, b: worst.b, val: v2 });
        evals += 2;
    }
    (total, toterr.abs())
}

/// Extra weight carried by [`ray_power_integral`].
#[derive(Clone, Copy, PartialEq)]
pub enum RayWeight {
    /// plain `r^alpha`
    Power,
    /// `r^alpha * ln(r)`
    PowerLog,
}

/// `∫_0^B f(r) r^α w(r) dr` with `α > -1`, `w` per [`RayWeight`], panels split
/// at `breaks` (interior kinks of `f`; the last entry is the upper limit).
///
/// The first panel is subdivided dyadically toward 0 and finished with the
/// analytic leading term `f(0) ε^{α+1}/(α+1)`, which keeps fractional-power
/// and logarithmic endpoint weights at full accuracy.
pub fn ray_power_integral<F: Fn(f64) -> f64>(
    f: &F,
    alpha: f64,
    weight: RayWeight,
    breaks: &[f64],
    tol: f64,
) -> (f64, f64) {
    assert!(alpha > -1.0, "ray weight must be integrable: alpha = {alpha}");
    let upper = *breaks.last().expect("at least the upper limit");
    if upper <= 0.0 {
        return (0.0, 0.0);
    }
    let b1 = breaks.iter().copied().find(|&x| x > 0.0).unwrap_or(upper);
    let g = |r: f64| {
        let w = match weight {
            RayWeight::Power => r.powf(alpha),
            RayWeight::PowerLog => r.powf(alpha) * r.ln(),
        };
        f(r) * w
    };

    // Dyadic descent on (0, b1].
    let levels = 52usize;
    let mut pts = Vec::with_capacity(levels + 2);
    let mut x = b1;
    for _ in 0..levels {
        pts.push(x);
        x *= 0.5;
    }
    let eps = x;
    pts.push(eps);
    pts.reverse();
    let (mut total, mut toterr) = adaptive_segmented(&g, &pts, 0.5 * tol);

    // Analytic stub on [0, eps]: f is continuous at 0, so the leading term
    // dominates with an O(eps) relative remainder.
    let f0 = f(0.0);
    let stub = match weight {
        RayWeight::Power => f0 * eps.powf(alpha + 1.0) / (alpha + 1.0),
        RayWeight::PowerLog => {
            f0 * eps.powf(alpha + 1.0) / (alpha + 1.0) * (eps.ln() - 1.0 / (alpha + 1.0))
        }
    };
    total += stub;
    toterr += stub.abs() * 1e-10 + (f(eps) - f0).abs() * eps.powf(alpha + 1.0);

    if upper > b1 {
        let mut rest: Vec<f64> = breaks.iter().copied().filter(|&x| x >= b1).collect();
        if rest.first() != Some(&b1) {
            rest.insert(0, b1);
        }
        let (v, e) = adaptive_segmented(&g, &rest, 0.5 * tol);
        total += v;
        toterr += e;
    }
    (total, toterr)
}

/// `∫_{r0}^∞ u^σ cos(ωu + φ) du` for `σ < 0`, `ω > 0`.
///
/// Finite stretch `[r0, U]` by Gauss–Kronrod with `U = max(r0, 50/ω)`, then an
/// integration-by-parts recursion from `U`, each step gaining a factor
/// `|σ|/(ωU)`.
pub fn osc_power_tail(sigma: f64, omega: f64, phi: f64, r0: f64, tol: f64) -> (f64, f64) {
    debug_assert!(sigma < 0.0 && omega > 0.0 && r0 > 0.0);
    let u_big = r0.max(50.0 / omega);
    let mut total = 0.0;
    let mut toterr = 0.0;
    if u_big > r0 {
        // Panels of roughly half an oscillation period keep GK15 exact.
        let period = std::f64::consts::PI / omega;
        let mut pts = vec![r0];
        // Dyadic growth first if r0 is far below one period.
        let mut x = r0;
        while x < period && x < u_big {
            x = (2.0 * x).min(period.min(u_big));
            pts.push(x);
        }
        while x < u_big {
            x = (x + period).min(u_big);
            pts.push(x);
        }
        let g = |u: f64| u.powf(sigma) * (omega * u + phi).cos();
        let (v, e) = adaptive_segmented(&g, &pts, tol);
        total += v;
        toterr += e;
    }
    let (tail, tail_err) = ibp_cos_tail(sigma, omega, phi, u_big);
    (total + tail, toterr + tail_err)
}

/// Integration-by-parts recursion for `∫_U^∞ u^σ cos(ωu+φ) du`, `ωU ≳ 50`.
fn ibp_cos_tail(sigma: f64, omega: f64, phi: f64, u: f64) -> (f64, f64) {
    let mut cos_coef = 1.0f64; // current integrand: coef * u^s * trig
    let mut s = sigma;
    let mut total = 0.0;
    let mut is_cos = true;
    for _ in 0..60 {
        // ∫ u^s cos = -U^s sin(ωU+φ)/ω - (s/ω) ∫ u^{s-1} sin
        // ∫ u^s sin =  U^s cos(ωU+φ)/ω + (s/ω) ∫ u^{s-1} cos
        let us = u.powf(s);
        if is_cos {
            total += cos_coef * (-us * (omega * u + phi).sin() / omega);
            cos_coef *= -s / omega;
        } else {
            total += cos_coef * (us * (omega * u + phi).cos() / omega);
            cos_coef *= s / omega;
        }
        is_cos = !is_cos;
        s -= 1.0;
        let bound = cos_coef.abs() * u.powf(s + 1.0) / omega;
        if bound < 1e-17 * (1.0 + total.abs()) {
            return (total, bound);
        }
    }
    let bound = cos_coef.abs() * u.powf(s + 1.0) / omega;
    (total, bound)
}

/// A single term of a decaying cosine-sum representation.
#[derive(Clone, Copy, Debug)]
pub struct OscTerm {
    /// integrand term is `coeff * r^{-power} * cos(omega r + phase)`;
    /// `omega == 0` encodes a pure power term (the DC part).
    pub coeff: f64,
    pub power: f64,
    pub omega: f64,
    pub phase: f64,
}

/// Exact (boxes, polygons) or asymptotic (balls) cosine-sum representation
/// of `|χ̂_K(rθ)|²` along a fixed ray, valid for `r ≥ valid_from`.
#[derive(Clone, Debug, Default)]
pub struct OscSum {
    pub terms: Vec<OscTerm>,
    pub valid_from: f64,
    /// Absolute truncation bound of the representation at `valid_from`,
    /// relative to the leading envelope (0 for exact forms).
    pub trunc_rel: f64,
}

/// Outcome of a tail integration of an [`OscSum`] against `r^{p-1}`.
pub enum OscTail {
    Finite { value: f64, err: f64 },
    Divergent,
}

impl OscSum {
    pub fn eval(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let osc = if t.omega == 0.0 { 1.0 } else { (t.omega * r + t.phase).cos() };
                t.coeff * r.powf(-t.power) * osc
            })
            .sum()
    }

    /// Smallest decay power among DC terms with a non-negligible coefficient;
    /// the Mellin integral against `r^{p-1}` converges iff `p` is below it.
    pub fn dc_decay(&self) -> f64 {
        let scale: f64 = self.terms.iter().map(|t| t.coeff.abs()).sum::<f64>().max(1e-300);
        self.terms
            .iter()
            .filter(|t| t.omega == 0.0 && t.coeff.abs() > 1e-13 * scale)
            .map(|t| t.power)
            .fold(f64::INFINITY, f64::min)
    }

    /// `∫_{r0}^∞ (Σ terms) r^{p-1} dr`, term by term: DC powers analytically,
    /// oscillatory terms through [`osc_power_tail`].
    pub fn tail_integral(&self, p: f64, r0: f64, tol: f64) -> OscTail {
        if p >= self.dc_decay() - 1e-12 {
            return OscTail::Divergent;
        }
        let mut total = 0.0;
        let mut err = 0.0;
        for t in &self.terms {
            let sigma = p - 1.0 - t.power;
            if t.omega == 0.0 {
                if sigma >= -1.0 {
                    if t.coeff.abs() > 1e-13 {
                        return OscTail::Divergent;
                    }
                    continue;
                }
                total += t.coeff * r0.powf(sigma + 1.0) / (-sigma - 1.0);
            } else {
                let (v, e) = osc_power_tail(sigma, t.omega, t.phase, r0, tol);
                total += t.coeff * v;
                err += t.coeff.abs() * e;
            }
        }
        // Asymptotic truncation of the representation itself.
        err += self.trunc_rel * total.abs();
        OscTail::Finite { value: total, err }
    }
}

/// Wynn epsilon extrapolation of a partial-sum sequence.
/// Returns the most stable even-column entry and a stability-based error bar.
pub fn wynn_epsilon(s: &[f64]) -> (f64, f64) {
    let n = s.len();
    if n == 0 {
        return (0.0, f64::INFINITY);
    }
    if n == 1 {
        return (s[0], f64::INFINITY);
    }
    let mut e_prev: Vec<f64> = vec![0.0; n + 1]; // column k-1, starting at e_{-1} ≡ 0
    let mut e_cur: Vec<f64> = s.to_vec(); // column k, starting at e_0 = S
    let mut best = *s.last().unwrap();
    let mut best_err = (s[n - 1] - s[n - 2]).abs();
    let mut col = 0usize;
    while e_cur.len() >= 2 {
        let m = e_cur.len() - 1;
        let mut e_next = Vec::with_capacity(m);
        for i in 0..m {
            let d = e_cur[i + 1] - e_cur[i];
            let inv = if d != 0.0 { 1.0 / d } else { 1e300 };
            e_next.push(e_prev[i + 1] + inv);
        }
        col += 1;
        if col % 2 == 0 && e_next.len() >= 2 {
            let last = e_next[e_next.len() - 1];
            let err = (e_next[e_next.len() - 1] - e_next[e_next.len() - 2]).abs();
            if err < best_err && last.is_finite() {
                best_err = err;
                best = last;
            }
        }
        e_prev = e_cur;
        e_cur = e_next;
    }
    (best, best_err)
}

/// Levin u-transformation of a series given by its terms.
/// Suits monotone power-law tails (remainder modelled as `n·a_n·poly(1/n)`).
pub fn levin_u(terms: &[f64]) -> (f64, f64) {
    let n = terms.len();
    if n < 3 {
        let s: f64 = terms.iter().sum();
        return (s, f64::INFINITY);
    }
    let beta = 1.0f64;
    let mut num = Vec::with_capacity(n);
    let mut den = Vec::with_capacity(n);
    let mut partial = 0.0;
    for (i, &a) in terms.iter().enumerate() {
        partial += a;
        let w = (beta + i as f64) * a;
        if w == 0.0 {
            // Dead term: shrink the table to what came before.
            num.truncate(i);
            den.truncate(i);
            break;
        }
        num.push(partial / w);
        den.push(1.0 / w);
    }
    let m = num.len();
    if m < 3 {
        let s: f64 = terms.iter().sum();
        return (s, f64::INFINITY);
    }
    let mut best = num[m - 1] / den[m - 1];
    let mut best_err = f64::INFINITY;
    let mut prev_est = best;
    // Weniger's recursion: producing column k from k-1 multiplies by
    // (β+j)(β+j+k-1)^{k-2} / (β+j+k)^{k-1}.
    for k in 1..m {
        for j in 0..m - k {
            let bj = beta + j as f64;
            let c = bj * (bj + k as f64 - 1.0).powi(k as i32 - 2)
                / (bj + k as f64).powi(k as i32 - 1);
            num[j] = num[j + 1] - c * num[j];
            den[j] = den[j + 1] - c * den[j];
        }
        if den[0] != 0.0 {
            let est = num[0] / den[0];
            let e = (est - prev_est).abs();
            if e < best_err && est.is_finite() {
                best_err = e;
                best = est;
            }
            prev_est = est;
        }
    }
    (best, best_err)
}

/// Tail summation by fixed-length segments plus extrapolation, for integrands
/// with no cosine-sum form. Segments are one period of the dominant
/// oscillation so the segment sums form a smooth power-law sequence.
///
/// Returns the accelerated value with an error bar, or `None` when the
/// partial sums keep growing (divergence heuristic: 20 monotone segments).
pub fn segmented_tail<F: Fn(f64) -> f64>(
    f: &F,
    r0: f64,
    period: f64,
    max_segments: usize,
    tol: f64,
) -> Option<(f64, f64)> {
    let mut terms = Vec::with_capacity(max_segments);
    let mut partials = Vec::with_capacity(max_segments);
    let mut acc = 0.0;
    let mut grow_run = 0usize;
    for k in 0..max_segments {
        let a = r0 + k as f64 * period;
        let b = a + period;
        let (v, _) = adaptive(f, a, b, tol * 1e-2);
        terms.push(v);
        acc += v;
        partials.push(acc);
        if k >= 1 {
            if terms[k].abs() >= terms[k - 1].abs() * 0.999 && terms[k] * terms[k - 1] > 0.0 {
                grow_run += 1;
                if grow_run >= 20 {
                    return None;
                }
            } else {
                grow_run = 0;
            }
        }
        if k >= 8 && terms[k].abs() < tol * 1e-3 {
            break;
        }
    }
    // Envelope integrability: fit |terms| ~ C k^γ over the back half; the
    // series (and hence the integral) diverges when γ ≥ -1.
    let m = terms.len();
    if m >= 24 {
        let lo = m / 2;
        let (mut sx, mut sy, mut sxx, mut sxy, mut cnt) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for k in lo..m - 1 {
            let pair = 0.5 * (terms[k].abs() + terms[k + 1].abs());
            if pair <= 0.0 {
                continue;
            }
            let x = (k as f64 + 1.0).ln();
            let y = pair.ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            cnt += 1.0;
        }
        if cnt >= 8.0 {
            let slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
            if slope > -1.02 {
                return None;
            }
        }
    }
    let (lv, le) = levin_u(&terms);
    let (ev, ee) = wynn_epsilon(&partials);
    Some(if le <= ee { (lv, le + tol * 1e-3) } else { (ev, ee + tol * 1e-3) })
}
