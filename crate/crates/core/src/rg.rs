//! Mean-field minimization, the truncated marginal-field RG flow, and the
//! resulting high-temperature free energy, phase boundary and
//! discontinuities of the chain near its critical point.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::roots::bisect;

/// `|1 + 3 a g^2 / (4 b t0)|` below which the two boundary roots are
/// treated as coincident.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;
/// Default matching threshold for `max(|t(l0)|, |h(l0)|)`.
pub const DEFAULT_THRESHOLD: f64 = 1.0;

/// Coefficients of `f = a + b t M^2 + u M^4 - g h M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldConstants {
    pub a: f64,
    pub b: f64,
    pub u: f64,
    pub g: f64,
}

impl Default for MeanFieldConstants {
    fn default() -> Self {
        Self {
            a: -0.1,
            b: 1.0,
            u: 0.5,
            g: 1.0,
        }
    }
}

impl MeanFieldConstants {
    /// Requires `u > 0`, `b > 0` and `g >= 0`. The high-temperature
    /// analysis further expects `a < 0`, which is not enforced here.
    pub fn new(a: f64, b: f64, u: f64, g: f64) -> Result<Self> {
        if ![a, b, u, g].iter().all(|v| v.is_finite()) {
            return Err(invalid("mean-field constants must be finite"));
        }
        if u <= 0.0 {
            return Err(invalid(format!("quartic coefficient u must be > 0, got {u}")));
        }
        if b <= 0.0 {
            return Err(invalid(format!("b must be > 0, got {b}")));
        }
        if g < 0.0 {
            return Err(invalid(format!("g must be >= 0, got {g}")));
        }
        Ok(Self { a, b, u, g })
    }

    /// `3 a g^2 / (4 b t0)`; the boundary roots coincide when this is `-1`.
    pub fn boundary_discriminant_shift(&self, t0: f64) -> f64 {
        3.0 * self.a * self.g * self.g / (4.0 * self.b * t0)
    }
}

/// Flow coefficients and reference scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RgConstants {
    pub x: f64,
    pub y_t: f64,
    pub y_h: f64,
    pub z_t: f64,
    pub z_h: f64,
    pub t0: f64,
    pub h0: f64,
    pub d: f64,
}

impl Default for RgConstants {
    fn default() -> Self {
        Self::new(1.0, 1.0, 1.0, 1.0).expect("default constants are valid")
    }
}

impl RgConstants {
    /// Derives the exponents from `d` and `x`: `y_t = y_h = d`, `z_t = x`,
    /// `z_h = 0`.
    pub fn new(d: f64, x: f64, t0: f64, h0: f64) -> Result<Self> {
        let c = Self {
            x,
            y_t: d,
            y_h: d,
            z_t: x,
            z_h: 0.0,
            t0,
            h0,
            d,
        };
        c.validate()?;
        if !(d > 0.0) {
            return Err(invalid(format!("dimensionality must be > 0, got {d}")));
        }
        let exponent = c.field_exponent();
        if (exponent - 2.0).abs() > 1e-12 {
            return Err(invalid(format!("field exponent d/y_h + y_t/y_h = {exponent}, expected 2")));
        }
        Ok(c)
    }

    /// Arbitrary exponents, for experiments away from the derived relations.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(x: f64, y_t: f64, y_h: f64, z_t: f64, z_h: f64, t0: f64, h0: f64, d: f64) -> Result<Self> {
        let c = Self {
            x,
            y_t,
            y_h,
            z_t,
            z_h,
            t0,
            h0,
            d,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let all = [self.x, self.y_t, self.y_h, self.z_t, self.z_h, self.t0, self.h0, self.d];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(invalid("RG constants must be finite"));
        }
        if self.t0 <= 0.0 || self.h0 <= 0.0 {
            return Err(invalid("reference scales t0 and h0 must be > 0"));
        }
        Ok(())
    }

    /// Power of `|h/h0|` in the field term after eliminating `t(l0)`.
    pub fn field_exponent(&self) -> f64 {
        self.d / self.y_h + self.y_t / self.y_h
    }

    /// `d/y_t = 1`, `z_t/x = 1`, `d/y_h = 1` and `z_h = 0`.
    pub fn satisfies_scaling_relations(&self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
        close(self.d / self.y_t, 1.0)
            && close(self.z_t / self.x, 1.0)
            && close(self.d / self.y_h, 1.0)
            && self.z_h == 0.0
    }
}

/// Point on an RG trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RgState {
    pub t: f64,
    pub h: f64,
    pub u: f64,
    pub ell: f64,
}

impl RgState {
    pub fn new(t: f64, h: f64, u: f64) -> Self {
        Self { t, h, u, ell: 0.0 }
    }
}

/// Evaluates the mean-field quartic.
pub fn mean_field_f(m: f64, t: f64, h: f64, c: &MeanFieldConstants) -> f64 {
    let m2 = m * m;
    c.a + c.b * t * m2 + c.u * m2 * m2 - c.g * h * m
}

/// `df/dM = 2 b t M + 4 u M^3 - g h`.
pub fn mean_field_gradient(m: f64, t: f64, h: f64, c: &MeanFieldConstants) -> f64 {
    2.0 * c.b * t * m + 4.0 * c.u * m * m * m - c.g * h
}

/// Global minimizer of the mean-field quartic in `M`.
///
/// The stationarity condition `M^3 + p M + q = 0` with `p = b t / (2u)` and
/// `q = -g h / (4u)` is solved in closed form; each real root is polished
/// by Newton steps and the one with the lowest `f` is returned.
pub fn minimize_mean_field(t: f64, h: f64, c: &MeanFieldConstants) -> f64 {
    let p = c.b * t / (2.0 * c.u);
    let q = -c.g * h / (4.0 * c.u);
    let roots = depressed_cubic_roots(p, q);
    let mut best = roots[0];
    let mut best_f = f64::INFINITY;
    for r in roots {
        let r = newton_polish(r, t, h, c);
        let f = mean_field_f(r, t, h, c);
        if f < best_f || (f == best_f && r > best) {
            best = r;
            best_f = f;
        }
    }
    best
}

fn newton_polish(mut m: f64, t: f64, h: f64, c: &MeanFieldConstants) -> f64 {
    for _ in 0..4 {
        let g = mean_field_gradient(m, t, h, c);
        let curvature = 2.0 * c.b * t + 12.0 * c.u * m * m;
        if curvature <= 0.0 || g == 0.0 {
            break;
        }
        let next = m - g / curvature;
        if mean_field_gradient(next, t, h, c).abs() >= g.abs() {
            break;
        }
        m = next;
    }
    m
}

/// Real roots of `x^3 + p x + q = 0`.
fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc > 0.0 || p == 0.0 {
        let r = -q / 2.0;
        let s = disc.max(0.0).sqrt();
        let a = (r + s.copysign(r)).cbrt();
        let root = if a == 0.0 {
            0.0
        } else if p > 0.0 {
            // a and -p/(3a) have opposite signs; use a^3 + b^3 = -q instead
            let b = -p / (3.0 * a);
            -q / (a * a + p / 3.0 + b * b)
        } else {
            a - p / (3.0 * a)
        };
        vec![root]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    }
}

/// `-(z/x) ln(1 + x u0 l)`, with the `x -> 0` limit `-z u0 l`.
fn marginal_log_factor(z: f64, x: f64, u0: f64, ell: f64) -> Result<f64> {
    let lambda = 1.0 + x * u0 * ell;
    if lambda <= 0.0 {
        return Err(Error::Pole { value: lambda });
    }
    Ok(if x == 0.0 {
        -z * u0 * ell
    } else {
        -(z / x) * (x * u0 * ell).ln_1p()
    })
}

/// Exact solution of the truncated flow after a further `ell`.
pub fn flow_closed_form(state0: &RgState, ell: f64, rg: &RgConstants) -> Result<RgState> {
    let u0 = state0.u;
    let lt = rg.y_t * ell + marginal_log_factor(rg.z_t, rg.x, u0, ell)?;
    let lh = rg.y_h * ell + marginal_log_factor(rg.z_h, rg.x, u0, ell)?;
    Ok(RgState {
        t: state0.t * lt.exp(),
        h: state0.h * lh.exp(),
        u: u0 / (1.0 + rg.x * u0 * ell),
        ell: state0.ell + ell,
    })
}

fn flow_rhs(s: [f64; 3], rg: &RgConstants) -> [f64; 3] {
    let [u, t, h] = s;
    [
        -rg.x * u * u,
        rg.y_t * t - rg.z_t * u * t,
        rg.y_h * h - rg.z_h * u * h,
    ]
}

/// Classical fourth-order Runge–Kutta integration of the truncated flow.
pub fn flow_integrate(state0: &RgState, ell: f64, step: f64, rg: &RgConstants) -> Result<RgState> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid(format!("step must be > 0, got {step}")));
    }
    if !(ell >= 0.0 && ell.is_finite()) {
        return Err(invalid(format!("flow length must be >= 0, got {ell}")));
    }
    let lambda = 1.0 + rg.x * state0.u * ell;
    if lambda <= 0.0 {
        return Err(Error::Pole { value: lambda });
    }
    let steps = (ell / step).ceil().max(1.0) as u64;
    let dl = ell / steps as f64;
    let mut y = [state0.u, state0.t, state0.h];
    let axpy = |y: [f64; 3], k: [f64; 3], a: f64| [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]];
    for _ in 0..steps {
        let k1 = flow_rhs(y, rg);
        let k2 = flow_rhs(axpy(y, k1, dl / 2.0), rg);
        let k3 = flow_rhs(axpy(y, k2, dl / 2.0), rg);
        let k4 = flow_rhs(axpy(y, k3, dl), rg);
        for i in 0..3 {
            y[i] += dl / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(RgState {
        u: y[0],
        t: y[1],
        h: y[2],
        ell: state0.ell + ell,
    })
}

/// Matching scale found on the closed-form trajectory, with the
/// large-logarithm approximation for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingScale {
    pub ell0: f64,
    pub approximation: f64,
}

/// Smallest `l0` at which `max(|t(l0)|, |h(l0)|)` reaches `threshold`.
pub fn matching_scale(state0: &RgState, threshold: f64, rg: &RgConstants) -> Result<MatchingScale> {
    let start = state0.t.abs().max(state0.h.abs());
    if !(threshold > 0.0 && start > 0.0 && start < threshold) {
        return Err(invalid(format!(
            "need 0 < max(|t|, |h|) = {start} < threshold = {threshold}"
        )));
    }
    let log_threshold = threshold.ln();
    let excess = |ell: f64| -> f64 {
        match flow_closed_form(state0, ell, rg) {
            Ok(s) => s.t.abs().ln().max(s.h.abs().ln()) - log_threshold,
            Err(_) => f64::NAN,
        }
    };
    // forward scan for the first crossing, then bisect inside it
    let mut lo = 0.0;
    let scan = 0.25 / rg.y_t.abs().max(rg.y_h.abs()).max(1e-3);
    loop {
        let hi = lo + scan;
        let v = excess(hi);
        if v.is_nan() {
            return Err(Error::NoRoot("flow reaches its pole before the threshold".into()));
        }
        if v >= 0.0 {
            let ell0 = bisect(excess, lo, hi, 1e-15 * hi.max(1.0))?;
            let approximation = matching_scale_approximation(state0, threshold, rg);
            return Ok(MatchingScale { ell0, approximation });
        }
        lo = hi;
        if lo > 1e6 {
            return Err(Error::NoRoot("relevant fields never reach the threshold".into()));
        }
    }
}

/// `(1/y) ln(T/|v|) + (z/(x y)) ln(1 + (x/y) u ln(T/|v|))` for the field `v`
/// (`t` if nonzero, else `h`) that drives the crossing.
fn matching_scale_approximation(state0: &RgState, threshold: f64, rg: &RgConstants) -> f64 {
    let (v, y, z) = if state0.t != 0.0 {
        (state0.t.abs(), rg.y_t, rg.z_t)
    } else {
        (state0.h.abs(), rg.y_h, rg.z_h)
    };
    let log_ratio = (threshold / v).ln();
    let lead = log_ratio / y;
    if rg.x == 0.0 {
        return lead;
    }
    lead + z / (rg.x * y) * (rg.x / y * state0.u * log_ratio).ln_1p()
}

/// `(x / y_t) u ln(t0 / t)`, the marginal logarithm at leading order.
fn marginal_log(t: f64, mf: &MeanFieldConstants, rg: &RgConstants) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("high-temperature forms need t > 0, got {t}")));
    }
    let log = (rg.t0 / t).ln();
    if log <= 0.0 {
        return Err(Error::Domain(format!("need t < t0 = {}, got t = {t}", rg.t0)));
    }
    let l = rg.x / rg.y_t * mf.u * log;
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Domain(format!("marginal logarithm {l} must be > 0")));
    }
    Ok(l)
}

/// Singular free energy of the high-temperature phase,
/// `(t/t0) a / L - (h^2 / t) L (3 g^2 / 16 b)` with `L = (x/y_t) u ln(t0/t)`.
pub fn singular_f_high(t: f64, h: f64, mf: &MeanFieldConstants, rg: &RgConstants) -> Result<f64> {
    let l = marginal_log(t, mf, rg)?;
    let k = 3.0 * mf.g * mf.g / (16.0 * mf.b);
    Ok(t / rg.t0 * mf.a / l - h * h / t * l * k)
}

/// `chi = -d^2 f_s / dh^2 = (3 g^2 / 8 b) L / t`.
pub fn susceptibility_high(t: f64, mf: &MeanFieldConstants, rg: &RgConstants) -> Result<f64> {
    let l = marginal_log(t, mf, rg)?;
    Ok(3.0 * mf.g * mf.g / (8.0 * mf.b) * l / t)
}

/// `m = -d f_s / dh = (h / t) L (3 g^2 / 8 b)`.
pub fn magnetization_high(t: f64, h: f64, mf: &MeanFieldConstants, rg: &RgConstants) -> Result<f64> {
    Ok(h * susceptibility_high(t, mf, rg)?)
}

/// Singular free energy obtained by integrating to the matching scale and
/// evaluating mean field there: `e^{-d l0} (a - 3 (g h(l0))^2 / (16 b t(l0)))`.
pub fn singular_f_via_flow(
    t: f64,
    h: f64,
    mf: &MeanFieldConstants,
    rg: &RgConstants,
    threshold: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("high-temperature flow needs t > 0, got {t}")));
    }
    let state0 = RgState::new(t, h, mf.u);
    let scale = matching_scale(&state0, threshold, rg)?;
    let s = flow_closed_form(&state0, scale.ell0, rg)?;
    let field = mf.g * s.h;
    let at_scale = mf.a - 3.0 * field * field / (16.0 * mf.b * s.t);
    Ok((-rg.d * scale.ell0).exp() * at_scale)
}

/// Ordered-phase free energy, `-|h|`.
pub fn ordered_f(h: f64) -> f64 {
    -h.abs()
}

/// Ordered-phase free energy with the marginal correction
/// `-|h| [1 + (x/y_h) u ln(h0/|h|)]^{-z_h/x}`; equal to `-|h|` when `z_h = 0`.
pub fn ordered_f_log_corrected(h: f64, u: f64, rg: &RgConstants) -> f64 {
    if h == 0.0 || rg.z_h == 0.0 {
        return ordered_f(h);
    }
    let bracket = 1.0 + rg.x / rg.y_h * u * (rg.h0 / h.abs()).ln();
    -h.abs() * bracket.powf(-rg.z_h / rg.x)
}

/// Both positive roots of the free-energy continuity condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfscBoundary {
    pub t: f64,
    /// Physical (smaller) root.
    pub h_star: f64,
    /// The larger root, at which the high-temperature magnetization exceeds 1.
    pub h_unphysical: f64,
    /// `k t / ln(t0/t)` with `k = (8 b y_t / (3 x u g^2)) (1 - sqrt(1 + 3 a g^2/(4 b t0)))`.
    pub asymptote: f64,
    /// High-temperature magnetization at `h_star`.
    pub magnetization: f64,
    /// Set when the two roots coincide.
    pub degenerate: bool,
}

fn sqrt_discriminant(mf: &MeanFieldConstants, rg: &RgConstants) -> Result<(f64, bool)> {
    if mf.g == 0.0 {
        return Err(Error::NoRoot("no field coupling (g = 0)".into()));
    }
    let disc = 1.0 + mf.boundary_discriminant_shift(rg.t0);
    if disc.abs() <= DEGENERACY_TOLERANCE {
        return Ok((0.0, true));
    }
    if disc < 0.0 {
        return Err(Error::NoRoot(format!(
            "negative discriminant 1 + 3ag^2/(4bt0) = {disc}"
        )));
    }
    Ok((disc.sqrt(), false))
}

/// Solves `-h = f_s(t, h)` for `h > 0`, a quadratic
/// `C h^2 - h - A = 0` with `C = L (3g^2/16b) / t`, `A = (t/t0) a / L`.
pub fn phase_boundary_ffsc(t: f64, mf: &MeanFieldConstants, rg: &RgConstants) -> Result<FfscBoundary> {
    let l = marginal_log(t, mf, rg)?;
    let (root, degenerate) = sqrt_discriminant(mf, rg)?;
    let rho = mf.boundary_discriminant_shift(rg.t0);
    let c = l * 3.0 * mf.g * mf.g / (16.0 * mf.b) / t;
    // 1 - sqrt(1 + rho) written without cancellation
    let one_minus = -rho / (1.0 + root);
    let h_star = one_minus / (2.0 * c);
    let h_unphysical = (1.0 + root) / (2.0 * c);
    let k = 8.0 * mf.b * rg.y_t / (3.0 * rg.x * mf.u * mf.g * mf.g) * (1.0 - root);
    let asymptote = k * t / (rg.t0 / t).ln();
    Ok(FfscBoundary {
        t,
        h_star,
        h_unphysical,
        asymptote,
        magnetization: magnetization_high(t, h_star, mf, rg)?,
        degenerate,
    })
}

/// Magnetization and entropy jumps across the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfscDiscontinuities {
    /// `sqrt(1 + 3 a g^2 / (4 b t0))`.
    pub delta_m: f64,
    /// `1 - m_high(h*)` from the high-temperature magnetization.
    pub delta_m_via_magnetization: f64,
    /// `-2 L^{-1} (a/t0 + (4b/3g^2)(1 - sqrt(1 + 3ag^2/(4bt0))))`.
    pub delta_s: f64,
}

pub fn discontinuities_ffsc(t: f64, mf: &MeanFieldConstants, rg: &RgConstants) -> Result<FfscDiscontinuities> {
    let l = marginal_log(t, mf, rg)?;
    let (root, _) = sqrt_discriminant(mf, rg)?;
    let boundary = phase_boundary_ffsc(t, mf, rg)?;
    let delta_s = -2.0 / l * (mf.a / rg.t0 + 4.0 * mf.b / (3.0 * mf.g * mf.g) * (1.0 - root));
    Ok(FfscDiscontinuities {
        delta_m: root,
        delta_m_via_magnetization: 1.0 - boundary.magnetization,
        delta_s,
    })
}
