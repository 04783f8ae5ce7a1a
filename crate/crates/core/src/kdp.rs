//! The exactly solvable one-dimensional KDP chain with an external field,
//! in its two couplings: a field on the ordered end states only
//! ([`FieldVariant::EndpointField`]) and a field on every cell
//! ([`FieldVariant::SiteField`]).

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::roots::brent;
use crate::summation::{ln_two_cosh, log_sum_exp};

/// Tolerance on `|f_ordered - f_high|` for labelling a point as on the boundary.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldVariant {
    /// `Z = 2 cosh(beta N h) + 2^N exp(-beta N eps)`.
    EndpointField,
    /// `Z = e^{beta N h} + e^{-beta N h} + e^{-beta eps N} (2 cosh beta h)^N`.
    SiteField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdpParams {
    epsilon: f64,
    pub variant: FieldVariant,
}

impl KdpParams {
    pub fn new(epsilon: f64, variant: FieldVariant) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("KDP bond energy must be > 0, got {epsilon}")));
        }
        Ok(Self { epsilon, variant })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `ln 2 / eps`.
    pub fn beta_c(&self) -> f64 {
        LN_2 / self.epsilon
    }

    pub fn reduced_temperature(&self, beta: f64) -> f64 {
        self.beta_c() / beta - 1.0
    }

    pub fn beta_at(&self, t: f64) -> f64 {
        self.beta_c() / (1.0 + t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KdpPhase {
    Ordered,
    HighTemperature,
    Boundary,
}

/// Infinite-chain thermodynamics at one `(beta, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdpThermo {
    pub t: f64,
    pub f: f64,
    pub m: f64,
    pub s: f64,
    pub phase: KdpPhase,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid(format!("beta must be finite and > 0, got {beta}")));
    }
    Ok(())
}

/// `ln Z_N(beta, h)` for a finite chain.
pub fn kdp_log_partition(n: usize, beta: f64, h: f64, params: &KdpParams) -> Result<f64> {
    if n == 0 {
        return Err(invalid("chain length N must be >= 1"));
    }
    check_beta(beta)?;
    let nf = n as f64;
    let ordered = beta * nf * h;
    let excited = match params.variant {
        FieldVariant::EndpointField => nf * (LN_2 - beta * params.epsilon),
        FieldVariant::SiteField => nf * (ln_two_cosh(beta * h) - beta * params.epsilon),
    };
    Ok(log_sum_exp(&[ordered, -ordered, excited]))
}

/// Free energy of the fully ordered state, `-|h|`.
pub fn kdp_ordered_f(h: f64) -> f64 {
    -h.abs()
}

/// Free energy of the high-temperature state.
pub fn kdp_high_temperature_f(beta: f64, h: f64, params: &KdpParams) -> f64 {
    match params.variant {
        FieldVariant::EndpointField => params.epsilon - LN_2 / beta,
        FieldVariant::SiteField => params.epsilon - ln_two_cosh(beta * h) / beta,
    }
}

/// Magnetization and entropy of the high-temperature state.
fn high_temperature_m_s(beta: f64, h: f64, params: &KdpParams) -> (f64, f64) {
    match params.variant {
        FieldVariant::EndpointField => (0.0, LN_2),
        FieldVariant::SiteField => {
            let x = beta * h;
            let m = x.tanh();
            (m, ln_two_cosh(x) - x * m)
        }
    }
}

/// Thermodynamic limit at `(beta, h)`: the phase with the lower free energy.
///
/// On the boundary the high-temperature side's `m` and `s` are reported.
/// In the ordered phase at `h = 0` the `m = +1` state is reported.
pub fn kdp_free_energy(beta: f64, h: f64, params: &KdpParams) -> Result<KdpThermo> {
    check_beta(beta)?;
    let t = params.reduced_temperature(beta);
    let f_ord = kdp_ordered_f(h);
    let f_high = kdp_high_temperature_f(beta, h, params);
    let phase = if (f_ord - f_high).abs() <= BOUNDARY_TOLERANCE {
        KdpPhase::Boundary
    } else if f_ord < f_high {
        KdpPhase::Ordered
    } else {
        KdpPhase::HighTemperature
    };
    let (f, m, s) = match phase {
        KdpPhase::Ordered => (f_ord, if h < 0.0 { -1.0 } else { 1.0 }, 0.0),
        _ => {
            let (m, s) = high_temperature_m_s(beta, h, params);
            (f_ord.min(f_high), m, s)
        }
    };
    Ok(KdpThermo { t, f, m, s, phase })
}

/// Field `h* > 0` at which the ordered and high-temperature free energies
/// cross, at reduced temperature `t > 0`.
pub fn kdp_phase_boundary(t: f64, params: &KdpParams) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NoRoot(format!(
            "the high-temperature phase needs t > 0, got t = {t}"
        )));
    }
    let eps = params.epsilon;
    match params.variant {
        FieldVariant::EndpointField => Ok(eps * t),
        FieldVariant::SiteField => {
            let beta = params.beta_at(t);
            // g(h) = ln(2 cosh beta h) - beta eps - beta h; g(0) = ln 2 - beta eps > 0
            let g = |h: f64| ln_two_cosh(beta * h) - beta * eps - beta * h;
            let mut hi = 2.0 * eps * (t + 1.0);
            let mut expansions = 0;
            while g(hi) > 0.0 {
                hi *= 2.0;
                expansions += 1;
                if expansions > 200 {
                    return Err(Error::NoRoot("could not bracket the site-field boundary".into()));
                }
            }
            brent(g, 0.0, hi, 1e-14)
        }
    }
}

/// `(delta_m, delta_s)` across the boundary from the closed forms.
pub fn kdp_discontinuities(t: f64, params: &KdpParams) -> Result<(f64, f64)> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("discontinuities need t >= 0, got {t}")));
    }
    Ok(match params.variant {
        FieldVariant::EndpointField => (1.0, LN_2),
        FieldVariant::SiteField => (1.0 - t * LN_2, LN_2 * (1.0 - 0.5 * LN_2 * t * t)),
    })
}

/// `(delta_m, delta_s)` from the one-sided values of `m` and `s` at the
/// solved boundary field (ordered side: `m = 1`, `s = 0`).
pub fn kdp_discontinuities_at_boundary(t: f64, params: &KdpParams) -> Result<(f64, f64)> {
    let h = kdp_phase_boundary(t, params)?;
    let (m, s) = high_temperature_m_s(params.beta_at(t), h, params);
    Ok((1.0 - m, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn endpoint() -> KdpParams {
        KdpParams::new(1.0, FieldVariant::EndpointField).unwrap()
    }

    fn site() -> KdpParams {
        KdpParams::new(1.0, FieldVariant::SiteField).unwrap()
    }

    /// Closed-form solution of the site-field boundary condition for h > 0:
    /// ln(1 + e^{-2 beta h}) = beta eps.
    fn site_boundary_closed_form(t: f64, eps: f64) -> f64 {
        let beta = LN_2 / eps / (1.0 + t);
        -((beta * eps).exp_m1()).ln() / (2.0 * beta)
    }

    #[test]
    fn critical_point_partition_value() {
        for p in [endpoint(), site()] {
            let z = kdp_log_partition(10, p.beta_c(), 0.0, &p).unwrap();
            assert!((z - 3f64.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn variants_agree_at_zero_field() {
        for n in [1, 5, 40] {
            for beta in [0.2, 0.69, 1.5] {
                let a = kdp_log_partition(n, beta, 0.0, &endpoint()).unwrap();
                let b = kdp_log_partition(n, beta, 0.0, &site()).unwrap();
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn single_cell_site_field() {
        let (beta, h) = (0.8f64, 0.35f64);
        // eps = 1
        let expected = (2.0 * (beta * h).cosh() + (-beta).exp() * 2.0 * (beta * h).cosh()).ln();
        let got = kdp_log_partition(1, beta, h, &site()).unwrap();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn ordered_free_energy_below_transition() {
        for p in [endpoint(), site()] {
            let th = kdp_free_energy(p.beta_c() * 1.5, 0.2, &p).unwrap();
            assert_eq!(th.phase, KdpPhase::Ordered);
            assert_eq!(th.f, -0.2);
            assert_eq!(th.m, 1.0);
            assert_eq!(th.s, 0.0);
            let zero = kdp_free_energy(p.beta_c() * 1.01, 0.0, &p).unwrap();
            assert_eq!(zero.f, 0.0);
        }
        let neg = kdp_free_energy(2.0, -0.2, &site()).unwrap();
        assert_eq!(neg.m, -1.0);
    }

    #[test]
    fn site_field_small_h_expansion() {
        let p = site();
        let t = 0.3;
        let beta = p.beta_at(t);
        let h = 1e-3;
        let th = kdp_free_energy(beta, h, &p).unwrap();
        assert_eq!(th.phase, KdpPhase::HighTemperature);
        let series = -t - LN_2 / (2.0 * (t + 1.0)) * h * h;
        assert!((th.f - series).abs() < 1e-11);
        assert!((th.m - (beta * h).tanh()).abs() < 1e-15);
    }

    #[test]
    fn endpoint_high_temperature_is_field_independent() {
        let p = endpoint();
        let beta = p.beta_at(0.5);
        let a = kdp_free_energy(beta, 0.0, &p).unwrap();
        let b = kdp_free_energy(beta, 0.3, &p).unwrap();
        assert_eq!(a.f, b.f);
        assert_eq!(b.s, LN_2);
        assert_eq!(b.m, 0.0);
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(kdp_phase_boundary(0.1, &endpoint()).unwrap(), 0.1);
        for t in [1e-4, 0.01, 0.05, 0.3, 2.0, 50.0] {
            let h = kdp_phase_boundary(t, &site()).unwrap();
            let exact = site_boundary_closed_form(t, 1.0);
            assert!((h - exact).abs() < 1e-12, "t={t}: {h} vs {exact}");
        }
        let h = kdp_phase_boundary(0.05, &site()).unwrap();
        assert!((h - (0.05 + 0.5 * LN_2 * 0.0025)).abs() <= 1e-4);
        let small = kdp_phase_boundary(1e-6, &site()).unwrap();
        assert!((small / 1e-6 - 1.0).abs() < 1e-5);
        assert!(kdp_phase_boundary(0.0, &site()).is_err());
        assert!(kdp_phase_boundary(-0.2, &endpoint()).is_err());
    }

    #[test]
    fn boundary_point_is_classified_as_boundary() {
        for p in [endpoint(), site()] {
            let t = 0.2;
            let h = kdp_phase_boundary(t, &p).unwrap();
            let th = kdp_free_energy(p.beta_at(t), h, &p).unwrap();
            assert_eq!(th.phase, KdpPhase::Boundary);
        }
    }

    #[test]
    fn discontinuity_closed_forms() {
        assert_eq!(kdp_discontinuities(0.37, &endpoint()).unwrap(), (1.0, LN_2));
        assert_eq!(kdp_discontinuities(0.0, &site()).unwrap(), (1.0, LN_2));
        let (dm, ds) = kdp_discontinuities(0.1, &site()).unwrap();
        assert_eq!(dm, 1.0 - 0.1 * LN_2);
        assert_eq!(ds, LN_2 * (1.0 - 0.5 * LN_2 * 0.01));
        assert!(kdp_discontinuities(-1.0, &site()).is_err());
    }

    #[test]
    fn invalid_params() {
        assert!(KdpParams::new(0.0, FieldVariant::SiteField).is_err());
        assert!(KdpParams::new(-1.0, FieldVariant::SiteField).is_err());
        assert!(kdp_log_partition(0, 1.0, 0.0, &site()).is_err());
        assert!(kdp_log_partition(3, 0.0, 0.0, &site()).is_err());
        assert!(kdp_free_energy(-1.0, 0.0, &site()).is_err());
    }
}
