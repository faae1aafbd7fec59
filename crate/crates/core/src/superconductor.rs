//! BCS gap, Mattis–Bardeen conductivity and the imaginary-axis permittivity of a
//! superconductor joined to its normal-state Drude response at `T_c`.
//!
//! Energies are handled internally in units of `k_B T_c`, which keeps every
//! intermediate representable in `f32` as well as `f64`.

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::quadrature::{composite_gauss, gauss_legendre, Integrator};

/// Normal-state Drude parameters plus the critical temperature of the metal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperconductorParams<T> {
    /// Plasma frequency, rad/s.
    pub omega_p: T,
    /// Normal-state relaxation rate, rad/s.
    pub gamma: T,
    /// Critical temperature, K.
    pub t_c: T,
    /// `Delta(0) / (k_B T_c)`.
    pub gap0_ratio: T,
}

/// Weak-coupling BCS value of `Delta(0) / (k_B T_c)`.
pub const BCS_GAP_RATIO: f64 = 1.764;

impl<T: Real> SuperconductorParams<T> {
    pub fn new(omega_p: T, gamma: T, t_c: T) -> Result<Self> {
        Self::with_gap_ratio(omega_p, gamma, t_c, T::lit(BCS_GAP_RATIO))
    }

    pub fn with_gap_ratio(omega_p: T, gamma: T, t_c: T, gap0_ratio: T) -> Result<Self> {
        let p = Self {
            omega_p,
            gamma,
            t_c,
            gap0_ratio,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: T| x.is_finite() && x > T::zero();
        if !(ok(self.omega_p) && ok(self.gamma) && ok(self.t_c)) {
            return Err(Error::InvalidParameter(
                "superconductor omega_p, gamma and t_c must be positive".into(),
            ));
        }
        if !(self.gap0_ratio >= T::lit(1.5) && self.gap0_ratio <= T::lit(2.5)) {
            return Err(Error::InvalidParameter(format!(
                "gap0_ratio {} outside [1.5, 2.5]",
                self.gap0_ratio
            )));
        }
        Ok(())
    }

    /// `k_B T_c / hbar` in rad/s: the frequency unit of the reduced energies.
    fn omega_unit(&self) -> T {
        T::lit(K_B / HBAR) * self.t_c
    }

    /// Drude permittivity on the imaginary axis.
    pub fn drude_eps(&self, xi: T) -> T {
        T::one() + self.omega_p * self.omega_p / (xi * (xi + self.gamma))
    }

    /// `omega * Im eps_Drude(omega)`; finite at `omega -> 0`.
    fn omega_im_eps_drude(&self, omega: T) -> T {
        self.omega_p * self.omega_p * self.gamma / (omega * omega + self.gamma * self.gamma)
    }
}

/// Superconducting gap at a given temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapValue<T> {
    /// Gap energy, J.
    pub delta: T,
    /// Temperature, K.
    pub t: T,
}

/// Reduced gap `Delta(t) / (k_B T_c)` from the tanh interpolant.
fn reduced_gap<T: Real>(t: T, p: &SuperconductorParams<T>) -> T {
    if t >= p.t_c {
        return T::zero();
    }
    if t <= T::zero() {
        return p.gap0_ratio;
    }
    p.gap0_ratio * (T::lit(1.74) * (p.t_c / t - T::one()).sqrt()).tanh()
}

pub fn bcs_gap<T: Real>(t: T, params: &SuperconductorParams<T>) -> GapValue<T> {
    let d = reduced_gap(t, params);
    GapValue {
        delta: d * T::lit(K_B) * params.t_c,
        t,
    }
}

/// Thermal and coherence-factor integrals in reduced units
/// (`d = Delta/k_B T_c`, `w = hbar omega/k_B T_c`, `theta = t/T_c`).
struct MbKernel<T> {
    d: T,
    theta: T,
    integ: Integrator<T>,
}

impl<T: Real> MbKernel<T> {
    /// `f(E) - f(E + w)` for `E > 0`, written without overflow.
    fn fermi_diff(&self, e: T, w: T) -> T {
        let x = e / self.theta;
        let y = (e + w) / self.theta;
        let ex = (-x).exp();
        let ey = (-y).exp();
        ex * (-(-(w / self.theta)).exp_m1()) / ((T::one() + ex) * (T::one() + ey))
    }

    /// `1 - 2 f(x)`.
    fn occupation_factor(&self, x: T) -> T {
        (x / (T::lit(2.0) * self.theta)).tanh()
    }

    fn sigma1(&self, w: T) -> Result<T> {
        let d = self.d;
        let two = T::lit(2.0);
        // Thermal quasiparticle term, E = d cosh u.
        let e_max = d + w.min(T::lit(60.0) * self.theta) + T::lit(60.0) * self.theta;
        let u_max = (e_max / d).acosh();
        let thermal = |u: T| {
            let e = d * u.cosh();
            let num = e * e + d * d + w * e;
            let den = ((e + w) * (e + w) - d * d).sqrt();
            self.fermi_diff(e, w) * num / den
        };
        let mut breaks = vec![T::zero()];
        let width = (w / d).sqrt();
        for s in [T::one(), T::lit(10.0)] {
            let b = width * s;
            if b < u_max && b > *breaks.last().unwrap() {
                breaks.push(b);
            }
        }
        breaks.push(u_max);
        let mut sum = two / w * self.integ.integrate_with_breaks(thermal, &breaks)?.value;
        if w > two * d {
            // Pair breaking, E = -w/2 - h cos(phi).
            let h = w / two - d;
            let m = -w / two;
            let outer = w / two + d;
            let pair = |phi: T| {
                let c = phi.cos();
                let e = m - h * c;
                let num = -(e * e + d * d + w * e);
                let den = (outer * outer - h * h * c * c).sqrt();
                self.occupation_factor(e + w) * num / den
            };
            sum = sum + self.integ.integrate(pair, T::zero(), T::PI())?.value / w;
        }
        Ok(sum)
    }

    fn sigma2(&self, w: T) -> Result<T> {
        let d = self.d;
        let two = T::lit(2.0);
        let v = if w < two * d {
            // E from d - w to d, E = c - h cos(phi).
            let h = w / two;
            let c0 = d - h;
            let f = |phi: T| {
                let cs = phi.cos();
                let e = c0 - h * cs;
                let num = e * e + d * d + w * e;
                let den = ((d + e) * (e + w + d)).sqrt();
                self.occupation_factor(e + w) * num / den
            };
            self.integ.integrate(f, T::zero(), T::PI())?.value
        } else {
            // E from -d to d, E = -d cos(phi).
            let f = |phi: T| {
                let e = -d * phi.cos();
                let num = e * e + d * d + w * e;
                let den = ((e + w) * (e + w) - d * d).sqrt();
                self.occupation_factor(e + w) * num / den
            };
            self.integ.integrate(f, T::zero(), T::PI())?.value
        };
        Ok(v / w)
    }
}

fn kernel<T: Real>(t: T, params: &SuperconductorParams<T>, rel_tol: T) -> MbKernel<T> {
    MbKernel {
        d: reduced_gap(t, params),
        theta: t / params.t_c,
        integ: Integrator::new(rel_tol).with_abs_tol(T::epsilon() * T::lit(10.0)),
    }
}

/// Mattis–Bardeen conductivity ratios `(sigma1/sigma_n, sigma2/sigma_n)`.
pub fn mb_sigma<T: Real>(omega: T, t: T, params: &SuperconductorParams<T>) -> Result<(T, T)> {
    mb_sigma_with_tol(omega, t, params, default_tol())
}

pub fn mb_sigma_with_tol<T: Real>(
    omega: T,
    t: T,
    params: &SuperconductorParams<T>,
    rel_tol: T,
) -> Result<(T, T)> {
    if !(omega > T::zero() && t > T::zero()) {
        return Err(Error::InvalidParameter(
            "mb_sigma requires omega > 0 and t > 0".into(),
        ));
    }
    let k = kernel(t, params, rel_tol);
    if k.d <= T::zero() {
        return Ok((T::one(), T::zero()));
    }
    let w = omega / params.omega_unit();
    Ok((k.sigma1(w)?, k.sigma2(w)?))
}

fn default_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(100.0))
}

/// Spectral weight of the zero-frequency condensate term, as `omega_s^2` in rad²/s².
pub fn superfluid_weight<T: Real>(t: T, params: &SuperconductorParams<T>) -> Result<T> {
    if t >= params.t_c {
        return Err(Error::NormalState {
            t: t.as_f64(),
            t_c: params.t_c.as_f64(),
        });
    }
    Ok(superfluid_weight_unchecked(t, params))
}

fn superfluid_weight_unchecked<T: Real>(t: T, params: &SuperconductorParams<T>) -> T {
    let d = reduced_gap(t, params);
    if d <= T::zero() {
        return T::zero();
    }
    let theta = t / params.t_c;
    let thermal = if theta > T::zero() {
        (d / (T::lit(2.0) * theta)).tanh()
    } else {
        T::one()
    };
    (params.omega_p * params.omega_p / params.gamma) * T::PI() * d * params.omega_unit() * thermal
}

/// Imaginary-axis permittivity of the superconductor (Drude at and above `T_c`).
pub fn eps_sc_imag_axis<T: Real>(xi: T, t: T, params: &SuperconductorParams<T>) -> Result<T> {
    if !(xi > T::zero()) {
        return Err(Error::InvalidParameter("xi must be positive".into()));
    }
    if t >= params.t_c {
        return Ok(params.drude_eps(xi));
    }
    Ok(MattisBardeenResponse::new(params, t, default_tol())?.eps(xi))
}

/// Precomputed condensate weight and quasiparticle-deficit quadrature at one temperature.
///
/// `eps(i xi) = eps_Drude(i xi) + omega_s^2/xi^2 - D(xi)`, where
/// `D(xi) = (2/pi) int_0^inf (1 - sigma1/sigma_n) omega Im eps_Drude / (omega^2 + xi^2) d omega`.
/// `D` is evaluated as a weighted sum over fixed Gauss–Legendre nodes, so each
/// `eps` call after construction is cheap.
#[derive(Debug, Clone)]
pub struct MattisBardeenResponse<T> {
    params: SuperconductorParams<T>,
    t: T,
    omega_s_sq: T,
    /// (omega, weight * (1 - sigma1/sigma_n) * omega Im eps_D)
    nodes: Vec<(T, T)>,
    abs_weight: T,
    rel_tol: T,
}

/// Upper end of the deficit integral in units of `Delta/hbar`.
const DEFICIT_CUTOFF: f64 = 2.0e4;

impl<T: Real> MattisBardeenResponse<T> {
    pub fn new(params: &SuperconductorParams<T>, t: T, rel_tol: T) -> Result<Self> {
        params.validate()?;
        if !(t > T::zero()) {
            return Err(Error::InvalidParameter(
                "Mattis-Bardeen response requires t > 0".into(),
            ));
        }
        let omega_s_sq = if t < params.t_c {
            superfluid_weight_unchecked(t, params)
        } else {
            T::zero()
        };
        let mut out = Self {
            params: *params,
            t,
            omega_s_sq,
            nodes: Vec::new(),
            abs_weight: T::zero(),
            rel_tol,
        };
        let k = kernel(t, params, rel_tol);
        if k.d <= T::zero() {
            return Ok(out);
        }
        let unit = params.omega_unit();
        let gap_omega = k.d * unit;
        let rule = gauss_legendre::<T>(20);
        let breaks = deficit_breaks(gap_omega);
        let half = T::lit(0.5);
        let mut nodes = Vec::with_capacity(breaks.len() * rule.len());
        for pair in breaks.windows(2) {
            let c = half * (pair[0] + pair[1]);
            let h = half * (pair[1] - pair[0]);
            for &(x, wt) in &rule {
                let omega = c + h * x;
                let s1 = k.sigma1(omega / unit)?;
                let weight = h * wt * (T::one() - s1) * params.omega_im_eps_drude(omega);
                nodes.push((omega, weight));
            }
        }
        let two_over_pi = T::lit(2.0) / T::PI();
        out.abs_weight = two_over_pi * nodes.iter().fold(T::zero(), |s, n| s + n.1.abs());
        out.nodes = nodes;
        Ok(out)
    }

    pub fn temperature(&self) -> T {
        self.t
    }

    pub fn omega_s_sq(&self) -> T {
        self.omega_s_sq
    }

    /// `(2/pi) int (1 - sigma1/sigma_n) omega Im eps_D d omega`: regular-part weight removed.
    pub fn deficit_weight(&self) -> T {
        let two_over_pi = T::lit(2.0) / T::PI();
        two_over_pi * self.nodes.iter().fold(T::zero(), |s, n| s + n.1)
    }

    /// Deficit integral `D(xi)` from the fixed node set.
    pub fn deficit(&self, xi: T) -> T {
        let two_over_pi = T::lit(2.0) / T::PI();
        let xi2 = xi * xi;
        two_over_pi
            * self
                .nodes
                .iter()
                .fold(T::zero(), |s, &(w, g)| s + g / (w * w + xi2))
    }

    /// Deficit integral by adaptive Gauss–Kronrod, evaluating `sigma1` pointwise.
    /// Independent of the node set used by [`Self::deficit`].
    pub fn deficit_adaptive(&self, xi: T) -> Result<T> {
        let k = kernel(self.t, &self.params, self.rel_tol);
        if k.d <= T::zero() {
            return Ok(T::zero());
        }
        let unit = self.params.omega_unit();
        let gap_omega = k.d * unit;
        let mut breaks = vec![T::zero(), gap_omega, T::lit(2.0) * gap_omega];
        if xi < T::lit(2.0) * gap_omega {
            breaks.push(xi);
        }
        breaks.push(T::lit(20.0) * gap_omega);
        breaks.push(T::lit(DEFICIT_CUTOFF) * gap_omega);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let xi2 = xi * xi;
        let mut err = None;
        let integ = Integrator::new(self.rel_tol.max(T::lit(1e-9)))
            .with_abs_tol(T::epsilon() * self.omega_s_sq / xi2);
        let v = integ.integrate_with_breaks(
            |omega: T| match k.sigma1(omega / unit) {
                Ok(s1) => (T::one() - s1) * self.params.omega_im_eps_drude(omega) / (omega * omega + xi2),
                Err(e) => {
                    err.get_or_insert(e);
                    T::zero()
                }
            },
            &breaks,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(T::lit(2.0) / T::PI() * v.value)
    }

    /// Imaginary-axis permittivity at this response's temperature.
    pub fn eps(&self, xi: T) -> T {
        let drude = self.params.drude_eps(xi);
        if self.nodes.is_empty() {
            return drude;
        }
        let xi2 = xi * xi;
        // Beyond this bound the correction is below rounding of eps_Drude.
        if (self.omega_s_sq + self.abs_weight) / xi2 < T::epsilon() * T::lit(0.01) * drude {
            return drude;
        }
        drude + self.omega_s_sq / xi2 - self.deficit(xi)
    }
}

/// Panel edges for the deficit integral: geometric towards 0 and towards the
/// pair-breaking edge `2 Delta`, geometric out to the cutoff.
fn deficit_breaks<T: Real>(gap_omega: T) -> Vec<T> {
    let two = T::lit(2.0);
    let edge = two * gap_omega;
    let mut b = vec![T::zero()];
    let mut x = gap_omega * T::lit(1e-7);
    while x < gap_omega {
        b.push(x);
        x = x * two;
    }
    b.push(gap_omega);
    // approach 2*Delta from below
    let mut below: Vec<T> = Vec::new();
    let mut s = gap_omega * T::lit(0.5);
    while s > gap_omega * T::lit(1e-7) {
        below.push(edge - s);
        s = s * T::lit(0.5);
    }
    b.extend(below);
    b.push(edge);
    let mut s = gap_omega * T::lit(1e-7);
    while s < gap_omega {
        b.push(edge + s);
        s = s * two;
    }
    let mut x = edge + gap_omega;
    let stop = T::lit(DEFICIT_CUTOFF) * gap_omega;
    while x < stop {
        b.push(x);
        x = x * T::lit(1.5);
    }
    b.push(stop);
    b
}

/// Composite Gauss–Legendre version of `D(xi)` on a different panel layout
/// (used to cross-check the node-based deficit).
pub fn deficit_composite<T: Real>(
    params: &SuperconductorParams<T>,
    t: T,
    xi: T,
    order: usize,
) -> Result<T> {
    let k = kernel(t, params, default_tol());
    if k.d <= T::zero() {
        return Ok(T::zero());
    }
    let unit = params.omega_unit();
    let gap_omega = k.d * unit;
    let mut breaks = deficit_breaks(gap_omega);
    // refine every panel in two
    let mut fine = Vec::with_capacity(2 * breaks.len());
    for w in breaks.windows(2) {
        fine.push(w[0]);
        fine.push(T::lit(0.5) * (w[0] + w[1]));
    }
    fine.push(*breaks.last().unwrap());
    breaks = fine;
    let rule = gauss_legendre::<T>(order);
    let xi2 = xi * xi;
    let mut err = None;
    let v = composite_gauss(
        |omega: T| match k.sigma1(omega / unit) {
            Ok(s1) => (T::one() - s1) * params.omega_im_eps_drude(omega) / (omega * omega + xi2),
            Err(e) => {
                err.get_or_insert(e);
                T::zero()
            }
        },
        &breaks,
        &rule,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(T::lit(2.0) / T::PI() * v)
}
