//! Finite-temperature Lifshitz formula for two parallel half-spaces and the
//! proximity-force approximation for a sphere above a plate.
//!
//! All momentum integrals use the dimensionless variable `y = 2 a q_l` with
//! `q_l = sqrt(k^2 + xi_l^2/c^2)`, so the integrand decays as `exp(-y)`
//! independently of the separation. With `zeta_l = 2 a xi_l / c`:
//!
//! ```text
//! P(a,T) = -(k_B T / 8 pi a^3) sum'_l int_{zeta_l}^inf y^2 sum_alpha R e^-y / (1 - R e^-y) dy
//! F(a,T) =  (k_B T / 8 pi a^2) sum'_l int_{zeta_l}^inf y   sum_alpha ln(1 - R e^-y)     dy
//! ```
//!
//! where `R = r^(1) r^(2)` per polarization and the prime halves the `l = 0` term.

use crate::constants::{c, hbar_c, k_b, HBAR, K_B};
use crate::dielectric::{DielectricModel, Response, ZeroFreqClass};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::quadrature::Integrator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry<T> {
    PlatePlate,
    SpherePlate { radius: T },
}

impl<T: Real> Geometry<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::SpherePlate { radius } if !(*radius > T::zero()) => Err(Error::InvalidParameter(
                "sphere radius must be positive".into(),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T> {
    pub rel_tol: T,
    pub max_matsubara_terms: usize,
    /// Add the geometric tail estimate when truncating the Matsubara sum.
    pub tail_estimate: bool,
    /// Hard upper bound on `a / R` for the proximity-force approximation.
    pub pfa_limit: T,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-9).max(T::epsilon() * T::lit(1000.0)),
            max_matsubara_terms: 20_000,
            tail_estimate: true,
            pfa_limit: T::lit(0.05),
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero() && self.rel_tol < T::lit(1e-3)) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol {} outside (0, 1e-3)",
                self.rel_tol
            )));
        }
        if self.max_matsubara_terms < 100 {
            return Err(Error::InvalidParameter(
                "max_matsubara_terms must be at least 100".into(),
            ));
        }
        if !(self.pfa_limit > T::zero()) {
            return Err(Error::InvalidParameter("pfa_limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState<T> {
    /// Temperature, K.
    pub t: T,
}

impl<T: Real> ThermalState<T> {
    pub fn new(t: T) -> Result<Self> {
        if !(t >= T::zero() && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("temperature {t} K must be >= 0")));
        }
        Ok(Self { t })
    }
}

/// `xi_l = 2 pi k_B T l / hbar`.
pub fn matsubara_frequency<T: Real>(l: usize, t: T) -> T {
    T::lit(2.0 * std::f64::consts::PI * K_B / HBAR) * t * T::from_usize(l).unwrap()
}

/// What a surface looks like to the reflection formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Medium<T> {
    Ideal,
    /// `eps(i xi)` at a nonzero Matsubara frequency.
    Permittivity(T),
    /// The `xi = 0` limit.
    Static(ZeroFreqClass<T>),
}

/// Fresnel coefficients `(r_TM, r_TE)` on the imaginary axis for wave vector `k_perp` (1/m).
pub fn reflection_coeffs<T: Real>(medium: Medium<T>, xi: T, k_perp: T) -> (T, T) {
    let q2 = k_perp * k_perp + (xi / c::<T>()) * (xi / c::<T>());
    let q = q2.sqrt();
    match medium {
        Medium::Ideal => (T::one(), -T::one()),
        Medium::Permittivity(eps) if xi > T::zero() => fresnel(eps, q, (eps - T::one()) * (xi / c::<T>()) * (xi / c::<T>())),
        Medium::Permittivity(eps) => static_coeffs(ZeroFreqClass::Finite { eps0: eps }, k_perp, T::one()),
        Medium::Static(class) => static_coeffs(class, k_perp, T::one()),
    }
}

/// Fresnel pair for `k_tilde^2 = q^2 + contrast`, with `contrast = (eps - 1) xi^2 / c^2`
/// in whatever units `q` is measured.
#[inline]
fn fresnel<T: Real>(eps: T, q: T, contrast: T) -> (T, T) {
    let kt = (q * q + contrast).sqrt();
    let te = -contrast / ((q + kt) * (q + kt));
    let etm = eps * q + kt;
    // eps^2 q^2 - kt^2 = (eps - 1)((eps + 1) q^2) - contrast
    let tm = ((eps - T::one()) * (eps + T::one()) * q * q - contrast) / (etm * etm);
    (tm, te)
}

/// `xi = 0` coefficients. `scale` converts `omega_eff / c` to the units of `k`.
#[inline]
fn static_coeffs<T: Real>(class: ZeroFreqClass<T>, k: T, scale: T) -> (T, T) {
    match class {
        ZeroFreqClass::Finite { eps0 } => ((eps0 - T::one()) / (eps0 + T::one()), T::zero()),
        ZeroFreqClass::DrudeLike => (T::one(), T::zero()),
        ZeroFreqClass::PlasmaLike { omega_eff_sq } => {
            if omega_eff_sq.is_infinite() {
                return (T::one(), -T::one());
            }
            let kappa2 = omega_eff_sq / (c::<T>() * c::<T>()) * scale * scale;
            let kt = (k * k + kappa2).sqrt();
            (T::one(), -kappa2 / ((k + kt) * (k + kt)))
        }
    }
}

/// One boundary evaluated at a single Matsubara frequency, in reduced units.
#[derive(Debug, Clone, Copy)]
enum Side<T> {
    Ideal,
    Eps(T),
    Static(ZeroFreqClass<T>),
}

impl<T: Real> Side<T> {
    fn at(resp: &Response<'_, T>, xi: T) -> Result<Self> {
        if resp.is_ideal() {
            Ok(Side::Ideal)
        } else if xi == T::zero() {
            Ok(Side::Static(resp.zero_class()))
        } else {
            Ok(Side::Eps(resp.eps(xi)?))
        }
    }

    /// Reduced coefficients at `y = 2 a q`, `zeta = 2 a xi / c`; `two_a` converts
    /// static plasma frequencies.
    #[inline]
    fn coeffs(&self, zeta: T, y: T, two_a: T) -> (T, T) {
        match *self {
            Side::Ideal => (T::one(), -T::one()),
            Side::Eps(eps) => fresnel(eps, y, (eps - T::one()) * zeta * zeta),
            Side::Static(class) => static_coeffs(class, y, two_a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    Pressure,
    Energy,
}

/// Momentum integral for a single Matsubara term.
fn momentum_integral<T: Real>(
    s1: Side<T>,
    s2: Side<T>,
    zeta: T,
    two_a: T,
    kernel: Kernel,
    integ: &Integrator<T>,
) -> Result<T> {
    let span = integration_span(integ.rel_tol);
    let f = |y: T| {
        let (tm1, te1) = s1.coeffs(zeta, y, two_a);
        let (tm2, te2) = s2.coeffs(zeta, y, two_a);
        let e = (-y).exp();
        let rtm = tm1 * tm2 * e;
        let rte = te1 * te2 * e;
        match kernel {
            Kernel::Pressure => y * y * (rtm / (T::one() - rtm) + rte / (T::one() - rte)),
            Kernel::Energy => y * ((-rtm).ln_1p() + (-rte).ln_1p()),
        }
    };
    let b = [
        zeta,
        zeta + T::lit(0.5),
        zeta + T::lit(2.0),
        zeta + T::lit(8.0),
        zeta + span,
    ];
    Ok(integ.integrate_with_breaks(f, &b)?.value)
}

/// Upper end of the `y` range beyond the lower limit: `exp(-span)` is negligible.
fn integration_span<T: Real>(rel_tol: T) -> T {
    (T::lit(25.0) - rel_tol.ln()).max(T::lit(30.0))
}

/// Runs the primed Matsubara sum. `term(l, abs_tol)` returns the `l`-th summand.
fn matsubara_sum<T: Real, F>(q: &QuadratureConfig<T>, mut term: F) -> Result<T>
where
    F: FnMut(usize, T) -> Result<T>,
{
    let rel = q.rel_tol;
    let mut sum = term(0, T::zero())? * T::lit(0.5);
    let mut prev: Option<T> = None;
    for l in 1..q.max_matsubara_terms {
        let abs_tol = T::lit(0.01) * rel * sum.abs();
        let tl = term(l, abs_tol)?;
        sum = sum + tl;
        if sum == T::zero() && tl == T::zero() {
            if prev == Some(T::zero()) {
                return Ok(sum);
            }
            prev = Some(tl);
            continue;
        }
        if tl.abs() <= rel * sum.abs() {
            if !q.tail_estimate {
                return Ok(sum);
            }
            if let Some(p) = prev {
                if p != T::zero() {
                    let r = tl / p;
                    if r >= T::zero() && r < T::one() {
                        let tail = tl * r / (T::one() - r);
                        if tail.abs() <= rel * sum.abs() {
                            return Ok(sum + tail);
                        }
                    }
                }
            }
            if tl == T::zero() {
                return Ok(sum);
            }
        }
        prev = Some(tl);
    }
    Err(Error::MatsubaraConvergence {
        terms: q.max_matsubara_terms,
        bound: match prev {
            Some(p) if sum != T::zero() => (p / sum).abs().as_f64(),
            _ => f64::NAN,
        },
    })
}

fn check_inputs<T: Real>(a: T, state: &ThermalState<T>, q: &QuadratureConfig<T>) -> Result<()> {
    q.validate()?;
    if !(a > T::zero() && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("separation {a} m must be positive")));
    }
    if !(state.t > T::zero()) {
        return Err(Error::InvalidParameter(
            "finite-temperature evaluation requires t > 0; use the zero-temperature operations".into(),
        ));
    }
    Ok(())
}

fn reduced_sum<T: Real>(
    a: T,
    state: &ThermalState<T>,
    m1: &DielectricModel<T>,
    m2: &DielectricModel<T>,
    q: &QuadratureConfig<T>,
    kernel: Kernel,
) -> Result<T> {
    check_inputs(a, state, q)?;
    let r1 = m1.respond(state.t, q.rel_tol)?;
    let r2 = m2.respond(state.t, q.rel_tol)?;
    let two_a = T::lit(2.0) * a;
    let term_tol = q.rel_tol * T::lit(0.1);
    matsubara_sum(q, |l, abs_tol| {
        let xi = matsubara_frequency(l, state.t);
        let zeta = two_a * xi / c::<T>();
        let s1 = Side::at(&r1, xi)?;
        let s2 = Side::at(&r2, xi)?;
        let integ = Integrator::new(term_tol).with_abs_tol(abs_tol);
        momentum_integral(s1, s2, zeta, two_a, kernel, &integ)
    })
}

/// Casimir pressure between two plates, Pa (negative = attraction).
pub fn pressure_plate_plate<T: Real>(
    a: T,
    state: &ThermalState<T>,
    m1: &DielectricModel<T>,
    m2: &DielectricModel<T>,
    q: &QuadratureConfig<T>,
) -> Result<T> {
    let s = reduced_sum(a, state, m1, m2, q, Kernel::Pressure)?;
    let pref = k_b::<T>() * state.t / (T::lit(8.0) * T::PI() * a * a * a);
    Ok(-pref * s)
}

/// Casimir free energy per unit area of two plates, J/m².
pub fn free_energy_per_area<T: Real>(
    a: T,
    state: &ThermalState<T>,
    m1: &DielectricModel<T>,
    m2: &DielectricModel<T>,
    q: &QuadratureConfig<T>,
) -> Result<T> {
    let s = reduced_sum(a, state, m1, m2, q, Kernel::Energy)?;
    let pref = k_b::<T>() * state.t / (T::lit(8.0) * T::PI() * a * a);
    Ok(pref * s)
}

fn check_pfa<T: Real>(a: T, radius: T, q: &QuadratureConfig<T>) -> Result<()> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidParameter("sphere radius must be positive".into()));
    }
    let ratio = a / radius;
    if ratio > q.pfa_limit {
        return Err(Error::PfaValidity {
            ratio: ratio.as_f64(),
            limit: q.pfa_limit.as_f64(),
        });
    }
    Ok(())
}

/// Sphere–plate force in the proximity-force approximation, N.
pub fn force_sphere_plate<T: Real>(
    a: T,
    state: &ThermalState<T>,
    radius: T,
    m_sphere: &DielectricModel<T>,
    m_plate: &DielectricModel<T>,
    q: &QuadratureConfig<T>,
) -> Result<T> {
    check_pfa(a, radius, q)?;
    let f = free_energy_per_area(a, state, m_sphere, m_plate, q)?;
    Ok(T::lit(2.0) * T::PI() * radius * f)
}

fn zero_t_response<'m, T: Real>(m: &'m DielectricModel<T>, rel_tol: T) -> Result<Response<'m, T>> {
    let r = m.respond(T::zero(), rel_tol)?;
    if r.zero_class() == ZeroFreqClass::DrudeLike {
        return Err(Error::ZeroTemperatureDrude);
    }
    Ok(r)
}

fn zero_t_integral<T: Real>(
    a: T,
    m1: &DielectricModel<T>,
    m2: &DielectricModel<T>,
    q: &QuadratureConfig<T>,
    kernel: Kernel,
) -> Result<T> {
    q.validate()?;
    if !(a > T::zero() && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("separation {a} m must be positive")));
    }
    let r1 = zero_t_response(m1, q.rel_tol)?;
    let r2 = zero_t_response(m2, q.rel_tol)?;
    let two_a = T::lit(2.0) * a;
    let inner = Integrator::new(q.rel_tol * T::lit(0.01));
    let outer = Integrator::new(q.rel_tol);
    let span = integration_span(q.rel_tol);
    let mut failure = None;
    let v = outer.integrate_with_breaks(
        |zeta: T| {
            let xi = zeta * c::<T>() / two_a;
            let sides = Side::at(&r1, xi).and_then(|s1| Ok((s1, Side::at(&r2, xi)?)));
            let res = sides.and_then(|(s1, s2)| momentum_integral(s1, s2, zeta, two_a, kernel, &inner));
            match res {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    T::zero()
                }
            }
        },
        &[T::zero(), T::lit(0.5), T::lit(2.0), T::lit(8.0), span],
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(v.value)
}

/// Zero-temperature energy per unit area, J/m², from the continuous frequency integral.
pub fn energy_zero_temperature<T: Real>(
    a: T,
    m1: &DielectricModel<T>,
    m2: &DielectricModel<T>,
    q: &QuadratureConfig<T>,
) -> Result<T> {
    let s = zero_t_integral(a, m1, m2, q, Kernel::Energy)?;
    Ok(hbar_c::<T>() / (T::lit(32.0) * T::PI() * T::PI() * a * a * a) * s)
}

/// Zero-temperature pressure, Pa.
pub fn pressure_zero_temperature<T: Real>(
    a: T,
    m1: &DielectricModel<T>,
    m2: &DielectricModel<T>,
    q: &QuadratureConfig<T>,
) -> Result<T> {
    let s = zero_t_integral(a, m1, m2, q, Kernel::Pressure)?;
    Ok(-hbar_c::<T>() / (T::lit(32.0) * T::PI() * T::PI() * a * a * a * a) * s)
}

/// Zero-temperature sphere–plate force (PFA), N.
pub fn force_sphere_plate_zero_temperature<T: Real>(
    a: T,
    radius: T,
    m_sphere: &DielectricModel<T>,
    m_plate: &DielectricModel<T>,
    q: &QuadratureConfig<T>,
) -> Result<T> {
    check_pfa(a, radius, q)?;
    let e = energy_zero_temperature(a, m_sphere, m_plate, q)?;
    Ok(T::lit(2.0) * T::PI() * radius * e)
}

/// Relative temperature `2 pi k_B T a / (hbar c)`.
pub fn relative_temperature<T: Real>(a: T, t: T) -> T {
    T::lit(2.0) * T::PI() * k_b::<T>() * t * a / hbar_c::<T>()
}
