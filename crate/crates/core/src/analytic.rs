//! Closed-form ideal-metal results, the small-parameter expansion of the
//! sphere–plate force, and the second-order roughness correction.

use std::fmt::Write as _;

use crate::constants::{c, hbar_c};
use crate::error::{Error, Result};
use crate::lifshitz::relative_temperature;
use crate::num::Real;

/// `P = -pi^2 hbar c / (240 a^4)`.
pub fn ideal_metal_pressure_t0<T: Real>(a: T) -> T {
    let a2 = a * a;
    -T::PI() * T::PI() * hbar_c::<T>() / (T::lit(240.0) * a2 * a2)
}

/// `E = -pi^2 hbar c / (720 a^3)` per unit area.
pub fn ideal_metal_energy_t0<T: Real>(a: T) -> T {
    -T::PI() * T::PI() * hbar_c::<T>() / (T::lit(720.0) * a * a * a)
}

/// `F = -pi^3 hbar c R / (360 a^3)`.
pub fn ideal_metal_force_sphere_t0<T: Real>(a: T, radius: T) -> T {
    let pi3 = T::PI() * T::PI() * T::PI();
    -pi3 * hbar_c::<T>() * radius / (T::lit(360.0) * a * a * a)
}

/// Built-in coefficient table. `thetaN` multiplies `tau^N`.
pub const DEFAULT_COEFFICIENTS: &str = "\
# Sphere-plate force of plasma-model metals, expanded in delta0/a
# (delta0 = c/omega_p) and in tau = 2 pi k_B T a/(hbar c).
source=plasma-model Lifshitz expansion, 4th order in delta0/a; ideal-metal low-temperature thermal term
c1=-4
c2=14.4
c3=-43.56580040248394914
c4=104.14974118135935683
theta3=0.05626499757191699584
theta4=-0.01026598225468433519
";

/// Expansion coefficients with their citation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet<T> {
    pub source: String,
    /// `c_k` multiplies `(delta0/a)^k`, k = 1..=4.
    pub c: [T; 4],
    pub theta3: T,
    pub theta4: T,
}

impl<T: Real> CoefficientSet<T> {
    /// Parses `key=value` lines; `#` starts a comment. `source=` is mandatory.
    pub fn parse(text: &str) -> Result<Self> {
        let mut source = None;
        let mut c = [None; 4];
        let (mut theta3, mut theta4) = (None, None);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Spec(format!("coefficient line {}: expected key=value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "source" {
                if value.is_empty() {
                    return Err(Error::Spec("empty source= citation".into()));
                }
                source = Some(value.to_string());
                continue;
            }
            let v: f64 = value
                .parse()
                .map_err(|_| Error::Spec(format!("coefficient line {}: bad number `{value}`", i + 1)))?;
            let slot = match key {
                "c1" => &mut c[0],
                "c2" => &mut c[1],
                "c3" => &mut c[2],
                "c4" => &mut c[3],
                "theta3" => &mut theta3,
                "theta4" => &mut theta4,
                other => return Err(Error::Spec(format!("unknown coefficient `{other}`"))),
            };
            *slot = Some(T::lit(v));
        }
        let source = source.ok_or_else(|| Error::Spec("coefficient table lacks a source= line".into()))?;
        let mut out = [T::zero(); 4];
        for (k, v) in c.iter().enumerate() {
            out[k] = v.ok_or_else(|| Error::Spec(format!("missing coefficient c{}", k + 1)))?;
        }
        Ok(Self {
            source,
            c: out,
            theta3: theta3.unwrap_or_else(T::zero),
            theta4: theta4.unwrap_or_else(T::zero),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("source={}\n", self.source);
        for (k, v) in self.c.iter().enumerate() {
            let _ = writeln!(s, "c{}={:e}", k + 1, v.as_f64());
        }
        let _ = writeln!(s, "theta3={:e}\ntheta4={:e}", self.theta3.as_f64(), self.theta4.as_f64());
        s
    }

    /// Thermal term `theta(tau)`.
    pub fn theta(&self, tau: T) -> T {
        let t3 = tau * tau * tau;
        self.theta3 * t3 + self.theta4 * t3 * tau
    }
}

impl<T: Real> Default for CoefficientSet<T> {
    fn default() -> Self {
        Self::parse(DEFAULT_COEFFICIENTS).expect("built-in coefficient table parses")
    }
}

/// The two small parameters at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationParams<T> {
    /// Penetration depth `c / omega_p`, m.
    pub delta0: T,
    /// Relative temperature.
    pub tau: T,
}

impl<T: Real> PerturbationParams<T> {
    pub fn new(a: T, t: T, omega_p: T) -> Self {
        Self {
            delta0: c::<T>() / omega_p,
            tau: relative_temperature(a, t),
        }
    }
}

/// Result of the expansion with its truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeForce<T> {
    pub value: T,
    pub params: PerturbationParams<T>,
    /// Highest power of `delta0/a` kept.
    pub order_delta: usize,
    /// Highest power of `tau` kept.
    pub order_tau: usize,
    /// Outside the comfortable domain (`delta0/a >= 0.3` or `tau >= 1`).
    pub warning: bool,
}

pub const DELTA_WARN: f64 = 0.3;
pub const DELTA_MAX: f64 = 0.5;

/// Ideal-metal force times `1 + sum c_k (delta0/a)^k + theta(tau)`.
pub fn perturbative_force_sphere<T: Real>(
    a: T,
    t: T,
    radius: T,
    omega_p: T,
    coeffs: &CoefficientSet<T>,
) -> Result<PerturbativeForce<T>> {
    if !(a > T::zero() && radius > T::zero() && t >= T::zero() && omega_p > T::zero()) {
        return Err(Error::InvalidParameter(
            "perturbation expansion needs a, R, omega_p > 0 and T >= 0".into(),
        ));
    }
    let params = PerturbationParams::new(a, t, omega_p);
    let x = params.delta0 / a;
    if x > T::lit(DELTA_MAX) {
        return Err(Error::Domain(format!(
            "delta0/a = {x} exceeds {DELTA_MAX}"
        )));
    }
    let mut series = T::one();
    let mut p = T::one();
    for ck in coeffs.c {
        p = p * x;
        series = series + ck * p;
    }
    series = series + coeffs.theta(params.tau);
    Ok(PerturbativeForce {
        value: ideal_metal_force_sphere_t0(a, radius) * series,
        params,
        order_delta: 4,
        order_tau: if coeffs.theta4 != T::zero() { 4 } else { 3 },
        warning: x >= T::lit(DELTA_WARN) || params.tau >= T::one(),
    })
}

/// Rms roughness of the two surfaces, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughnessSpec<T> {
    pub rms_sphere: T,
    pub rms_plate: T,
}

pub const ROUGHNESS_LIMIT: f64 = 0.2;

impl<T: Real> RoughnessSpec<T> {
    pub fn new(rms_sphere: T, rms_plate: T) -> Result<Self> {
        if !(rms_sphere >= T::zero() && rms_plate >= T::zero())
            || !(rms_sphere.is_finite() && rms_plate.is_finite())
        {
            return Err(Error::InvalidParameter("roughness rms must be >= 0".into()));
        }
        Ok(Self {
            rms_sphere,
            rms_plate,
        })
    }

    pub fn none() -> Self {
        Self {
            rms_sphere: T::zero(),
            rms_plate: T::zero(),
        }
    }

    pub fn variance(&self) -> T {
        self.rms_sphere * self.rms_sphere + self.rms_plate * self.rms_plate
    }

    pub fn check(&self, a: T) -> Result<()> {
        let ratio = self.variance().sqrt() / a;
        if ratio >= T::lit(ROUGHNESS_LIMIT) {
            return Err(Error::Roughness {
                ratio: ratio.as_f64(),
                limit: ROUGHNESS_LIMIT,
            });
        }
        Ok(())
    }
}

/// `<F(a + delta)>` to second order: `F(a) + sigma^2 F''(a) / 2`, with `F''` from
/// a central difference of step `1e-3 a`.
///
/// The second difference amplifies evaluation noise by `~1e6`, so `value_fn`
/// should be evaluated well below the target tolerance.
pub fn roughness_correct<T, F>(value_fn: F, a: T, spec: &RoughnessSpec<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    if !(a > T::zero()) {
        return Err(Error::InvalidParameter("separation must be positive".into()));
    }
    spec.check(a)?;
    let f0 = value_fn(a)?;
    let s2 = spec.variance();
    if s2 == T::zero() {
        return Ok(f0);
    }
    let h = T::lit(1e-3) * a;
    let fp = value_fn(a + h)?;
    let fm = value_fn(a - h)?;
    let d2 = (fp - T::lit(2.0) * f0 + fm) / (h * h);
    Ok(f0 + T::lit(0.5) * s2 * d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{EV_TO_RAD_S, HBAR, C};
    use std::f64::consts::PI;

    #[test]
    fn closed_forms() {
        let p = ideal_metal_pressure_t0(100e-9_f64);
        assert!((p / -13.00 - 1.0).abs() < 1e-3, "{p}");
        assert!((ideal_metal_pressure_t0(1e-6_f64) / -1.300e-3 - 1.0).abs() < 1e-3);
        let ratio = ideal_metal_pressure_t0(200e-9_f64) / ideal_metal_pressure_t0(100e-9);
        assert!((ratio - 1.0 / 16.0).abs() < 1e-15);
        let f = ideal_metal_force_sphere_t0(65e-9_f64, 55e-6);
        assert!((f / -545.4e-12 - 1.0).abs() < 2e-4, "{f}");
        let f = ideal_metal_force_sphere_t0(63e-9_f64, 55e-6);
        assert!((f / -598.9e-12 - 1.0).abs() < 2e-4, "{f}");
        assert_eq!(
            ideal_metal_force_sphere_t0(63e-9_f64, 110e-6),
            2.0 * ideal_metal_force_sphere_t0(63e-9_f64, 55e-6)
        );
        let e = ideal_metal_energy_t0(1e-6_f64);
        assert!((e + PI * PI * HBAR * C / 720e-18).abs() < 1e-12 * e.abs());
    }

    #[test]
    fn coefficient_table() {
        let cs = CoefficientSet::<f64>::default();
        assert_eq!(cs.c[0], -4.0);
        assert!((cs.c[2] + 320.0 / 7.0 * (1.0 - PI * PI / 210.0)).abs() < 1e-12);
        assert!((cs.theta3 - 45.0 * crate::num::ZETA3 / PI.powi(6)).abs() < 1e-15);
        let again = CoefficientSet::<f64>::parse(&cs.to_text()).unwrap();
        assert_eq!(again, cs);
        assert!(CoefficientSet::<f64>::parse("c1=-4\nc2=1\nc3=0\nc4=0\n").is_err());
        assert!(CoefficientSet::<f64>::parse("source=x\nc1=-4\n").is_err());
        assert!(CoefficientSet::<f64>::parse("source=x\nc1=-4\nc2=1\nc3=0\nc4=0\nc9=1").is_err());
    }

    #[test]
    fn infinite_plasma_frequency_is_ideal() {
        let cs = CoefficientSet::default();
        let r = perturbative_force_sphere(100e-9_f64, 0.0, 55e-6, f64::INFINITY, &cs).unwrap();
        assert_eq!(r.value, ideal_metal_force_sphere_t0(100e-9, 55e-6));
        assert!(!r.warning);
    }

    #[test]
    fn domain_checks() {
        let cs = CoefficientSet::default();
        let wp = 9.0 * EV_TO_RAD_S;
        assert!(matches!(
            perturbative_force_sphere(40e-9_f64, 300.0, 55e-6, wp, &cs),
            Err(Error::Domain(_))
        ));
        let r = perturbative_force_sphere(65e-9_f64, 300.0, 55e-6, wp, &cs).unwrap();
        assert!(r.warning);
        let r = perturbative_force_sphere(300e-9_f64, 300.0, 55e-6, wp, &cs).unwrap();
        assert!(!r.warning);
        assert_eq!((r.order_delta, r.order_tau), (4, 4));
    }

    #[test]
    fn monotone_in_plasma_frequency() {
        let cs = CoefficientSet::default();
        let mut last = 0.0;
        for ev in [6.0, 9.0, 15.0, 30.0, 100.0] {
            let f = perturbative_force_sphere(300e-9_f64, 300.0, 55e-6, ev * EV_TO_RAD_S, &cs)
                .unwrap()
                .value;
            assert!(f.abs() > last);
            last = f.abs();
        }
        let ideal = ideal_metal_force_sphere_t0(300e-9_f64, 55e-6).abs();
        assert!(last < ideal * 1.01);
    }

    #[test]
    fn roughness_power_laws() {
        let s = RoughnessSpec::new(8e-9_f64, 2e-9).unwrap();
        assert!((s.variance() - 68e-18).abs() < 1e-30);
        for (n, a) in [(3, 65e-9_f64), (4, 100e-9)] {
            let f = |x: f64| Ok(x.powi(-n));
            let v = roughness_correct(f, a, &s).unwrap() / a.powi(-n);
            let expect = 1.0 + (n * (n + 1)) as f64 * 68e-18 / (2.0 * a * a);
            assert!((v / expect - 1.0).abs() < 1e-6, "n={n}: {v} vs {expect}");
        }
        let f = |x: f64| Ok(x.powi(-3));
        assert_eq!(roughness_correct(f, 65e-9, &RoughnessSpec::none()).unwrap(), 65e-9_f64.powi(-3));
        assert!(matches!(
            roughness_correct(f, 30e-9, &s),
            Err(Error::Roughness { .. })
        ));
    }
}
