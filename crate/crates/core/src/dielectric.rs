//! Dielectric response of the boundary materials on the imaginary frequency axis.

use std::fmt;
use std::sync::Arc;

use crate::constants::{c, ev_to_rad_s};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::optics::{kk_to_imag_axis_with, ExtrapolationPolicy, LowTail, OpticalTable};
use crate::quadrature::Integrator;
use crate::superconductor::{superfluid_weight, MattisBardeenResponse, SuperconductorParams};

/// Default Drude parameters, photon energies in eV.
pub mod defaults {
    pub const AU_PLASMA_EV: f64 = 9.0;
    pub const AU_GAMMA_EV: f64 = 0.035;
    pub const AG_PLASMA_EV: f64 = 9.0;
    pub const AG_GAMMA_EV: f64 = 0.02;
    pub const AL_PLASMA_EV: f64 = 11.5;
    pub const AL_GAMMA_EV: f64 = 0.05;
    pub const AL_T_C: f64 = 1.3;
}

/// Description of the superconducting state below `T_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScSubModel {
    /// Dissipationless plasma response at and below `T_c`.
    PlasmaBelowTc,
    /// Mattis–Bardeen conductivity joined to Drude at `T_c`.
    MattisBardeen,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel<T> {
    Vacuum,
    IdealMetal,
    Plasma {
        omega_p: T,
    },
    Drude {
        omega_p: T,
        gamma: T,
    },
    Tabulated {
        table: Arc<OpticalTable<T>>,
        extrapolation: ExtrapolationPolicy<T>,
    },
    Superconductor {
        params: SuperconductorParams<T>,
        sub_model: ScSubModel,
    },
}

/// Zero-frequency behaviour, which fixes the `l = 0` reflection coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroFreqClass<T> {
    /// Dielectric: `eps(0)` finite.
    Finite { eps0: T },
    /// `eps * xi` finite as `xi -> 0`.
    DrudeLike,
    /// `eps * xi^2 -> omega_eff_sq` as `xi -> 0`.
    PlasmaLike { omega_eff_sq: T },
}

impl<T: Real> DielectricModel<T> {
    pub fn plasma(omega_p: T) -> Result<Self> {
        let m = Self::Plasma { omega_p };
        m.validate()?;
        Ok(m)
    }

    pub fn drude(omega_p: T, gamma: T) -> Result<Self> {
        let m = Self::Drude { omega_p, gamma };
        m.validate()?;
        Ok(m)
    }

    pub fn gold_drude() -> Self {
        Self::Drude {
            omega_p: ev_to_rad_s(T::lit(defaults::AU_PLASMA_EV)),
            gamma: ev_to_rad_s(T::lit(defaults::AU_GAMMA_EV)),
        }
    }

    pub fn silver_drude() -> Self {
        Self::Drude {
            omega_p: ev_to_rad_s(T::lit(defaults::AG_PLASMA_EV)),
            gamma: ev_to_rad_s(T::lit(defaults::AG_GAMMA_EV)),
        }
    }

    pub fn aluminum_params() -> SuperconductorParams<T> {
        SuperconductorParams {
            omega_p: ev_to_rad_s(T::lit(defaults::AL_PLASMA_EV)),
            gamma: ev_to_rad_s(T::lit(defaults::AL_GAMMA_EV)),
            t_c: T::lit(defaults::AL_T_C),
            gap0_ratio: T::lit(crate::superconductor::BCS_GAP_RATIO),
        }
    }

    /// Same plasma frequency with relaxation dropped (plasma-model extrapolation).
    pub fn to_plasma(&self) -> Option<Self> {
        match *self {
            Self::Plasma { omega_p } | Self::Drude { omega_p, .. } => Some(Self::Plasma { omega_p }),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: T| x.is_finite() && x > T::zero();
        match self {
            Self::Plasma { omega_p } if !pos(*omega_p) => Err(Error::InvalidParameter(
                "plasma omega_p must be positive".into(),
            )),
            Self::Drude { omega_p, gamma } if !pos(*omega_p) || !(*gamma >= T::zero()) => Err(
                Error::InvalidParameter("Drude needs omega_p > 0 and gamma >= 0".into()),
            ),
            Self::Tabulated { extrapolation, .. } => extrapolation.validate(),
            Self::Superconductor { params, .. } => params.validate(),
            _ => Ok(()),
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, Self::IdealMetal)
    }

    pub fn plasma_frequency(&self) -> Option<T> {
        match self {
            Self::Plasma { omega_p } | Self::Drude { omega_p, .. } => Some(*omega_p),
            Self::Superconductor { params, .. } => Some(params.omega_p),
            _ => None,
        }
    }

    /// Penetration depth `c / omega_p`, m.
    pub fn penetration_depth(&self) -> Option<T> {
        self.plasma_frequency().map(|w| c::<T>() / w)
    }

    /// `eps(i xi)` for `xi > 0`.
    pub fn eps_imag_axis(&self, xi: T, t: T) -> Result<T> {
        if !(xi > T::zero()) {
            return Err(Error::InvalidParameter(
                "eps_imag_axis requires xi > 0; l = 0 goes through zero_freq_class".into(),
            ));
        }
        self.respond(t, default_tol())?.eps(xi)
    }

    pub fn zero_freq_class(&self, t: T) -> Result<ZeroFreqClass<T>> {
        Ok(match self {
            Self::Vacuum => ZeroFreqClass::Finite { eps0: T::one() },
            Self::IdealMetal => ZeroFreqClass::PlasmaLike {
                omega_eff_sq: T::infinity(),
            },
            Self::Plasma { omega_p } => ZeroFreqClass::PlasmaLike {
                omega_eff_sq: *omega_p * *omega_p,
            },
            Self::Drude { omega_p, gamma } => {
                if *gamma == T::zero() {
                    ZeroFreqClass::PlasmaLike {
                        omega_eff_sq: *omega_p * *omega_p,
                    }
                } else {
                    ZeroFreqClass::DrudeLike
                }
            }
            Self::Tabulated {
                table,
                extrapolation,
            } => match extrapolation.low {
                LowTail::Plasma { omega_p } => ZeroFreqClass::PlasmaLike {
                    omega_eff_sq: omega_p * omega_p,
                },
                LowTail::Drude { omega_p, gamma } if omega_p > T::zero() => {
                    if gamma == T::zero() {
                        ZeroFreqClass::PlasmaLike {
                            omega_eff_sq: omega_p * omega_p,
                        }
                    } else {
                        ZeroFreqClass::DrudeLike
                    }
                }
                LowTail::Drude { .. } => {
                    // no free carriers: static limit of the dispersion integral
                    let tiny = table.omega_min() * T::lit(1e-6);
                    let integ = Integrator::new(default_tol());
                    ZeroFreqClass::Finite {
                        eps0: kk_to_imag_axis_with(table, extrapolation, tiny, &integ)?,
                    }
                }
            },
            Self::Superconductor { params, sub_model } => match sub_model {
                ScSubModel::PlasmaBelowTc if t <= params.t_c => ZeroFreqClass::PlasmaLike {
                    omega_eff_sq: params.omega_p * params.omega_p,
                },
                ScSubModel::MattisBardeen if t < params.t_c => {
                    let w = superfluid_weight(t, params)?;
                    if w > T::zero() {
                        ZeroFreqClass::PlasmaLike { omega_eff_sq: w }
                    } else {
                        ZeroFreqClass::DrudeLike
                    }
                }
                _ => ZeroFreqClass::DrudeLike,
            },
        })
    }

    /// Prepares the model for repeated evaluation at one temperature.
    pub fn respond(&self, t: T, rel_tol: T) -> Result<Response<'_, T>> {
        self.validate()?;
        let kind = match self {
            Self::Vacuum => ResponseKind::Vacuum,
            Self::IdealMetal => ResponseKind::Ideal,
            Self::Plasma { omega_p } => ResponseKind::Drude {
                wp2: *omega_p * *omega_p,
                gamma: T::zero(),
            },
            Self::Drude { omega_p, gamma } => ResponseKind::Drude {
                wp2: *omega_p * *omega_p,
                gamma: *gamma,
            },
            Self::Tabulated {
                table,
                extrapolation,
            } => ResponseKind::Table {
                table,
                policy: extrapolation,
                integ: Integrator::new(rel_tol),
            },
            Self::Superconductor { params, sub_model } => {
                let wp2 = params.omega_p * params.omega_p;
                match sub_model {
                    ScSubModel::PlasmaBelowTc if t <= params.t_c => ResponseKind::Drude {
                        wp2,
                        gamma: T::zero(),
                    },
                    ScSubModel::MattisBardeen if t < params.t_c => {
                        ResponseKind::Mb(Box::new(MattisBardeenResponse::new(params, t, rel_tol)?))
                    }
                    _ => ResponseKind::Drude {
                        wp2,
                        gamma: params.gamma,
                    },
                }
            }
        };
        Ok(Response {
            kind,
            zero: self.zero_freq_class(t)?,
        })
    }
}

fn default_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(100.0))
}

#[derive(Debug)]
enum ResponseKind<'a, T> {
    Vacuum,
    Ideal,
    Drude { wp2: T, gamma: T },
    Table {
        table: &'a OpticalTable<T>,
        policy: &'a ExtrapolationPolicy<T>,
        integ: Integrator<T>,
    },
    Mb(Box<MattisBardeenResponse<T>>),
}

/// A dielectric model fixed at one temperature, ready for evaluation along the
/// imaginary frequency axis.
#[derive(Debug)]
pub struct Response<'a, T> {
    kind: ResponseKind<'a, T>,
    zero: ZeroFreqClass<T>,
}

impl<T: Real> Response<'_, T> {
    pub fn is_ideal(&self) -> bool {
        matches!(self.kind, ResponseKind::Ideal)
    }

    pub fn zero_class(&self) -> ZeroFreqClass<T> {
        self.zero
    }

    pub fn eps(&self, xi: T) -> Result<T> {
        match &self.kind {
            ResponseKind::Vacuum => Ok(T::one()),
            ResponseKind::Ideal => Err(Error::IdealMetalPermittivity),
            ResponseKind::Drude { wp2, gamma } => Ok(T::one() + *wp2 / (xi * (xi + *gamma))),
            ResponseKind::Table {
                table,
                policy,
                integ,
            } => kk_to_imag_axis_with(table, policy, xi, integ),
            ResponseKind::Mb(r) => Ok(r.eps(xi)),
        }
    }
}

fn fmt_num<T: Real>(x: T) -> String {
    format!("{:e}", x.as_f64())
}

/// Canonical model-spec text (frequencies in rad/s).
impl<T: Real> fmt::Display for DielectricModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Vacuum => write!(f, "vacuum"),
            Self::IdealMetal => write!(f, "ideal"),
            Self::Plasma { omega_p } => write!(f, "plasma:wp={}", fmt_num(*omega_p)),
            Self::Drude { omega_p, gamma } => {
                write!(f, "drude:wp={},gamma={}", fmt_num(*omega_p), fmt_num(*gamma))
            }
            Self::Tabulated {
                table,
                extrapolation,
            } => {
                write!(f, "table:label={},rows={},", table.source_label(), table.rows().len())?;
                match extrapolation.low {
                    LowTail::Drude { omega_p, gamma } => write!(
                        f,
                        "extrap=drude(wp={},gamma={})",
                        fmt_num(omega_p),
                        fmt_num(gamma)
                    )?,
                    LowTail::Plasma { omega_p } => {
                        write!(f, "extrap=plasma(wp={})", fmt_num(omega_p))?
                    }
                }
                write!(f, ",high={}", fmt_num(extrapolation.high.exponent))
            }
            Self::Superconductor { params, sub_model } => write!(
                f,
                "sc:wp={},gamma={},tc={},ratio={},model={}",
                fmt_num(params.omega_p),
                fmt_num(params.gamma),
                fmt_num(params.t_c),
                fmt_num(params.gap0_ratio),
                match sub_model {
                    ScSubModel::PlasmaBelowTc => "plasma",
                    ScSubModel::MattisBardeen => "mb",
                }
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::EV_TO_RAD_S;

    const WP: f64 = 9.0 * EV_TO_RAD_S;

    #[test]
    fn plasma_at_plasma_frequency_is_two() {
        let m = DielectricModel::plasma(WP).unwrap();
        assert!((m.eps_imag_axis(WP, 300.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn drude_without_relaxation_is_plasma() {
        let d = DielectricModel::drude(WP, 0.0).unwrap();
        let p = DielectricModel::plasma(WP).unwrap();
        for xi in [1e12, 2.468e14, 7e15, 1e18] {
            assert_eq!(d.eps_imag_axis(xi, 300.0).unwrap(), p.eps_imag_axis(xi, 300.0).unwrap());
        }
        assert_eq!(d.zero_freq_class(300.0).unwrap(), p.zero_freq_class(300.0).unwrap());
    }

    #[test]
    fn drude_value_first_matsubara() {
        // 1 + wp^2/(xi(xi+gamma)) at xi = 2.468e14, evaluated independently
        let g = 0.035 * EV_TO_RAD_S;
        let m = DielectricModel::<f64>::drude(1.3673e16, 5.317e13).unwrap();
        let v = m.eps_imag_axis(2.468e14, 0.0).unwrap();
        assert!((v / 2.526e3 - 1.0).abs() < 1e-3, "{v}");
        let m = DielectricModel::drude(WP, g).unwrap();
        assert!((m.eps_imag_axis(2.468e14, 0.0).unwrap() / 2.526e3 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn vacuum_and_ideal() {
        let v = DielectricModel::<f64>::Vacuum;
        assert_eq!(v.eps_imag_axis(1e14, 300.0).unwrap(), 1.0);
        let i = DielectricModel::<f64>::IdealMetal;
        assert_eq!(i.eps_imag_axis(1e14, 300.0), Err(Error::IdealMetalPermittivity));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DielectricModel::plasma(-1.0).is_err());
        assert!(DielectricModel::drude(1.0, -1.0).is_err());
        assert!(DielectricModel::plasma(WP).unwrap().eps_imag_axis(0.0, 1.0).is_err());
    }

    #[test]
    fn zero_frequency_classes() {
        let p = DielectricModel::plasma(WP).unwrap();
        assert_eq!(
            p.zero_freq_class(300.0).unwrap(),
            ZeroFreqClass::PlasmaLike { omega_eff_sq: WP * WP }
        );
        let d = DielectricModel::drude(WP, 1e13).unwrap();
        assert_eq!(d.zero_freq_class(300.0).unwrap(), ZeroFreqClass::DrudeLike);
        let sc = DielectricModel::Superconductor {
            params: DielectricModel::<f64>::aluminum_params(),
            sub_model: ScSubModel::MattisBardeen,
        };
        assert_eq!(sc.zero_freq_class(1.3).unwrap(), ZeroFreqClass::DrudeLike);
        assert!(matches!(
            sc.zero_freq_class(0.5).unwrap(),
            ZeroFreqClass::PlasmaLike { .. }
        ));
    }

    #[test]
    fn penetration_depth() {
        let p = DielectricModel::plasma(WP).unwrap();
        let d = p.penetration_depth().unwrap();
        assert!((d - 21.92e-9).abs() < 0.01e-9, "{d}");
    }

    #[test]
    fn drude_relaxation_bound() {
        let g = 0.035 * EV_TO_RAD_S;
        let d = DielectricModel::drude(WP, g).unwrap();
        let p = DielectricModel::plasma(WP).unwrap();
        let mut xi = g;
        while xi < 1e18 {
            let (ed, ep) = (d.eps_imag_axis(xi, 0.0).unwrap(), p.eps_imag_axis(xi, 0.0).unwrap());
            assert!((ed - ep).abs() / ep <= g / xi);
            xi *= 1.7;
        }
    }
}
