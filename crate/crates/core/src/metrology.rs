//! Force curves, the rms-deviation separation fit, synthetic data and the
//! superconducting pressure-change sweep.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::analytic::{ideal_metal_energy_t0, ideal_metal_pressure_t0, roughness_correct, RoughnessSpec};
use crate::constants::c;
use crate::dielectric::{DielectricModel, ScSubModel};
use crate::error::{Error, Result};
use crate::lifshitz::{
    energy_zero_temperature, free_energy_per_area, matsubara_frequency, pressure_plate_plate,
    pressure_zero_temperature, Geometry, QuadratureConfig, ThermalState,
};
use crate::num::Real;
use crate::superconductor::SuperconductorParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Sphere–plate force, N.
    Force,
    /// Plate–plate pressure, Pa.
    Pressure,
}

impl Quantity {
    pub fn column(&self) -> &'static str {
        match self {
            Quantity::Force => "force_N",
            Quantity::Pressure => "pressure_Pa",
        }
    }
}

/// Everything that determines a computed curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub geometry: String,
    pub sphere: String,
    pub plate: String,
    pub t: f64,
    pub roughness: Option<(f64, f64)>,
    pub quadrature: String,
    pub extra: Vec<(String, String)>,
}

impl Provenance {
    pub fn canonical(&self) -> String {
        let mut s = format!(
            "geometry={};sphere={};plate={};t={:e};",
            self.geometry, self.sphere, self.plate, self.t
        );
        match self.roughness {
            Some((rs, rp)) => {
                let _ = write!(s, "roughness={rs:e},{rp:e};");
            }
            None => s.push_str("roughness=none;"),
        }
        let _ = write!(s, "quadrature={}", self.quadrature);
        for (k, v) in &self.extra {
            let _ = write!(s, ";{k}={v}");
        }
        s
    }

    pub fn hash(&self) -> String {
        config_hash(&self.canonical())
    }
}

/// First 16 hex digits of the SHA-256 of `canonical`.
pub fn config_hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .take(8)
        .fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

pub fn quadrature_tag<T: Real>(q: &QuadratureConfig<T>) -> String {
    format!(
        "rel_tol={:e},max_terms={},tail={},pfa_limit={:e}",
        q.rel_tol.as_f64(),
        q.max_matsubara_terms,
        q.tail_estimate,
        q.pfa_limit.as_f64()
    )
}

/// Shortest round-trip decimal, padded to at least 10 significant digits.
pub fn format_value(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let short = format!("{x:e}");
    let mantissa = short.split('e').next().unwrap_or("");
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    if digits >= 10 {
        short
    } else {
        format!("{x:.9e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceCurve<T> {
    points: Vec<(T, T)>,
    pub quantity: Quantity,
    pub provenance: Provenance,
}

impl<T: Real> ForceCurve<T> {
    pub fn new(points: Vec<(T, T)>, quantity: Quantity, provenance: Provenance) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter("curve separations must increase".into()));
            }
        }
        if points.iter().any(|p| !p.1.is_finite()) {
            return Err(Error::InvalidParameter("curve values must be finite".into()));
        }
        Ok(Self {
            points,
            quantity,
            provenance,
        })
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    /// Monotone cubic interpolation of `ln|F|` against `ln a`. Needs a
    /// single-signed curve with at least two points.
    pub fn interpolate(&self, a: T) -> Result<T> {
        let n = self.points.len();
        let (lo, hi) = (self.points[0].0, self.points[n - 1].0);
        if n < 2 || !(a >= lo && a <= hi) {
            return Err(Error::InvalidParameter(format!(
                "separation {a} outside cached curve [{lo}, {hi}]"
            )));
        }
        let sign = self.points[0].1.signum();
        if self.points.iter().any(|p| p.1 == T::zero() || p.1.signum() != sign) {
            return Err(Error::InvalidParameter(
                "log interpolation needs a single-signed curve".into(),
            ));
        }
        let x: Vec<T> = self.points.iter().map(|p| p.0.ln()).collect();
        let y: Vec<T> = self.points.iter().map(|p| p.1.abs().ln()).collect();
        let d = fritsch_carlson_slopes(&x, &y);
        let u = a.ln();
        let i = match x.iter().position(|&xi| xi >= u) {
            Some(0) => 0,
            Some(k) => k - 1,
            None => n - 2,
        };
        let h = x[i + 1] - x[i];
        let s = (u - x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        let v = h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
        Ok(sign * v.exp())
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# provenance: {}\n", self.provenance.hash());
        let _ = writeln!(s, "# {}", self.provenance.canonical());
        let _ = writeln!(s, "a_m,{}", self.quantity.column());
        for (a, v) in &self.points {
            let _ = writeln!(s, "{},{}", format_value(a.as_f64()), format_value(v.as_f64()));
        }
        s
    }
}

fn fritsch_carlson_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let delta: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut d = vec![T::zero(); n];
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        d[i] = if delta[i - 1] * delta[i] <= T::zero() {
            T::zero()
        } else {
            // weighted harmonic mean keeps the interpolant monotone
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let w1 = T::lit(2.0) * h1 + h0;
            let w2 = h1 + T::lit(2.0) * h0;
            (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
        };
    }
    d
}

/// Models, temperature and geometry behind a theory curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec<T> {
    pub geometry: Geometry<T>,
    pub sphere: DielectricModel<T>,
    pub plate: DielectricModel<T>,
    pub t: T,
    pub roughness: Option<RoughnessSpec<T>>,
    pub quadrature: QuadratureConfig<T>,
}

impl<T: Real> CurveSpec<T> {
    pub fn quantity(&self) -> Quantity {
        match self.geometry {
            Geometry::PlatePlate => Quantity::Pressure,
            Geometry::SpherePlate { .. } => Quantity::Force,
        }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            geometry: match self.geometry {
                Geometry::PlatePlate => "plate-plate".into(),
                Geometry::SpherePlate { radius } => format!("sphere-plate(R={:e})", radius.as_f64()),
            },
            sphere: self.sphere.to_string(),
            plate: self.plate.to_string(),
            t: self.t.as_f64(),
            roughness: self.roughness.map(|r| (r.rms_sphere.as_f64(), r.rms_plate.as_f64())),
            quadrature: quadrature_tag(&self.quadrature),
            extra: Vec::new(),
        }
    }

    /// Quadrature used inside the roughness second difference.
    fn inner_quadrature(&self) -> QuadratureConfig<T> {
        let mut q = self.quadrature;
        if self.roughness.is_some_and(|r| r.variance() > T::zero()) {
            q.rel_tol = q.rel_tol.min(T::lit(1e-11).max(T::epsilon() * T::lit(1e4)));
        }
        q
    }

    /// Smooth-surface value at one separation.
    fn smooth(&self, a: T, q: &QuadratureConfig<T>) -> Result<T> {
        let both_ideal = self.sphere.is_ideal() && self.plate.is_ideal();
        let per_area = |pressure: bool| -> Result<T> {
            if self.t == T::zero() {
                if both_ideal {
                    return Ok(if pressure {
                        ideal_metal_pressure_t0(a)
                    } else {
                        ideal_metal_energy_t0(a)
                    });
                }
                if pressure {
                    pressure_zero_temperature(a, &self.sphere, &self.plate, q)
                } else {
                    energy_zero_temperature(a, &self.sphere, &self.plate, q)
                }
            } else {
                let st = ThermalState::new(self.t)?;
                if pressure {
                    pressure_plate_plate(a, &st, &self.sphere, &self.plate, q)
                } else {
                    free_energy_per_area(a, &st, &self.sphere, &self.plate, q)
                }
            }
        };
        match self.geometry {
            Geometry::PlatePlate => per_area(true),
            Geometry::SpherePlate { radius } => {
                Ok(T::lit(2.0) * T::PI() * radius * per_area(false)?)
            }
        }
    }

    /// Value at one separation, roughness included.
    pub fn evaluate(&self, a: T) -> Result<T> {
        self.geometry.validate()?;
        if let Geometry::SpherePlate { radius } = self.geometry {
            let ratio = a / radius;
            if ratio > self.quadrature.pfa_limit {
                return Err(Error::PfaValidity {
                    ratio: ratio.as_f64(),
                    limit: self.quadrature.pfa_limit.as_f64(),
                });
            }
        }
        match self.roughness {
            Some(r) if r.variance() > T::zero() => {
                let q = self.inner_quadrature();
                roughness_correct(|x| self.smooth(x, &q), a, &r)
            }
            _ => self.smooth(a, &self.quadrature),
        }
    }
}

/// Evaluates `spec` on `grid` in parallel; results come back in grid order.
pub fn generate_curve<T: Real>(spec: &CurveSpec<T>, grid: &[T]) -> Result<ForceCurve<T>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let values: Vec<Result<T>> = grid.par_iter().map(|&a| spec.evaluate(a)).collect();
    let points = grid
        .iter()
        .zip(values)
        .map(|(&a, v)| v.map(|v| (a, v)))
        .collect::<Result<Vec<_>>>()?;
    ForceCurve::new(points, spec.quantity(), spec.provenance())
}

/// `n` points from `min` to `max`, linear or logarithmic.
pub fn separation_grid<T: Real>(min: T, max: T, n: usize, log: bool) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    if n == 1 {
        return Ok(vec![min]);
    }
    if !(min > T::zero() && max > min) {
        return Err(Error::InvalidParameter("grid needs 0 < min < max".into()));
    }
    let last = T::from_usize(n - 1).unwrap();
    Ok((0..n)
        .map(|i| {
            let s = T::from_usize(i).unwrap() / last;
            if i == 0 {
                min
            } else if i == n - 1 {
                max
            } else if log {
                (min.ln() + s * (max.ln() - min.ln())).exp()
            } else {
                min + s * (max - min)
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement<T> {
    /// Relative displacement, m.
    pub z: T,
    pub f: T,
    pub sigma_f: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredSeries<T> {
    points: Vec<Measurement<T>>,
}

pub const SERIES_HEADER: &str = "z_m,f_N,sigma_N";

impl<T: Real> MeasuredSeries<T> {
    pub fn new(points: Vec<Measurement<T>>) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[1].z > w[0].z) {
                return Err(Error::InvalidParameter("z must be strictly increasing".into()));
            }
        }
        if points.iter().any(|p| !(p.sigma_f > T::zero()) || !p.f.is_finite()) {
            return Err(Error::InvalidParameter("sigma_f must be positive and f finite".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Measurement<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        match lines.next() {
            Some((_, h)) if h.trim() == SERIES_HEADER => {}
            _ => return Err(Error::Spec(format!("series must start with header `{SERIES_HEADER}`"))),
        }
        let mut pts = Vec::new();
        for (i, line) in lines {
            let v: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Spec(format!("line {}: malformed number", i + 1)))?;
            if v.len() != 3 {
                return Err(Error::Spec(format!("line {}: expected 3 columns", i + 1)));
            }
            pts.push(Measurement {
                z: T::lit(v[0]),
                f: T::lit(v[1]),
                sigma_f: T::lit(v[2]),
            });
        }
        Self::new(pts)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{SERIES_HEADER}\n");
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{}",
                format_value(p.z.as_f64()),
                format_value(p.f.as_f64()),
                format_value(p.sigma_f.as_f64())
            );
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig<T> {
    /// Search range for the offset `a0`, m.
    pub bracket: (T, T),
    /// Separation window `(a_min, a_max)` selecting the data, m.
    pub interval: (T, T),
    /// Offset used to place the data in the window: a point is used when
    /// `z + reference_offset` lies inside it.
    pub reference_offset: T,
    /// Final bracket width, m.
    pub resolution: T,
    pub scan_points: usize,
}

impl<T: Real> FitConfig<T> {
    pub fn new(bracket: (T, T), interval: (T, T)) -> Self {
        Self {
            bracket,
            interval,
            reference_offset: T::zero(),
            resolution: T::lit(1e-11),
            scan_points: 41,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult<T> {
    pub a0: T,
    pub rms: T,
    pub interval: (T, T),
    pub n_points: usize,
}

pub const MIN_FIT_POINTS: usize = 5;

/// Offset `a0` minimizing the rms of `f_i - F(z_i + a0)`: coarse scan, then
/// golden-section refinement around the best scan point.
pub fn fit_offset<T, F>(data: &MeasuredSeries<T>, theory: F, cfg: &FitConfig<T>) -> Result<FitResult<T>>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    let (lo, hi) = cfg.bracket;
    let (amin, amax) = cfg.interval;
    if !(hi > lo) || !(amax > amin) || cfg.scan_points < 3 || !(cfg.resolution > T::zero()) {
        return Err(Error::InvalidParameter("invalid fit configuration".into()));
    }
    let used: Vec<Measurement<T>> = data
        .points
        .iter()
        .copied()
        .filter(|p| {
            let a = p.z + cfg.reference_offset;
            a >= amin && a <= amax
        })
        .collect();
    if used.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "{} points in [{:e}, {:e}] m, at least {MIN_FIT_POINTS} needed",
            used.len(),
            amin.as_f64(),
            amax.as_f64()
        )));
    }
    let n = T::from_usize(used.len()).unwrap();
    let rms = |a0: T| -> Result<T> {
        let mut s = T::zero();
        for p in &used {
            let r = p.f - theory(p.z + a0)?;
            s = s + r * r;
        }
        Ok((s / n).sqrt())
    };

    let m = cfg.scan_points;
    let step = (hi - lo) / T::from_usize(m - 1).unwrap();
    let xs: Vec<T> = (0..m).map(|i| lo + step * T::from_usize(i).unwrap()).collect();
    let mut best = (0usize, T::infinity());
    for (i, &x) in xs.iter().enumerate() {
        let v = rms(x)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let k = best.0;
    if k == 0 || k == m - 1 {
        return Err(Error::MonotoneObjective {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }

    // golden section on [x_{k-1}, x_{k+1}], which brackets the minimum
    let g = T::lit(0.5 * (5f64.sqrt() - 1.0));
    let (mut a, mut b) = (xs[k - 1], xs[k + 1]);
    let mut c1 = b - g * (b - a);
    let mut c2 = a + g * (b - a);
    let (mut f1, mut f2) = (rms(c1)?, rms(c2)?);
    while b - a > cfg.resolution {
        if f1 <= f2 {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - g * (b - a);
            f1 = rms(c1)?;
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + g * (b - a);
            f2 = rms(c2)?;
        }
    }
    let (a0, r) = if f1 <= f2 { (c1, f1) } else { (c2, f2) };
    let (a0, r) = if best.1 < r { (xs[k], best.1) } else { (a0, r) };
    Ok(FitResult {
        a0,
        rms: r,
        interval: cfg.interval,
        n_points: used.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sensitivity<T> {
    pub results: Vec<FitResult<T>>,
    /// `max(a0) - min(a0)`.
    pub spread: T,
}

/// Repeats the fit over each separation window.
pub fn interval_sensitivity<T, F>(
    data: &MeasuredSeries<T>,
    theory: F,
    cfg: &FitConfig<T>,
    intervals: &[(T, T)],
) -> Result<Sensitivity<T>>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    if intervals.is_empty() {
        return Err(Error::InvalidParameter("no fit intervals given".into()));
    }
    let results = intervals
        .iter()
        .map(|&iv| {
            let c = FitConfig { interval: iv, ..*cfg };
            fit_offset(data, &theory, &c)
        })
        .collect::<Result<Vec<_>>>()?;
    let (mn, mx) = results.iter().fold((T::infinity(), T::neg_infinity()), |(mn, mx), r| {
        (mn.min(r.a0), mx.max(r.a0))
    });
    Ok(Sensitivity {
        results,
        spread: mx - mn,
    })
}

/// Synthetic measurement: `z_i = a_i - a0_true`, `f_i = F(a_i) + noise`.
/// Noiseless series carry `sigma_f = eps |f|`.
pub fn synth_data<T, F>(theory: F, grid: &[T], a0_true: T, noise_rms: T, seed: u64) -> Result<MeasuredSeries<T>>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if !(noise_rms >= T::zero()) {
        return Err(Error::InvalidParameter("noise rms must be >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise_rms.as_f64())
        .map_err(|e| Error::InvalidParameter(format!("noise distribution: {e}")))?;
    let mut pts = Vec::with_capacity(grid.len());
    for &a in grid {
        let exact = theory(a)?;
        let (f, sigma) = if noise_rms > T::zero() {
            (exact + T::lit(normal.sample(&mut rng)), noise_rms)
        } else {
            (exact, (T::epsilon() * exact.abs()).max(T::min_positive_value()))
        };
        pts.push(Measurement {
            z: a - a0_true,
            f,
            sigma_f: sigma,
        });
    }
    MeasuredSeries::new(pts)
}

/// Normal-state description continued below `T_c` as the sweep baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalModel {
    Drude,
    Plasma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint<T> {
    pub t: T,
    /// `P_sc - P_normal`, Pa.
    pub delta_p: T,
    /// Baseline pressure, Pa.
    pub p_normal: T,
}

/// Matsubara terms needed at temperature `t` for separation `a`.
fn terms_needed<T: Real>(a: T, t: T, rel_tol: T) -> usize {
    let zeta1 = T::lit(2.0) * a * matsubara_frequency(1, t) / c::<T>();
    let reach = T::lit(60.0) - rel_tol.ln();
    (reach / zeta1).to_usize().unwrap_or(usize::MAX).saturating_add(1000)
}

/// Pressure change `P_sc - P_normal` between two identical plates over a
/// temperature grid in `(0.05 t_c, t_c]`.
pub fn sc_delta_sweep<T: Real>(
    a: T,
    params: &SuperconductorParams<T>,
    sub_model: ScSubModel,
    normal: NormalModel,
    t_grid: &[T],
    q: &QuadratureConfig<T>,
) -> Result<Vec<SweepPoint<T>>> {
    params.validate()?;
    if !(a > T::zero()) {
        return Err(Error::InvalidParameter("separation must be positive".into()));
    }
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for &t in t_grid {
        if !(t > T::lit(0.05) * params.t_c && t <= params.t_c) {
            return Err(Error::InvalidParameter(format!(
                "sweep temperature {t} K outside (0.05 T_c, T_c]"
            )));
        }
    }
    let sc = DielectricModel::Superconductor {
        params: *params,
        sub_model,
    };
    let base = match normal {
        NormalModel::Drude => DielectricModel::Drude {
            omega_p: params.omega_p,
            gamma: params.gamma,
        },
        NormalModel::Plasma => DielectricModel::Plasma {
            omega_p: params.omega_p,
        },
    };
    t_grid
        .par_iter()
        .map(|&t| {
            let mut qt = *q;
            qt.max_matsubara_terms = qt.max_matsubara_terms.max(terms_needed(a, t, q.rel_tol));
            let st = ThermalState::new(t)?;
            let p_sc = pressure_plate_plate(a, &st, &sc, &sc, &qt)?;
            let p_normal = pressure_plate_plate(a, &st, &base, &base, &qt)?;
            Ok(SweepPoint {
                t,
                delta_p: p_sc - p_normal,
                p_normal,
            })
        })
        .collect()
}
