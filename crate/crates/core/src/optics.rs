//! Tabulated optical constants and their Kramers–Kronig transform to the
//! imaginary frequency axis.

use std::io::Read;

use crate::constants::{ev_to_rad_s, rad_s_to_ev};
use crate::error::{Error, Result, TableError};
use crate::num::Real;
use crate::quadrature::Integrator;

/// Minimum number of data rows accepted in a table.
pub const MIN_ROWS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalRow<T> {
    /// Angular frequency, rad/s.
    pub omega: T,
    /// Refractive index.
    pub n: T,
    /// Extinction coefficient.
    pub k: T,
}

/// Optical constants `(omega, n, k)` on a strictly increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable<T> {
    rows: Vec<OpticalRow<T>>,
    source_label: String,
    ln_omega: Vec<T>,
    im_eps: Vec<T>,
}

impl<T: Real> OpticalTable<T> {
    pub fn new(rows: Vec<OpticalRow<T>>, source_label: impl Into<String>) -> Result<Self, TableError> {
        if rows.len() < MIN_ROWS {
            return Err(TableError::TooFewRows {
                found: rows.len(),
                min: MIN_ROWS,
            });
        }
        for (i, r) in rows.iter().enumerate() {
            let line = i + 1;
            if !(r.omega > T::zero()) {
                return Err(TableError::NonPositiveEnergy {
                    line,
                    energy: rad_s_to_ev(r.omega).as_f64(),
                });
            }
            if r.n < T::zero() {
                return Err(TableError::Negative { line, name: "n", value: r.n.as_f64() });
            }
            if r.k < T::zero() {
                return Err(TableError::Negative { line, name: "k", value: r.k.as_f64() });
            }
            if r.n == T::zero() {
                return Err(TableError::ZeroIndex { line });
            }
            if i > 0 && !(r.omega > rows[i - 1].omega) {
                return Err(TableError::NonMonotonic {
                    line,
                    energy: rad_s_to_ev(r.omega).as_f64(),
                });
            }
        }
        let ln_omega = rows.iter().map(|r| r.omega.ln()).collect();
        let im_eps = rows.iter().map(|r| T::lit(2.0) * r.n * r.k).collect();
        Ok(Self {
            rows,
            source_label: source_label.into(),
            ln_omega,
            im_eps,
        })
    }

    pub fn rows(&self) -> &[OpticalRow<T>] {
        &self.rows
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn omega_min(&self) -> T {
        self.rows[0].omega
    }

    pub fn omega_max(&self) -> T {
        self.rows[self.rows.len() - 1].omega
    }

    /// Serializes to the `E_eV n k` text format read by [`load_table`].
    pub fn to_text(&self) -> String {
        let mut s = format!("# {}\n# E_eV n k\n", self.source_label);
        for r in &self.rows {
            s.push_str(&format!(
                "{:e} {:e} {:e}\n",
                rad_s_to_ev(r.omega).as_f64(),
                r.n.as_f64(),
                r.k.as_f64()
            ));
        }
        s
    }

    /// `Im eps` on the log-frequency axis; `u` must lie within the table.
    fn im_eps_log(&self, u: T) -> T {
        let lo = &self.ln_omega;
        let last = lo.len() - 1;
        let i = match lo.binary_search_by(|x| x.partial_cmp(&u).unwrap()) {
            Ok(i) => return self.im_eps[i],
            Err(0) => return self.im_eps[0],
            Err(i) if i > last => return self.im_eps[last],
            Err(i) => i - 1,
        };
        let (y0, y1) = (self.im_eps[i], self.im_eps[i + 1]);
        let s = (u - lo[i]) / (lo[i + 1] - lo[i]);
        if y0 > T::zero() && y1 > T::zero() {
            (y0.ln() + s * (y1.ln() - y0.ln())).exp()
        } else {
            y0 + s * (y1 - y0)
        }
    }
}

/// Reads the `E_eV n k` text format: `#` comments, whitespace-separated columns.
pub fn load_table<T: Real, R: Read>(mut source: R, label: &str) -> Result<OpticalTable<T>, TableError> {
    let mut bytes = Vec::new();
    source
        .read_to_end(&mut bytes)
        .map_err(|e| TableError::Io(e.to_string()))?;
    let text = String::from_utf8(bytes).map_err(|_| TableError::Encoding)?;
    parse_table(&text, label)
}

pub fn parse_table<T: Real>(text: &str, label: &str) -> Result<OpticalTable<T>, TableError> {
    let mut rows: Vec<OpticalRow<T>> = Vec::new();
    let mut prev_energy: Option<f64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(TableError::ColumnCount {
                line,
                found: fields.len(),
            });
        }
        let mut vals = [0.0f64; 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| TableError::Malformed {
                    line,
                    field: f.to_string(),
                })?;
        }
        let [energy, n, k] = vals;
        if energy <= 0.0 {
            return Err(TableError::NonPositiveEnergy { line, energy });
        }
        if let Some(p) = prev_energy {
            if energy <= p {
                return Err(TableError::NonMonotonic { line, energy });
            }
        }
        if n < 0.0 {
            return Err(TableError::Negative { line, name: "n", value: n });
        }
        if k < 0.0 {
            return Err(TableError::Negative { line, name: "k", value: k });
        }
        if n == 0.0 {
            return Err(TableError::ZeroIndex { line });
        }
        prev_energy = Some(energy);
        rows.push(OpticalRow {
            omega: ev_to_rad_s(T::lit(energy)),
            n: T::lit(n),
            k: T::lit(k),
        });
    }
    OpticalTable::new(rows, label)
}

/// `Im eps = 2 n k` by log–log interpolation between rows.
pub fn im_eps<T: Real>(table: &OpticalTable<T>, omega: T) -> Result<T> {
    if !(omega >= table.omega_min() && omega <= table.omega_max()) {
        return Err(Error::OutOfTableRange {
            omega: omega.as_f64(),
            min: table.omega_min().as_f64(),
            max: table.omega_max().as_f64(),
        });
    }
    if let Ok(i) = table.rows.binary_search_by(|r| r.omega.partial_cmp(&omega).unwrap()) {
        return Ok(table.im_eps[i]);
    }
    Ok(table.im_eps_log(omega.ln()))
}

/// Absorption model below the first table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowTail<T> {
    /// `Im eps = omega_p^2 gamma / (omega (omega^2 + gamma^2))`.
    Drude { omega_p: T, gamma: T },
    /// Lossless: the absorption below the first row is replaced by a
    /// zero-frequency weight, contributing `omega_p^2 / xi^2`.
    Plasma { omega_p: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighTail<T> {
    /// `Im eps ∝ omega^-exponent` above the last row, matched continuously.
    pub exponent: T,
}

impl<T: Real> Default for HighTail<T> {
    fn default() -> Self {
        Self { exponent: T::lit(3.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrapolationPolicy<T> {
    pub low: LowTail<T>,
    pub high: HighTail<T>,
}

impl<T: Real> ExtrapolationPolicy<T> {
    pub fn new(low: LowTail<T>) -> Self {
        Self {
            low,
            high: HighTail::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.high.exponent > T::one()) {
            return Err(Error::InvalidParameter(format!(
                "high-frequency tail exponent {} must exceed 1",
                self.high.exponent
            )));
        }
        match self.low {
            LowTail::Drude { omega_p, gamma } if omega_p < T::zero() || gamma < T::zero() => Err(
                Error::InvalidParameter("Drude tail parameters must be non-negative".into()),
            ),
            LowTail::Plasma { omega_p } if !(omega_p > T::zero()) => Err(Error::InvalidParameter(
                "plasma tail omega_p must be positive".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Drude tail through the first two rows of `Im eps`.
    pub fn drude_matched(table: &OpticalTable<T>) -> Result<Self> {
        let (omega_p, gamma) = match_drude(table)?;
        Ok(Self::new(LowTail::Drude { omega_p, gamma }))
    }

    /// Lossless tail carrying the same spectral weight as the matched Drude tail.
    pub fn plasma_matched(table: &OpticalTable<T>) -> Result<Self> {
        let (omega_p, gamma) = match_drude(table)?;
        let w0 = table.omega_min();
        let weight = T::lit(2.0) / T::PI() * omega_p * omega_p * (w0 / gamma).atan();
        Ok(Self::new(LowTail::Plasma {
            omega_p: weight.sqrt(),
        }))
    }
}

fn match_drude<T: Real>(table: &OpticalTable<T>) -> Result<(T, T)> {
    let (w0, w1) = (table.rows[0].omega, table.rows[1].omega);
    let (i0, i1) = (table.im_eps[0], table.im_eps[1]);
    if !(i0 > T::zero() && i1 > T::zero()) {
        return Err(Error::InvalidParameter(
            "cannot match a Drude tail: Im eps vanishes at the first rows".into(),
        ));
    }
    // i w (w^2 + gamma^2) is the same at both rows for a Drude metal
    let (a0, a1) = (i0 * w0, i1 * w1);
    let g2 = (a1 * w1 * w1 - a0 * w0 * w0) / (a0 - a1);
    if !(g2 > T::zero() && g2.is_finite()) {
        return Err(Error::InvalidParameter(
            "Im eps at the first rows is not Drude-like".into(),
        ));
    }
    let gamma = g2.sqrt();
    let weight = i0 * w0 * (w0 * w0 + gamma * gamma) / gamma;
    Ok((weight.sqrt(), gamma))
}

/// `eps(i xi)` with the default relative tolerance of 1e-8.
pub fn kk_to_imag_axis<T: Real>(
    table: &OpticalTable<T>,
    policy: &ExtrapolationPolicy<T>,
    xi: T,
) -> Result<T> {
    let integ = Integrator::new(T::lit(1e-8).max(T::epsilon() * T::lit(100.0)));
    kk_to_imag_axis_with(table, policy, xi, &integ)
}

/// `eps(i xi) = 1 + (2/pi) int_0^inf omega Im eps(omega) / (omega^2 + xi^2) d omega`,
/// split into the low tail, the tabulated interior and the high tail.
pub fn kk_to_imag_axis_with<T: Real>(
    table: &OpticalTable<T>,
    policy: &ExtrapolationPolicy<T>,
    xi: T,
    integ: &Integrator<T>,
) -> Result<T> {
    if !(xi > T::zero()) {
        return Err(Error::InvalidParameter("xi must be positive".into()));
    }
    policy.validate()?;
    let two_over_pi = T::lit(2.0) / T::PI();
    let low = low_tail_integral(table.omega_min(), &policy.low, xi, integ)?;

    // interior in u = ln(omega): integrand omega^2 Im eps / (omega^2 + xi^2)
    let xi2 = xi * xi;
    let mut breaks = table.ln_omega.clone();
    let lx = xi.ln();
    if lx > breaks[0] && lx < breaks[breaks.len() - 1] {
        let pos = breaks.partition_point(|&b| b < lx);
        if breaks[pos] != lx {
            breaks.insert(pos, lx);
        }
    }
    let interior = integ.integrate_with_breaks(
        |u: T| {
            let w = u.exp();
            let w2 = w * w;
            w2 * table.im_eps_log(u) / (w2 + xi2)
        },
        &breaks,
    )?;

    // high tail in s = omega_max / omega on (0, 1]
    let w_max = table.omega_max();
    let i_max = *table.im_eps.last().unwrap();
    let p = policy.high.exponent;
    let high = if i_max > T::zero() {
        let w2 = w_max * w_max;
        integ
            .integrate(
                |s: T| i_max * w2 * s.powf(p - T::one()) / (w2 + xi2 * s * s),
                T::zero(),
                T::one(),
            )?
            .value
    } else {
        T::zero()
    };
    Ok(T::one() + two_over_pi * (interior.value + high) + low)
}

/// Contribution of `[0, omega_min]` to `eps(i xi) - 1`.
fn low_tail_integral<T: Real>(w0: T, tail: &LowTail<T>, xi: T, integ: &Integrator<T>) -> Result<T> {
    let two_over_pi = T::lit(2.0) / T::PI();
    match *tail {
        LowTail::Plasma { omega_p } => Ok(omega_p * omega_p / (xi * xi)),
        LowTail::Drude { omega_p, gamma } => {
            let wp2 = omega_p * omega_p;
            if wp2 == T::zero() {
                return Ok(T::zero());
            }
            if gamma == T::zero() {
                // lossless Drude: all weight at zero frequency
                return Ok(wp2 / (xi * xi));
            }
            // int_0^w0 gamma / ((w^2+gamma^2)(w^2+xi^2)) dw
            let d = xi * xi - gamma * gamma;
            let v = if d.abs() > T::lit(1e-4) * xi * xi {
                gamma / d * ((w0 / gamma).atan() / gamma - (w0 / xi).atan() / xi)
            } else {
                // partial fractions cancel near xi = gamma
                let xi2 = xi * xi;
                let g2 = gamma * gamma;
                integ
                    .integrate(|w: T| gamma / ((w * w + g2) * (w * w + xi2)), T::zero(), w0)?
                    .value
            };
            Ok(two_over_pi * wp2 * v)
        }
    }
}

/// Optical constants of a Drude metal on a log-spaced photon-energy grid.
pub fn synthetic_drude_table<T: Real>(
    omega_p: T,
    gamma: T,
    e_min_ev: T,
    e_max_ev: T,
    rows: usize,
) -> Result<OpticalTable<T>> {
    if rows < 2 || !(e_min_ev > T::zero() && e_max_ev > e_min_ev) {
        return Err(Error::InvalidParameter("invalid synthetic table grid".into()));
    }
    let (l0, l1) = (e_min_ev.ln(), e_max_ev.ln());
    let step = (l1 - l0) / T::from_usize(rows - 1).unwrap();
    let mut out = Vec::with_capacity(rows);
    for i in 0..rows {
        let e = (l0 + step * T::from_usize(i).unwrap()).exp();
        let w = ev_to_rad_s(e);
        // eps = 1 - wp^2 / (w (w + i gamma))
        let den = w * (w * w + gamma * gamma);
        let re = T::one() - omega_p * omega_p * w / den;
        let im = omega_p * omega_p * gamma / den;
        let modulus = re.hypot(im);
        let (n, k) = if re >= T::zero() {
            let n = ((modulus + re) / T::lit(2.0)).sqrt();
            (n, im / (T::lit(2.0) * n))
        } else {
            let k = ((modulus - re) / T::lit(2.0)).sqrt();
            (im / (T::lit(2.0) * k), k)
        };
        out.push(OpticalRow { omega: w, n, k });
    }
    Ok(OpticalTable::new(out, "synthetic Drude")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::EV_TO_RAD_S;

    fn au() -> (f64, f64) {
        (9.0 * EV_TO_RAD_S, 0.035 * EV_TO_RAD_S)
    }

    fn drude_table() -> OpticalTable<f64> {
        let (wp, g) = au();
        synthetic_drude_table(wp, g, 0.01, 100.0, 200).unwrap()
    }

    fn drude_eps(xi: f64) -> f64 {
        let (wp, g) = au();
        1.0 + wp * wp / (xi * (xi + g))
    }

    #[test]
    fn two_rows_too_few() {
        let e = parse_table::<f64>("1.0 1.0 0.1\n2.0 1.0 0.1\n", "t").unwrap_err();
        assert_eq!(e, TableError::TooFewRows { found: 2, min: MIN_ROWS });
    }

    #[test]
    fn decreasing_energy_cites_line() {
        let text = "# header\n1 1 1\n2 1 1\n3 1 1\n4 1 1\n5 1 1\n3.5 1 1\n7 1 1\n8 1 1\n";
        match parse_table::<f64>(text, "t").unwrap_err() {
            TableError::NonMonotonic { line, .. } => assert_eq!(line, 7),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn malformed_and_negative() {
        let mut text = String::new();
        for i in 1..=9 {
            text.push_str(&format!("{i} 1 0.5\n"));
        }
        let bad = text.replace("4 1 0.5", "4 1 x");
        assert!(matches!(
            parse_table::<f64>(&bad, "t"),
            Err(TableError::Malformed { line: 4, .. })
        ));
        let neg = text.replace("5 1 0.5", "5 1 -0.5");
        assert!(matches!(
            parse_table::<f64>(&neg, "t"),
            Err(TableError::Negative { line: 5, name: "k", .. })
        ));
        let cols = text.replace("2 1 0.5", "2 1");
        assert!(matches!(
            parse_table::<f64>(&cols, "t"),
            Err(TableError::ColumnCount { line: 2, found: 2 })
        ));
        assert!(matches!(
            load_table::<f64, _>(&[0xffu8, 0xfe][..], "t"),
            Err(TableError::Encoding)
        ));
    }

    #[test]
    fn text_round_trip() {
        let t = drude_table();
        let back: OpticalTable<f64> = parse_table(&t.to_text(), "rt").unwrap();
        assert_eq!(back.rows().len(), 200);
        for (a, b) in t.rows().iter().zip(back.rows()) {
            assert!((a.omega / b.omega - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn im_eps_at_nodes_and_range() {
        let t = drude_table();
        let r = t.rows()[17];
        assert_eq!(im_eps(&t, r.omega).unwrap(), 2.0 * r.n * r.k);
        assert!(matches!(
            im_eps(&t, t.omega_min() * 0.5),
            Err(Error::OutOfTableRange { .. })
        ));
    }

    #[test]
    fn im_eps_flat_fixed_point() {
        let rows: Vec<OpticalRow<f64>> = (1..=8)
            .map(|i| OpticalRow { omega: i as f64, n: 2.0, k: 0.25 })
            .collect();
        let t = OpticalTable::new(rows, "flat").unwrap();
        assert!((im_eps(&t, 2.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn im_eps_matches_drude_at_gamma() {
        let t = drude_table();
        let (wp, g) = au();
        let exact = wp * wp * g / (g * (g * g + g * g));
        let v = im_eps(&t, g).unwrap();
        assert!((v / exact - 1.0).abs() < 5e-3, "{v} vs {exact}");
    }

    #[test]
    fn kk_reproduces_drude_at_first_matsubara() {
        let t = drude_table();
        let (wp, g) = au();
        let pol = ExtrapolationPolicy::new(LowTail::Drude { omega_p: wp, gamma: g });
        let xi = 2.468e14;
        let v = kk_to_imag_axis(&t, &pol, xi).unwrap();
        assert!((v / drude_eps(xi) - 1.0).abs() < 1e-3, "{v} vs {}", drude_eps(xi));
    }

    #[test]
    fn kk_no_absorption_is_unity() {
        let rows: Vec<OpticalRow<f64>> = (1..=10)
            .map(|i| OpticalRow { omega: 1e14 * i as f64, n: 1.3, k: 0.0 })
            .collect();
        let t = OpticalTable::new(rows, "clear").unwrap();
        let pol = ExtrapolationPolicy::new(LowTail::Drude { omega_p: 0.0, gamma: 1e13 });
        for xi in [1e12, 1e15, 1e18] {
            assert_eq!(kk_to_imag_axis(&t, &pol, xi).unwrap(), 1.0);
        }
    }

    #[test]
    fn kk_large_xi_asymptote() {
        let t = drude_table();
        let (wp, g) = au();
        let pol = ExtrapolationPolicy::new(LowTail::Drude { omega_p: wp, gamma: g });
        let xi = 1e19;
        let v = kk_to_imag_axis(&t, &pol, xi).unwrap();
        assert!(v > 1.0);
        assert!(((v - 1.0) / (wp * wp / (xi * xi)) - 1.0).abs() < 0.05);
    }

    #[test]
    fn matched_tails_recover_drude() {
        let t = drude_table();
        let (wp, g) = au();
        let pol = ExtrapolationPolicy::drude_matched(&t).unwrap();
        match pol.low {
            LowTail::Drude { omega_p, gamma } => {
                assert!((omega_p / wp - 1.0).abs() < 1e-2);
                assert!((gamma / g - 1.0).abs() < 1e-2);
            }
            _ => unreachable!(),
        }
        assert!(ExtrapolationPolicy::plasma_matched(&t).is_ok());
    }

    #[test]
    fn high_tail_exponent_must_exceed_one() {
        let t = drude_table();
        let mut pol = ExtrapolationPolicy::new(LowTail::Plasma { omega_p: 1e15 });
        pol.high.exponent = 1.0;
        assert!(kk_to_imag_axis(&t, &pol, 1e14).is_err());
    }
}
