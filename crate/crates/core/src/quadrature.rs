//! One-dimensional quadrature: globally adaptive Gauss–Kronrod (21-point) and
//! fixed-order Gauss–Legendre rules.

use crate::error::{Error, Result};
use crate::num::Real;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_480,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for the odd Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_146,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// Single application of the 21-point Kronrod rule with QUADPACK's error scaling.
fn gk21<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center);
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half_len;
    res_abs = res_abs * abs_half;
    res_asc = res_asc * abs_half;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = res_asc * scale.min(T::one());
    }
    let round_floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        err = err.max(round_floor);
    }
    Segment {
        a,
        b,
        value,
        error: err,
    }
}

/// Globally adaptive Gauss–Kronrod integrator.
#[derive(Debug, Clone, Copy)]
pub struct Integrator<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_segments: usize,
}

impl<T: Real> Integrator<T> {
    pub fn new(rel_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol: T::zero(),
            max_segments: 4000,
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, f: F, a: T, b: T) -> Result<Estimate<T>> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, using the interior points as
    /// initial subdivision (kinks, peaks, table nodes). Points must be sorted.
    pub fn integrate_with_breaks<F: FnMut(T) -> T>(
        &self,
        mut f: F,
        points: &[T],
    ) -> Result<Estimate<T>> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "quadrature needs at least two break points".into(),
            ));
        }
        let mut segs: Vec<Segment<T>> = Vec::with_capacity(points.len() + 32);
        for w in points.windows(2) {
            if w[1] > w[0] {
                segs.push(gk21(&mut f, w[0], w[1]));
            }
        }
        let mut evals = 21 * segs.len();
        loop {
            let (total, err) = segs.iter().fold((T::zero(), T::zero()), |(v, e), s| {
                (v + s.value, e + s.error)
            });
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= tol || segs.is_empty() {
                return Ok(Estimate {
                    value: total,
                    error: err,
                    evaluations: evals,
                });
            }
            let (worst, _) = segs
                .iter()
                .enumerate()
                .fold((0usize, T::neg_infinity()), |(bi, be), (i, s)| {
                    if s.error > be {
                        (i, s.error)
                    } else {
                        (bi, be)
                    }
                });
            let s = segs[worst];
            let mid = T::lit(0.5) * (s.a + s.b);
            let exhausted = segs.len() >= self.max_segments
                || !(mid > s.a && mid < s.b)
                || (s.b - s.a).abs() <= T::lit(100.0) * T::epsilon() * mid.abs();
            if exhausted {
                return Err(Error::Quadrature {
                    estimate: total.as_f64(),
                    error: err.as_f64(),
                    tolerance: tol.as_f64(),
                });
            }
            let left = gk21(&mut f, s.a, mid);
            let right = gk21(&mut f, mid, s.b);
            evals += 42;
            segs[worst] = left;
            segs.push(right);
        }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((T::lit(x), T::lit(w)));
    }
    out
}

/// Composite fixed-order Gauss–Legendre over the given break points.
pub fn composite_gauss<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    points: &[T],
    rule: &[(T, T)],
) -> T {
    let half = T::lit(0.5);
    points.windows(2).fold(T::zero(), |acc, w| {
        let c = half * (w[0] + w[1]);
        let h = half * (w[1] - w[0]);
        acc + h * rule.iter().fold(T::zero(), |s, &(x, wt)| s + wt * f(c + h * x))
    })
}
