//! Adaptive Gauss–Kronrod (7/15) quadrature with error bookkeeping.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Estimate) -> Estimate {
        Estimate::new(self.value * o.value, self.value.abs() * o.error + o.value.abs() * self.error)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, o: Estimate) -> Estimate {
        let v = self.value / o.value;
        let err = (self.error + v.abs() * o.error) / o.value.abs();
        Estimate::new(v, err)
    }
}

impl Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate::new(self.value + o.value, self.error + o.error)
    }
}

impl Sub for Estimate {
    type Output = Estimate;
    fn sub(self, o: Estimate) -> Estimate {
        Estimate::new(self.value - o.value, self.error + o.error)
    }
}

impl Neg for Estimate {
    type Output = Estimate;
    fn neg(self) -> Estimate {
        Estimate::new(-self.value, self.error)
    }
}

impl Mul<f64> for Estimate {
    type Output = Estimate;
    fn mul(self, k: f64) -> Estimate {
        Estimate::new(self.value * k, self.error * k.abs())
    }
}

impl Add<f64> for Estimate {
    type Output = Estimate;
    fn add(self, k: f64) -> Estimate {
        Estimate::new(self.value + k, self.error)
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

const MAX_PIECES: usize = 2000;

/// `∫_a^b f` to absolute accuracy `tol` (relaxed to `1e-13·|∫f|` for large
/// integrals).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate::exact(0.0));
    }
    if a > b {
        return integrate(f, b, a, tol).map(|e| -e);
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    while total_err > tol.max(1e-13 * total.abs()) {
        if heap.len() >= MAX_PIECES {
            return Err(Error::QuadratureFailure { estimate: total_err, tolerance: tol });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept its estimate
            heap.push(Piece { error: 0.0, ..worst });
            total_err = heap.iter().map(|p| p.error).sum();
            if total_err == 0.0 {
                break;
            }
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // refresh running sums to avoid drift
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(Estimate::new(value, error))
}

/// `∫_a^b f`, splitting at the interior break points where `f` has kinks or
/// jumps.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<Estimate> {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|p| *p > lo && *p < hi).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(lo);
    edges.extend(pts);
    edges.push(hi);
    let share = tol / (edges.len() - 1) as f64;
    let mut acc = Estimate::default();
    for w in edges.windows(2) {
        acc = acc + integrate(&f, w[0], w[1], share)?;
    }
    Ok(acc * sign)
}

/// `∫_a^∞ f` for an integrand decaying on the length scale `scale`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: f64) -> Result<Estimate> {
    let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    let mut acc = Estimate::default();
    let mut left = a;
    let mut width = scale;
    let mut quiet = 0;
    for k in 0..90 {
        let panel_tol = tol * 0.5f64.powi((k + 1).min(20));
        let p = integrate(&f, left, left + width, panel_tol)?;
        acc = acc + p;
        if p.value.abs() + p.error <= 0.25 * tol.max(1e-15 * acc.value.abs()) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
        left += width;
        width *= 2.0;
    }
    Err(Error::QuadratureFailure { estimate: f64::INFINITY, tolerance: tol })
}

/// `∫_{−∞}^b f` for an integrand decaying on the length scale `scale`.
pub fn integrate_to_minus_infinity<F: Fn(f64) -> f64>(
    f: F,
    b: f64,
    scale: f64,
    tol: f64,
) -> Result<Estimate> {
    integrate_to_infinity(|y| f(-y), -b, scale, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrals() {
        let r = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-12);
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn break_points_and_reversal() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let r = integrate_with_breaks(f, 0.0, 1.0, &[0.3], 1e-12).unwrap();
        assert!((r.value - 1.7).abs() < 1e-14);
        let r = integrate(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((r.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn semi_infinite() {
        let r = integrate_to_infinity(|x| (-x).exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = integrate_to_infinity(|x| (-0.01 * x).exp(), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 100.0).abs() < 1e-8);
        let r = integrate_to_minus_infinity(|x| x.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_arithmetic() {
        let a = Estimate::new(2.0, 0.1);
        let b = Estimate::new(4.0, 0.2);
        let q = a.div(b);
        assert_eq!(q.value, 0.5);
        assert!((q.error - (0.1 + 0.5 * 0.2) / 4.0).abs() < 1e-15);
        assert_eq!((a + b).error, 0.30000000000000004);
    }
}
