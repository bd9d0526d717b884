use crate::{Error, Result};
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite midpoint rule with `n` cells on [a, b].
pub fn midpoint(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / n as f64;
    ((0..n).map(|i| a + (i as f64 + 0.5) * h).collect(), vec![h; n])
}

// Kronrod 15-point extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over [a, b], bisecting the
/// interval with the largest error estimate until the total estimate falls
/// below max(abs_tol, rel_tol |I|).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 2000;
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::NoConvergence { estimate: total, error: err });
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::NoConvergence { estimate: total, error: err });
        }
        let (i, _) = parts.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// The Abel-type transform A[phi](x) = 2 int_0^sqrt(x) phi(x - s^2) ds.
pub fn abel_transform(phi: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::param("x", format!("must be finite and >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let r = x.sqrt();
    Ok(2.0 * integrate(|s| phi(x - s * s), 0.0, r, 1e-12, 1e-300)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((q - 2.0 / 9.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(256);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.cos()).sum();
        assert!((q - 2.0 * 1f64.sin()).abs() < 1e-13);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = integrate(|t| (1.0 - t * t).sqrt(), -1.0, 1.0, 1e-12, 0.0).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-10);
        assert!(integrate(|t| 1.0 / t, 0.0, 1.0, 1e-12, 0.0).is_err());
    }

    #[test]
    fn abel_of_constant() {
        assert!((abel_transform(|_| 1.0, 4.0).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(abel_transform(|_| 1.0, 0.0).unwrap(), 0.0);
        assert!(abel_transform(|_| 1.0, -1.0).is_err());
    }
}
