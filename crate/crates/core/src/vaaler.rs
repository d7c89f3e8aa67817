//! Trigonometric approximation of the sawtooth ψ(t) = {t} − 1/2 with a
//! nonnegative majorant for the error.
//!
//! The degree-H approximant uses Vaaler's spectral weights per frequency,
//!
//! ```text
//! a(h) = i·Ĵ(|h|/(H+1)) / (2π h),   Ĵ(t) = πt(1−t)·cot(πt) + t
//! ```
//!
//! so the approximant is Σ a(h)e(ht) = −Σ_{h=1}^{H} Ĵ(h/(H+1))/(πh)·sin(2πht),
//! and the error admits the Fejér-kernel majorant
//!
//! ```text
//! |ψ(t) − Σ a(h)e(ht)| ≤ Σ_{|h| ≤ H} b(h) e(ht),
//! b(h) = (1 − |h|/(H+1)) / (2H+2)
//! ```
//!
//! pointwise for every t. The module treats this inequality plus the
//! coefficient decay |a(h)| ≤ 1/|h| and 0 ≤ b(h) ≤ 2/H as the contract;
//! `max_error_scan` measures all of it on a grid. Concretely the
//! construction attains |a(h)|·|h| ≤ 1/(2π) and b(h)·H ≤ 1/2.
//!
//! ψ at integers follows the {t} = 0 convention: ψ(k) = −1/2; scan grids
//! are offset to avoid the jump points.

use crate::exactmath::frac_part_psi;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Vaaler weights and Fejér majorant coefficients for one truncation H.
#[derive(Debug, Clone)]
pub struct VaalerApprox {
    h_max: u64,
    /// Im a(h) for h = 1..=H (a(h) is purely imaginary; a(−h) = conj a(h)).
    a_im: Vec<f64>,
    /// b(h) for h = 0..=H (even in h).
    b: Vec<f64>,
}

/// Ĵ(t) = πt(1−t)cot(πt) + t on (0, 1); decreasing from 1 to 0.
fn vaaler_weight(t: f64) -> f64 {
    debug_assert!(t > 0.0 && t < 1.0);
    PI * t * (1.0 - t) / (PI * t).tan() + t
}

/// Build the coefficient families for truncation H ≥ 1.
pub fn build_vaaler(h_max: u64) -> VaalerApprox {
    assert!(h_max >= 1, "build_vaaler requires H >= 1");
    let hp1 = (h_max + 1) as f64;
    let a_im = (1..=h_max)
        .map(|h| vaaler_weight(h as f64 / hp1) / (2.0 * PI * h as f64))
        .collect();
    let b = (0..=h_max)
        .map(|h| (1.0 - h as f64 / hp1) / (2.0 * hp1))
        .collect();
    VaalerApprox { h_max, a_im, b }
}

impl VaalerApprox {
    pub fn h_max(&self) -> u64 {
        self.h_max
    }

    /// a(h) for 1 ≤ |h| ≤ H; a(−h) = conjugate(a(h)) keeps the sum real.
    pub fn a(&self, h: i64) -> Complex64 {
        assert!(h != 0 && h.unsigned_abs() <= self.h_max, "a(h) needs 1 <= |h| <= H");
        let im = self.a_im[(h.unsigned_abs() - 1) as usize];
        Complex64::new(0.0, if h > 0 { im } else { -im })
    }

    /// b(h) for |h| ≤ H.
    pub fn b(&self, h: i64) -> f64 {
        assert!(h.unsigned_abs() <= self.h_max, "b(h) needs |h| <= H");
        self.b[h.unsigned_abs() as usize]
    }
}

/// Σ_{1 ≤ |h| ≤ H} a(h) e(ht), evaluated as a complex sum; the imaginary
/// part is asserted below 1e-12 and the real part returned.
pub fn approx_psi(v: &VaalerApprox, t: f64) -> f64 {
    let mut total = Complex64::new(0.0, 0.0);
    for h in 1..=v.h_max {
        let ang = 2.0 * PI * h as f64 * t;
        let e = Complex64::new(ang.cos(), ang.sin());
        let a = Complex64::new(0.0, v.a_im[(h - 1) as usize]);
        // a(h) e(ht) + a(-h) e(-ht) = 2 Re(a(h) e(ht))
        total += a * e + (a * e).conj();
    }
    debug_assert!(total.im.abs() < 1e-12);
    total.re
}

/// Σ_{|h| ≤ H} b(h) e(ht); a Fejér kernel, real and nonnegative up to
/// rounding (≥ −1e-12).
pub fn majorant(v: &VaalerApprox, t: f64) -> f64 {
    let mut total = v.b[0];
    for h in 1..=v.h_max {
        let ang = 2.0 * PI * h as f64 * t;
        total += 2.0 * v.b[h as usize] * ang.cos();
    }
    total
}

/// Statistics of one grid scan of the pointwise contract.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanStats {
    pub h: u64,
    pub grid_size: u64,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
    /// max over the grid of |ψ − approx| − majorant; ≤ 0 means the
    /// inequality held everywhere.
    pub max_violation: f64,
    pub min_majorant: f64,
}

/// Deterministic scan over t = (k + 1/2)/grid_size, offset to avoid the
/// integers where ψ jumps.
pub fn max_error_scan(v: &VaalerApprox, grid_size: u64) -> ScanStats {
    assert!(grid_size >= 10, "grid_size must be at least 10");
    const CHUNK: u64 = 4096;
    let chunks: Vec<u64> = (0..grid_size.div_ceil(CHUNK)).collect();
    let partials: Vec<(f64, f64, f64, f64)> = chunks
        .par_iter()
        .map(|&ci| {
            let lo = ci * CHUNK;
            let hi = std::cmp::min(grid_size, lo + CHUNK);
            let mut max_err = 0.0f64;
            let mut sum_err = 0.0f64;
            let mut comp = 0.0f64; // Neumaier compensation
            let mut max_viol = f64::NEG_INFINITY;
            let mut min_major = f64::INFINITY;
            for k in lo..hi {
                let t = (k as f64 + 0.5) / grid_size as f64;
                let err = (frac_part_psi(t) - approx_psi(v, t)).abs();
                let maj = majorant(v, t);
                max_err = max_err.max(err);
                let y = err - comp;
                let s = sum_err + y;
                comp = (s - sum_err) - y;
                sum_err = s;
                max_viol = max_viol.max(err - maj);
                min_major = min_major.min(maj);
            }
            (max_err, sum_err, max_viol, min_major)
        })
        .collect();
    let mut stats = ScanStats {
        h: v.h_max,
        grid_size,
        max_abs_error: 0.0,
        mean_abs_error: 0.0,
        max_violation: f64::NEG_INFINITY,
        min_majorant: f64::INFINITY,
    };
    let mut total = 0.0;
    for (max_err, sum_err, max_viol, min_major) in partials {
        stats.max_abs_error = stats.max_abs_error.max(max_err);
        total += sum_err;
        stats.max_violation = stats.max_violation.max(max_viol);
        stats.min_majorant = stats.min_majorant.min(min_major);
    }
    stats.mean_abs_error = total / grid_size as f64;
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_one_coefficient_bounds() {
        let v = build_vaaler(1);
        assert!(v.a(1).norm() <= 1.0);
        assert!(v.b(0) <= 2.0);
        assert!(v.b(0) >= 0.0);
    }

    #[test]
    fn conjugate_symmetry() {
        let v = build_vaaler(16);
        for h in 1..=16i64 {
            assert_eq!(v.a(-h), v.a(h).conj());
            assert_eq!(v.b(-h), v.b(h));
        }
    }

    #[test]
    fn coefficient_decay_bounds() {
        for h_max in [1u64, 8, 64, 256] {
            let v = build_vaaler(h_max);
            for h in 1..=h_max {
                assert!(v.a(h as i64).norm() * h as f64 <= 1.0, "H={} h={}", h_max, h);
            }
            for h in 0..=h_max {
                let b = v.b(h as i64);
                assert!(b >= 0.0 && b * h_max as f64 <= 2.0, "H={} h={}", h_max, h);
            }
        }
    }

    #[test]
    fn approximant_is_periodic() {
        let v = build_vaaler(32);
        for k in 0..100 {
            let t = k as f64 * 0.0137 + 0.003;
            assert!((approx_psi(&v, t + 1.0) - approx_psi(&v, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn inequality_at_the_jump() {
        // psi(0) = -1/2 by the {t} = 0 convention; the approximant is an
        // odd trigonometric polynomial so it vanishes at 0, and the
        // majorant there is exactly 1/2
        let v = build_vaaler(64);
        let err = (frac_part_psi(0.0) - approx_psi(&v, 0.0)).abs();
        assert!(err <= majorant(&v, 0.0) + 1e-12);
        assert!((majorant(&v, 0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pointwise_inequality_on_grid() {
        for h in [8u64, 64] {
            let v = build_vaaler(h);
            let stats = max_error_scan(&v, 20_000);
            assert!(stats.max_violation <= 1e-12, "H={}: {:?}", h, stats);
            assert!(stats.min_majorant >= -1e-12);
        }
    }

    #[test]
    fn mean_error_halves_as_h_doubles() {
        let mut prev = f64::INFINITY;
        for h in [8u64, 16, 32, 64] {
            let stats = max_error_scan(&build_vaaler(h), 20_000);
            assert!(stats.mean_abs_error < prev);
            if prev.is_finite() {
                let ratio = stats.mean_abs_error / prev;
                assert!((0.4..=0.6).contains(&ratio), "H={} ratio={}", h, ratio);
            }
            prev = stats.mean_abs_error;
        }
    }

    #[test]
    fn tiny_grid_smoke() {
        let stats = max_error_scan(&build_vaaler(1), 10);
        assert!(stats.max_abs_error.is_finite());
        assert!(stats.mean_abs_error.is_finite());
        assert!(stats.max_violation.is_finite());
    }

    #[test]
    fn error_at_half_is_small_away_from_jump() {
        // psi(1/2) = 0 and t = 1/2 is far from the discontinuity, so the
        // majorant there is O(1/H)
        let v = build_vaaler(64);
        let err = (frac_part_psi(0.5) - approx_psi(&v, 0.5)).abs();
        let maj = majorant(&v, 0.5);
        assert!(err <= maj + 1e-12);
        assert!(maj < 0.02, "majorant at 1/2 should be O(1/H), got {}", maj);
    }
}
