//! The standard ternary Cantor function and exact integrals against it.
//!
//! Evaluation reads the ternary digits of the (dyadic) floating-point input
//! with integer arithmetic, so the returned value is the Cantor function of the
//! exact input rather than of a rounded multiple of it.

use crate::poly::Poly;
use crate::quadrature;

/// Largest digit count read by [`cantor`].
pub const MAX_DIGITS: usize = 64;

/// Number of dyadic levels summed explicitly by [`integrate_composed`].
const SERIES_LEVELS: u32 = 12;

/// Standard Cantor function on `[0, 1]`, extended by 0 to the left and 1 to
/// the right.
pub fn cantor(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // c(x) = 2^-k c(3^k x) while the leading ternary digits are zero.
    let mut scale = 1.0;
    let mut y = x;
    while y < 1.0 / 3.0 {
        let mut k = 0;
        let mut pow3 = 1.0;
        while k < 33 && y * pow3 * 3.0 < 1.0 {
            pow3 *= 3.0;
            k += 1;
        }
        if k == 0 {
            break;
        }
        y *= pow3;
        scale *= 0.5f64.powi(k);
        if scale == 0.0 {
            return 0.0;
        }
    }
    if y >= 1.0 {
        return scale;
    }

    // y = m / 2^p exactly, with p <= 54 since y >= 1/4.
    let bits = y.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mantissa = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
    let p = (52 - exp) as u32;
    let mask = (1u64 << p) - 1;
    let mut m = mantissa;

    let mut value = 0.0;
    let mut weight = 0.5;
    for _ in 0..MAX_DIGITS {
        let m3 = 3 * m;
        let digit = m3 >> p;
        m = m3 & mask;
        match digit {
            1 => {
                value += weight;
                break;
            }
            2 => value += weight,
            _ => {}
        }
        if m == 0 {
            break;
        }
        weight *= 0.5;
    }
    scale * value
}

/// The set `{x in [0,1] : c(x) = t}` as a closed interval (degenerate unless
/// `t` is a dyadic rational with a short expansion).
pub fn preimage(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 1.0);
    }
    let mut x = 0.0;
    let mut pow3 = 1.0 / 3.0;
    let mut rest = t;
    for _ in 0..MAX_DIGITS {
        rest *= 2.0;
        if rest >= 1.0 {
            rest -= 1.0;
            if rest == 0.0 {
                // Last binary digit: c is constant on this removed third.
                return (x + pow3, x + 2.0 * pow3);
            }
            x += 2.0 * pow3;
        }
        pow3 /= 3.0;
    }
    (x, x)
}

/// Moments `M_j = \int_0^1 c(x)^j dx` for `j = 0..=max`, from the
/// self-similarity of the Cantor function.
pub fn moments(max: usize) -> Vec<f64> {
    let mut m = vec![1.0];
    let mut binom = vec![1.0f64];
    for j in 1..=max {
        let mut next = vec![1.0; j + 1];
        for i in 1..j {
            next[i] = binom[i - 1] + binom[i];
        }
        binom = next;
        let half_j = 0.5f64.powi(j as i32);
        let s: f64 = 1.0 + (0..j).map(|i| binom[i] * m[i]).sum::<f64>();
        m.push(s * half_j / 3.0 / (1.0 - 2.0 / 3.0 * half_j));
    }
    m
}

/// \int_0^1 P(c(x)) dx for a polynomial `P`.
pub fn integrate_poly(outer: &Poly) -> f64 {
    let m = moments(outer.degree());
    outer.coeffs().iter().zip(&m).map(|(a, mj)| a * mj).sum()
}

/// \int_{x0}^{x1} h(c(x)) dx for `0 <= x0 <= x1 <= 1` and `h` continuous on
/// `[c(x0), c(x1)]`.
pub fn integrate_composed<F: Fn(f64) -> f64>(h: &F, x0: f64, x1: f64) -> f64 {
    let (x0, x1) = (x0.max(0.0), x1.min(1.0));
    if x1 <= x0 {
        return 0.0;
    }
    composed_cell(h, 0.0, 1.0, 0.0, 1.0, x0, x1, 0)
}

#[allow(clippy::too_many_arguments)]
fn composed_cell<F: Fn(f64) -> f64>(
    h: &F,
    cell_lo: f64,
    cell_w: f64,
    t_lo: f64,
    t_w: f64,
    x0: f64,
    x1: f64,
    depth: u32,
) -> f64 {
    let cell_hi = cell_lo + cell_w;
    let lo = x0.max(cell_lo);
    let hi = x1.min(cell_hi);
    if hi <= lo {
        return 0.0;
    }
    if lo <= cell_lo && hi >= cell_hi {
        return cell_w * full_cell(h, t_lo, t_w);
    }
    if depth >= 40 {
        return (hi - lo) * h(t_lo + 0.5 * t_w);
    }
    let third = cell_w / 3.0;
    let half = 0.5 * t_w;
    let mid_lo = (cell_lo + third).max(lo);
    let mid_hi = (cell_lo + 2.0 * third).min(hi);
    let middle = if mid_hi > mid_lo {
        (mid_hi - mid_lo) * h(t_lo + half)
    } else {
        0.0
    };
    composed_cell(h, cell_lo, third, t_lo, half, x0, x1, depth + 1)
        + middle
        + composed_cell(h, cell_lo + 2.0 * third, third, t_lo + half, half, x0, x1, depth + 1)
}

/// \int_0^1 h(t_lo + t_w c(x)) dx.
///
/// The push-forward of Lebesgue measure under `c` puts mass `3^-m` on every
/// odd dyadic `j / 2^m`. The first levels are summed exactly; the tail is a
/// midpoint rule of `h`, so it is replaced by the integral of `h` times the
/// remaining mass `(2/3)^M` plus the leading midpoint-error correction.
fn full_cell<F: Fn(f64) -> f64>(h: &F, t_lo: f64, t_w: f64) -> f64 {
    let mut sum = 0.0;
    let mut w3 = 1.0;
    let mut last_mean = 0.0;
    for m in 1..=SERIES_LEVELS {
        w3 /= 3.0;
        let denom = (1u64 << m) as f64;
        let mut level = 0.0;
        let mut j = 1u64;
        while j < (1u64 << m) {
            level += h(t_lo + t_w * j as f64 / denom);
            j += 2;
        }
        sum += w3 * level;
        last_mean = level / (1u64 << (m - 1)) as f64;
    }
    // Level m is (2/3)^m / 2 times a midpoint rule on 2^(m-1) cells, whose
    // error decays like 4^-m; summing that geometric error gives the 1/10.
    let tail_mass = (2.0f64 / 3.0).powi(SERIES_LEVELS as i32);
    let mean = quadrature::integrate(&|s: f64| h(t_lo + t_w * s), 0.0, 1.0, 1e-13);
    sum + tail_mass * (mean + (last_mean - mean) / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_values() {
        // fl(1/3) sits ~1.9e-17 below 1/3; the Hölder-log3(2) continuity of c
        // turns that into a ~3e-11 deficit.
        assert!((cantor(1.0 / 3.0) - 0.5).abs() < 1e-10);
        assert_eq!(cantor(0.5), 0.5);
        assert!((cantor(0.25) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(cantor(0.0), 0.0);
        assert_eq!(cantor(1.0), 1.0);
        assert_eq!(cantor(-2.0), 0.0);
        assert_eq!(cantor(7.0), 1.0);
        assert!((cantor(0.75) - 2.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn symmetry_and_self_similarity() {
        for i in 1..200 {
            let x = i as f64 / 201.0;
            assert!((cantor(x) + cantor(1.0 - x) - 1.0).abs() < 1e-9);
            assert!((cantor(x / 3.0) - 0.5 * cantor(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn monotone() {
        let mut prev = 0.0;
        for i in 0..=5000 {
            let v = cantor(i as f64 / 5000.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn moments_match_known_values() {
        let m = moments(3);
        assert!((m[1] - 0.5).abs() < 1e-15);
        assert!((m[2] - 0.3).abs() < 1e-15);
        // symmetry c(x) + c(1-x) = 1 gives M3 = (3 M2 - 1/2) / 2
        assert!((m[3] - (3.0 * m[2] - 0.5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn composed_integral_matches_moments() {
        let h = |t: f64| (1.0 + t) * (1.0 + t);
        let got = integrate_composed(&h, 0.0, 1.0);
        assert!((got - (1.0 + 1.0 + 0.3)).abs() < 1e-12, "{got}");
        let sq = |t: f64| t.sqrt();
        let coarse: f64 = (0..200_000)
            .map(|i| sq(cantor((i as f64 + 0.5) / 200_000.0)))
            .sum::<f64>()
            / 200_000.0;
        assert!((integrate_composed(&sq, 0.0, 1.0) - coarse).abs() < 1e-3);
    }

    #[test]
    fn composed_integral_is_additive() {
        let h = |t: f64| (2.0 + t).sqrt();
        let whole = integrate_composed(&h, 0.0, 1.0);
        let split = integrate_composed(&h, 0.0, 0.37) + integrate_composed(&h, 0.37, 1.0);
        assert!((whole - split).abs() < 1e-11);
        // constant on the removed middle third
        let mid = integrate_composed(&h, 0.4, 0.6);
        assert!((mid - 0.2 * h(0.5)).abs() < 1e-13);
    }

    #[test]
    fn preimage_of_dyadics() {
        let (lo, hi) = preimage(0.5);
        assert!((lo - 1.0 / 3.0).abs() < 1e-15 && (hi - 2.0 / 3.0).abs() < 1e-15);
        let (lo, hi) = preimage(0.25);
        assert!((lo - 1.0 / 9.0).abs() < 1e-15 && (hi - 2.0 / 9.0).abs() < 1e-15);
        for t in [0.1, 0.37, 0.8125] {
            let (lo, hi) = preimage(t);
            assert!((cantor(lo) - t).abs() < 1e-9 && (cantor(hi) - t).abs() < 1e-9);
        }
    }
}
