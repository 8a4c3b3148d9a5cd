//! Shared fixtures and independent reference computations for the integration
//! tests. Nothing here calls the slice formulas of the library.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use schwarz_core::bv_profile::{BVFunction, CantorPiece, Orientation, Piece, Profile};
use schwarz_core::poly::Poly;

pub fn profile(bp: Vec<f64>, pieces: Vec<Piece>, n: usize) -> Profile {
    Profile::new(BVFunction::compact(bp, pieces).unwrap(), n).unwrap()
}

/// `ℓ = π (1 - z^2)` on `[-1, 1]`, the unit ball in R^3.
pub fn ball() -> Profile {
    profile(vec![-1.0, 1.0], vec![Piece::polynomial(vec![PI, 0.0, -PI])], 3)
}

/// Unit-radius cylinder of height 2 in R^3.
pub fn cylinder() -> Profile {
    profile(vec![0.0, 2.0], vec![Piece::constant(PI)], 3)
}

/// Unit square in R^2.
pub fn square() -> Profile {
    profile(vec![0.0, 1.0], vec![Piece::constant(1.0)], 2)
}

/// `4π` on `[0,1)`, `π` on `[1,2]` in R^3.
pub fn step() -> Profile {
    profile(vec![0.0, 1.0, 2.0], vec![Piece::constant(4.0 * PI), Piece::constant(PI)], 3)
}

pub fn two_components() -> Profile {
    profile(
        vec![0.0, 1.0, 2.0, 3.0],
        vec![Piece::constant(PI), Piece::constant(0.0), Piece::constant(PI)],
        3,
    )
}

/// `π (1 + c(z))^2` on `[0, 1]` with `c` the ternary Cantor function.
pub fn cantor_golden() -> Profile {
    let outer = Poly::new(vec![PI, 2.0 * PI, PI]);
    profile(
        vec![0.0, 1.0],
        vec![Piece::Cantor(CantorPiece { outer, orientation: Orientation::Increasing })],
        3,
    )
}

/// Ternary Cantor function by digit expansion, independent of the library.
pub fn cantor_fn(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let (mut x, mut value, mut weight) = (x, 0.0, 0.5);
    for _ in 0..60 {
        x *= 3.0;
        let d = x.floor();
        x -= d;
        if d == 1.0 {
            return value + weight;
        }
        if d == 2.0 {
            value += weight;
        }
        weight *= 0.5;
    }
    value
}

/// `sup` over partitions of `sum |f(x_{i+1}) - f(x_i)|` on `[a, b]` for a
/// continuous `f`: a uniform grid refined around every discrete extremum by
/// golden-section search.
pub fn refinement_variation(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    let xs: Vec<f64> = (0..=cells).map(|i| a + h * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut pts = vec![(a, ys[0])];
    for i in 1..cells {
        let (d0, d1) = (ys[i] - ys[i - 1], ys[i + 1] - ys[i]);
        if d0 * d1 < 0.0 {
            let sign = if d0 > 0.0 { 1.0 } else { -1.0 };
            let x = golden_extremum(&|x| sign * f(x), xs[i - 1], xs[i + 1]);
            pts.push((x, f(x)));
        } else {
            pts.push((xs[i], ys[i]));
        }
    }
    pts.push((b, ys[cells]));
    pts.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum()
}

/// Maximiser of a unimodal `f` on `[lo, hi]`.
pub fn golden_extremum(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
        if hi - lo < 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Area of `B(0, r1) Δ B((d, 0), r2)` in the plane by integrating chord
/// overlaps along x with composite Simpson.
pub fn disk_symmetric_difference_area(d: f64, r1: f64, r2: f64) -> f64 {
    let chord = |r: f64, c: f64, x: f64| {
        let s = r * r - (x - c) * (x - c);
        if s > 0.0 {
            let h = s.sqrt();
            Some((-h, h))
        } else {
            None
        }
    };
    let overlap = |x: f64| match (chord(r1, 0.0, x), chord(r2, d, x)) {
        (Some((a0, a1)), Some((b0, b1))) => (a1.min(b1) - a0.max(b0)).max(0.0),
        _ => 0.0,
    };
    let (lo, hi) = ((-r1).max(d - r2), r1.min(d + r2));
    let inter = if hi > lo {
        // Split at the x where the two circles cross to keep Simpson accurate.
        let xc = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
        let mut knots = vec![lo, hi];
        if xc > lo && xc < hi {
            knots.insert(1, xc);
        }
        knots.windows(2).map(|w| simpson_sqrt_ends(&overlap, w[0], w[1])).sum()
    } else {
        0.0
    };
    PI * r1 * r1 + PI * r2 * r2 - 2.0 * inter
}

/// Simpson on `[a, b]` after the substitution `x = a + (b-a)(1-cos θ)/2`,
/// which removes square-root endpoint singularities.
fn simpson_sqrt_ends(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 20_000;
    let g = |t: f64| {
        let x = a + (b - a) * (1.0 - t.cos()) / 2.0;
        f(x) * (b - a) * t.sin() / 2.0
    };
    let h = PI / m as f64;
    let mut s = g(0.0) + g(PI);
    for i in 1..m {
        s += g(h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Re-expands `sum c_k (z - a)^k` in powers of `z`.
pub fn shift_coeffs(c: &[f64], a: f64) -> Vec<f64> {
    let mut out = vec![0.0; c.len()];
    for (k, &ck) in c.iter().enumerate() {
        let mut binom = 1.0;
        for (j, o) in out.iter_mut().enumerate().take(k + 1) {
            *o += ck * binom * (-a).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

/// Evaluates coefficients in powers of `z` by Horner's rule.
pub fn horner(c: &[f64], z: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * z + k)
}

/// Piecewise polynomial data kept alongside the profile so tests can evaluate
/// it without the library.
#[derive(Debug, Clone)]
pub struct Sample {
    pub profile: Profile,
    pub breakpoints: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
}

impl Sample {
    pub fn eval(&self, z: f64) -> f64 {
        let bp = &self.breakpoints;
        if z < bp[0] || z >= bp[bp.len() - 1] {
            return 0.0;
        }
        let i = bp.windows(2).position(|w| z >= w[0] && z < w[1]).unwrap();
        horner(&self.coeffs[i], z)
    }
}

fn random_breakpoints<R: Rng>(rng: &mut R, pieces: usize) -> Vec<f64> {
    let mut bp = vec![rng.random_range(-1.0..0.0)];
    for _ in 0..pieces {
        let last = *bp.last().unwrap();
        bp.push(last + rng.random_range(0.3..1.2));
    }
    bp
}

/// Quadratic through `(a, v0)` and `(b, v1)` with midpoint bump `bump`, in
/// powers of `z`.
pub fn through(a: f64, b: f64, v0: f64, v1: f64, bump: f64) -> Vec<f64> {
    let w = b - a;
    let c2 = -bump * 4.0 / (w * w);
    let c1 = (v1 - v0) / w - c2 * w;
    shift_coeffs(&[v0, c1, c2], a)
}

/// A continuous profile vanishing at both ends of its support.
pub fn random_continuous<R: Rng>(rng: &mut R, n: usize) -> Sample {
    loop {
        let k = rng.random_range(1..=4);
        let bp = random_breakpoints(rng, k);
        let mut values = vec![0.0];
        for _ in 1..k {
            values.push(rng.random_range(0.2..3.0));
        }
        values.push(0.0);
        let coeffs: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let bump = rng.random_range(-0.4..1.5);
                through(bp[i], bp[i + 1], values[i], values[i + 1], bump)
            })
            .collect();
        let pieces = coeffs.iter().map(|c| Piece::polynomial(c.clone())).collect();
        if let Ok(profile) = BVFunction::compact(bp.clone(), pieces).and_then(|f| Profile::new(f, n)) {
            if profile.positivity_intervals().len() == 1 {
                return Sample { profile, breakpoints: bp, coeffs };
            }
        }
    }
}

/// A positive piecewise quadratic profile with independent values on each
/// side of every breakpoint, so jumps appear almost surely.
pub fn random_jumpy<R: Rng>(rng: &mut R, n: usize) -> Sample {
    loop {
        let k = rng.random_range(1..=4);
        let bp = random_breakpoints(rng, k);
        let coeffs: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let v0 = rng.random_range(0.2..3.0);
                let v1 = rng.random_range(0.2..3.0);
                through(bp[i], bp[i + 1], v0, v1, rng.random_range(-0.1..1.0))
            })
            .collect();
        let pieces = coeffs.iter().map(|c| Piece::polynomial(c.clone())).collect();
        if let Ok(profile) = BVFunction::compact(bp.clone(), pieces).and_then(|f| Profile::new(f, n)) {
            if profile.positivity_intervals().len() == 1 {
                return Sample { profile, breakpoints: bp, coeffs };
            }
        }
    }
}

/// Uniform unit vector in R^m.
pub fn random_unit<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s > 0.1 && s <= 1.0 {
            return v.iter().map(|x| x / s).collect();
        }
    }
}
