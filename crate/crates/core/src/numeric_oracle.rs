//! Estimators that do not use the slice formulas: boundary triangulation,
//! Monte-Carlo densities and sampled approximate limits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bv_profile::BVFunction;
use crate::error::{Error, Result};
use crate::symmetral::TubeSet;

/// Vertex count of the polygons standing in for slice disks.
pub const DISK_VERTICES: usize = 10_000;

/// Sample count of [`oracle_approx_limits`].
const LIMIT_SAMPLES: usize = 4000;

fn reject_cantor(tube: &TubeSet) -> Result<()> {
    if tube.profile().base().has_cantor_pieces() || tube.drift().function().has_cantor_pieces() {
        return Err(Error::CantorPresent("discretise the profile before measuring it".into()));
    }
    Ok(())
}

/// Boundary area of a Cantor-free tube in dimension 2 or 3, measured on a
/// `resolution × resolution` mesh per smooth segment plus polygonal jump
/// planes.
pub fn oracle_perimeter(tube: &TubeSet, resolution: usize) -> Result<f64> {
    reject_cantor(tube)?;
    let n = tube.dimension();
    if n != 2 && n != 3 {
        return Err(Error::Unsupported(format!("triangulation in dimension {n}")));
    }
    if resolution < 2 {
        return Err(Error::Precondition("resolution must be at least 2".into()));
    }
    let profile = tube.profile();
    let r = profile.radius();
    let (lo, hi) = profile.support();
    let bp = tube.breakpoints();
    let e = tube.direction();

    let mut lateral = 0.0;
    for w in bp.windows(2) {
        let (a, b) = (w[0].max(lo), w[1].min(hi));
        if b <= a {
            continue;
        }
        // cosine spacing resolves the square-root behaviour of r at zeros of ℓ
        let m = resolution;
        let nodes: Vec<(f64, f64, f64)> = (0..=m)
            .map(|j| {
                if j == 0 {
                    (a, r.right_limit(a), tube.drift_right(a))
                } else if j == m {
                    (b, r.left_limit(b), tube.drift_left(b))
                } else {
                    let z = 0.5 * (a + b) - 0.5 * (b - a) * (std::f64::consts::PI * j as f64 / m as f64).cos();
                    (z, r.eval(z), tube.drift_value(z))
                }
            })
            .collect();
        lateral += if n == 2 { polylines(&nodes) } else { triangulate(&nodes, e, m) };
    }

    let mut planes = 0.0;
    for &z in &bp {
        let (r0, r1) = (r.left_limit(z), r.right_limit(z));
        if r0 == 0.0 && r1 == 0.0 {
            continue;
        }
        let d = tube.drift_right(z) - tube.drift_left(z);
        planes += if n == 2 {
            interval_symmetric_difference(r0, r1, d)
        } else {
            polygon_symmetric_difference(r0, r1, d)
        };
    }
    Ok(lateral + planes)
}

fn polylines(nodes: &[(f64, f64, f64)]) -> f64 {
    nodes
        .windows(2)
        .map(|w| {
            let (z0, r0, g0) = w[0];
            let (z1, r1, g1) = w[1];
            let dz = z1 - z0;
            dz.hypot((g1 + r1) - (g0 + r0)) + dz.hypot((g1 - r1) - (g0 - r0))
        })
        .sum()
}

fn triangulate(nodes: &[(f64, f64, f64)], e: &[f64], m: usize) -> f64 {
    let perp = [-e[1], e[0]];
    let point = |(z, r, g): (f64, f64, f64), k: usize| {
        let t = 2.0 * std::f64::consts::PI * (k % m) as f64 / m as f64;
        let (c, s) = (t.cos(), t.sin());
        [z, g * e[0] + r * (c * e[0] + s * perp[0]), g * e[1] + r * (c * e[1] + s * perp[1])]
    };
    let mut area = 0.0;
    for w in nodes.windows(2) {
        for k in 0..m {
            let p00 = point(w[0], k);
            let p01 = point(w[0], k + 1);
            let p10 = point(w[1], k);
            let p11 = point(w[1], k + 1);
            area += triangle_area(p00, p10, p11) + triangle_area(p00, p11, p01);
        }
    }
    area
}

fn triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let x = u[1] * v[2] - u[2] * v[1];
    let y = u[2] * v[0] - u[0] * v[2];
    let z = u[0] * v[1] - u[1] * v[0];
    0.5 * (x * x + y * y + z * z).sqrt()
}

fn interval_symmetric_difference(r0: f64, r1: f64, d: f64) -> f64 {
    let overlap = (r0.min(d + r1) - (-r0).max(d - r1)).max(0.0);
    2.0 * r0 + 2.0 * r1 - 2.0 * overlap
}

fn regular_polygon(cx: f64, r: f64) -> Vec<[f64; 2]> {
    (0..DISK_VERTICES)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / DISK_VERTICES as f64;
            [cx + r * t.cos(), r * t.sin()]
        })
        .collect()
}

fn polygon_area(p: &[[f64; 2]]) -> f64 {
    let m = p.len();
    0.5 * (0..m)
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % m]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        .abs()
}

/// Sutherland–Hodgman clipping of `subject` by the convex counter-clockwise
/// polygon `clip`. Clip edges whose half-plane already contains the disk of
/// radius `reach` about `centre` (which covers the subject) are skipped.
fn clip_convex(subject: &[[f64; 2]], clip: &[[f64; 2]], centre: [f64; 2], reach: f64) -> Vec<[f64; 2]> {
    let mut out = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % m]);
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let len = ex.hypot(ey);
        // signed distance to the left of the edge (inside for CCW polygons)
        let side = |p: [f64; 2]| (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / len;
        if side(centre) >= reach {
            continue;
        }
        let input = std::mem::take(&mut out);
        let k = input.len();
        for j in 0..k {
            let cur = input[j];
            let prev = input[(j + k - 1) % k];
            let (sc, sp) = (side(cur), side(prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    out.push(intersect(prev, cur, sp, sc));
                }
                out.push(cur);
            } else if sp >= 0.0 {
                out.push(intersect(prev, cur, sp, sc));
            }
        }
    }
    out
}

fn intersect(p: [f64; 2], q: [f64; 2], sp: f64, sq: f64) -> [f64; 2] {
    let t = sp / (sp - sq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

fn polygon_symmetric_difference(r0: f64, r1: f64, d: f64) -> f64 {
    let p0 = regular_polygon(0.0, r0);
    let p1 = regular_polygon(d, r1);
    let (a0, a1) = (polygon_area(&p0), polygon_area(&p1));
    if r0 == 0.0 || r1 == 0.0 {
        return a0 + a1;
    }
    let (subject, clip, centre, reach) = if r0 <= r1 {
        (&p0, &p1, [0.0, 0.0], r0)
    } else {
        (&p1, &p0, [d, 0.0], r1)
    };
    let common = clip_convex(subject, clip, centre, reach);
    let inter = if common.len() >= 3 { polygon_area(&common) } else { 0.0 };
    a0 + a1 - 2.0 * inter
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub theta_lower: f64,
    pub theta_upper: f64,
    pub radii_used: Vec<f64>,
    /// Volume fraction at each radius.
    pub thetas: Vec<f64>,
    pub samples_per_radius: usize,
    pub seed: u64,
}

/// Monte-Carlo estimate of `|E ∩ B_ρ(x)| / (ω_n ρ^n)` at each radius, with
/// ChaCha8 stream `i` of `seed` driving radius `i`.
pub fn oracle_density(
    tube: &TubeSet,
    x: &[f64],
    radii: &[f64],
    samples: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    let n = tube.dimension();
    if x.len() != n {
        return Err(Error::Precondition(format!("point has {} coordinates, expected {n}", x.len())));
    }
    if samples < 10_000 {
        return Err(Error::Precondition(format!("{samples} samples < 10^4")));
    }
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("radii must be positive and strictly decreasing".into()));
    }
    let r = tube.profile().radius();
    let e = tube.direction();
    let inside = |p: &[f64]| {
        let z = p[0];
        let g = tube.drift_value(z);
        let dist2: f64 = p[1..].iter().zip(e).map(|(w, e)| (w - g * e).powi(2)).sum();
        dist2.sqrt() < r.eval(z)
    };

    let mut thetas = Vec::with_capacity(radii.len());
    let mut p = vec![0.0; n];
    for (i, &rho) in radii.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut hits = 0usize;
        for _ in 0..samples {
            let mut norm2: f64 = 0.0;
            for v in p.iter_mut() {
                *v = rng.sample::<f64, _>(StandardNormal);
                norm2 += *v * *v;
            }
            let u: f64 = rng.random();
            let scale = rho * u.powf(1.0 / n as f64) / norm2.sqrt();
            for (v, c) in p.iter_mut().zip(x) {
                *v = c + scale * *v;
            }
            if inside(&p) {
                hits += 1;
            }
        }
        thetas.push(hits as f64 / samples as f64);
    }
    let tail = &thetas[thetas.len().saturating_sub(3)..];
    let theta_lower = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let theta_upper = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DensityEstimate {
        theta_lower,
        theta_upper,
        radii_used: radii.to_vec(),
        thetas,
        samples_per_radius: samples,
        seed,
    })
}

/// Estimates `(f^∧(z), f^∨(z))` from a midpoint sample of `(z - ρ, z + ρ)`
/// with `ρ = mesh`: `f^∨` is the least level `s` with `{f > s}` filling less
/// than a quarter of the sample, `f^∧` the largest `s` with `{f < s}` filling
/// less than a quarter. A quarter separates density 0 from the density 1/2
/// seen across a jump.
pub fn oracle_approx_limits(f: &BVFunction, z: f64, mesh: f64) -> Result<(f64, f64)> {
    if !(mesh > 0.0) {
        return Err(Error::Precondition(format!("mesh {mesh} must be positive")));
    }
    let values: Vec<f64> = (0..LIMIT_SAMPLES)
        .map(|i| f.eval(z - mesh + 2.0 * mesh * (i as f64 + 0.5) / LIMIT_SAMPLES as f64))
        .collect();
    let (mn, mx) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let fraction = |pred: &dyn Fn(f64) -> bool| {
        values.iter().filter(|&&v| pred(v)).count() as f64 / LIMIT_SAMPLES as f64
    };
    let threshold = 0.25;

    let (mut a, mut b) = (mn, mx);
    for _ in 0..200 {
        let s = 0.5 * (a + b);
        if fraction(&|v| v > s) < threshold {
            b = s;
        } else {
            a = s;
        }
    }
    let upper = b;
    let (mut a, mut b) = (mn, mx);
    for _ in 0..200 {
        let s = 0.5 * (a + b);
        if fraction(&|v| v < s) < threshold {
            a = s;
        } else {
            b = s;
        }
    }
    Ok((a, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv_profile::{Piece, Profile};
    use crate::symmetral::lens_area;
    use std::f64::consts::PI;

    fn profile(bp: Vec<f64>, pieces: Vec<Piece>, n: usize) -> Profile {
        Profile::new(BVFunction::compact(bp, pieces).unwrap(), n).unwrap()
    }

    #[test]
    fn square_perimeter() {
        let sq = profile(vec![0.0, 1.0], vec![Piece::constant(1.0)], 2);
        let p = oracle_perimeter(&TubeSet::symmetral(sq), 50).unwrap();
        assert!((p - 4.0).abs() < 1e-6);
    }

    #[test]
    fn sphere_area() {
        let ball = profile(vec![-1.0, 1.0], vec![Piece::polynomial(vec![PI, 0.0, -PI])], 3);
        let p = oracle_perimeter(&TubeSet::symmetral(ball), 400).unwrap();
        assert!((p - 4.0 * PI).abs() < 0.005 * 4.0 * PI);
    }

    #[test]
    fn polygon_clipping_matches_lens() {
        let inter = 0.5 * (PI * 4.0 + PI - polygon_symmetric_difference(2.0, 1.0, 1.5));
        assert!((inter - lens_area(1.5, 2.0, 1.0)).abs() < 1e-5);
        let nested = polygon_symmetric_difference(2.0, 1.0, 0.5);
        assert!((nested - 3.0 * PI).abs() < 1e-5);
        let apart = polygon_symmetric_difference(1.0, 1.0, 5.0);
        assert!((apart - 2.0 * PI).abs() < 1e-5);
    }

    #[test]
    fn cantor_rejected() {
        let c = profile(vec![0.0, 1.0], vec![Piece::cantor_affine(1.0, 1.0, crate::bv_profile::Orientation::Increasing)], 3);
        assert!(matches!(oracle_perimeter(&TubeSet::symmetral(c), 10), Err(Error::CantorPresent(_))));
    }

    #[test]
    fn density_is_deterministic() {
        let ball = profile(vec![-1.0, 1.0], vec![Piece::polynomial(vec![PI, 0.0, -PI])], 3);
        let t = TubeSet::symmetral(ball);
        let a = oracle_density(&t, &[0.0, 1.0, 0.0], &[0.1, 0.05, 0.02, 0.01], 10_000, 7).unwrap();
        let b = oracle_density(&t, &[0.0, 1.0, 0.0], &[0.1, 0.05, 0.02, 0.01], 10_000, 7).unwrap();
        assert_eq!(a, b);
        assert!((a.theta_lower - 0.5).abs() < 0.03 && (a.theta_upper - 0.5).abs() < 0.03);
        assert!(oracle_density(&t, &[0.0, 0.0, 0.0], &[0.1, 0.2], 10_000, 7).is_err());
        assert!(oracle_density(&t, &[0.0, 0.0, 0.0], &[0.1], 100, 7).is_err());
    }

    #[test]
    fn approx_limits_of_step() {
        let step = BVFunction::compact(vec![0.0, 1.0, 2.0], vec![Piece::constant(4.0 * PI), Piece::constant(PI)]).unwrap();
        let (lo, hi) = oracle_approx_limits(&step, 1.0, 1e-4).unwrap();
        assert!((lo - PI).abs() < 1e-3 && (hi - 4.0 * PI).abs() < 1e-3);
    }
}
