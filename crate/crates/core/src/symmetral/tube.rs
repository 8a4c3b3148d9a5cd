//! Perimeter of drifted tubes `{|w - g(z) e| < r(z)}`.
//!
//! The lateral boundary is parametrised by `(z, u) -> (z, g(z) e + r(z) u)`
//! with `u` on the unit sphere of `R^{n-1}`, giving the integrand
//! `r^{n-2} sqrt(1 + (r' + g' <u, e>)^2)`. It is evaluated as
//! `sqrt(r^{2(n-2)} + (A + B <u, e>)^2)` with `A = r^{n-2} r' = ℓ' / ((n-1) ω)`
//! and `B = r^{n-2} g'`, which stays finite where `r` vanishes.

use std::f64::consts::PI;

use crate::bv_profile::{unit_ball_volume, Piece, Profile, JUMP_TOLERANCE};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature;
use crate::window::Window;

use super::geometry::disk_symmetric_difference;
use super::{PerimeterBreakdown, TubeSet, QUAD_TOL};

const THETA_NODES: usize = 64;
const PHI_ORDER: usize = 32;

/// Angular integration over `S^{n-2}` of functions of `<u, e>`.
struct Sphere {
    n: usize,
    /// `|S^{n-3}|`, used for `n >= 4`.
    equator: f64,
    phi: (Vec<f64>, Vec<f64>),
}

impl Sphere {
    fn new(n: usize) -> Self {
        let equator = if n >= 4 { (n - 2) as f64 * unit_ball_volume(n - 2) } else { 0.0 };
        let phi = if n >= 4 { quadrature::gauss_legendre(PHI_ORDER) } else { (Vec::new(), Vec::new()) };
        Sphere { n, equator, phi }
    }

    /// `\int_{S^{n-2}} h(<u, e>) dH^{n-2}(u)` for smooth `h`.
    fn integrate<F: Fn(f64) -> f64>(&self, h: F) -> f64 {
        match self.n {
            2 => h(1.0) + h(-1.0),
            3 => quadrature::periodic_trapezoid(|t| h(t.cos()), THETA_NODES),
            n => {
                let (x, w) = &self.phi;
                let half = 0.5 * PI;
                x.iter()
                    .zip(w)
                    .map(|(x, w)| {
                        let p = half * (x + 1.0);
                        w * h(p.cos()) * p.sin().powi(n as i32 - 3)
                    })
                    .sum::<f64>()
                    * half
                    * self.equator
            }
        }
    }

    /// `Φ(a, b) = \int_{S^{n-2}} |a + b <u, e>| dH^{n-2}(u)`, the swept
    /// measure of an infinitesimal displacement of the slice disk.
    fn swept(&self, a: f64, b: f64) -> f64 {
        let full = match self.n {
            2 => 2.0,
            3 => 2.0 * PI,
            n => (n - 1) as f64 * unit_ball_volume(n - 1),
        };
        if b.abs() <= a.abs() {
            return full * a.abs();
        }
        let alpha = (-a / b).clamp(-1.0, 1.0).acos();
        match self.n {
            2 => (a + b).abs() + (a - b).abs(),
            3 => {
                let s = alpha.sin();
                2.0 * ((a * alpha + b * s).abs() + (a * (PI - alpha) - b * s).abs())
            }
            n => {
                let m = n as i32 - 3;
                let g = |p: f64| (a + b * p.cos()).abs() * p.sin().powi(m);
                self.equator
                    * (quadrature::integrate(&g, 0.0, alpha, QUAD_TOL)
                        + quadrature::integrate(&g, alpha, PI, QUAD_TOL))
            }
        }
    }
}

/// `P(E; B × R^{n-1})` for a tube set.
///
/// Lateral parts come from the parametrised boundary; jump planes contribute
/// the symmetric difference of the one-sided slice disks; Cantor pieces of
/// `ℓ` (with a drift that is constant there or follows the same staircase)
/// contribute `\int Φ(P'(t) / ((n-1) ω), R(t)^{n-2} G'(t)) dt` over the
/// traversed Cantor range, the limit of the dyadic staircase discretisation.
pub fn perimeter_tube(tube: &TubeSet, window: &Window) -> Result<PerimeterBreakdown> {
    window.ensure_nonempty()?;
    let profile = tube.profile();
    let f = profile.base();
    let g = tube.drift().function();
    let n = profile.dimension();
    let radius = profile.radius();
    let sphere_measure = (n - 1) as f64 * profile.omega();
    let sphere = Sphere::new(n);
    let tol = f.jump_tolerance();
    let rpow = |l: f64| if n == 2 { 1.0 } else { radius.of_value(l).powi(n as i32 - 2) };

    let bp = tube.breakpoints();
    let mut ac = 0.0;
    let mut cantor_part = 0.0;
    for w in bp.windows(2) {
        let Some((lo, hi)) = window.clip(w[0], w[1]) else { continue };
        let mid = 0.5 * (lo + hi);
        let Some(i) = f.piece_at(mid) else { continue };
        let (a, b) = f.piece_interval(i);
        let lambda: f64 = tube
            .drift()
            .couplings()
            .iter()
            .filter(|c| c.start <= mid && mid < c.end)
            .map(|c| c.lambda)
            .sum();
        let drift_piece = g.piece_at(mid).map(|j| (j, &g.pieces()[j]));

        match &f.pieces()[i] {
            Piece::Polynomial(p) => {
                if p.range(a, b).1 <= tol {
                    continue;
                }
                let dq = match drift_piece {
                    None => Poly::constant(0.0),
                    Some((_, Piece::Polynomial(q))) => q.derivative(),
                    Some((_, Piece::Cantor(_))) => {
                        return Err(Error::Unsupported(format!(
                            "Cantor drift over the polynomial profile piece ({a},{b})"
                        )))
                    }
                };
                let dp = p.derivative();
                let integrand = |z: f64| {
                    let l = p.eval(z);
                    if n == 2 && l <= 0.0 {
                        return 0.0;
                    }
                    let base = rpow(l);
                    let slope = dp.eval(z) / sphere_measure;
                    let tilt = base * dq.eval(z) + lambda * slope;
                    if tilt == 0.0 {
                        sphere_measure * base.hypot(slope)
                    } else {
                        sphere.integrate(|c| base.hypot(slope + tilt * c))
                    }
                };
                let mut knots = vec![lo];
                knots.extend(p.roots_in(lo, hi).into_iter().filter(|&x| x > lo && x < hi));
                knots.push(hi);
                ac += quadrature::integrate_split(&integrand, &knots, QUAD_TOL);
            }
            Piece::Cantor(c) => {
                if c.outer.range(0.0, 1.0).1 <= tol {
                    continue;
                }
                let follow = match drift_piece {
                    None => Poly::constant(0.0),
                    Some((_, Piece::Polynomial(q))) if q.is_constant() => Poly::constant(0.0),
                    Some((_, Piece::Polynomial(_))) => {
                        return Err(Error::Unsupported(format!(
                            "a.c. drift over the Cantor profile piece ({a},{b})"
                        )))
                    }
                    Some((j, Piece::Cantor(d))) => {
                        if g.piece_interval(j) != (a, b) || d.orientation != c.orientation {
                            return Err(Error::Unsupported(format!(
                                "drift and profile carry different staircases on ({a},{b})"
                            )));
                        }
                        d.outer.derivative()
                    }
                };
                let (x0, x1) = ((lo - a) / (b - a), (hi - a) / (b - a));
                let lateral = |t: f64| {
                    let l = c.outer.eval(t);
                    if n == 2 && l <= 0.0 {
                        0.0
                    } else {
                        sphere_measure * rpow(l)
                    }
                };
                ac += (b - a) * c.integrate_local(&lateral, x0, x1);

                let (t0, t1) = c.t_range(x0, x1);
                let dp = c.outer.derivative();
                let singular = |t: f64| {
                    let slope = dp.eval(t) / sphere_measure;
                    let tilt = rpow(c.outer.eval(t)) * follow.eval(t) + lambda * slope;
                    sphere.swept(slope, tilt)
                };
                let mut knots = vec![t0];
                let mut inner: Vec<f64> = c.outer.roots_in(t0, t1);
                inner.extend(dp.roots_in(t0, t1));
                inner.retain(|&t| t > t0 && t < t1);
                inner.sort_by(f64::total_cmp);
                knots.extend(inner);
                knots.push(t1);
                cantor_part += quadrature::integrate_split(&singular, &knots, QUAD_TOL);
            }
        }
    }

    let jump = jump_planes(tube, window, &bp)?;
    Ok(PerimeterBreakdown::new(ac, jump, cantor_part, *window))
}

fn jump_planes(tube: &TubeSet, window: &Window, bp: &[f64]) -> Result<f64> {
    let profile: &Profile = tube.profile();
    let f = profile.base();
    let n = profile.dimension();
    let radius = profile.radius();
    let tol = f.jump_tolerance();
    let gtol = JUMP_TOLERANCE * (1.0 + tube.drift().function().sup_norm());
    let mut total = 0.0;
    for &z in bp.iter().filter(|&&z| window.contains(z)) {
        let (l_minus, l_plus) = (f.left_limit(z), f.right_limit(z));
        let d = (tube.drift_right(z) - tube.drift_left(z)).abs();
        if (l_plus - l_minus).abs() <= tol && d <= gtol {
            continue;
        }
        total += disk_symmetric_difference(
            n,
            l_minus,
            l_plus,
            radius.of_value(l_minus),
            radius.of_value(l_plus),
            d,
        )?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv_profile::{BVFunction, CantorPiece, Orientation};
    use crate::symmetral::{perimeter_symmetral, Drift, RadiusCoupling};

    fn profile(bp: Vec<f64>, pieces: Vec<Piece>, n: usize) -> Profile {
        Profile::new(BVFunction::compact(bp, pieces).unwrap(), n).unwrap()
    }

    fn step() -> Profile {
        profile(vec![0.0, 1.0, 2.0], vec![Piece::constant(4.0 * PI), Piece::constant(PI)], 3)
    }

    fn cantor_profile() -> Profile {
        let outer = Poly::new(vec![PI, 2.0 * PI, PI]);
        profile(
            vec![0.0, 1.0],
            vec![Piece::Cantor(CantorPiece { outer, orientation: Orientation::Increasing })],
            3,
        )
    }

    fn shifted(p: &Profile, at: f64, tau: f64) -> TubeSet {
        let drift = Drift::from_function(BVFunction::step(at, 0.0, tau).unwrap());
        TubeSet::new(p.clone(), drift, vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn zero_drift_matches_symmetral() {
        let all = Window::real_line();
        for p in [step(), cantor_profile(), profile(vec![-1.0, 1.0], vec![Piece::polynomial(vec![PI, 0.0, -PI])], 3)] {
            let t = perimeter_tube(&TubeSet::symmetral(p.clone()), &all).unwrap();
            let s = perimeter_symmetral(&p, &all).unwrap();
            assert!((t.total - s.total).abs() < 1e-9 * s.total, "{} vs {}", t.total, s.total);
        }
    }

    #[test]
    fn nested_and_lens_jump_planes() {
        let all = Window::real_line();
        let nested = perimeter_tube(&shifted(&step(), 1.0, 0.5), &all).unwrap();
        assert!((nested.total - 14.0 * PI).abs() < 1e-11);
        let lens = perimeter_tube(&shifted(&step(), 1.0, 1.5), &all).unwrap();
        assert!((lens.total - 45.480_37).abs() < 1e-4, "{}", lens.total);
    }

    #[test]
    fn translating_a_ball_preserves_perimeter() {
        let ball = profile(vec![-1.0, 1.0], vec![Piece::polynomial(vec![PI, 0.0, -PI])], 3);
        let drift = Drift::from_function(BVFunction::constant(3.0));
        let t = TubeSet::new(ball, drift, vec![1.0, 0.0]).unwrap();
        assert!((perimeter_tube(&t, &Window::real_line()).unwrap().total - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn sheared_cylinder_area() {
        // Oblique cylinder of radius 1 over [0, 1] with g(z) = s z: lateral
        // area is the perimeter of the orthogonal ellipse section times the
        // axis length, \int_0^{2π} sqrt(1 + s^2 cos^2 θ) dθ.
        let s = 0.7;
        let cyl = profile(vec![0.0, 1.0], vec![Piece::constant(PI)], 3);
        let drift = Drift::from_function(
            BVFunction::new(vec![0.0, 1.0], vec![Piece::polynomial(vec![0.0, s])], 0.0, s).unwrap(),
        );
        let t = TubeSet::new(cyl, drift, vec![0.0, 1.0]).unwrap();
        let got = perimeter_tube(&t, &Window::open(0.0, 1.0)).unwrap().ac_part;
        let want = quadrature::integrate(&|t: f64| (1.0 + s * s * t.cos().powi(2)).sqrt(), 0.0, 2.0 * PI, 1e-13);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn cantor_coupling_keeps_perimeter() {
        let p = cantor_profile();
        let anchor = p.radius().right_limit(0.0);
        let coupling = RadiusCoupling { start: 0.0, end: 1.0, lambda: 0.5, anchor };
        let drift = Drift::new(BVFunction::constant(0.0), vec![coupling]).unwrap();
        let t = TubeSet::new(p.clone(), drift, vec![1.0, 0.0]).unwrap();
        let w = Window::open(0.0, 1.0);
        let pe = perimeter_tube(&t, &w).unwrap();
        assert!((pe.total - 6.0 * PI).abs() < 1e-9, "{}", pe.total);
        // λ > 1 detaches the slice disks and must cost perimeter.
        let coupling = RadiusCoupling { start: 0.0, end: 1.0, lambda: 3.0, anchor };
        let drift = Drift::new(BVFunction::constant(0.0), vec![coupling]).unwrap();
        let t = TubeSet::new(p, drift, vec![1.0, 0.0]).unwrap();
        assert!(perimeter_tube(&t, &w).unwrap().total > 6.0 * PI + 1e-3);
    }

    #[test]
    fn swept_measure_against_quadrature() {
        for n in [2usize, 3, 4, 5] {
            let s = Sphere::new(n);
            for (a, b) in [(1.0f64, 0.3f64), (0.3, 1.0), (-0.5, 2.0), (0.0, 1.0)] {
                let want = if n == 2 {
                    (a + b).abs() + (a - b).abs()
                } else {
                    // brute-force midpoint rule in the polar angle
                    let m = 200_000;
                    let eq = if n == 3 { 2.0 } else { (n - 2) as f64 * unit_ball_volume(n - 2) };
                    (0..m)
                        .map(|k| {
                            let p = PI * (k as f64 + 0.5) / m as f64;
                            (a + b * p.cos()).abs() * p.sin().powi(n as i32 - 3)
                        })
                        .sum::<f64>()
                        * PI
                        / m as f64
                        * eq
                };
                assert!((s.swept(a, b) - want).abs() < 1e-6, "n={n} a={a} b={b}");
            }
        }
    }

    #[test]
    fn mixed_drift_rejected() {
        let p = step();
        let drift = Drift::from_function(
            BVFunction::compact(vec![0.0, 1.0], vec![Piece::cantor_affine(0.0, 1.0, Orientation::Increasing)]).unwrap(),
        );
        let t = TubeSet::new(p, drift, vec![1.0, 0.0]).unwrap();
        assert!(matches!(perimeter_tube(&t, &Window::real_line()), Err(Error::Unsupported(_))));
    }
}
