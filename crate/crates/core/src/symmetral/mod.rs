//! The symmetral `F_ℓ`, drifted tube sets and their exact perimeters.

mod geometry;
mod tube;

use crate::bv_profile::{BVFunction, Piece, Profile};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::window::Window;

pub use geometry::{disk_symmetric_difference, lens_area, sphere_boundary_measure};
pub use tube::perimeter_tube;

/// Tolerance of the adaptive quadrature in the radial variable.
pub(crate) const QUAD_TOL: f64 = 1e-11;

/// Drift term `λ (r(z) - anchor)` active on `[start, end)`, frozen at its
/// value `λ (r(end-) - anchor)` for `z >= end` and zero for `z < start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusCoupling {
    pub start: f64,
    pub end: f64,
    pub lambda: f64,
    pub anchor: f64,
}

/// A scalar barycentre drift `g = function + sum of radius couplings`.
#[derive(Debug, Clone, PartialEq)]
pub struct Drift {
    function: BVFunction,
    couplings: Vec<RadiusCoupling>,
}

impl Drift {
    pub fn zero() -> Self {
        Drift { function: BVFunction::constant(0.0), couplings: Vec::new() }
    }

    pub fn new(function: BVFunction, couplings: Vec<RadiusCoupling>) -> Result<Self> {
        for c in &couplings {
            if !(c.start < c.end) || !c.lambda.is_finite() || !c.anchor.is_finite() {
                return Err(Error::InvalidFunction(format!("bad radius coupling {c:?}")));
            }
        }
        Ok(Drift { function, couplings })
    }

    pub fn from_function(function: BVFunction) -> Self {
        Drift { function, couplings: Vec::new() }
    }

    pub fn function(&self) -> &BVFunction {
        &self.function
    }

    pub fn couplings(&self) -> &[RadiusCoupling] {
        &self.couplings
    }

    pub fn is_zero(&self) -> bool {
        self.couplings.is_empty()
            && self.function.breakpoints().is_empty()
            && self.function.left_tail() == 0.0
    }

    /// `g + c`.
    pub fn shifted(&self, c: f64) -> Drift {
        Drift { function: self.function.shift(c), couplings: self.couplings.clone() }
    }
}

/// `E = {(z, w) : |w - g(z) e| < r_ℓ(z)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSet {
    profile: Profile,
    drift: Drift,
    direction: Vec<f64>,
}

/// First coordinate axis of `R^m`.
pub fn first_axis(m: usize) -> Vec<f64> {
    let mut e = vec![0.0; m];
    e[0] = 1.0;
    e
}

impl TubeSet {
    pub fn new(profile: Profile, drift: Drift, direction: Vec<f64>) -> Result<Self> {
        let m = profile.dimension() - 1;
        if direction.len() != m {
            return Err(Error::Precondition(format!(
                "direction has {} components, expected {m}",
                direction.len()
            )));
        }
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-14 {
            return Err(Error::Precondition(format!("direction is not a unit vector (|e| = {norm})")));
        }
        Ok(TubeSet { profile, drift, direction })
    }

    /// `F_ℓ` itself.
    pub fn symmetral(profile: Profile) -> Self {
        let direction = first_axis(profile.dimension() - 1);
        TubeSet { profile, drift: Drift::zero(), direction }
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn drift(&self) -> &Drift {
        &self.drift
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn dimension(&self) -> usize {
        self.profile.dimension()
    }

    pub fn with_drift(&self, drift: Drift) -> TubeSet {
        TubeSet { profile: self.profile.clone(), drift, direction: self.direction.clone() }
    }

    fn coupling_value(&self, c: &RadiusCoupling, z: f64, right: bool) -> f64 {
        let r = self.profile.radius();
        let before = if right { z < c.start } else { z <= c.start };
        let after = if right { z >= c.end } else { z > c.end };
        if before {
            0.0
        } else if after {
            c.lambda * (r.left_limit(c.end) - c.anchor)
        } else if right {
            c.lambda * (r.right_limit(z) - c.anchor)
        } else {
            c.lambda * (r.left_limit(z) - c.anchor)
        }
    }

    /// `g(z)`, right-continuous at breakpoints.
    pub fn drift_value(&self, z: f64) -> f64 {
        self.drift_right(z)
    }

    pub fn drift_left(&self, z: f64) -> f64 {
        self.drift.function.left_limit(z)
            + self.drift.couplings.iter().map(|c| self.coupling_value(c, z, false)).sum::<f64>()
    }

    pub fn drift_right(&self, z: f64) -> f64 {
        self.drift.function.right_limit(z)
            + self.drift.couplings.iter().map(|c| self.coupling_value(c, z, true)).sum::<f64>()
    }

    /// Sorted union of the breakpoints of `ℓ`, of `g` and of the couplings.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.profile.base().breakpoints().to_vec();
        all.extend_from_slice(self.drift.function.breakpoints());
        for c in &self.drift.couplings {
            all.push(c.start);
            all.push(c.end);
        }
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }

    /// Whether `g` takes two values more than `1e-9` apart on sets of
    /// positive length inside the support of `ℓ`.
    pub fn drift_is_nonconstant(&self) -> bool {
        let bp = self.breakpoints();
        let (lo, hi) = self.profile.support();
        let mut values = Vec::new();
        for w in bp.windows(2) {
            let (a, b) = (w[0].max(lo), w[1].min(hi));
            if b <= a {
                continue;
            }
            for k in 1..8 {
                let z = a + (b - a) * k as f64 / 8.0;
                if self.profile.eval(z) > 0.0 {
                    values.push(self.drift_value(z));
                }
            }
        }
        let (mn, mx) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        mx - mn > 1e-9
    }
}

/// Per-part perimeter contributions over a window `B × R^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerimeterBreakdown {
    pub ac_part: f64,
    pub jump_part: f64,
    pub cantor_part: f64,
    pub total: f64,
    pub window: Window,
}

impl PerimeterBreakdown {
    pub(crate) fn new(ac_part: f64, jump_part: f64, cantor_part: f64, window: Window) -> Self {
        PerimeterBreakdown { ac_part, jump_part, cantor_part, total: ac_part + jump_part + cantor_part, window }
    }
}

/// `|E| = \int ℓ`, independent of the drift.
pub fn volume(tube: &TubeSet) -> f64 {
    tube.profile.base().integral().expect("profiles have zero tails")
}

/// `P(F_ℓ; B × R^{n-1})` from the slice formula
/// `\int_B sqrt(((n-1) ω r^{n-2})^2 + ℓ'^2) dz + |D^s ℓ|(B)`.
pub fn perimeter_symmetral(profile: &Profile, window: &Window) -> Result<PerimeterBreakdown> {
    window.ensure_nonempty()?;
    let f = profile.base();
    let n = profile.dimension();
    let radius = profile.radius();
    let sphere = (n - 1) as f64 * profile.omega();
    let mut ac = 0.0;
    for (i, lo, hi) in f.segments(window) {
        let (a, b) = f.piece_interval(i);
        match &f.pieces()[i] {
            Piece::Polynomial(p) => {
                let dp = p.derivative();
                let integrand = |z: f64| {
                    let lateral = if n == 2 {
                        if p.eval(z) > 0.0 { 2.0 } else { 0.0 }
                    } else {
                        sphere * radius.of_value(p.eval(z)).powi(n as i32 - 2)
                    };
                    lateral.hypot(dp.eval(z))
                };
                let mut knots = vec![lo];
                knots.extend(p.roots_in(lo, hi).into_iter().filter(|&x| x > lo && x < hi));
                knots.push(hi);
                ac += quadrature::integrate_split(&integrand, &knots, QUAD_TOL);
            }
            Piece::Cantor(c) => {
                let h = |t: f64| {
                    if n == 2 {
                        if c.outer.eval(t) > 0.0 { 2.0 } else { 0.0 }
                    } else {
                        sphere * radius.of_value(c.outer.eval(t)).powi(n as i32 - 2)
                    }
                };
                ac += (b - a) * c.integrate_local(&h, (lo - a) / (b - a), (hi - a) / (b - a));
            }
        }
    }
    let jump: f64 = f
        .jump_atoms()
        .iter()
        .filter(|j| window.contains(j.location))
        .map(|j| j.height.abs())
        .sum();
    let cantor_part = f.cantor_variation(window);
    Ok(PerimeterBreakdown::new(ac, jump, cantor_part, *window))
}

/// `(r^∧(z), r^∨(z), ℓ^∨(z) - ℓ^∧(z))`: the vertical slice of `∂*F_ℓ` at `z` is
/// the annulus between the two radii.
pub fn boundary_slice(profile: &Profile, z: f64) -> (f64, f64, f64) {
    let (lo, hi) = profile.approx_limits(z);
    let r = profile.radius();
    (r.of_value(lo), r.of_value(hi), hi - lo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub p_e: f64,
    pub p_f: f64,
    pub holds: bool,
    pub gap: f64,
}

/// Compares `P(E)` with `P(F_ℓ)` over the whole space.
pub fn check_inequality(tube: &TubeSet) -> Result<InequalityCheck> {
    check_inequality_on(tube, &Window::real_line())
}

/// Compares `P(E; B × R^{n-1})` with `P(F_ℓ; B × R^{n-1})`.
pub fn check_inequality_on(tube: &TubeSet, window: &Window) -> Result<InequalityCheck> {
    let p_e = perimeter_tube(tube, window)?.total;
    let p_f = perimeter_symmetral(&tube.profile, window)?.total;
    Ok(InequalityCheck { p_e, p_f, holds: p_f <= p_e + 1e-9 * (1.0 + p_f), gap: p_e - p_f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv_profile::{CantorPiece, Orientation};
    use crate::poly::Poly;
    use std::f64::consts::PI;

    fn profile(bp: Vec<f64>, pieces: Vec<Piece>, n: usize) -> Profile {
        Profile::new(BVFunction::compact(bp, pieces).unwrap(), n).unwrap()
    }

    fn ball() -> Profile {
        profile(vec![-1.0, 1.0], vec![Piece::polynomial(vec![PI, 0.0, -PI])], 3)
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

    #[test]
    fn volumes() {
        assert!((volume(&TubeSet::symmetral(ball())) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((volume(&TubeSet::symmetral(step())) - 5.0 * PI).abs() < 1e-14);
        assert!((volume(&TubeSet::symmetral(cantor_profile())) - 2.3 * PI).abs() < 1e-13);
    }

    #[test]
    fn symmetral_perimeters() {
        let all = Window::real_line();
        let p = perimeter_symmetral(&ball(), &all).unwrap();
        assert!((p.total - 4.0 * PI).abs() < 1e-9);
        assert_eq!((p.jump_part, p.cantor_part), (0.0, 0.0));

        let cyl = profile(vec![0.0, 2.0], vec![Piece::constant(PI)], 3);
        let p = perimeter_symmetral(&cyl, &all).unwrap();
        assert!((p.ac_part - 4.0 * PI).abs() < 1e-12 && (p.jump_part - 2.0 * PI).abs() < 1e-12);

        let p = perimeter_symmetral(&step(), &all).unwrap();
        assert!((p.ac_part - 6.0 * PI).abs() < 1e-12);
        assert!((p.jump_part - 8.0 * PI).abs() < 1e-12);
        assert!((p.total - 14.0 * PI).abs() < 1e-12);

        let square = profile(vec![0.0, 1.0], vec![Piece::constant(1.0)], 2);
        assert!((perimeter_symmetral(&square, &all).unwrap().total - 4.0).abs() < 1e-14);
    }

    #[test]
    fn cantor_profile_perimeter_on_window() {
        let p = perimeter_symmetral(&cantor_profile(), &Window::open(0.0, 1.0)).unwrap();
        assert!((p.ac_part - 3.0 * PI).abs() < 1e-10, "{}", p.ac_part);
        assert!((p.cantor_part - 3.0 * PI).abs() < 1e-12);
        assert_eq!(p.jump_part, 0.0);
    }

    #[test]
    fn boundary_slices() {
        let (a, b, m) = boundary_slice(&step(), 1.0);
        assert!((a - 1.0).abs() < 1e-15 && (b - 2.0).abs() < 1e-15 && (m - 3.0 * PI).abs() < 1e-14);
        let (a, b, m) = boundary_slice(&ball(), 0.0);
        assert!((a - 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && m == 0.0);
        let cyl = profile(vec![0.0, 2.0], vec![Piece::constant(PI)], 3);
        assert_eq!(boundary_slice(&cyl, 0.0), (0.0, 1.0, PI));
    }

    #[test]
    fn unit_direction_required() {
        assert!(TubeSet::new(ball(), Drift::zero(), vec![1.0, 1.0]).is_err());
        assert!(TubeSet::new(ball(), Drift::zero(), vec![1.0]).is_err());
        assert!(TubeSet::new(ball(), Drift::zero(), vec![0.6, 0.8]).is_ok());
    }
}
