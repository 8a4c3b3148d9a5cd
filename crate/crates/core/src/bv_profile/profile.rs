use crate::cantor;
use crate::error::{Error, Result};
use crate::window::Window;

use super::function::{BVFunction, Decomposition, Orientation, Piece};

/// `ω_m`, the volume of the unit ball of `R^m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(m - 2) * 2.0 * std::f64::consts::PI / m as f64,
    }
}

/// A nonnegative compactly supported slice-measure function `ℓ` in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    base: BVFunction,
    dimension: usize,
}

impl Profile {
    pub fn new(base: BVFunction, dimension: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidProfile(format!("dimension {dimension} < 2")));
        }
        if base.left_tail() != 0.0 || base.right_tail() != 0.0 {
            return Err(Error::InvalidProfile("profile must vanish outside its support".into()));
        }
        if base.breakpoints().len() < 2 {
            return Err(Error::InvalidProfile("profile needs a support interval".into()));
        }
        let tol = base.jump_tolerance();
        for i in 0..base.pieces().len() {
            let (a, b) = base.piece_interval(i);
            let min = match &base.pieces()[i] {
                Piece::Polynomial(p) => p.range(a, b).0,
                Piece::Cantor(c) => c.outer.range(0.0, 1.0).0,
            };
            if min < -tol {
                return Err(Error::InvalidProfile(format!(
                    "piece {i} on ({a},{b}) takes the negative value {min}"
                )));
            }
        }
        Ok(Profile { base, dimension })
    }

    pub fn base(&self) -> &BVFunction {
        &self.base
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `ω_{n-1}`.
    pub fn omega(&self) -> f64 {
        unit_ball_volume(self.dimension - 1)
    }

    pub fn support(&self) -> (f64, f64) {
        let bp = self.base.breakpoints();
        (bp[0], bp[bp.len() - 1])
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.base.eval(z)
    }

    pub fn approx_limits(&self, z: f64) -> (f64, f64) {
        self.base.approx_limits(z)
    }

    pub fn total_variation(&self, window: &Window) -> Result<f64> {
        self.base.total_variation(window)
    }

    pub fn decompose(&self) -> Decomposition {
        self.base.decompose()
    }

    pub fn radius(&self) -> RadiusProfile<'_> {
        RadiusProfile { profile: self, omega: self.omega() }
    }

    /// Same profile in another ambient dimension.
    pub fn with_dimension(&self, dimension: usize) -> Result<Self> {
        Profile::new(self.base.clone(), dimension)
    }

    /// Maximal open intervals of `{ℓ^∧ > 0}`.
    ///
    /// Zeros of `ℓ^∧` come from the exterior of the support, breakpoints with a
    /// vanishing one-sided limit, identically vanishing pieces and interior
    /// zeros of a piece. For a continuous piece `ℓ^∧ = ℓ`, so an isolated
    /// interior zero separates two intervals. Values within the jump tolerance
    /// of zero count as zero.
    pub fn positivity_intervals(&self) -> Vec<(f64, f64)> {
        let f = &self.base;
        let tol = f.jump_tolerance();
        let (lo, hi) = self.support();
        let mut zeros: Vec<(f64, f64)> = vec![(f64::NEG_INFINITY, lo), (hi, f64::INFINITY)];
        for &z in f.breakpoints() {
            if f.approx_limits(z).0 <= tol {
                zeros.push((z, z));
            }
        }
        for (i, piece) in f.pieces().iter().enumerate() {
            let (a, b) = f.piece_interval(i);
            match piece {
                Piece::Polynomial(p) => {
                    if p.range(a, b).1 <= tol {
                        zeros.push((a, b));
                        continue;
                    }
                    let mut cands = p.critical_points(a, b);
                    cands.extend(p.roots_in(a, b).into_iter().filter(|&r| r > a && r < b));
                    for c in cands {
                        if p.eval(c) <= tol {
                            zeros.push((c, c));
                        }
                    }
                }
                Piece::Cantor(cp) => {
                    if cp.outer.range(0.0, 1.0).1 <= tol {
                        zeros.push((a, b));
                        continue;
                    }
                    let mut cands = cp.outer.critical_points(0.0, 1.0);
                    cands.extend(cp.outer.roots_in(0.0, 1.0).into_iter().filter(|&t| t > 0.0 && t < 1.0));
                    for t in cands {
                        if cp.outer.eval(t) <= tol {
                            let (x0, x1) = cantor::preimage(t);
                            let (x0, x1) = match cp.orientation {
                                Orientation::Increasing => (x0, x1),
                                Orientation::Decreasing => (1.0 - x1, 1.0 - x0),
                            };
                            zeros.push((a + (b - a) * x0, a + (b - a) * x1));
                        }
                    }
                }
            }
        }
        zeros.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut intervals = Vec::new();
        let mut reach = f64::NEG_INFINITY;
        for (s, e) in zeros {
            if s > reach {
                intervals.push((reach, s));
            }
            reach = reach.max(e);
        }
        intervals.retain(|(s, e)| s.is_finite() && e.is_finite() && e > s);
        intervals
    }

    /// True iff no jump atom lies in `B` and no Cantor piece has variation on
    /// its overlap with `B`.
    pub fn is_sobolev(&self, window: &Window) -> bool {
        let f = &self.base;
        if f.jump_atoms().iter().any(|j| window.contains(j.location)) {
            return false;
        }
        let tol = f.jump_tolerance();
        f.segments(window).into_iter().all(|(i, lo, hi)| {
            !f.pieces()[i].is_cantor() || f.piece_variation(i, lo, hi) <= tol
        })
    }

    /// `z -> s^{n-1} ℓ(z / s)`: the profile of the set scaled by `s`.
    pub fn scaled(&self, s: f64) -> Profile {
        let k = s.powi(self.dimension as i32 - 1);
        Profile { base: self.base.rescale(s, k), dimension: self.dimension }
    }

    pub fn reflected(&self) -> Profile {
        Profile { base: self.base.reflect(), dimension: self.dimension }
    }
}

/// `r(z) = (ℓ(z) / ω_{n-1})^{1/(n-1)}`.
#[derive(Debug, Clone, Copy)]
pub struct RadiusProfile<'a> {
    profile: &'a Profile,
    omega: f64,
}

impl<'a> RadiusProfile<'a> {
    pub fn profile(&self) -> &'a Profile {
        self.profile
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Radius of the `(n-1)`-ball of measure `value`.
    pub fn of_value(&self, value: f64) -> f64 {
        let v = value.max(0.0) / self.omega;
        match self.profile.dimension {
            2 => v,
            3 => v.sqrt(),
            n => v.powf(1.0 / (n - 1) as f64),
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.of_value(self.profile.eval(z))
    }

    pub fn left_limit(&self, z: f64) -> f64 {
        self.of_value(self.profile.base.left_limit(z))
    }

    pub fn right_limit(&self, z: f64) -> f64 {
        self.of_value(self.profile.base.right_limit(z))
    }

    pub fn approx_limits(&self, z: f64) -> (f64, f64) {
        let (lo, hi) = self.profile.approx_limits(z);
        (self.of_value(lo), self.of_value(hi))
    }

    /// `r'(z)` where `ℓ > 0` and `z` is inside a piece; zero on Cantor pieces.
    pub fn derivative(&self, z: f64) -> f64 {
        let l = self.profile.eval(z);
        if l <= 0.0 {
            return 0.0;
        }
        let n = self.profile.dimension as f64;
        self.profile.base.derivative(z) * self.eval(z) / ((n - 1.0) * l)
    }
}
