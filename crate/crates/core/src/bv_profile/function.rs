//! Structured one-dimensional functions of bounded variation.

use crate::cantor;
use crate::error::{Error, Result};
use crate::poly::{Poly, MAX_DEGREE};
use crate::window::Window;

/// Relative size of a breakpoint discontinuity below which it is treated as
/// rounding noise rather than a jump atom.
pub const JUMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Increasing,
    Decreasing,
}

/// `outer(c(x))` on a piece, with `x` the affine coordinate of the piece in
/// `[0, 1]` and `c` the Cantor function, reflected to `c(1 - x)` when the
/// orientation is decreasing. `outer(t) = base + amplitude t` is the affine
/// staircase; higher degrees allow e.g. squared staircases.
#[derive(Debug, Clone, PartialEq)]
pub struct CantorPiece {
    pub outer: Poly,
    pub orientation: Orientation,
}

impl CantorPiece {
    pub fn affine(base: f64, amplitude: f64, orientation: Orientation) -> Self {
        CantorPiece { outer: Poly::new(vec![base, amplitude]), orientation }
    }

    /// Cantor variable `t` at local coordinate `x`.
    pub fn t_at(&self, x: f64) -> f64 {
        match self.orientation {
            Orientation::Increasing => cantor::cantor(x),
            Orientation::Decreasing => cantor::cantor(1.0 - x),
        }
    }

    /// Sorted range of the Cantor variable over local coordinates `[x0, x1]`.
    pub fn t_range(&self, x0: f64, x1: f64) -> (f64, f64) {
        let (a, b) = (self.t_at(x0), self.t_at(x1));
        (a.min(b), a.max(b))
    }

    /// \int_{x0}^{x1} h(t(x)) dx in local coordinates.
    pub fn integrate_local<F: Fn(f64) -> f64>(&self, h: &F, x0: f64, x1: f64) -> f64 {
        match self.orientation {
            Orientation::Increasing => cantor::integrate_composed(h, x0, x1),
            Orientation::Decreasing => cantor::integrate_composed(h, 1.0 - x1, 1.0 - x0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    /// Polynomial in the global variable `z`.
    Polynomial(Poly),
    Cantor(CantorPiece),
}

impl Piece {
    pub fn constant(c: f64) -> Self {
        Piece::Polynomial(Poly::constant(c))
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Piece::Polynomial(Poly::new(coeffs))
    }

    pub fn cantor_affine(base: f64, amplitude: f64, orientation: Orientation) -> Self {
        Piece::Cantor(CantorPiece::affine(base, amplitude, orientation))
    }

    pub fn is_cantor(&self) -> bool {
        matches!(self, Piece::Cantor(_))
    }

    fn eval(&self, z: f64, a: f64, b: f64) -> f64 {
        match self {
            Piece::Polynomial(p) => p.eval(z),
            Piece::Cantor(c) => c.outer.eval(c.t_at((z - a) / (b - a))),
        }
    }

    fn left_end(&self, a: f64) -> f64 {
        match self {
            Piece::Polynomial(p) => p.eval(a),
            Piece::Cantor(c) => c.outer.eval(c.t_at(0.0)),
        }
    }

    fn right_end(&self, b: f64) -> f64 {
        match self {
            Piece::Polynomial(p) => p.eval(b),
            Piece::Cantor(c) => c.outer.eval(c.t_at(1.0)),
        }
    }

    /// Closed-form variation over the sub-interval `[lo, hi]` of `[a, b]`.
    fn variation(&self, a: f64, b: f64, lo: f64, hi: f64) -> f64 {
        match self {
            Piece::Polynomial(p) => p.variation(lo, hi),
            Piece::Cantor(c) => {
                let (t0, t1) = c.t_range((lo - a) / (b - a), (hi - a) / (b - a));
                c.outer.variation(t0, t1)
            }
        }
    }

    fn range(&self, a: f64, b: f64) -> (f64, f64) {
        match self {
            Piece::Polynomial(p) => p.range(a, b),
            Piece::Cantor(c) => c.outer.range(0.0, 1.0),
        }
    }

    fn degree(&self) -> usize {
        match self {
            Piece::Polynomial(p) => p.degree(),
            Piece::Cantor(c) => c.outer.degree(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpAtom {
    pub location: f64,
    /// `f(z+) - f(z-)`.
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CantorAtom {
    pub start: f64,
    pub end: f64,
    /// `f(end-) - f(start+)`.
    pub mass: f64,
    /// `|D^c f|` of the piece.
    pub variation: f64,
}

/// Additive split `f = ac + (jump part) + (Cantor part)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Continuous, piecewise polynomial; carries the left tail of `f`.
    pub ac: BVFunction,
    pub jump_atoms: Vec<JumpAtom>,
    pub cantor_atoms: Vec<CantorAtom>,
    staircases: Vec<(f64, f64, CantorPiece)>,
}

impl Decomposition {
    /// `ac(z) + sum of jumps at or left of z + Cantor increments up to z`.
    pub fn reconstruct(&self, z: f64) -> f64 {
        let jumps: f64 = self
            .jump_atoms
            .iter()
            .filter(|j| j.location <= z)
            .map(|j| j.height)
            .sum();
        let staircase: f64 = self
            .staircases
            .iter()
            .map(|(a, b, c)| {
                if z < *a {
                    0.0
                } else if z >= *b {
                    c.outer.eval(c.t_at(1.0)) - c.outer.eval(c.t_at(0.0))
                } else {
                    c.outer.eval(c.t_at((z - a) / (b - a))) - c.outer.eval(c.t_at(0.0))
                }
            })
            .sum();
        self.ac.eval(z) + jumps + staircase
    }

    pub fn jump_mass(&self, window: &Window) -> f64 {
        self.jump_atoms
            .iter()
            .filter(|j| window.contains(j.location))
            .map(|j| j.height.abs())
            .sum()
    }
}

/// A function constant outside `[z_0, z_M]`, with one piece per open interval
/// `(z_i, z_{i+1})`. At breakpoints it takes the right limit.
#[derive(Debug, Clone, PartialEq)]
pub struct BVFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
    left_tail: f64,
    right_tail: f64,
    limits: Vec<(f64, f64)>,
    sup: f64,
}

impl BVFunction {
    pub fn new(
        breakpoints: Vec<f64>,
        pieces: Vec<Piece>,
        left_tail: f64,
        right_tail: f64,
    ) -> Result<Self> {
        if breakpoints.is_empty() {
            if !pieces.is_empty() || left_tail != right_tail {
                return Err(Error::InvalidFunction(
                    "a function without breakpoints must be a single constant".into(),
                ));
            }
        } else if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|z| !z.is_finite()) || !left_tail.is_finite() || !right_tail.is_finite() {
            return Err(Error::InvalidFunction("non-finite breakpoint or tail".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("breakpoints must be strictly increasing".into()));
        }
        for (i, piece) in pieces.iter().enumerate() {
            if piece.degree() > MAX_DEGREE {
                return Err(Error::InvalidFunction(format!(
                    "piece {i} has degree {} > {MAX_DEGREE}",
                    piece.degree()
                )));
            }
            let coeffs = match piece {
                Piece::Polynomial(p) => p.coeffs(),
                Piece::Cantor(c) => c.outer.coeffs(),
            };
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidFunction(format!("piece {i} has a non-finite coefficient")));
            }
        }

        let m = breakpoints.len();
        let mut limits = Vec::with_capacity(m);
        for i in 0..m {
            let left = if i == 0 {
                left_tail
            } else {
                pieces[i - 1].right_end(breakpoints[i])
            };
            let right = if i + 1 == m {
                right_tail
            } else {
                pieces[i].left_end(breakpoints[i])
            };
            limits.push((left, right));
        }
        let sup = pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let (lo, hi) = p.range(breakpoints[i], breakpoints[i + 1]);
                lo.abs().max(hi.abs())
            })
            .fold(left_tail.abs().max(right_tail.abs()), f64::max);

        Ok(BVFunction { breakpoints, pieces, left_tail, right_tail, limits, sup })
    }

    /// Compactly supported function (zero tails).
    pub fn compact(breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        Self::new(breakpoints, pieces, 0.0, 0.0)
    }

    pub fn constant(value: f64) -> Self {
        BVFunction {
            breakpoints: Vec::new(),
            pieces: Vec::new(),
            left_tail: value,
            right_tail: value,
            limits: Vec::new(),
            sup: value.abs(),
        }
    }

    /// `left` for `z < at`, `right` for `z >= at`.
    pub fn step(at: f64, left: f64, right: f64) -> Result<Self> {
        Self::new(vec![at], Vec::new(), left, right)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn left_tail(&self) -> f64 {
        self.left_tail
    }

    pub fn right_tail(&self) -> f64 {
        self.right_tail
    }

    pub fn piece_interval(&self, i: usize) -> (f64, f64) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    /// `sup |f|`.
    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    /// Absolute threshold separating jump atoms from rounding noise.
    pub fn jump_tolerance(&self) -> f64 {
        JUMP_TOLERANCE * (1.0 + self.sup)
    }

    pub fn has_cantor_pieces(&self) -> bool {
        self.pieces.iter().any(Piece::is_cantor)
    }

    /// Index of the piece whose half-open interval `[z_i, z_{i+1})` holds `z`.
    pub fn piece_at(&self, z: f64) -> Option<usize> {
        if self.pieces.is_empty() || z < self.breakpoints[0] || z >= self.breakpoints[self.breakpoints.len() - 1] {
            return None;
        }
        Some(self.breakpoints.partition_point(|&b| b <= z) - 1)
    }

    fn breakpoint_index(&self, z: f64) -> Option<usize> {
        self.breakpoints.binary_search_by(|b| b.total_cmp(&z)).ok()
    }

    pub fn eval(&self, z: f64) -> f64 {
        if self.breakpoints.is_empty() || z < self.breakpoints[0] {
            return self.left_tail;
        }
        match self.piece_at(z) {
            Some(i) => {
                let (a, b) = self.piece_interval(i);
                self.pieces[i].eval(z, a, b)
            }
            None => self.right_tail,
        }
    }

    pub fn left_limit(&self, z: f64) -> f64 {
        match self.breakpoint_index(z) {
            Some(i) => self.limits[i].0,
            None => self.eval(z),
        }
    }

    pub fn right_limit(&self, z: f64) -> f64 {
        match self.breakpoint_index(z) {
            Some(i) => self.limits[i].1,
            None => self.eval(z),
        }
    }

    /// Approximate lower and upper limits `(f^∧(z), f^∨(z))`. Every piece is
    /// continuous with one-sided limits at its ends, so away from breakpoints
    /// both equal `f(z)` and at a breakpoint they are the smaller and larger
    /// one-sided limit.
    pub fn approx_limits(&self, z: f64) -> (f64, f64) {
        match self.breakpoint_index(z) {
            Some(i) => {
                let (l, r) = self.limits[i];
                (l.min(r), l.max(r))
            }
            None => {
                let v = self.eval(z);
                (v, v)
            }
        }
    }

    /// Density of the absolutely continuous part, defined away from
    /// breakpoints (zero on Cantor pieces and tails).
    pub fn derivative(&self, z: f64) -> f64 {
        match self.piece_at(z) {
            Some(i) => match &self.pieces[i] {
                Piece::Polynomial(p) => p.derivative().eval(z),
                Piece::Cantor(_) => 0.0,
            },
            None => 0.0,
        }
    }

    /// Breakpoints carrying a discontinuity above [`BVFunction::jump_tolerance`].
    pub fn jump_atoms(&self) -> Vec<JumpAtom> {
        let tol = self.jump_tolerance();
        self.breakpoints
            .iter()
            .zip(&self.limits)
            .filter(|(_, (l, r))| (r - l).abs() > tol)
            .map(|(&z, (l, r))| JumpAtom { location: z, height: r - l })
            .collect()
    }

    /// `(piece index, lo, hi)` for every piece overlapping the window in a set
    /// of positive length.
    pub fn segments(&self, window: &Window) -> Vec<(usize, f64, f64)> {
        (0..self.pieces.len())
            .filter_map(|i| {
                let (a, b) = self.piece_interval(i);
                window.clip(a, b).map(|(lo, hi)| (i, lo, hi))
            })
            .collect()
    }

    /// Variation of the continuous part of piece `i` over `[lo, hi]`.
    pub fn piece_variation(&self, i: usize, lo: f64, hi: f64) -> f64 {
        let (a, b) = self.piece_interval(i);
        self.pieces[i].variation(a, b, lo, hi)
    }

    /// `|Df|(B)`, in closed form: jump atoms inside `B` plus per-piece variation
    /// (stationary points for polynomials, the outer polynomial over the
    /// traversed Cantor range for staircases).
    pub fn total_variation(&self, window: &Window) -> Result<f64> {
        window.ensure_nonempty()?;
        let jumps: f64 = self
            .jump_atoms()
            .iter()
            .filter(|j| window.contains(j.location))
            .map(|j| j.height.abs())
            .sum();
        let continuous: f64 = self
            .segments(window)
            .into_iter()
            .map(|(i, lo, hi)| self.piece_variation(i, lo, hi))
            .sum();
        Ok(jumps + continuous)
    }

    /// `|D^c f|(B)`.
    pub fn cantor_variation(&self, window: &Window) -> f64 {
        self.segments(window)
            .into_iter()
            .filter(|(i, _, _)| self.pieces[*i].is_cantor())
            .map(|(i, lo, hi)| self.piece_variation(i, lo, hi))
            .sum()
    }

    pub fn decompose(&self) -> Decomposition {
        let tol = self.jump_tolerance();
        let mut ac_pieces = Vec::with_capacity(self.pieces.len());
        let mut cantor_atoms = Vec::new();
        let mut staircases = Vec::new();
        let mut level = self.left_tail;
        for (i, piece) in self.pieces.iter().enumerate() {
            let (a, b) = self.piece_interval(i);
            match piece {
                Piece::Polynomial(p) => {
                    ac_pieces.push(Piece::Polynomial(p.add_constant(level - p.eval(a))));
                    level += p.eval(b) - p.eval(a);
                }
                Piece::Cantor(c) => {
                    ac_pieces.push(Piece::constant(level));
                    let variation = c.outer.variation(0.0, 1.0);
                    if variation > tol {
                        cantor_atoms.push(CantorAtom {
                            start: a,
                            end: b,
                            mass: c.outer.eval(c.t_at(1.0)) - c.outer.eval(c.t_at(0.0)),
                            variation,
                        });
                        staircases.push((a, b, c.clone()));
                    }
                }
            }
        }
        let ac = if self.breakpoints.is_empty() {
            BVFunction::constant(self.left_tail)
        } else {
            BVFunction::new(self.breakpoints.clone(), ac_pieces, self.left_tail, level)
                .expect("ac part inherits a valid layout")
        };
        Decomposition { ac, jump_atoms: self.jump_atoms(), cantor_atoms, staircases }
    }

    /// `\int_R f` for a compactly supported function.
    pub fn integral(&self) -> Result<f64> {
        if self.left_tail != 0.0 || self.right_tail != 0.0 {
            return Err(Error::Precondition("integral of a function with non-zero tails".into()));
        }
        Ok(self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, piece)| {
                let (a, b) = self.piece_interval(i);
                match piece {
                    Piece::Polynomial(p) => p.integral(a, b),
                    Piece::Cantor(c) => (b - a) * cantor::integrate_poly(&c.outer),
                }
            })
            .sum())
    }

    /// `z -> f(-z)`.
    pub fn reflect(&self) -> BVFunction {
        let breakpoints = self.breakpoints.iter().rev().map(|z| -z).collect();
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| match p {
                Piece::Polynomial(q) => Piece::Polynomial(q.dilate(-1.0)),
                Piece::Cantor(c) => Piece::Cantor(CantorPiece {
                    outer: c.outer.clone(),
                    orientation: match c.orientation {
                        Orientation::Increasing => Orientation::Decreasing,
                        Orientation::Decreasing => Orientation::Increasing,
                    },
                }),
            })
            .collect();
        BVFunction::new(breakpoints, pieces, self.right_tail, self.left_tail)
            .expect("reflection preserves validity")
    }

    /// `z -> k f(z / s)` for `s > 0`.
    pub fn rescale(&self, s: f64, k: f64) -> BVFunction {
        let breakpoints = self.breakpoints.iter().map(|z| z * s).collect();
        let pieces = self
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Polynomial(q) => Piece::Polynomial(q.dilate(1.0 / s).scale(k)),
                Piece::Cantor(c) => Piece::Cantor(CantorPiece {
                    outer: c.outer.scale(k),
                    orientation: c.orientation,
                }),
            })
            .collect();
        BVFunction::new(breakpoints, pieces, k * self.left_tail, k * self.right_tail)
            .expect("rescaling preserves validity")
    }

    /// `f + c`.
    pub fn shift(&self, c: f64) -> BVFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Polynomial(q) => Piece::Polynomial(q.add_constant(c)),
                Piece::Cantor(cp) => Piece::Cantor(CantorPiece {
                    outer: cp.outer.add_constant(c),
                    orientation: cp.orientation,
                }),
            })
            .collect();
        if self.breakpoints.is_empty() {
            return BVFunction::constant(self.left_tail + c);
        }
        BVFunction::new(self.breakpoints.clone(), pieces, self.left_tail + c, self.right_tail + c)
            .expect("shift preserves validity")
    }
}
