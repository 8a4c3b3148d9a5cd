//! Rigidity of the perimeter inequality for a profile.
//!
//! Equality cases are all translates of `F_ℓ` exactly when `{ℓ^∧ > 0}` is an
//! interval `J` and `ℓ` is Sobolev on `J`. Every violation of this condition
//! is reported with a witness the `counterexamples` module can turn into a
//! non-trivial equality case.

use std::fmt;

use crate::bv_profile::Profile;
use crate::window::Window;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FailureWitness {
    /// `ℓ^∧(at) = 0` with positivity on both sides.
    Disconnected { at: f64 },
    /// A jump atom of `ℓ` inside a positivity interval.
    Jump { at: f64, lower: f64, upper: f64 },
    /// A Cantor piece meeting a positivity interval on `(start, end)`.
    CantorMass { start: f64, end: f64, mass: f64 },
}

impl fmt::Display for FailureWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureWitness::Disconnected { at } => write!(f, "Disconnected({at})"),
            FailureWitness::Jump { at, lower, upper } => write!(f, "Jump({at}, {lower}, {upper})"),
            FailureWitness::CantorMass { start, end, mass } => {
                write!(f, "CantorMass(({start},{end}), {mass})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityVerdict {
    pub rigid: bool,
    /// `J`, present when `{ℓ^∧ > 0}` is a single interval.
    pub interval: Option<(f64, f64)>,
    pub failures: Vec<FailureWitness>,
}

impl fmt::Display for RigidityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rigid {
            write!(f, "RIGID")?;
        } else {
            write!(f, "NOT RIGID")?;
        }
        if let Some((a, b)) = self.interval {
            write!(f, ", J=({a},{b})")?;
        }
        for w in &self.failures {
            write!(f, "\n  {w}")?;
        }
        Ok(())
    }
}

pub fn decide(profile: &Profile) -> RigidityVerdict {
    let intervals = profile.positivity_intervals();
    let f = profile.base();
    let tol = f.jump_tolerance();
    let mut failures = Vec::new();

    for pair in intervals.windows(2) {
        failures.push(FailureWitness::Disconnected { at: 0.5 * (pair[0].1 + pair[1].0) });
    }
    for &(s, e) in &intervals {
        let window = Window::open(s, e);
        for j in f.jump_atoms().into_iter().filter(|j| window.contains(j.location)) {
            let (lower, upper) = f.approx_limits(j.location);
            failures.push(FailureWitness::Jump { at: j.location, lower, upper });
        }
        for (i, lo, hi) in f.segments(&window) {
            if !f.pieces()[i].is_cantor() || f.piece_variation(i, lo, hi) <= tol {
                continue;
            }
            let mass = f.left_limit(hi) - f.right_limit(lo);
            failures.push(FailureWitness::CantorMass { start: lo, end: hi, mass });
        }
    }
    failures.sort_by(|a, b| location(a).total_cmp(&location(b)));

    RigidityVerdict {
        rigid: failures.is_empty(),
        interval: (intervals.len() == 1).then(|| intervals[0]),
        failures,
    }
}

fn location(w: &FailureWitness) -> f64 {
    match *w {
        FailureWitness::Disconnected { at } | FailureWitness::Jump { at, .. } => at,
        FailureWitness::CantorMass { start, .. } => start,
    }
}

/// `H^{n-1}` of the vertical part of `∂*F_ℓ` over `Ω × R^{n-1}`, which is
/// `|D^s ℓ|(Ω)`.
pub fn vertical_parts_measure(profile: &Profile, window: &Window) -> f64 {
    profile.decompose().jump_mass(window) + profile.base().cantor_variation(window)
}
