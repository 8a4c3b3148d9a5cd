//! Equality-case witnesses `E ≠ F_ℓ + τ` with `P(E) = P(F_ℓ)`, and the
//! staircase discretisation used to certify the Cantor witness.

use crate::bv_profile::{BVFunction, Piece, Profile};
use crate::error::{Error, Result};
use crate::symmetral::{
    first_axis, perimeter_symmetral, perimeter_tube, Drift, RadiusCoupling, TubeSet,
};
use crate::window::Window;

/// Largest supported discretisation depth.
pub const MAX_DEPTH: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Split,
    Jump,
    Cantor,
    Staircase,
}

impl WitnessKind {
    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::Split => "split",
            WitnessKind::Jump => "jump",
            WitnessKind::Cantor => "cantor",
            WitnessKind::Staircase => "staircase",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "split" => Some(WitnessKind::Split),
            "jump" => Some(WitnessKind::Jump),
            "cantor" => Some(WitnessKind::Cantor),
            "staircase" => Some(WitnessKind::Staircase),
            _ => None,
        }
    }
}

/// Construction parameters of a witness.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub z_bar: Option<f64>,
    pub tau: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub direction: Vec<f64>,
    pub depth: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSet {
    pub tube: TubeSet,
    pub kind: WitnessKind,
    pub provenance: Provenance,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn unit_direction(profile: &Profile, tau: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = profile.dimension() - 1;
    if tau.len() != m {
        return Err(Error::Precondition(format!("τ has {} components, expected {m}", tau.len())));
    }
    let t = norm(tau);
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Precondition("τ must be a non-zero finite vector".into()));
    }
    let mut e: Vec<f64> = tau.iter().map(|x| x / t).collect();
    // Renormalise once more so that |e| = 1 to the last bit in practice.
    let s = norm(&e);
    e.iter_mut().for_each(|x| *x /= s);
    Ok((t, e))
}

fn shifted_tube(profile: &Profile, z_bar: f64, tau: &[f64]) -> Result<(TubeSet, Vec<f64>)> {
    let (t, e) = unit_direction(profile, tau)?;
    let drift = Drift::from_function(BVFunction::step(z_bar, 0.0, t)?);
    Ok((TubeSet::new(profile.clone(), drift, e.clone())?, e))
}

/// Translates the part of `F_ℓ` above `z̄` by `τ`; needs `ℓ^∧(z̄) = 0` and
/// positivity on both sides of `z̄`.
pub fn split_witness(profile: &Profile, z_bar: f64, tau: &[f64]) -> Result<WitnessSet> {
    let intervals = profile.positivity_intervals();
    if intervals.iter().any(|&(a, b)| a < z_bar && z_bar < b) {
        let lower = profile.approx_limits(z_bar).0;
        return Err(Error::Precondition(format!("ℓ^∧({z_bar}) = {lower} > 0")));
    }
    let left = intervals.iter().any(|&(a, _)| a < z_bar);
    let right = intervals.iter().any(|&(_, b)| b > z_bar);
    if !(left && right) {
        return Err(Error::Precondition(format!(
            "{{ℓ^∧ > 0}} must meet both sides of {z_bar}"
        )));
    }
    let (tube, e) = shifted_tube(profile, z_bar, tau)?;
    Ok(WitnessSet {
        tube,
        kind: WitnessKind::Split,
        provenance: Provenance { z_bar: Some(z_bar), tau: Some(tau.to_vec()), direction: e, ..Default::default() },
    })
}

/// Shifts the part above a jump atom `z̄` by `τ` with
/// `0 < |τ| < r^∨(z̄) - r^∧(z̄)`, keeping the jump plane nested.
pub fn jump_witness(profile: &Profile, z_bar: f64, tau: &[f64]) -> Result<WitnessSet> {
    if !profile.base().jump_atoms().iter().any(|j| j.location == z_bar) {
        return Err(Error::Precondition(format!("ℓ has no jump atom at {z_bar}")));
    }
    let (r_lo, r_hi) = profile.radius().approx_limits(z_bar);
    let t = norm(tau);
    if !(t > 0.0 && t < r_hi - r_lo) {
        return Err(Error::Precondition(format!(
            "|τ| = {t} outside (0, {})",
            r_hi - r_lo
        )));
    }
    let (tube, e) = shifted_tube(profile, z_bar, tau)?;
    Ok(WitnessSet {
        tube,
        kind: WitnessKind::Jump,
        provenance: Provenance { z_bar: Some(z_bar), tau: Some(tau.to_vec()), direction: e, ..Default::default() },
    })
}

/// First Cantor piece with positive variation, as `(a, b)`, that lies inside a
/// positivity interval.
pub fn cantor_interval(profile: &Profile) -> Result<(f64, f64)> {
    let f = profile.base();
    let tol = f.jump_tolerance();
    let intervals = profile.positivity_intervals();
    let mut found_any = false;
    for (i, piece) in f.pieces().iter().enumerate() {
        let (a, b) = f.piece_interval(i);
        if !piece.is_cantor() || f.piece_variation(i, a, b) <= tol {
            continue;
        }
        found_any = true;
        if intervals.iter().any(|&(s, e)| s <= a && b <= e) {
            return Ok((a, b));
        }
    }
    if found_any {
        Err(Error::Precondition("ℓ vanishes inside every Cantor piece".into()))
    } else {
        Err(Error::Precondition("ℓ has no Cantor atom".into()))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("λ = {lambda} outside (0, 1)")))
    }
}

fn resolve_direction(profile: &Profile, e: Option<&[f64]>) -> Vec<f64> {
    e.map(<[f64]>::to_vec).unwrap_or_else(|| first_axis(profile.dimension() - 1))
}

/// `g = λ (r - r(a+))` on the first admissible Cantor piece `(a, b)`, zero to
/// the left and frozen to the right.
pub fn cantor_witness(profile: &Profile, lambda: f64, e: Option<&[f64]>) -> Result<WitnessSet> {
    check_lambda(lambda)?;
    let (a, b) = cantor_interval(profile)?;
    let anchor = profile.radius().right_limit(a);
    let drift = Drift::new(
        BVFunction::constant(0.0),
        vec![RadiusCoupling { start: a, end: b, lambda, anchor }],
    )?;
    let direction = resolve_direction(profile, e);
    let tube = TubeSet::new(profile.clone(), drift, direction.clone())?;
    Ok(WitnessSet {
        tube,
        kind: WitnessKind::Cantor,
        provenance: Provenance { lambda: Some(lambda), direction, ..Default::default() },
    })
}

/// A piecewise-constant approximant `ℓ^k` of `ℓ` on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub profile: Profile,
    pub interval: (f64, f64),
    pub depth: u32,
    /// Partition of `[a, b]`: dyadic grid joined with the breakpoints of `ℓ`.
    pub nodes: Vec<f64>,
}

/// Samples `ℓ` at the nodes of the depth-`k` dyadic grid on `[a, b]` (joined
/// with the breakpoints of `ℓ`), with left-closed right-open constant pieces.
/// Outside `[a, b]` the profile is unchanged.
pub fn discretize_on(profile: &Profile, a: f64, b: f64, k: u32) -> Result<Discretization> {
    if !(a < b) {
        return Err(Error::Precondition(format!("empty interval ({a},{b})")));
    }
    if k > MAX_DEPTH {
        return Err(Error::Unsupported(format!("depth {k} > {MAX_DEPTH}")));
    }
    let f = profile.base();
    let inner = Window::open(a, b);
    if let Some(j) = f.jump_atoms().iter().find(|j| inner.contains(j.location)) {
        return Err(Error::Precondition(format!("jump atom at {} inside ({a},{b})", j.location)));
    }
    for &end in &[a, b] {
        if let Some(i) = f.piece_at(end) {
            if f.pieces()[i].is_cantor() && f.piece_interval(i).0 != end {
                return Err(Error::Unsupported(format!(
                    "interval end {end} splits a Cantor piece"
                )));
            }
        }
    }

    let cells = 1u64 << k;
    let mut nodes: Vec<f64> = (0..=cells)
        .map(|j| if j == cells { b } else { a + (b - a) * j as f64 / cells as f64 })
        .collect();
    nodes.extend(f.breakpoints().iter().copied().filter(|&z| z > a && z < b));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut breakpoints = Vec::new();
    let mut pieces = Vec::new();
    let old = f.breakpoints();
    for (i, &z) in old.iter().enumerate() {
        if z >= a {
            break;
        }
        breakpoints.push(z);
        // piece (z_i, min(z_{i+1}, a)) keeps its polynomial
        pieces.push(f.pieces().get(i).cloned().unwrap_or_else(|| Piece::constant(0.0)));
    }
    for w in nodes.windows(2) {
        breakpoints.push(w[0]);
        pieces.push(Piece::constant(f.eval(w[0])));
    }
    breakpoints.push(b);
    let tail: Vec<usize> = (0..old.len()).filter(|&i| old[i] > b).collect();
    if let Some(&first) = tail.first() {
        // piece straddling b continues the original one
        let straddle = first.checked_sub(1).and_then(|i| f.pieces().get(i).cloned());
        pieces.push(straddle.unwrap_or_else(|| Piece::constant(0.0)));
        for &i in &tail {
            breakpoints.push(old[i]);
            if let Some(p) = f.pieces().get(i) {
                pieces.push(p.clone());
            }
        }
    }
    let base = BVFunction::compact(breakpoints, pieces)?;
    Ok(Discretization { profile: Profile::new(base, profile.dimension())?, interval: (a, b), depth: k, nodes })
}

/// [`discretize_on`] over the whole support.
pub fn discretize_profile(profile: &Profile, k: u32) -> Result<Discretization> {
    let (a, b) = profile.support();
    discretize_on(profile, a, b, k)
}

/// The staircase set `E^k` with drift `λ (r_k(z_i) - r_base)` on each cell of
/// the discretisation, zero to the left and frozen to the right.
pub fn staircase_witness(
    disc: &Discretization,
    lambda: f64,
    e: Option<&[f64]>,
    r_base: f64,
) -> Result<WitnessSet> {
    check_lambda(lambda)?;
    let profile = &disc.profile;
    let f = profile.base();
    let r = profile.radius();
    let nodes = &disc.nodes;
    for w in nodes.windows(2) {
        let i = f.piece_at(0.5 * (w[0] + w[1])).expect("nodes lie in the support");
        if !matches!(&f.pieces()[i], Piece::Polynomial(p) if p.is_constant()) {
            return Err(Error::Precondition(format!(
                "profile is not piecewise constant on ({},{})",
                w[0], w[1]
            )));
        }
    }
    let values: Vec<f64> = nodes[..nodes.len() - 1]
        .iter()
        .map(|&z| lambda * (r.eval(z) - r_base))
        .collect();
    let last = *values.last().expect("at least one cell");
    let drift_fn = BVFunction::new(
        nodes.clone(),
        values.iter().map(|&v| Piece::constant(v)).collect(),
        0.0,
        last,
    )?;
    let direction = resolve_direction(profile, e);
    let tube = TubeSet::new(profile.clone(), Drift::from_function(drift_fn), direction.clone())?;

    for &z in nodes {
        let d = (tube.drift_right(z) - tube.drift_left(z)).abs();
        let (r0, r1) = (r.left_limit(z), r.right_limit(z));
        let slack = 1e-12 * (1.0 + r0.max(r1));
        if d + r0.min(r1) > r0.max(r1) + slack {
            return Err(Error::Precondition(format!(
                "slice disks at {z} are not nested (shift {d}, radii {r0}, {r1})"
            )));
        }
    }
    Ok(WitnessSet {
        tube,
        kind: WitnessKind::Staircase,
        provenance: Provenance {
            lambda: Some(lambda),
            direction,
            depth: Some(disc.depth),
            ..Default::default()
        },
    })
}

/// One depth of the staircase certification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificationRow {
    pub depth: u32,
    pub perimeter_symmetral: f64,
    pub perimeter_staircase: f64,
}

/// `(k, P(F_{ℓ^k}; B), P(E^k; B))` for each requested depth, discretising on
/// `[a, b]` and anchoring the drift at `r(a+)`.
pub fn certify(
    profile: &Profile,
    interval: (f64, f64),
    lambda: f64,
    e: Option<&[f64]>,
    window: &Window,
    depths: impl IntoIterator<Item = u32>,
) -> Result<Vec<CertificationRow>> {
    let (a, b) = interval;
    let r_base = profile.radius().right_limit(a);
    depths
        .into_iter()
        .map(|k| {
            let disc = discretize_on(profile, a, b, k)?;
            let w = staircase_witness(&disc, lambda, e, r_base)?;
            Ok(CertificationRow {
                depth: k,
                perimeter_symmetral: perimeter_symmetral(&disc.profile, window)?.total,
                perimeter_staircase: perimeter_tube(&w.tube, window)?.total,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv_profile::{CantorPiece, Orientation};
    use crate::poly::Poly;
    use crate::symmetral::check_inequality;
    use std::f64::consts::PI;

    fn profile(bp: Vec<f64>, pieces: Vec<Piece>) -> Profile {
        Profile::new(BVFunction::compact(bp, pieces).unwrap(), 3).unwrap()
    }

    fn step() -> Profile {
        profile(vec![0.0, 1.0, 2.0], vec![Piece::constant(4.0 * PI), Piece::constant(PI)])
    }

    fn two_components() -> Profile {
        profile(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![Piece::constant(PI), Piece::constant(0.0), Piece::constant(PI)],
        )
    }

    fn cantor_profile() -> Profile {
        let outer = Poly::new(vec![PI, 2.0 * PI, PI]);
        profile(
            vec![0.0, 1.0],
            vec![Piece::Cantor(CantorPiece { outer, orientation: Orientation::Increasing })],
        )
    }

    #[test]
    fn split_examples() {
        for tau in [[5.0, 0.0], [0.1, 0.0]] {
            let w = split_witness(&two_components(), 1.5, &tau).unwrap();
            let c = check_inequality(&w.tube).unwrap();
            assert!(c.gap.abs() < 1e-9 && (c.p_e - 8.0 * PI).abs() < 1e-9);
            assert!(w.tube.drift_is_nonconstant());
        }
        let ball = profile(vec![-1.0, 1.0], vec![Piece::polynomial(vec![PI, 0.0, -PI])]);
        assert!(split_witness(&ball, 0.0, &[1.0, 0.0]).is_err());
        assert!(split_witness(&two_components(), 3.5, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn jump_examples() {
        for t in [0.5, 0.999] {
            let w = jump_witness(&step(), 1.0, &[t, 0.0]).unwrap();
            let c = check_inequality(&w.tube).unwrap();
            assert!(c.gap.abs() < 1e-9, "{t}: {}", c.gap);
            assert!((c.p_e - 14.0 * PI).abs() < 1e-9);
        }
        assert!(jump_witness(&step(), 1.0, &[1.5, 0.0]).is_err());
        assert!(jump_witness(&step(), 1.0, &[1.0, 0.0]).is_err());
        assert!(jump_witness(&step(), 0.5, &[0.5, 0.0]).is_err());
    }

    #[test]
    fn cantor_examples() {
        let w = Window::open(0.0, 1.0);
        for lambda in [0.5, 0.99] {
            let wit = cantor_witness(&cantor_profile(), lambda, Some(&[1.0, 0.0])).unwrap();
            let pe = perimeter_tube(&wit.tube, &w).unwrap().total;
            let pf = perimeter_symmetral(wit.tube.profile(), &w).unwrap().total;
            assert!((pe - 6.0 * PI).abs() < 1e-9 && (pf - 6.0 * PI).abs() < 1e-9);
            assert!(wit.tube.drift_is_nonconstant());
        }
        assert!(cantor_witness(&cantor_profile(), 1.0, None).is_err());
        assert!(cantor_witness(&step(), 0.5, None).is_err());
    }

    #[test]
    fn depth_one_discretisation() {
        let d = discretize_profile(&cantor_profile(), 1).unwrap();
        assert_eq!(d.nodes, vec![0.0, 0.5, 1.0]);
        let f = d.profile.base();
        assert_eq!(f.eval(0.25), PI);
        assert!((f.eval(0.75) - 2.25 * PI).abs() < 1e-14);
        let jumps = f.jump_atoms();
        assert!((jumps[1].height - 1.25 * PI).abs() < 1e-14);
        assert!(discretize_profile(&step(), 3).is_err());
    }

    #[test]
    fn constant_profile_discretises_to_itself() {
        let cyl = profile(vec![0.0, 2.0], vec![Piece::constant(PI)]);
        let d = discretize_profile(&cyl, 5).unwrap();
        for i in 0..=40 {
            let z = -0.5 + 0.075 * i as f64;
            assert_eq!(d.profile.eval(z), cyl.eval(z));
        }
    }

    #[test]
    fn discretisation_keeps_outside_pieces() {
        let p = profile(
            vec![-1.0, 0.0, 1.0, 2.0],
            vec![Piece::polynomial(vec![1.0, 1.0]), Piece::polynomial(vec![1.0, 1.0]), Piece::constant(2.0)],
        );
        let d = discretize_on(&p, -0.5, 0.5, 2).unwrap();
        assert_eq!(d.profile.eval(-0.75), p.eval(-0.75));
        assert_eq!(d.profile.eval(0.75), p.eval(0.75));
        assert_eq!(d.profile.eval(1.5), 2.0);
        assert_eq!(d.profile.eval(0.3), p.eval(0.25));
    }

    #[test]
    fn staircase_equality_at_depth_one() {
        let d = discretize_profile(&cantor_profile(), 1).unwrap();
        let r_base = cantor_profile().radius().right_limit(0.0);
        let w = staircase_witness(&d, 0.5, None, r_base).unwrap();
        // drift jump λ Δr = 0.5 * (1.5 - 1) = 0.25 at z = 1/2
        let jump = w.tube.drift_right(0.5) - w.tube.drift_left(0.5);
        assert!((jump - 0.25).abs() < 1e-15);
        let c = check_inequality(&w.tube).unwrap();
        assert_eq!(c.gap, 0.0);
        assert!(staircase_witness(&d, 0.5, None, 5.0).is_err());
    }
}
