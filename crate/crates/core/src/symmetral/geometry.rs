use crate::bv_profile::unit_ball_volume;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// `H^{n-2}` of the boundary of an `(n-1)`-ball of radius `r`.
pub fn sphere_boundary_measure(n: usize, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Precondition(format!("dimension {n} < 2")));
    }
    if r.is_nan() || r < 0.0 {
        return Err(Error::Precondition(format!("negative radius {r}")));
    }
    if n == 2 {
        return Ok(if r > 0.0 { 2.0 } else { 0.0 });
    }
    Ok((n - 1) as f64 * unit_ball_volume(n - 1) * r.powi(n as i32 - 2))
}

/// Area of the intersection of two planar disks of radii `r1`, `r2` whose
/// centres are `d` apart.
pub fn lens_area(d: f64, r1: f64, r2: f64) -> f64 {
    let (big, small) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
    if small <= 0.0 || d >= big + small {
        return 0.0;
    }
    if d <= big - small {
        return PI * small * small;
    }
    let a1 = ((d * d + small * small - big * big) / (2.0 * d * small)).clamp(-1.0, 1.0).acos();
    let a2 = ((d * d + big * big - small * small) / (2.0 * d * big)).clamp(-1.0, 1.0).acos();
    let k = (-d + small + big) * (d + small - big) * (d - small + big) * (d + small + big);
    small * small * a1 + big * big * a2 - 0.5 * k.max(0.0).sqrt()
}

/// `H^{n-1}(D^- Δ D^+)` for the one-sided slice disks at a jump plane.
///
/// `l_minus`, `l_plus` are the slice measures, `r_minus`, `r_plus` the radii and
/// `d` the distance between the centres.
pub fn disk_symmetric_difference(
    n: usize,
    l_minus: f64,
    l_plus: f64,
    r_minus: f64,
    r_plus: f64,
    d: f64,
) -> Result<f64> {
    let (r_small, r_big) = (r_minus.min(r_plus), r_minus.max(r_plus));
    if r_big <= 0.0 {
        return Ok(0.0);
    }
    if d + r_small <= r_big {
        return Ok((l_plus - l_minus).abs());
    }
    match n {
        2 => {
            let overlap = (r_minus.min(d + r_plus) - (-r_minus).max(d - r_plus)).max(0.0);
            Ok(2.0 * r_minus + 2.0 * r_plus - 2.0 * overlap)
        }
        3 => Ok(PI * r_minus * r_minus + PI * r_plus * r_plus - 2.0 * lens_area(d, r_minus, r_plus)),
        _ if d >= r_minus + r_plus => Ok(l_minus + l_plus),
        _ => Err(Error::Unsupported(format!(
            "overlapping non-nested slice disks in dimension {n}"
        ))),
    }
}
