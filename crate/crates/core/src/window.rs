//! Intervals of the real line used as measurement windows `B`.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    Unbounded,
    Open(f64),
    Closed(f64),
}

impl Bound {
    fn value(self, unbounded: f64) -> f64 {
        match self {
            Bound::Unbounded => unbounded,
            Bound::Open(x) | Bound::Closed(x) => x,
        }
    }
}

/// A (possibly unbounded, possibly half-open) interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Bound,
    pub hi: Bound,
}

impl Window {
    pub fn real_line() -> Self {
        Window { lo: Bound::Unbounded, hi: Bound::Unbounded }
    }

    pub fn open(a: f64, b: f64) -> Self {
        Window { lo: Bound::Open(a), hi: Bound::Open(b) }
    }

    pub fn closed(a: f64, b: f64) -> Self {
        Window { lo: Bound::Closed(a), hi: Bound::Closed(b) }
    }

    /// The single point `{z}`.
    pub fn point(z: f64) -> Self {
        Window::closed(z, z)
    }

    pub fn lower(&self) -> f64 {
        self.lo.value(f64::NEG_INFINITY)
    }

    pub fn upper(&self) -> f64 {
        self.hi.value(f64::INFINITY)
    }

    pub fn is_empty(&self) -> bool {
        let (a, b) = (self.lower(), self.upper());
        a > b || (a == b && !matches!((self.lo, self.hi), (Bound::Closed(_), Bound::Closed(_))))
    }

    pub fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::Precondition(format!("empty interval {self}")))
        } else {
            Ok(())
        }
    }

    pub fn contains(&self, z: f64) -> bool {
        let above = match self.lo {
            Bound::Unbounded => true,
            Bound::Open(a) => z > a,
            Bound::Closed(a) => z >= a,
        };
        let below = match self.hi {
            Bound::Unbounded => true,
            Bound::Open(b) => z < b,
            Bound::Closed(b) => z <= b,
        };
        above && below
    }

    /// Overlap of the closure of the window with `[a, b]`, if it has positive
    /// length.
    pub fn clip(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        let lo = a.max(self.lower());
        let hi = b.min(self.upper());
        (hi > lo).then_some((lo, hi))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lo {
            Bound::Unbounded => write!(f, "(-inf")?,
            Bound::Open(a) => write!(f, "({a}")?,
            Bound::Closed(a) => write!(f, "[{a}")?,
        }
        match self.hi {
            Bound::Unbounded => write!(f, ",inf)"),
            Bound::Open(b) => write!(f, ",{b})"),
            Bound::Closed(b) => write!(f, ",{b}]"),
        }
    }
}
