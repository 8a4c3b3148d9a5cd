//! Dense real polynomials with the handful of exact operations the BV calculus
//! needs: evaluation, differentiation, integration and real-root isolation.

use serde::{Deserialize, Serialize};

/// Maximum supported degree of a polynomial piece.
pub const MAX_DEGREE: usize = 8;

/// A polynomial `c[0] + c[1] x + ... + c[d] x^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when every coefficient beyond the constant vanishes.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(0.0);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k + 1) as f64),
        );
        Poly::new(out)
    }

    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(hi) - anti.eval(lo)
    }

    pub fn scale(&self, factor: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn add_constant(&self, c: f64) -> Poly {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        Poly::new(coeffs)
    }

    /// The polynomial `x -> p(s x)`.
    pub fn dilate(&self, s: f64) -> Poly {
        let mut pow = 1.0;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            coeffs.push(c * pow);
            pow *= s;
        }
        Poly::new(coeffs)
    }

    /// Real roots in `[lo, hi]` at which the polynomial changes sign or
    /// evaluates to exactly zero. Tangential roots that only touch zero up to
    /// rounding are not reported; see [`Poly::critical_points`].
    pub fn roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if lo > hi || self.is_constant() {
            return Vec::new();
        }
        if self.degree() == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            return if (lo..=hi).contains(&r) { vec![r] } else { Vec::new() };
        }
        let mut knots = vec![lo];
        knots.extend(
            self.derivative()
                .roots_in(lo, hi)
                .into_iter()
                .filter(|&c| c > lo && c < hi),
        );
        knots.push(hi);

        let mut roots: Vec<f64> = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa == 0.0 {
                roots.push(a);
            } else if fb != 0.0 && fa.signum() != fb.signum() {
                roots.push(self.bisect(a, b, fa));
            }
        }
        if self.eval(hi) == 0.0 {
            roots.push(hi);
        }
        roots.dedup_by(|a, b| (*a - *b).abs() <= 4.0 * f64::EPSILON * a.abs().max(1.0));
        roots
    }

    fn bisect(&self, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.eval(m);
            if fm == 0.0 {
                return m;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Interior stationary points in the open interval `(lo, hi)`, sorted.
    pub fn critical_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.derivative()
            .roots_in(lo, hi)
            .into_iter()
            .filter(|&c| c > lo && c < hi)
            .collect()
    }

    /// Endpoints plus interior stationary points: the polynomial is monotone
    /// between consecutive returned nodes.
    pub fn monotone_nodes(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut nodes = vec![lo];
        nodes.extend(self.critical_points(lo, hi));
        nodes.push(hi);
        nodes
    }

    /// Total variation over `[lo, hi]`.
    pub fn variation(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        self.monotone_nodes(lo, hi)
            .windows(2)
            .map(|w| (self.eval(w[1]) - self.eval(w[0])).abs())
            .sum()
    }

    /// `(min, max)` over `[lo, hi]`.
    pub fn range(&self, lo: f64, hi: f64) -> (f64, f64) {
        self.monotone_nodes(lo, hi)
            .into_iter()
            .map(|x| self.eval(x))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), v| {
                (mn.min(v), mx.max(v))
            })
    }
}
