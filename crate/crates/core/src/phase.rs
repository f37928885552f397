//! Exact unit phases `exp(2πi·turns)·exp(iπθ·k)`.
//!
//! `turns` is a rational kept in `[0,1)`; `k` counts half-turns of the
//! irrational parameter θ. Products add exponents, so cocycle identities are
//! compared structurally rather than in floating point.

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phase {
    pub turns: Ratio<i64>,
    pub theta: i64,
}

fn reduce(r: Ratio<i64>) -> Ratio<i64> {
    let f = r - r.floor();
    if f < Ratio::zero() {
        f + Ratio::one()
    } else {
        f
    }
}

impl Phase {
    pub fn one() -> Self {
        Phase { turns: Ratio::zero(), theta: 0 }
    }

    pub fn turns(p: i64, q: i64) -> Self {
        Phase { turns: reduce(Ratio::new(p, q)), theta: 0 }
    }

    pub fn minus_one() -> Self {
        Self::turns(1, 2)
    }

    pub fn i() -> Self {
        Self::turns(1, 4)
    }

    /// `exp(iπθ·k)`.
    pub fn theta(k: i64) -> Self {
        Phase { turns: Ratio::zero(), theta: k }
    }

    pub fn sign(negative: bool) -> Self {
        if negative {
            Self::minus_one()
        } else {
            Self::one()
        }
    }

    pub fn is_one(&self) -> bool {
        self.turns.is_zero() && self.theta == 0
    }

    pub fn mul(&self, other: &Phase) -> Phase {
        Phase { turns: reduce(self.turns + other.turns), theta: self.theta + other.theta }
    }

    pub fn conj(&self) -> Phase {
        Phase { turns: reduce(-self.turns), theta: -self.theta }
    }

    pub fn pow(&self, n: i64) -> Phase {
        Phase { turns: reduce(self.turns * n), theta: self.theta * n }
    }

    /// θk is reduced mod 2 before scaling by π; the FMA remainder restores
    /// the rounding error of the product, so the angle stays accurate for large k.
    pub fn angle(&self, theta: f64) -> f64 {
        let k = self.theta as f64;
        let p = theta * k;
        let err = theta.mul_add(k, -p);
        let half_turns = (p - 2.0 * (p / 2.0).round()) + err;
        let t = *self.turns.numer() as f64 / *self.turns.denom() as f64;
        PI * (2.0 * t + half_turns)
    }

    pub fn to_complex(&self, theta: f64) -> Complex64 {
        if self.theta == 0 {
            // Exact values on the quarter turns keep ±1, ±i free of rounding.
            let d = *self.turns.denom();
            let n = *self.turns.numer();
            if 4 % d == 0 {
                return match n * (4 / d) {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                };
            }
        }
        Complex64::from_polar(1.0, self.angle(theta))
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::one()
    }
}
