//! Bounds on the additive coordinates `(x_n, y_n)`.
//!
//! Coordinates are taken with respect to the fitter colour being blue; a
//! domain built with `alpha_red > alpha_blue` swaps the roles of `x` and `y`
//! before checking.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdditiveDomain {
    m: f64,
    a1: f64,
    a2: f64,
    swapped: bool,
}

impl AdditiveDomain {
    pub fn new(m: usize, alpha_red: f64, alpha_blue: f64) -> Self {
        let swapped = alpha_red > alpha_blue;
        let (a1, a2) = if swapped {
            (alpha_blue, alpha_red)
        } else {
            (alpha_red, alpha_blue)
        };
        Self {
            m: m as f64,
            a1,
            a2,
            swapped,
        }
    }

    pub fn is_swapped(&self) -> bool {
        self.swapped
    }

    /// `(alpha_1, alpha_2)` after normalization, `alpha_1 < alpha_2`.
    pub fn alphas(&self) -> (f64, f64) {
        (self.a1, self.a2)
    }

    fn oriented(&self, x: f64, y: f64) -> (f64, f64) {
        if self.swapped {
            (y, x)
        } else {
            (x, y)
        }
    }

    fn check_sum(&self, x: f64, y: f64, tol: f64) -> Result<(), String> {
        let (m, a1, a2) = (self.m, self.a1, self.a2);
        let s = x + y;
        if s < 2.0 * m + a1 - tol || s > 2.0 * m + a2 + tol {
            return Err(format!(
                "x+y = {s} outside [{}, {}]",
                2.0 * m + a1,
                2.0 * m + a2
            ));
        }
        Ok(())
    }

    /// Degree lower bound `d` per vertex: lines
    /// `y >= 2m + a2 - x (d + a2)/(d + a1)` and
    /// `x <= 2m + a1 - y (d + a1)/(d + a2)`.
    fn check_lines(&self, x: f64, y: f64, d: f64, tol: f64) -> Result<(), String> {
        let (m, a1, a2) = (self.m, self.a1, self.a2);
        let y_min = 2.0 * m + a2 - x * (d + a2) / (d + a1);
        if y < y_min - tol {
            return Err(format!("y = {y} below {y_min} (degree bound {d})"));
        }
        let x_max = 2.0 * m + a1 - y * (d + a1) / (d + a2);
        if x > x_max + tol {
            return Err(format!("x = {x} above {x_max} (degree bound {d})"));
        }
        Ok(())
    }

    /// Membership in the parallelogram `D` (every vertex has degree `>= m`).
    pub fn check_d(&self, x: f64, y: f64, tol: f64) -> Result<(), String> {
        let (x, y) = self.oriented(x, y);
        self.check_sum(x, y, tol)?;
        self.check_lines(x, y, self.m, tol)
    }

    /// Membership in `D_0` (every vertex has a neighbour of its own colour,
    /// so degree `>= m + 1` counted within the colour). The upper line for `x`
    /// uses `m + 1 + a2` in the denominator; it implies the weaker bound with
    /// `m + 2 + a2` whenever `y >= 0`.
    pub fn check_d0(&self, x: f64, y: f64, tol: f64) -> Result<(), String> {
        let (x, y) = self.oriented(x, y);
        self.check_sum(x, y, tol)?;
        self.check_lines(x, y, self.m + 1.0, tol)
    }

    /// Weaker published form of the `D_0` upper line for `x`.
    pub fn d0_x_upper_loose(&self, y: f64) -> f64 {
        let (m, a1, a2) = (self.m, self.a1, self.a2);
        2.0 * m + a1 - y * (m + 1.0 + a1) / (m + 2.0 + a2)
    }

    /// Affine parametrization of `D` by the red vertex share `theta` and the
    /// position `eta` of red degree between its bounds, both in `[0, 1]`.
    /// Returned in normalized orientation.
    pub fn point(&self, theta: f64, eta: f64) -> (f64, f64) {
        self.point_with_degree(self.m, theta, eta)
    }

    /// Same as [`point`](Self::point) for `D_0`.
    pub fn point0(&self, theta: f64, eta: f64) -> (f64, f64) {
        self.point_with_degree(self.m + 1.0, theta, eta)
    }

    fn point_with_degree(&self, d: f64, theta: f64, eta: f64) -> (f64, f64) {
        let (m, a1, a2) = (self.m, self.a1, self.a2);
        // Red degree per vertex ranges over [d theta, 2m - d (1 - theta)].
        let width = 2.0 * m - d;
        let x = (d + a1) * theta + width * eta;
        let y = (d + a2) * (1.0 - theta) + width * (1.0 - eta);
        (x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_lie_on_boundary() {
        let d = AdditiveDomain::new(3, 0.0, 1.0);
        for &(t, e) in &[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0), (0.3, 0.6)] {
            let (x, y) = d.point(t, e);
            d.check_d(x, y, 1e-12).unwrap();
            let (x, y) = d.point0(t, e);
            d.check_d0(x, y, 1e-12).unwrap();
            d.check_d(x, y, 1e-12).unwrap();
        }
        assert!(d.check_d(0.0, 7.0 + 0.1, 1e-9).is_err());
        assert!(d.check_d(7.0, -0.5, 1e-9).is_err());
    }

    #[test]
    fn swap_mirrors_coordinates() {
        let a = AdditiveDomain::new(2, 0.0, 2.0);
        let b = AdditiveDomain::new(2, 2.0, 0.0);
        let (x, y) = a.point(0.4, 0.2);
        assert!(a.check_d(x, y, 1e-12).is_ok());
        assert!(b.check_d(y, x, 1e-12).is_ok());
    }

    #[test]
    fn tight_line_implies_loose_line() {
        let d = AdditiveDomain::new(3, -1.0, 2.5);
        for i in 0..=20 {
            let (x, y) = d.point0(i as f64 / 20.0, 1.0);
            assert!(x <= d.d0_x_upper_loose(y) + 1e-12);
        }
    }
}
