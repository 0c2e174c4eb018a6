//! Closed-form benchmark problems on moving domains.
//!
//! Each case supplies the level set, the transport field, the initial datum
//! and, where known, the exact solution with its gradient and the forcing
//! that makes it solve `∂t u + div(u w) − ν Δu = f`.

use alloc::string::{String, ToString};
use core::f64::consts::PI;

use crate::math::{cos, hypot, sin};
use crate::mesh::Rect;
use crate::Point;

/// Horizontal displacement profile of the kite case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KiteProfile {
    /// `(1 − x2²) t`: symmetric about the x-axis, stays inside the box.
    Symmetric,
    /// `(1 − x2)² t`: reaches the right edge of the box before `t = 0.6`.
    Printed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CaseKind {
    TravellingCircle,
    Kite(KiteProfile),
    CollidingCircles,
    /// Fixed disk, no transport, constant datum.
    StaticDisk { value: f64 },
}

pub const CASE_NAMES: [&str; 5] = ["travelling-circle", "kite", "kite-printed", "colliding-circles", "static-disk"];

#[derive(Clone, Debug, PartialEq)]
pub struct CaseSpec {
    pub name: String,
    pub kind: CaseKind,
    pub bbox: Rect,
    pub t_end: f64,
    pub nu: f64,
    pub radius: f64,
    /// Bound on `|w|` in the region swept by the domain.
    pub w_inf: f64,
    /// Coarsest mesh size and time step of the refinement studies.
    pub h0: f64,
    pub dt0: f64,
    /// Manufactured forcing on; when off, `f = 0` and no exact solution.
    pub forcing: bool,
}

impl CaseSpec {
    pub fn travelling_circle() -> Self {
        Self {
            name: "travelling-circle".to_string(),
            kind: CaseKind::TravellingCircle,
            bbox: Rect::new(-0.7, 0.9, -0.7, 0.7),
            t_end: 0.2,
            nu: 1.0,
            radius: 0.5,
            w_inf: 2.0,
            h0: 0.4,
            dt0: 0.1,
            forcing: true,
        }
    }

    pub fn kite() -> Self {
        Self::kite_with(KiteProfile::Symmetric)
    }

    pub fn kite_with(profile: KiteProfile) -> Self {
        let (name, w_inf) = match profile {
            KiteProfile::Symmetric => ("kite", 1.0),
            KiteProfile::Printed => ("kite-printed", 4.0),
        };
        Self {
            name: name.to_string(),
            kind: CaseKind::Kite(profile),
            bbox: Rect::new(-1.5, 2.5, -1.5, 1.5),
            t_end: 1.0,
            nu: 0.2,
            radius: 1.0,
            w_inf,
            h0: 0.4,
            dt0: 0.5,
            forcing: true,
        }
    }

    pub fn colliding_circles() -> Self {
        Self {
            name: "colliding-circles".to_string(),
            kind: CaseKind::CollidingCircles,
            bbox: Rect::new(-0.6, 0.6, -1.35, 1.35),
            t_end: 1.5,
            nu: 0.1,
            radius: 0.5,
            w_inf: 1.0,
            h0: 0.07,
            dt0: 1.5 / 80.0,
            forcing: false,
        }
    }

    pub fn static_disk(value: f64) -> Self {
        Self {
            name: "static-disk".to_string(),
            kind: CaseKind::StaticDisk { value },
            bbox: Rect::new(-0.7, 0.7, -0.7, 0.7),
            t_end: 0.2,
            nu: 1.0,
            radius: 0.5,
            w_inf: 0.0,
            h0: 0.2,
            dt0: 0.05,
            forcing: false,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "travelling-circle" => Some(Self::travelling_circle()),
            "kite" => Some(Self::kite()),
            "kite-printed" => Some(Self::kite_with(KiteProfile::Printed)),
            "colliding-circles" => Some(Self::colliding_circles()),
            "static-disk" => Some(Self::static_disk(1.0)),
            _ => None,
        }
    }

    /// Same geometry and transport with `f = 0`.
    pub fn without_forcing(mut self) -> Self {
        self.forcing = false;
        self
    }

    fn manufactured(&self) -> bool {
        self.forcing && matches!(self.kind, CaseKind::TravellingCircle | CaseKind::Kite(_))
    }

    pub fn has_exact_solution(&self) -> bool {
        self.manufactured() || matches!(self.kind, CaseKind::StaticDisk { .. })
    }

    /// Centre of the travelling circle.
    fn travelling_centre(t: f64) -> Point {
        [sin(2.0 * PI * t) / PI, 0.0]
    }

    /// Displacement profile `s(x2)` and its first two derivatives.
    fn kite_profile(profile: KiteProfile, x2: f64) -> (f64, f64, f64) {
        match profile {
            KiteProfile::Symmetric => (1.0 - x2 * x2, -2.0 * x2, -2.0),
            KiteProfile::Printed => ((1.0 - x2) * (1.0 - x2), -2.0 * (1.0 - x2), 2.0),
        }
    }

    fn colliding_centres(t: f64) -> (Point, Point) {
        ([0.0, t - 0.75], [0.0, 0.75 - t])
    }

    /// Local coordinate relative to the moving centre of the shape.
    fn offset(&self, x: Point, t: f64) -> Point {
        match self.kind {
            CaseKind::TravellingCircle => {
                let c = Self::travelling_centre(t);
                [x[0] - c[0], x[1] - c[1]]
            }
            CaseKind::Kite(profile) => [x[0] - Self::kite_profile(profile, x[1]).0 * t, x[1]],
            CaseKind::CollidingCircles | CaseKind::StaticDisk { .. } => x,
        }
    }

    pub fn phi(&self, x: Point, t: f64) -> f64 {
        match self.kind {
            CaseKind::CollidingCircles => {
                let (s1, s2) = Self::colliding_centres(t);
                let d1 = hypot(x[0] - s1[0], x[1] - s1[1]);
                let d2 = hypot(x[0] - s2[0], x[1] - s2[1]);
                d1.min(d2) - self.radius
            }
            _ => {
                let d = self.offset(x, t);
                hypot(d[0], d[1]) - self.radius
            }
        }
    }

    pub fn velocity(&self, x: Point, t: f64) -> Point {
        match self.kind {
            CaseKind::TravellingCircle => [2.0 * cos(2.0 * PI * t), 0.0],
            CaseKind::Kite(profile) => [Self::kite_profile(profile, x[1]).0, 0.0],
            CaseKind::CollidingCircles => {
                let half = 0.5 * self.t_end;
                let down = (x[1] > 0.0 && t <= half) || (x[1] <= 0.0 && t > half);
                [0.0, if down { -1.0 } else { 1.0 }]
            }
            CaseKind::StaticDisk { .. } => [0.0, 0.0],
        }
    }

    /// `div w`; zero for every shipped case.
    pub fn divergence(&self, _x: Point, _t: f64) -> f64 {
        0.0
    }

    pub fn initial(&self, x: Point) -> f64 {
        match self.kind {
            CaseKind::TravellingCircle => {
                let r = hypot(x[0], x[1]);
                let c = cos(PI * r);
                c * c
            }
            // sin(0) = 0
            CaseKind::Kite(_) => 0.0,
            CaseKind::CollidingCircles => {
                if x[1] > 0.0 {
                    1.0
                } else if x[1] < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            CaseKind::StaticDisk { value } => value,
        }
    }

    pub fn exact(&self, x: Point, t: f64) -> Option<f64> {
        if !self.has_exact_solution() {
            return None;
        }
        Some(match self.kind {
            CaseKind::TravellingCircle => {
                let d = self.offset(x, t);
                let c = cos(PI * hypot(d[0], d[1]));
                c * c
            }
            CaseKind::Kite(_) => {
                let d = self.offset(x, t);
                cos(PI * hypot(d[0], d[1]) / self.radius) * sin(0.5 * PI * t)
            }
            CaseKind::StaticDisk { value } => value,
            CaseKind::CollidingCircles => unreachable!(),
        })
    }

    pub fn exact_gradient(&self, x: Point, t: f64) -> Option<Point> {
        if !self.has_exact_solution() {
            return None;
        }
        Some(match self.kind {
            CaseKind::TravellingCircle => {
                let d = self.offset(x, t);
                let q = radial_quotient(hypot(d[0], d[1]), 2.0 * PI, -PI);
                [q * d[0], q * d[1]]
            }
            CaseKind::Kite(profile) => {
                let d = self.offset(x, t);
                let k = PI / self.radius;
                let q = radial_quotient(hypot(d[0], d[1]), k, -k);
                let a = -Self::kite_profile(profile, x[1]).1 * t;
                let st = sin(0.5 * PI * t);
                [st * q * d[0], st * (a * q * d[0] + q * d[1])]
            }
            CaseKind::StaticDisk { .. } => [0.0, 0.0],
            CaseKind::CollidingCircles => unreachable!(),
        })
    }

    pub fn forcing(&self, x: Point, t: f64) -> f64 {
        if !self.manufactured() {
            return 0.0;
        }
        match self.kind {
            CaseKind::TravellingCircle => {
                // u = (1 + cos 2πr)/2 is transported rigidly: f = −ν Δu
                let d = self.offset(x, t);
                let r = hypot(d[0], d[1]);
                let k = 2.0 * PI;
                let q = radial_quotient(r, k, -PI);
                // Δ g(r) = g'' + g'/r with g' = -π sin(kr), g'' = -π k cos(kr)
                let laplacian = -PI * k * cos(k * r) + q;
                -self.nu * laplacian
            }
            CaseKind::Kite(profile) => {
                let d = self.offset(x, t);
                let r = hypot(d[0], d[1]);
                let k = PI / self.radius;
                let g = cos(k * r);
                let g2 = -k * k * g;
                let q = radial_quotient(r, k, -k);
                // Hessian of G(d) = g(|d|)
                let (h11, h12, h22) = if r > 1e-8 {
                    let c = (g2 - q) / (r * r);
                    (c * d[0] * d[0] + q, c * d[0] * d[1], c * d[1] * d[1] + q)
                } else {
                    (q, 0.0, q)
                };
                let g1 = q * d[0];
                let (_, s1, s2) = Self::kite_profile(profile, x[1]);
                let (a, a_prime) = (-s1 * t, -s2 * t);
                let laplacian = h11 + a_prime * g1 + a * a * h11 + 2.0 * a * h12 + h22;
                let st = sin(0.5 * PI * t);
                // time derivative and transport of the moving argument cancel
                g * 0.5 * PI * cos(0.5 * PI * t) - self.nu * st * laplacian
            }
            _ => 0.0,
        }
    }
}

/// `amplitude · sin(k r) / r`, continuous at `r = 0`.
fn radial_quotient(r: f64, k: f64, amplitude: f64) -> f64 {
    if r > 1e-6 {
        amplitude * sin(k * r) / r
    } else {
        amplitude * k * (1.0 - (k * r) * (k * r) / 6.0)
    }
}

/// `∂t u + div(u w) − ν Δu − f` at `(x, t)` by central differences with step
/// `eps` in space and time; `None` without an exact solution.
pub fn pde_residual(case: &CaseSpec, x: Point, t: f64, eps: f64) -> Option<f64> {
    let u = |y: Point, s: f64| case.exact(y, s);
    let centre = u(x, t)?;
    let ut = (u(x, t + eps)? - u(x, t - eps)?) / (2.0 * eps);
    let mut laplacian = 0.0;
    let mut flux_div = 0.0;
    for axis in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[axis] += eps;
        xm[axis] -= eps;
        let (up, um) = (u(xp, t)?, u(xm, t)?);
        laplacian += (up - 2.0 * centre + um) / (eps * eps);
        let (wp, wm) = (case.velocity(xp, t)[axis], case.velocity(xm, t)[axis]);
        flux_div += (up * wp - um * wm) / (2.0 * eps);
    }
    Some(ut + flux_div - case.nu * laplacian - case.forcing(x, t))
}

/// Largest componentwise difference between the analytic gradient and a
/// central difference with step `eps`.
pub fn gradient_mismatch(case: &CaseSpec, x: Point, t: f64, eps: f64) -> Option<f64> {
    let g = case.exact_gradient(x, t)?;
    let mut worst: f64 = 0.0;
    for axis in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[axis] += eps;
        xm[axis] -= eps;
        let fd = (case.exact(xp, t)? - case.exact(xm, t)?) / (2.0 * eps);
        worst = worst.max((fd - g[axis]).abs());
    }
    Some(worst)
}

/// `∂t φ + w·∇φ` by central differences; zero where the level set is a
/// smooth function transported by `w`.
pub fn transport_residual(case: &CaseSpec, x: Point, t: f64, eps: f64) -> f64 {
    let phi_t = (case.phi(x, t + eps) - case.phi(x, t - eps)) / (2.0 * eps);
    let w = case.velocity(x, t);
    let gx = (case.phi([x[0] + eps, x[1]], t) - case.phi([x[0] - eps, x[1]], t)) / (2.0 * eps);
    let gy = (case.phi([x[0], x[1] + eps], t) - case.phi([x[0], x[1] - eps], t)) / (2.0 * eps);
    phi_t + w[0] * gx + w[1] * gy
}
