//! Level-set surfaces in the group: horizontal frames, the `Z`/`Y`
//! derivatives, H-mean curvature, the `A` coefficient and integration against
//! the H-perimeter measure.
//!
//! A surface is the zero set of a defining field `phi`, oriented by
//! `N = X1 phi X1 + X2 phi X2 + T phi T`. Frame quantities are evaluated from
//! the jet of `phi` at any point where its gradient is nonzero, so derivatives
//! of `p`, `q`, `omega` in every direction (not only tangential ones) are
//! available.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{FrameDir, Point, ScalarField};
use crate::jet::{Dual, Jet};
use crate::quadrature::{try_integrate_2d, Estimate, QuadratureSpec, Rect};

/// Below this value of `W / |N|` a point is treated as characteristic.
pub const CHARACTERISTIC_TOL: f64 = 1e-10;

/// Oriented surface `{phi = 0}`.
#[derive(Clone, Debug)]
pub struct LevelSurface {
    phi: ScalarField,
}

/// `(p, q, omega, W)` and their normalizations by `W` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFrame {
    pub p: f64,
    pub q: f64,
    pub omega: f64,
    pub w: f64,
    pub pbar: f64,
    pub qbar: f64,
    pub obar: f64,
}

impl SurfaceFrame {
    pub fn from_normal(p: f64, q: f64, omega: f64) -> Self {
        let w = p.hypot(q);
        Self {
            p,
            q,
            omega,
            w,
            pbar: p / w,
            qbar: q / w,
            obar: omega / w,
        }
    }
}

/// Frame quantities together with their Cartesian gradients at one point.
#[derive(Clone, Copy, Debug)]
pub struct FrameGeometry {
    pub point: Point,
    pub frame: SurfaceFrame,
    /// `|N|` in the left-invariant metric.
    pub normal_norm: f64,
    /// Cartesian gradient of the defining field.
    pub phi_grad: [f64; 3],
    pub w: Dual,
    pub pbar: Dual,
    pub qbar: Dual,
    pub obar: Dual,
}

impl FrameGeometry {
    fn from_jet(point: Point, jet: &Jet) -> Result<Self> {
        let Point { x, y, .. } = point;
        let h = &jet.hess;
        let phi_t = jet.grad[2];
        let mut p = Dual::constant(jet.grad[0] - 0.5 * y * phi_t);
        let mut q = Dual::constant(jet.grad[1] + 0.5 * x * phi_t);
        let omega = Dual::new(phi_t, h[2]);
        for k in 0..3 {
            p.grad[k] = h[0][k] - 0.5 * y * h[2][k];
            q.grad[k] = h[1][k] + 0.5 * x * h[2][k];
        }
        p.grad[1] -= 0.5 * phi_t;
        q.grad[0] += 0.5 * phi_t;

        let normal_norm = (p.value * p.value + q.value * q.value + omega.value * omega.value).sqrt();
        if !(normal_norm > 0.0) || !normal_norm.is_finite() {
            return Err(Error::VanishingGradient { point });
        }
        let w = (p.square() + q.square()).sqrt();
        let ratio = w.value / normal_norm;
        if ratio < CHARACTERISTIC_TOL {
            return Err(Error::CharacteristicPoint { point, ratio });
        }
        let pbar = p / w;
        let qbar = q / w;
        let obar = omega / w;
        Ok(Self {
            point,
            frame: SurfaceFrame {
                p: p.value,
                q: q.value,
                omega: omega.value,
                w: w.value,
                pbar: pbar.value,
                qbar: qbar.value,
                obar: obar.value,
            },
            normal_norm,
            phi_grad: jet.grad,
            w,
            pbar,
            qbar,
            obar,
        })
    }

    pub fn apply(&self, dir: FrameDir, grad: &[f64; 3]) -> f64 {
        dir.apply(self.point, grad)
    }

    pub fn x1(&self, grad: &[f64; 3]) -> f64 {
        self.apply(FrameDir::X1, grad)
    }

    pub fn x2(&self, grad: &[f64; 3]) -> f64 {
        self.apply(FrameDir::X2, grad)
    }

    pub fn t(&self, grad: &[f64; 3]) -> f64 {
        grad[2]
    }

    /// `Z = qbar X1 - pbar X2`, tangent to the surface.
    pub fn z(&self, grad: &[f64; 3]) -> f64 {
        self.frame.qbar * self.x1(grad) - self.frame.pbar * self.x2(grad)
    }

    /// `Y = pbar X1 + qbar X2`, the horizontal normal.
    pub fn y(&self, grad: &[f64; 3]) -> f64 {
        self.frame.pbar * self.x1(grad) + self.frame.qbar * self.x2(grad)
    }

    /// `H = X1 pbar + X2 qbar`.
    pub fn mean_curvature(&self) -> f64 {
        self.x1(&self.pbar.grad) + self.x2(&self.qbar.grad)
    }

    /// `A = (pbar T qbar - qbar T pbar) + obar (qbar Y pbar - pbar Y qbar) + obar^2`.
    pub fn a_coefficient(&self) -> f64 {
        let SurfaceFrame { pbar, qbar, obar, .. } = self.frame;
        let t_p = self.t(&self.pbar.grad);
        let t_q = self.t(&self.qbar.grad);
        let y_p = self.y(&self.pbar.grad);
        let y_q = self.y(&self.qbar.grad);
        (pbar * t_q - qbar * t_p) + obar * (qbar * y_p - pbar * y_q) + obar * obar
    }

    /// Coefficient of `a^2` in the reduced second variation along `a X1`:
    /// `(pbar T qbar + qbar T pbar) - obar (pbar Y qbar + qbar Y pbar) - qbar^2 obar^2 - Z obar - pbar qbar obar H`.
    pub fn x1_coefficient(&self) -> f64 {
        let SurfaceFrame { pbar, qbar, obar, .. } = self.frame;
        let t_p = self.t(&self.pbar.grad);
        let t_q = self.t(&self.qbar.grad);
        let y_p = self.y(&self.pbar.grad);
        let y_q = self.y(&self.qbar.grad);
        (pbar * t_q + qbar * t_p) - obar * (pbar * y_q + qbar * y_p) - qbar * qbar * obar * obar
            - self.z(&self.obar.grad)
            - pbar * qbar * obar * self.mean_curvature()
    }

    /// Coefficient of `h^2` in the reduced second variation along `h nu_H`: `2A - obar^2`.
    pub fn nu_coefficient(&self) -> f64 {
        2.0 * self.a_coefficient() - self.frame.obar * self.frame.obar
    }
}

impl LevelSurface {
    pub fn new(phi: ScalarField) -> Self {
        Self { phi }
    }

    pub fn defining_field(&self) -> &ScalarField {
        &self.phi
    }

    pub fn frame(&self, g: Point) -> Result<SurfaceFrame> {
        self.geometry(g).map(|geo| geo.frame)
    }

    pub fn geometry(&self, g: Point) -> Result<FrameGeometry> {
        FrameGeometry::from_jet(g, &self.phi.jet(g))
    }
}

pub fn surface_frame(surface: &LevelSurface, g: Point) -> Result<SurfaceFrame> {
    surface.frame(g)
}

pub fn z_derivative(surface: &LevelSurface, f: &ScalarField, g: Point) -> Result<f64> {
    Ok(surface.geometry(g)?.z(&f.jet(g).grad))
}

pub fn y_derivative(surface: &LevelSurface, f: &ScalarField, g: Point) -> Result<f64> {
    Ok(surface.geometry(g)?.y(&f.jet(g).grad))
}

pub fn h_mean_curvature(surface: &LevelSurface, g: Point) -> Result<f64> {
    Ok(surface.geometry(g)?.mean_curvature())
}

pub fn a_coefficient(surface: &LevelSurface, g: Point) -> Result<f64> {
    Ok(surface.geometry(g)?.a_coefficient())
}

type ChartMap = dyn Fn(Jet, Jet) -> [Jet; 3] + Send + Sync;
type VectorRule = dyn Fn(Point) -> [f64; 3] + Send + Sync;

/// Direction used to pull the H-perimeter measure back to chart coordinates.
/// It must be transversal to the surface on the patch.
#[derive(Clone)]
pub enum Transversal {
    /// Cartesian coordinate axis 0, 1 or 2.
    Axis(usize),
    /// A left-invariant frame field.
    Frame(FrameDir),
    /// Any Cartesian vector field.
    Custom(Arc<VectorRule>),
}

impl Transversal {
    fn vector(&self, g: Point) -> [f64; 3] {
        match self {
            Transversal::Axis(i) => {
                let mut e = [0.0; 3];
                e[*i] = 1.0;
                e
            }
            Transversal::Frame(dir) => dir.components(g),
            Transversal::Custom(rule) => rule(g),
        }
    }
}

impl fmt::Debug for Transversal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transversal::Axis(i) => write!(f, "Axis({i})"),
            Transversal::Frame(d) => write!(f, "Frame({d:?})"),
            Transversal::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// A parametrized piece of a surface used for integration.
///
/// With chart `P(u, v)` and transversal `E`, the H-perimeter measure pulls
/// back to `W |det[P_u, P_v, E]| / |<N, E>| du dv`. For a graph `x = g(y, t)`
/// with `E = d/dx` the determinant is 1 and this is `W / |p + (y/2) omega|`.
#[derive(Clone)]
pub struct SurfacePatch {
    chart: Arc<ChartMap>,
    pub domain: Rect,
    pub transversal: Transversal,
    u_breaks: Vec<f64>,
    v_breaks: Vec<f64>,
}

impl fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("domain", &self.domain)
            .field("transversal", &self.transversal)
            .finish()
    }
}

/// Everything an integrand needs at one quadrature node.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceSample {
    pub u: f64,
    pub v: f64,
    pub geometry: FrameGeometry,
    /// `d sigma_H / (du dv)`.
    pub density: f64,
}

impl SurfacePatch {
    pub fn new(
        chart: impl Fn(Jet, Jet) -> [Jet; 3] + Send + Sync + 'static,
        domain: Rect,
        transversal: Transversal,
    ) -> Self {
        Self {
            chart: Arc::new(chart),
            domain,
            transversal,
            u_breaks: Vec::new(),
            v_breaks: Vec::new(),
        }
    }

    /// Interior break points for the initial quadrature grid (e.g. cutoff
    /// transition bands).
    pub fn with_breaks(mut self, u_breaks: Vec<f64>, v_breaks: Vec<f64>) -> Self {
        self.u_breaks = u_breaks;
        self.v_breaks = v_breaks;
        self
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = domain;
        self
    }

    /// The same chart over `domain`, with extra interior break points.
    pub fn restricted(&self, domain: Rect, u_extra: &[f64], v_extra: &[f64]) -> Self {
        let mut out = self.clone().with_domain(domain);
        out.u_breaks.extend_from_slice(u_extra);
        out.v_breaks.extend_from_slice(v_extra);
        out
    }

    pub fn point(&self, u: f64, v: f64) -> Point {
        let [x, y, t] = (self.chart)(Jet::constant(u), Jet::constant(v));
        Point::new(x.value, y.value, t.value)
    }

    pub fn sample(&self, surface: &LevelSurface, u: f64, v: f64) -> Result<SurfaceSample> {
        let [x, y, t] = (self.chart)(Jet::variable(0, u), Jet::variable(1, v));
        let point = Point::new(x.value, y.value, t.value);
        let geometry = surface.geometry(point)?;
        let e = self.transversal.vector(point);
        let pu = [x.grad[0], y.grad[0], t.grad[0]];
        let pv = [x.grad[1], y.grad[1], t.grad[1]];
        let det = pu[0] * (pv[1] * e[2] - pv[2] * e[1]) - pu[1] * (pv[0] * e[2] - pv[2] * e[0])
            + pu[2] * (pv[0] * e[1] - pv[1] * e[0]);
        let n_dot_e: f64 = (0..3).map(|i| geometry.phi_grad[i] * e[i]).sum();
        let scale = geometry.phi_grad.iter().map(|c| c * c).sum::<f64>().sqrt()
            * e.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(n_dot_e.abs() > 1e-12 * scale) {
            return Err(Error::DegenerateChart { u, v });
        }
        Ok(SurfaceSample {
            u,
            v,
            geometry,
            density: geometry.frame.w * det.abs() / n_dot_e.abs(),
        })
    }

    fn breaks(lo: f64, hi: f64, interior: &[f64]) -> Vec<f64> {
        let mut b = vec![lo];
        let mut inner: Vec<f64> = interior.iter().copied().filter(|&s| lo < s && s < hi).collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        b.extend(inner);
        b.push(hi);
        b
    }

    /// `int integrand dsigma_H` over the patch.
    pub fn integrate<F>(&self, surface: &LevelSurface, quad: &QuadratureSpec, integrand: F) -> Result<Estimate>
    where
        F: Fn(&SurfaceSample) -> Result<f64> + Sync,
    {
        let ub = Self::breaks(self.domain.u.0, self.domain.u.1, &self.u_breaks);
        let vb = Self::breaks(self.domain.v.0, self.domain.v.1, &self.v_breaks);
        try_integrate_2d(
            |u, v| {
                let s = self.sample(surface, u, v)?;
                Ok(integrand(&s)? * s.density)
            },
            &ub,
            &vb,
            quad,
        )
    }

    /// Largest `|phi|` over an `n x n` grid of chart points.
    pub fn max_residual(&self, surface: &LevelSurface, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let steps = n.max(2) - 1;
        for i in 0..=steps {
            for j in 0..=steps {
                let u = self.domain.u.0 + (self.domain.u.1 - self.domain.u.0) * i as f64 / steps as f64;
                let v = self.domain.v.0 + (self.domain.v.1 - self.domain.v.0) * j as f64 / steps as f64;
                worst = worst.max(surface.defining_field().value(self.point(u, v)).abs());
            }
        }
        worst
    }
}

/// `int f dsigma_H` over the patch.
pub fn h_perimeter_integral(
    surface: &LevelSurface,
    patch: &SurfacePatch,
    f: &ScalarField,
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    patch.integrate(surface, quad, |s| Ok(f.value(s.geometry.point)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cylinder() -> LevelSurface {
        LevelSurface::new(ScalarField::new(|x, y, _| x * x + y * y - 1.0))
    }

    fn plane(a: f64, b: f64, gamma: f64) -> LevelSurface {
        LevelSurface::new(ScalarField::new(move |x, y, _| x * a + y * b - gamma))
    }

    fn graph(alpha: f64, beta: f64) -> LevelSurface {
        LevelSurface::new(ScalarField::new(move |x, y, t| x - y * (t * alpha + beta)))
    }

    #[test]
    fn frame_examples() {
        let f = surface_frame(&graph(1.0, 0.0), Point::ORIGIN).unwrap();
        assert_eq!((f.p, f.q, f.omega, f.w), (1.0, 0.0, 0.0, 1.0));
        let f = surface_frame(&graph(1.0, 0.0), Point::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!((f.p, f.q, f.omega, f.w), (1.5, 0.0, -1.0, 1.5));
        let f = surface_frame(&plane(3.0, -4.0, 2.0), Point::new(0.1, 7.0, -3.0)).unwrap();
        assert_eq!((f.p, f.q, f.omega, f.w), (3.0, -4.0, 0.0, 5.0));
    }

    #[test]
    fn characteristic_point_is_rejected() {
        // t = 0 is horizontal everywhere at the origin
        let s = LevelSurface::new(ScalarField::new(|_, _, t| t));
        assert!(matches!(s.frame(Point::ORIGIN), Err(Error::CharacteristicPoint { .. })));
        let flat = LevelSurface::new(ScalarField::constant(1.0));
        assert!(matches!(flat.frame(Point::ORIGIN), Err(Error::VanishingGradient { .. })));
    }

    #[test]
    fn z_and_y_of_constants_vanish() {
        let s = graph(1.3, 0.2);
        let c = ScalarField::constant(4.0);
        let g = Point::new(0.5, 0.7, -0.1);
        assert_eq!(z_derivative(&s, &c, g).unwrap(), 0.0);
        assert_eq!(y_derivative(&s, &c, g).unwrap(), 0.0);
    }

    #[test]
    fn cylinder_mean_curvature_is_one() {
        let h = h_mean_curvature(&cylinder(), Point::new(1.0, 0.0, 0.0)).unwrap();
        assert!((h - 1.0).abs() < 1e-14);
        let h = h_mean_curvature(&cylinder(), Point::new(0.6, -0.8, 2.0)).unwrap();
        assert!((h - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vertical_plane_is_flat() {
        let s = plane(1.0, 2.0, 0.5);
        let g = Point::new(0.5, 0.0, 3.0);
        assert_eq!(h_mean_curvature(&s, g).unwrap(), 0.0);
        assert_eq!(a_coefficient(&s, g).unwrap(), 0.0);
    }

    #[test]
    fn a_coefficient_examples() {
        let a = a_coefficient(&graph(1.0, 0.0), Point::ORIGIN).unwrap();
        assert!((a + 1.0).abs() < 1e-15);
        let a = a_coefficient(&graph(2.0, 0.0), Point::new(0.0, 1.0, 0.0)).unwrap();
        assert!(a.abs() < 1e-15);
    }

    fn graph_patch(alpha: f64, beta: f64, domain: Rect) -> SurfacePatch {
        SurfacePatch::new(
            move |y, t| [y * (t * alpha + beta), y, t],
            domain,
            Transversal::Axis(0),
        )
    }

    #[test]
    fn perimeter_of_graph_square() {
        let s = graph(1.0, 0.0);
        let patch = graph_patch(1.0, 0.0, Rect::square(1.0));
        let quad = QuadratureSpec::default().with_rel_tol(1e-12);
        let est = h_perimeter_integral(&s, &patch, &ScalarField::constant(1.0), &quad).unwrap();
        let exact = (7.0 / 3.0) * (2f64.sqrt() + (1.0 + 2f64.sqrt()).ln());
        assert!((est.value - exact).abs() < 1e-11, "{} vs {exact}", est.value);
        let zero = h_perimeter_integral(&s, &patch, &ScalarField::zero(), &quad).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn cylinder_perimeter_matches_closed_form() {
        // unit cylinder, W = 2, |N| = 2, so dsigma_H = dsigma; area of height 1 is 2 pi
        let patch = SurfacePatch::new(
            |th, t| [th.cos(), th.sin(), t],
            Rect::new(0.0, 2.0 * PI, 0.0, 1.0),
            Transversal::Custom(Arc::new(|g: Point| [g.x, g.y, 0.0])),
        );
        let est = h_perimeter_integral(&cylinder(), &patch, &ScalarField::constant(1.0), &QuadratureSpec::default())
            .unwrap();
        assert!((est.value - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn tangent_transversal_is_degenerate() {
        let s = graph(1.0, 0.0);
        let patch = SurfacePatch::new(|y, t| [y * t, y, t], Rect::square(1.0), Transversal::Axis(2));
        // d/dt is tangent to the graph where y = 0
        assert!(matches!(patch.sample(&s, 0.0, 0.3), Err(Error::DegenerateChart { .. })));
    }
}
