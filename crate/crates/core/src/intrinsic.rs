//! Intrinsic `X1`-graphs `(0, u, v) . (phi(u, v), 0, 0)` and the linearized
//! Burgers operator `B_phi(F) = F_u + phi F_v`.
//!
//! The H-perimeter of such a graph over a window is
//! `int sqrt(1 + B_phi(phi)^2) du dv`, and its H-mean curvature is
//! `-B_phi(B_phi(phi) / sqrt(1 + B_phi(phi)^2))`. Since `phi` is not
//! compactly supported, the perimeter is always the windowed one.

use serde::{Deserialize, Serialize};

use crate::heisenberg::{FrameDir, PlaneField, Point, ScalarField};
use crate::jet::Jet;
use crate::quadrature::{try_integrate_window, Estimate, QuadratureSpec, Rect, Window};
use crate::surface::{LevelSurface, SurfacePatch, Transversal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstVariationForm {
    /// `int G (zeta_u + phi zeta_v + zeta phi_v)`.
    Weak,
    /// `-int zeta B_phi(G)`.
    Strong,
}

#[derive(Clone, Debug)]
pub struct IntrinsicGraph {
    pub phi: PlaneField,
    pub window: Rect,
}

/// `F_u + phi F_v` at `(u, v)`.
pub fn burgers(phi: &PlaneField, f: &PlaneField, u: f64, v: f64) -> f64 {
    let j = f.jet(u, v);
    j.grad[0] + phi.value(u, v) * j.grad[1]
}

/// `B = B_phi(phi)`, `G = B / sqrt(1 + B^2)` and `B_phi(G)` from one jet of `phi`.
#[derive(Clone, Copy, Debug)]
struct Slope {
    phi: f64,
    phi_v: f64,
    b: f64,
    g: f64,
    burgers_g: f64,
}

impl Slope {
    fn at(phi: &PlaneField, u: f64, v: f64) -> Self {
        let j = phi.jet(u, v);
        let (f, fu, fv) = (j.value, j.grad[0], j.grad[1]);
        let (fuu, fuv, fvv) = (j.hess[0][0], j.hess[0][1], j.hess[1][1]);
        let b = fu + f * fv;
        let bu = fuu + fu * fv + f * fuv;
        let bv = fuv + fv * fv + f * fvv;
        let s = 1.0 + b * b;
        Self {
            phi: f,
            phi_v: fv,
            b,
            g: b / s.sqrt(),
            burgers_g: (bu + f * bv) / (s * s.sqrt()),
        }
    }
}

/// `-B_phi(B_phi(phi) / sqrt(1 + B_phi(phi)^2))`.
pub fn graph_mean_curvature(phi: &PlaneField, u: f64, v: f64) -> f64 {
    -Slope::at(phi, u, v).burgers_g
}

/// `int sqrt(1 + B_phi(phi)^2) du dv` over the window.
pub fn graph_perimeter(phi: &PlaneField, window: &Window, quad: &QuadratureSpec) -> crate::error::Result<Estimate> {
    try_integrate_window(
        |u, v| {
            let j = phi.jet(u, v);
            let b = j.grad[0] + j.value * j.grad[1];
            Ok((1.0 + b * b).sqrt())
        },
        window,
        quad,
    )
}

/// First variation of the windowed perimeter along `zeta`, which must vanish
/// on the boundary of the window.
pub fn graph_first_variation(
    phi: &PlaneField,
    zeta: &PlaneField,
    window: &Window,
    quad: &QuadratureSpec,
    form: FirstVariationForm,
) -> crate::error::Result<Estimate> {
    try_integrate_window(
        |u, v| {
            let z = zeta.jet(u, v);
            Ok(match form {
                FirstVariationForm::Weak => {
                    let j = phi.jet(u, v);
                    let b = j.grad[0] + j.value * j.grad[1];
                    let g = b / (1.0 + b * b).sqrt();
                    g * (z.grad[0] + j.value * z.grad[1] + z.value * j.grad[1])
                }
                FirstVariationForm::Strong => -z.value * Slope::at(phi, u, v).burgers_g,
            })
        },
        window,
        quad,
    )
}

impl IntrinsicGraph {
    pub fn new(phi: PlaneField, window: Rect) -> Self {
        Self { phi, window }
    }

    /// `B_phi(phi)` at `(u, v)`.
    pub fn slope(&self, u: f64, v: f64) -> f64 {
        Slope::at(&self.phi, u, v).b
    }

    pub fn mean_curvature(&self, u: f64, v: f64) -> f64 {
        graph_mean_curvature(&self.phi, u, v)
    }

    pub fn perimeter(&self, quad: &QuadratureSpec) -> crate::error::Result<Estimate> {
        graph_perimeter(&self.phi, &Window::new(self.window), quad)
    }

    /// `(0, u, v) . (phi, 0, 0) = (phi, u, v - u phi / 2)`.
    pub fn chart(&self, u: f64, v: f64) -> Point {
        let f = self.phi.value(u, v);
        Point::new(f, u, v - 0.5 * u * f)
    }

    /// The graph as the level set of `x - phi(y, t + x y / 2)`.
    pub fn level_surface(&self) -> LevelSurface {
        let phi = self.phi.clone();
        LevelSurface::new(ScalarField::new(move |x, y, t| x - phi.compose(y, t + x * y * 0.5)))
    }

    /// Chart over the window, pulled back along `X1`.
    pub fn patch(&self) -> SurfacePatch {
        let phi = self.phi.clone();
        SurfacePatch::new(
            move |u: Jet, v: Jet| {
                let f = phi.compose(u, v);
                [f, u, v - u * f * 0.5]
            },
            self.window,
            Transversal::Frame(FrameDir::X1),
        )
    }

    /// Largest `|phi(u, v) - phi|` mismatch between the chart and the level
    /// set, sampled on an `n x n` grid.
    pub fn lift_residual(&self, n: usize) -> f64 {
        self.patch().max_residual(&self.level_surface(), n)
    }

    /// `phi` and `phi_v` at `(u, v)`; convenient for callers assembling their
    /// own Burgers-type integrands.
    pub fn phi_and_dv(&self, u: f64, v: f64) -> (f64, f64) {
        let s = Slope::at(&self.phi, u, v);
        (s.phi, s.phi_v)
    }

    /// `B / sqrt(1 + B^2)` at `(u, v)`.
    pub fn normalized_slope(&self, u: f64, v: f64) -> f64 {
        Slope::at(&self.phi, u, v).g
    }
}
