//! The entire H-minimal graphs `x = y (alpha t + beta)`, vertical planes, and
//! the closed-form frame quantities used to cross-check the generic surface
//! calculus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{FrameDir, PlaneField, Point, ScalarField};
use crate::jet::Jet;
use crate::quadrature::Rect;
use crate::surface::{LevelSurface, SurfaceFrame, SurfacePatch, Transversal};

/// `S = {x = y (alpha t + beta)}` with `alpha > 0`, parametrized by
/// `theta(y, t) = (y (alpha t + beta), y, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaGraph {
    pub alpha: f64,
    pub beta: f64,
}

/// Closed forms of the intermediate quantities on the graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntermediateForms {
    /// `Z(T phi) = alpha p / W`
    pub z_t_phi: f64,
    /// `X2 W = alpha y sqrt(1 + s^2)` (and `X1 W = 0`)
    pub x2_w: f64,
    /// `Z W = -alpha y`
    pub z_w: f64,
    /// `Z obar = (alpha - alpha^2 y^2 / 2) / W^2`
    pub z_obar: f64,
    /// `Y pbar = Y qbar = 0`
    pub y_pbar: f64,
    pub y_qbar: f64,
    /// `T pbar = -alpha s / (W (1 + s^2))`
    pub t_pbar: f64,
    /// `T qbar = -alpha / (W (1 + s^2))`
    pub t_qbar: f64,
    /// `pbar T qbar + qbar T pbar`
    pub tp_tq: f64,
}

impl AlphaBetaGraph {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
        }
        if !beta.is_finite() {
            return Err(Error::invalid("beta", "must be finite"));
        }
        Ok(Self { alpha, beta })
    }

    /// `alpha t + beta`.
    pub fn slope(&self, t: f64) -> f64 {
        self.alpha * t + self.beta
    }

    /// `phi(x, y, t) = x - y (alpha t + beta)`.
    pub fn defining_field(&self) -> ScalarField {
        let Self { alpha, beta } = *self;
        ScalarField::new(move |x, y, t| x - y * (t * alpha + beta))
    }

    pub fn surface(&self) -> LevelSurface {
        LevelSurface::new(self.defining_field())
    }

    pub fn chart(&self, y: f64, t: f64) -> Point {
        Point::new(y * self.slope(t), y, t)
    }

    /// Graph chart over `domain` in `(y, t)`, pulled back along `d/dx`.
    pub fn patch(&self, domain: Rect) -> SurfacePatch {
        let Self { alpha, beta } = *self;
        SurfacePatch::new(move |y, t| [y * (t * alpha + beta), y, t], domain, Transversal::Axis(0))
    }

    /// `p = 1 + alpha y^2 / 2`, `q = -(alpha t + beta) p`, `omega = -alpha y`.
    pub fn closed_frame(&self, y: f64, t: f64) -> SurfaceFrame {
        let p = 1.0 + 0.5 * self.alpha * y * y;
        let s = self.slope(t);
        let root = (1.0 + s * s).sqrt();
        let w = p * root;
        SurfaceFrame {
            p,
            q: -s * p,
            omega: -self.alpha * y,
            w,
            pbar: 1.0 / root,
            qbar: -s / root,
            obar: -self.alpha * y / w,
        }
    }

    /// `-2 alpha / (W^2 (1 + (alpha t + beta)^2))`.
    pub fn coefficient_x1(&self, y: f64, t: f64) -> f64 {
        let f = self.closed_frame(y, t);
        let s = self.slope(t);
        -2.0 * self.alpha / (f.w * f.w * (1.0 + s * s))
    }

    /// `-2 alpha / W^2`.
    pub fn coefficient_nu(&self, y: f64, t: f64) -> f64 {
        let f = self.closed_frame(y, t);
        -2.0 * self.alpha / (f.w * f.w)
    }

    pub fn intermediate_forms(&self, y: f64, t: f64) -> IntermediateForms {
        let a = self.alpha;
        let f = self.closed_frame(y, t);
        let s = self.slope(t);
        let w2 = f.w * f.w;
        let t_pbar = -a * s / (f.w * (1.0 + s * s));
        let t_qbar = -a / (f.w * (1.0 + s * s));
        IntermediateForms {
            z_t_phi: a * f.p / f.w,
            x2_w: a * y * (1.0 + s * s).sqrt(),
            z_w: -a * y,
            z_obar: (a - 0.5 * a * a * y * y) / w2,
            y_pbar: 0.0,
            y_qbar: 0.0,
            t_pbar,
            t_qbar,
            tp_tq: a * f.p * (s * s - 1.0) / (w2 * (1.0 + s * s)),
        }
    }

    /// The graph as an entire intrinsic `X1`-graph:
    /// `phi(u, v) = 2 u (alpha v + beta) / (2 + alpha u^2)`.
    pub fn intrinsic_phi(&self) -> PlaneField {
        let Self { alpha, beta } = *self;
        PlaneField::new(move |u, v| (u * 2.0) * (v * alpha + beta) / (u * u * alpha + 2.0))
    }
}

/// Vertical plane `a x + b y = gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerticalPlane {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
}

impl VerticalPlane {
    pub fn new(a: f64, b: f64, gamma: f64) -> Result<Self> {
        if !(a * a + b * b > 0.0) {
            return Err(Error::invalid("a, b", "a^2 + b^2 must be positive"));
        }
        Ok(Self { a, b, gamma })
    }

    pub fn defining_field(&self) -> ScalarField {
        let Self { a, b, gamma } = *self;
        ScalarField::new(move |x, y, _| x * a + y * b - gamma)
    }

    pub fn surface(&self) -> LevelSurface {
        LevelSurface::new(self.defining_field())
    }

    pub fn closed_frame(&self) -> SurfaceFrame {
        SurfaceFrame::from_normal(self.a, self.b, 0.0)
    }

    /// `phi(u, v) = (gamma - b u) / a`, defined when `a != 0`.
    pub fn intrinsic_phi(&self) -> Result<PlaneField> {
        if self.a == 0.0 {
            return Err(Error::invalid("a", "the plane is an X1-graph only when a != 0"));
        }
        let Self { a, b, gamma } = *self;
        Ok(PlaneField::new(move |u, _| (gamma - u * b) / a))
    }

    /// Chart over `(s, t)` with `s` running along the horizontal line of the
    /// plane, pulled back along the horizontal normal direction.
    pub fn patch(&self, domain: Rect) -> SurfacePatch {
        let Self { a, b, gamma } = *self;
        let n2 = a * a + b * b;
        let (x0, y0) = (a * gamma / n2, b * gamma / n2);
        let norm = n2.sqrt();
        let (dx, dy) = (-b / norm, a / norm);
        SurfacePatch::new(
            move |s, t| [s * dx + x0, s * dy + y0, t],
            domain,
            Transversal::Custom(std::sync::Arc::new(move |_| [a, b, 0.0])),
        )
    }
}

/// The mirror family `y = x (alpha t + beta)`, `alpha < 0`, obtained from
/// [`AlphaBetaGraph`] through the automorphism `sigma(x, y, t) = (y, x, -t)`.
///
/// `sigma` swaps `X1` and `X2` and sends `T` to `-T`, so it maps the surface
/// with parameter `-alpha` onto this one and preserves H-perimeter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirroredGraph {
    pub alpha: f64,
    pub beta: f64,
    inner: AlphaBetaGraph,
}

impl MirroredGraph {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha < 0.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("mirrored family needs alpha < 0, got {alpha}")));
        }
        Ok(Self {
            alpha,
            beta,
            inner: AlphaBetaGraph::new(-alpha, beta)?,
        })
    }

    pub fn sigma(g: Point) -> Point {
        Point::new(g.y, g.x, -g.t)
    }

    /// Frame direction corresponding to `dir` under `sigma`.
    pub fn mirror_dir(dir: FrameDir) -> FrameDir {
        match dir {
            FrameDir::X1 => FrameDir::X2,
            FrameDir::X2 => FrameDir::X1,
            FrameDir::T => FrameDir::T,
        }
    }

    pub fn inner(&self) -> &AlphaBetaGraph {
        &self.inner
    }

    /// `y - x (alpha t + beta)`, equal to the inner defining field composed with `sigma`.
    pub fn defining_field(&self) -> ScalarField {
        let inner = self.inner.defining_field();
        ScalarField::new(move |x, y, t| inner.compose(y, x, -t))
    }

    pub fn surface(&self) -> LevelSurface {
        LevelSurface::new(self.defining_field())
    }

    /// `(x, t) -> (x, x (alpha t + beta), t)`.
    pub fn chart(&self, x: f64, t: f64) -> Point {
        Self::sigma(self.inner.chart(x, -t))
    }

    pub fn patch(&self, domain: Rect) -> SurfacePatch {
        let Self { alpha, beta, .. } = *self;
        SurfacePatch::new(
            move |x: Jet, t: Jet| [x, x * (t * alpha + beta), t],
            domain,
            Transversal::Axis(1),
        )
    }

    /// `p' = q(sigma g)`, `q' = p(sigma g)`, `omega' = -omega(sigma g)`.
    pub fn closed_frame(&self, x: f64, t: f64) -> SurfaceFrame {
        let f = self.inner.closed_frame(x, -t);
        SurfaceFrame {
            p: f.q,
            q: f.p,
            omega: -f.omega,
            w: f.w,
            pbar: f.qbar,
            qbar: f.pbar,
            obar: -f.obar,
        }
    }

    /// `2A - obar^2`, invariant under `sigma`.
    pub fn coefficient_nu(&self, x: f64, t: f64) -> f64 {
        self.inner.coefficient_nu(x, -t)
    }
}
