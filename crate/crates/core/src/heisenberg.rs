//! The first Heisenberg group, its left-invariant frame, and scalar fields
//! with exact second-order jets.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// A point `(x, y, t)` of the group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Point {
    pub const ORIGIN: Point = Point {
        x: 0.0,
        y: 0.0,
        t: 0.0,
    };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn inverse(self) -> Self {
        Self::new(-self.x, -self.y, -self.t)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.t)
    }
}

/// Group law `(x, y, t) . (x', y', t') = (x + x', y + y', t + t' + (x y' - x' y) / 2)`.
pub fn group_mul(g: Point, h: Point) -> Point {
    Point::new(
        g.x + h.x,
        g.y + h.y,
        g.t + h.t + 0.5 * (g.x * h.y - h.x * g.y),
    )
}

/// Non-isotropic dilation `(x, y, t) -> (l x, l y, l^2 t)`.
pub fn dilation(lambda: f64, g: Point) -> Result<Point> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("dilation factor must be positive, got {lambda}")));
    }
    Ok(Point::new(lambda * g.x, lambda * g.y, lambda * lambda * g.t))
}

/// One of the left-invariant vector fields `X1 = d/dx - (y/2) d/dt`,
/// `X2 = d/dy + (x/2) d/dt`, `T = d/dt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameDir {
    X1,
    X2,
    T,
}

impl FrameDir {
    pub const ALL: [FrameDir; 3] = [FrameDir::X1, FrameDir::X2, FrameDir::T];

    /// Cartesian components of the field at `g`.
    pub fn components(self, g: Point) -> [f64; 3] {
        match self {
            FrameDir::X1 => [1.0, 0.0, -0.5 * g.y],
            FrameDir::X2 => [0.0, 1.0, 0.5 * g.x],
            FrameDir::T => [0.0, 0.0, 1.0],
        }
    }

    /// Cartesian derivatives of the components: entry `[k][l]` is `d_l c^k`.
    fn component_gradients(self) -> [[f64; 3]; 3] {
        let mut d = [[0.0; 3]; 3];
        match self {
            FrameDir::X1 => d[2][1] = -0.5,
            FrameDir::X2 => d[2][0] = 0.5,
            FrameDir::T => {}
        }
        d
    }

    /// Apply the field to a Cartesian gradient at `g`.
    pub fn apply(self, g: Point, grad: &[f64; 3]) -> f64 {
        let c = self.components(g);
        c[0] * grad[0] + c[1] * grad[1] + c[2] * grad[2]
    }
}

type Rule3 = dyn Fn(Jet, Jet, Jet) -> Jet + Send + Sync;
type Rule2 = dyn Fn(Jet, Jet) -> Jet + Send + Sync;

/// A scalar field on the group, evaluated through jet arithmetic so that its
/// gradient and Hessian are exact.
#[derive(Clone)]
pub struct ScalarField {
    rule: Arc<Rule3>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarField")
    }
}

impl ScalarField {
    pub fn new(rule: impl Fn(Jet, Jet, Jet) -> Jet + Send + Sync + 'static) -> Self {
        Self {
            rule: Arc::new(rule),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_, _, _| Jet::constant(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Jet of the field at `g` with respect to `(x, y, t)`.
    pub fn jet(&self, g: Point) -> Jet {
        (self.rule)(
            Jet::variable(0, g.x),
            Jet::variable(1, g.y),
            Jet::variable(2, g.t),
        )
    }

    pub fn value(&self, g: Point) -> f64 {
        self.jet(g).value
    }

    /// Evaluate with arbitrary jet arguments (composition).
    pub fn compose(&self, x: Jet, y: Jet, t: Jet) -> Jet {
        (self.rule)(x, y, t)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.clone();
        Self::new(move |x, y, t| inner.compose(x, y, t) * c)
    }

    pub fn product(&self, other: &ScalarField) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(move |x, y, t| a.compose(x, y, t) * b.compose(x, y, t))
    }
}

/// A scalar field of two variables `(u, v)` with exact jets; used for chart
/// functions and intrinsic-graph data.
#[derive(Clone)]
pub struct PlaneField {
    rule: Arc<Rule2>,
}

impl fmt::Debug for PlaneField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PlaneField")
    }
}

impl PlaneField {
    pub fn new(rule: impl Fn(Jet, Jet) -> Jet + Send + Sync + 'static) -> Self {
        Self {
            rule: Arc::new(rule),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_, _| Jet::constant(c))
    }

    /// Jet in `(u, v)`; derivative slot 2 is unused.
    pub fn jet(&self, u: f64, v: f64) -> Jet {
        (self.rule)(Jet::variable(0, u), Jet::variable(1, v))
    }

    pub fn value(&self, u: f64, v: f64) -> f64 {
        self.jet(u, v).value
    }

    pub fn compose(&self, u: Jet, v: Jet) -> Jet {
        (self.rule)(u, v)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.clone();
        Self::new(move |u, v| inner.compose(u, v) * c)
    }
}

/// `X f` at `g` for a frame field `X`.
pub fn frame_derivative(f: &ScalarField, g: Point, which: FrameDir) -> f64 {
    which.apply(g, &f.jet(g).grad)
}

/// `first(second(f))` at `g`: the operator product `first . second` applied
/// to `f`, including the derivatives of the frame coefficients.
pub fn frame_second(f: &ScalarField, g: Point, first: FrameDir, second: FrameDir) -> f64 {
    let jet = f.jet(g);
    frame_second_from_jet(&jet, g, first, second)
}

pub(crate) fn frame_second_from_jet(jet: &Jet, g: Point, first: FrameDir, second: FrameDir) -> f64 {
    let outer = first.components(g);
    let inner = second.components(g);
    let dinner = second.component_gradients();
    let mut acc = 0.0;
    for k in 0..3 {
        // first(c_second^k)
        let dc: f64 = (0..3).map(|l| outer[l] * dinner[k][l]).sum();
        acc += dc * jet.grad[k];
        for l in 0..3 {
            acc += inner[k] * outer[l] * jet.hess[l][k];
        }
    }
    acc
}
