//! First and second variation of the H-perimeter.
//!
//! Every functional is evaluated as a surface integral over a chart patch.
//! The same second variation is available through several independent
//! formulas (the general nine-term integrand, the `a X1` and `h nu_H`
//! specializations, their integrated-by-parts reductions, the closed-form
//! coefficients on the `alpha, beta` graphs and the pulled-back planar
//! integrals); agreement between them is the main correctness check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_family::AlphaBetaGraph;
use crate::heisenberg::{PlaneField, ScalarField};
use crate::jet::Dual;
use crate::quadrature::{try_integrate_window, Estimate, QuadratureSpec, Rect, Window};
use crate::summation::NeumaierSum;
use crate::surface::{FrameGeometry, LevelSurface, SurfacePatch, SurfaceSample};

/// Which formula produced a [`VariationResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    FirstVariation,
    General,
    Raw,
    Reduced,
    Specialized,
    PulledBack,
}

/// Raw integrand as obtained from the general formula, or the form reduced by
/// integration by parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Raw,
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationResult {
    pub value: f64,
    /// Non-negative quadrature error estimate.
    pub error: f64,
    pub route: Route,
    pub converged: bool,
}

impl VariationResult {
    fn from_estimate(e: Estimate, route: Route) -> Self {
        Self {
            value: e.value,
            error: e.error,
            route,
            converged: e.converged,
        }
    }

    fn zero(route: Route) -> Self {
        Self {
            value: 0.0,
            error: 0.0,
            route,
            converged: true,
        }
    }
}

#[derive(Clone, Debug)]
pub enum DeformationKind {
    /// `a X1 + b X2 + k T`.
    Frame {
        a: ScalarField,
        b: ScalarField,
        k: ScalarField,
    },
    /// `h nu_H + k T`, i.e. `a = pbar h`, `b = qbar h`.
    HorizontalNormal { h: ScalarField, k: ScalarField },
}

/// A deformation vector field whose coefficients vanish on the surface outside
/// `support` (a box in chart coordinates).
#[derive(Clone, Debug)]
pub struct DeformationField {
    pub kind: DeformationKind,
    pub support: Rect,
    u_breaks: Vec<f64>,
    v_breaks: Vec<f64>,
}

/// Coefficients of a deformation at one point with their Cartesian gradients.
#[derive(Clone, Copy, Debug)]
pub struct DeformationSample {
    pub a: Dual,
    pub b: Dual,
    pub k: Dual,
}

impl DeformationField {
    pub fn new(a: ScalarField, b: ScalarField, k: ScalarField, support: Rect) -> Self {
        Self::from_kind(DeformationKind::Frame { a, b, k }, support)
    }

    pub fn along_x1(a: ScalarField, support: Rect) -> Self {
        Self::new(a, ScalarField::zero(), ScalarField::zero(), support)
    }

    pub fn horizontal_normal(h: ScalarField, k: ScalarField, support: Rect) -> Self {
        Self::from_kind(DeformationKind::HorizontalNormal { h, k }, support)
    }

    fn from_kind(kind: DeformationKind, support: Rect) -> Self {
        Self {
            kind,
            support,
            u_breaks: Vec::new(),
            v_breaks: Vec::new(),
        }
    }

    /// Interior break lines (for example cutoff transition bands) used when
    /// integrating over the support.
    pub fn with_breaks(mut self, u_breaks: Vec<f64>, v_breaks: Vec<f64>) -> Self {
        self.u_breaks = u_breaks;
        self.v_breaks = v_breaks;
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        let kind = match &self.kind {
            DeformationKind::Frame { a, b, k } => DeformationKind::Frame {
                a: a.scaled(c),
                b: b.scaled(c),
                k: k.scaled(c),
            },
            DeformationKind::HorizontalNormal { h, k } => DeformationKind::HorizontalNormal {
                h: h.scaled(c),
                k: k.scaled(c),
            },
        };
        Self {
            kind,
            ..self.clone()
        }
    }

    pub fn sample(&self, geo: &FrameGeometry) -> DeformationSample {
        let g = geo.point;
        match &self.kind {
            DeformationKind::Frame { a, b, k } => DeformationSample {
                a: a.jet(g).first_order(),
                b: b.jet(g).first_order(),
                k: k.jet(g).first_order(),
            },
            DeformationKind::HorizontalNormal { h, k } => {
                let h = h.jet(g).first_order();
                DeformationSample {
                    a: geo.pbar * h,
                    b: geo.qbar * h,
                    k: k.jet(g).first_order(),
                }
            }
        }
    }

    fn fields(&self) -> Vec<&ScalarField> {
        match &self.kind {
            DeformationKind::Frame { a, b, k } => vec![a, b, k],
            DeformationKind::HorizontalNormal { h, k } => vec![h, k],
        }
    }

    /// Checks on an `n x n` grid of the patch that every coefficient vanishes
    /// at chart points outside the declared support.
    pub fn check_support(&self, patch: &SurfacePatch, n: usize) -> Result<()> {
        let d = patch.domain;
        let steps = n.max(2) - 1;
        for i in 0..=steps {
            for j in 0..=steps {
                let u = d.u.0 + (d.u.1 - d.u.0) * i as f64 / steps as f64;
                let v = d.v.0 + (d.v.1 - d.v.0) * j as f64 / steps as f64;
                if self.support.contains(u, v) {
                    continue;
                }
                let g = patch.point(u, v);
                if self.fields().iter().any(|f| f.value(g) != 0.0) {
                    return Err(Error::invalid(
                        "support",
                        format!("deformation is nonzero at chart point ({u}, {v}) outside its support box"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn patch_on(&self, patch: &SurfacePatch) -> Option<SurfacePatch> {
        patch
            .domain
            .intersect(&self.support)
            .map(|r| patch.restricted(r, &self.u_breaks, &self.v_breaks))
    }
}

/// Number of grid lines per axis used by the support check.
const SUPPORT_CHECK_GRID: usize = 17;

/// First derivatives of a coefficient along the adapted frame.
#[derive(Clone, Copy, Debug)]
struct Adapted {
    v: f64,
    z: f64,
    y: f64,
    t: f64,
}

impl Adapted {
    fn of(geo: &FrameGeometry, d: Dual) -> Self {
        Self {
            v: d.value,
            z: geo.z(&d.grad),
            y: geo.y(&d.grad),
            t: geo.t(&d.grad),
        }
    }

    /// `T f - obar Y f`.
    fn vertical(&self, obar: f64) -> f64 {
        self.t - obar * self.y
    }
}

fn integrate<F>(surface: &LevelSurface, patch: &SurfacePatch, quad: &QuadratureSpec, route: Route, f: F) -> Result<VariationResult>
where
    F: Fn(&SurfaceSample) -> Result<f64> + Sync,
{
    patch
        .integrate(surface, quad, f)
        .map(|e| VariationResult::from_estimate(e, route))
}

fn integrate_deformation<F>(
    surface: &LevelSurface,
    patch: &SurfacePatch,
    x: &DeformationField,
    quad: &QuadratureSpec,
    route: Route,
    f: F,
) -> Result<VariationResult>
where
    F: Fn(&SurfaceSample, &DeformationSample) -> f64 + Sync,
{
    x.check_support(patch, SUPPORT_CHECK_GRID)?;
    match x.patch_on(patch) {
        None => Ok(VariationResult::zero(route)),
        Some(p) => integrate(surface, &p, quad, route, |s| Ok(f(s, &x.sample(&s.geometry)))),
    }
}

/// `int H <X, N> / W dsigma_H`, the cancelled form of the angle quotient.
pub fn first_variation(
    surface: &LevelSurface,
    patch: &SurfacePatch,
    x: &DeformationField,
    quad: &QuadratureSpec,
) -> Result<VariationResult> {
    integrate_deformation(surface, patch, x, quad, Route::FirstVariation, |s, d| {
        let f = s.geometry.frame;
        s.geometry.mean_curvature() * (d.a.value * f.pbar + d.b.value * f.qbar + d.k.value * f.obar)
    })
}

/// Integrand of the general second variation at one point. Terms are added
/// in the printed order with compensated summation.
pub fn second_variation_integrand(geo: &FrameGeometry, d: &DeformationSample) -> f64 {
    let (p, q, o) = (geo.frame.pbar, geo.frame.qbar, geo.frame.obar);
    let a = Adapted::of(geo, d.a);
    let b = Adapted::of(geo, d.b);
    let k = Adapted::of(geo, d.k);
    let normal = a.v * p + b.v * q;
    let tangent = a.v * q - b.v * p;
    let za_term = a.z + o * p * k.z;
    let zb_term = b.z + o * q * k.z;
    let last = q * a.z - p * b.z + tangent * o;

    let mut acc = NeumaierSum::new();
    acc.add(-2.0 * (p * b.z - q * a.z) * k.vertical(o));
    acc.add(a.vertical(o) * (-2.0 * q * k.z - q * normal - p * tangent));
    acc.add(b.vertical(o) * (2.0 * p * k.z + p * normal - q * tangent));
    acc.add(2.0 * tangent * (q * a.z - p * b.z) * o);
    acc.add(za_term * za_term);
    acc.add(zb_term * zb_term);
    acc.add((a.v * a.v + b.v * b.v) * o * o);
    acc.add(2.0 * o * (a.v * a.z + b.v * b.z));
    acc.add(2.0 * o * o * normal * k.z);
    acc.add(-last * last);
    acc.value()
}

/// Second variation along an arbitrary deformation `a X1 + b X2 + k T`.
pub fn second_variation_general(
    surface: &LevelSurface,
    patch: &SurfacePatch,
    x: &DeformationField,
    quad: &QuadratureSpec,
) -> Result<VariationResult> {
    integrate_deformation(surface, patch, x, quad, Route::General, |s, d| {
        second_variation_integrand(&s.geometry, d)
    })
}

/// Second variation along `a X1`, integrated over the patch domain.
///
/// `Raw`: `pbar^2 (Za)^2 + pbar^2 obar^2 a^2 + obar Z(a^2) - pbar qbar (T(a^2) - obar Y(a^2))`.
/// `Reduced`: `pbar^2 (Za)^2 + a^2 c` with `c` from [`FrameGeometry::x1_coefficient`].
pub fn second_variation_x1(
    surface: &LevelSurface,
    patch: &SurfacePatch,
    a: &ScalarField,
    quad: &QuadratureSpec,
    form: Form,
) -> Result<VariationResult> {
    let route = match form {
        Form::Raw => Route::Raw,
        Form::Reduced => Route::Reduced,
    };
    integrate(surface, patch, quad, route, |s| {
        let geo = &s.geometry;
        let (p, q, o) = (geo.frame.pbar, geo.frame.qbar, geo.frame.obar);
        let a = Adapted::of(geo, a.jet(geo.point).first_order());
        let gradient = p * p * a.z * a.z;
        Ok(match form {
            Form::Raw => {
                gradient + p * p * o * o * a.v * a.v + o * 2.0 * a.v * a.z - p * q * 2.0 * a.v * a.vertical(o)
            }
            Form::Reduced => gradient + a.v * a.v * geo.x1_coefficient(),
        })
    })
}

/// Second variation along `h nu_H + k T`, integrated over the patch domain.
///
/// `Raw`: `(Zh + obar Zk)^2 + 2 h H (Tk - obar Yk) + obar Z(h^2) + 2 A h Zk + A h^2`.
/// `Reduced` (only for `k = 0`): `(Zh)^2 + h^2 (2A - obar^2)`.
pub fn second_variation_nu(
    surface: &LevelSurface,
    patch: &SurfacePatch,
    h: &ScalarField,
    k: Option<&ScalarField>,
    quad: &QuadratureSpec,
    form: Form,
) -> Result<VariationResult> {
    if form == Form::Reduced && k.is_some() {
        return Err(Error::invalid("k", "the reduced form holds only for k = 0"));
    }
    let route = match form {
        Form::Raw => Route::Raw,
        Form::Reduced => Route::Reduced,
    };
    integrate(surface, patch, quad, route, |s| {
        let geo = &s.geometry;
        let o = geo.frame.obar;
        let h = Adapted::of(geo, h.jet(geo.point).first_order());
        Ok(match form {
            Form::Raw => {
                let k = match k {
                    Some(k) => Adapted::of(geo, k.jet(geo.point).first_order()),
                    None => Adapted {
                        v: 0.0,
                        z: 0.0,
                        y: 0.0,
                        t: 0.0,
                    },
                };
                let a = geo.a_coefficient();
                let lead = h.z + o * k.z;
                let mut acc = NeumaierSum::new();
                acc.add(lead * lead);
                acc.add(2.0 * h.v * geo.mean_curvature() * k.vertical(o));
                acc.add(o * 2.0 * h.v * h.z + 2.0 * a * h.v * k.z + a * h.v * h.v);
                acc.value()
            }
            Form::Reduced => h.z * h.z + h.v * h.v * geo.nu_coefficient(),
        })
    })
}

/// Along `a X1` on an `alpha, beta` graph with the closed-form coefficient
/// `-2 alpha / (W^2 (1 + (alpha t + beta)^2))`; `window` is in `(y, t)`.
pub fn second_variation_x1_graph(
    graph: &AlphaBetaGraph,
    a: &ScalarField,
    window: &Window,
    quad: &QuadratureSpec,
) -> Result<VariationResult> {
    let surface = graph.surface();
    let patch = graph
        .patch(window.rect)
        .with_breaks(window.u_breaks.clone(), window.v_breaks.clone());
    integrate(&surface, &patch, quad, Route::Specialized, |s| {
        let f = graph.closed_frame(s.u, s.v);
        let a = Adapted::of(&s.geometry, a.jet(s.geometry.point).first_order());
        Ok(f.pbar * f.pbar * a.z * a.z + a.v * a.v * graph.coefficient_x1(s.u, s.v))
    })
}

/// Along `h nu_H` on an `alpha, beta` graph: `int (Zh)^2 - 2 alpha h^2 / W^2`.
pub fn second_variation_nu_graph(
    graph: &AlphaBetaGraph,
    h: &ScalarField,
    window: &Window,
    quad: &QuadratureSpec,
) -> Result<VariationResult> {
    let surface = graph.surface();
    let patch = graph
        .patch(window.rect)
        .with_breaks(window.u_breaks.clone(), window.v_breaks.clone());
    integrate(&surface, &patch, quad, Route::Specialized, |s| {
        let h = Adapted::of(&s.geometry, h.jet(s.geometry.point).first_order());
        Ok(h.z * h.z + h.v * h.v * graph.coefficient_nu(s.u, s.v))
    })
}

/// The two planar integrals of the pulled-back second variation,
/// `int P u_y^2 / (1 + s^2)^e` and `int u^2 / (P (1 + s^2)^e)`, with
/// `P = 1 + alpha y^2 / 2` and `s = alpha t + beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulledBackParts {
    pub gradient: Estimate,
    pub potential: Estimate,
}

fn pulled_back_parts(
    graph: &AlphaBetaGraph,
    u: &PlaneField,
    window: &Window,
    quad: &QuadratureSpec,
    exponent: f64,
) -> Result<PulledBackParts> {
    let alpha = graph.alpha;
    let weight = |y: f64, t: f64| {
        let s = graph.slope(t);
        (1.0 + 0.5 * alpha * y * y, (1.0 + s * s).powf(exponent))
    };
    let gradient = try_integrate_window(
        |y, t| {
            let j = u.jet(y, t);
            let (p, d) = weight(y, t);
            Ok(p * j.grad[0] * j.grad[0] / d)
        },
        window,
        quad,
    )?;
    let potential = try_integrate_window(
        |y, t| {
            let v = u.value(y, t);
            let (p, d) = weight(y, t);
            Ok(v * v / (p * d))
        },
        window,
        quad,
    )?;
    Ok(PulledBackParts { gradient, potential })
}

fn combine(graph: &AlphaBetaGraph, parts: &PulledBackParts) -> VariationResult {
    let two_alpha = 2.0 * graph.alpha;
    VariationResult {
        value: parts.gradient.value - two_alpha * parts.potential.value,
        error: parts.gradient.error + two_alpha * parts.potential.error,
        route: Route::PulledBack,
        converged: parts.gradient.converged && parts.potential.converged,
    }
}

/// Planar form of the second variation along `a X1` with `u = a o theta`:
/// `int P u_y^2 / (1 + s^2)^{3/2} - 2 alpha int u^2 / (P (1 + s^2)^{3/2})`.
pub fn pulled_back_x1(
    graph: &AlphaBetaGraph,
    u: &PlaneField,
    window: &Window,
    quad: &QuadratureSpec,
) -> Result<VariationResult> {
    Ok(combine(graph, &pulled_back_parts(graph, u, window, quad, 1.5)?))
}

/// Planar form of the second variation along `h nu_H` with `u = h o theta`
/// (exponent `1/2` in place of `3/2`).
pub fn pulled_back_nu(
    graph: &AlphaBetaGraph,
    u: &PlaneField,
    window: &Window,
    quad: &QuadratureSpec,
) -> Result<VariationResult> {
    Ok(combine(graph, &pulled_back_parts(graph, u, window, quad, 0.5)?))
}

pub fn pulled_back_x1_parts(
    graph: &AlphaBetaGraph,
    u: &PlaneField,
    window: &Window,
    quad: &QuadratureSpec,
) -> Result<PulledBackParts> {
    pulled_back_parts(graph, u, window, quad, 1.5)
}

pub fn pulled_back_nu_parts(
    graph: &AlphaBetaGraph,
    u: &PlaneField,
    window: &Window,
    quad: &QuadratureSpec,
) -> Result<PulledBackParts> {
    pulled_back_parts(graph, u, window, quad, 0.5)
}
