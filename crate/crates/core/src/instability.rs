//! Cutoff family, the reverse Hardy inequality and instability certificates
//! for the `alpha, beta` graphs.
//!
//! With `f_k(y) = chi_k(y) / sqrt(1 + alpha y^2 / 2)` and
//! `u_k(y, t) = f_k(y) chi_k(t)`, the pulled-back second variation separates
//! into `-2 alpha * gap(k) * (t-integral)`, so it turns negative as soon as the
//! Hardy gap `lhs - rhs / (2 alpha)` is positive.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_family::AlphaBetaGraph;
use crate::heisenberg::{PlaneField, ScalarField};
use crate::jet::Jet;
use crate::quadrature::{try_integrate_1d, QuadratureSpec, Rect, Window};
use crate::surface::SurfacePatch;
use crate::variation::{pulled_back_nu, pulled_back_x1, second_variation_general, DeformationField, VariationResult};

/// Identifier of the cutoff profile recorded in certificates.
pub const PROFILE_ID: &str = "exp-smooth-step";

/// `sup |psi'|`, attained at `s = 3/2`.
pub const PROFILE_SUP_DERIVATIVE: f64 = 2.0;

/// Smallest relative tolerance handed to the quadrature during a scan.
pub const MIN_SCAN_REL_TOL: f64 = 1e-13;

/// `exp(-1/t)` for `t > 0`, else 0, with first and second derivatives.
fn smooth_exp(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let e = (-1.0 / t).exp();
    let t2 = t * t;
    (e, e / t2, e * (1.0 / (t2 * t2) - 2.0 / (t2 * t)))
}

/// `psi(s) = E(2 - s) / (E(2 - s) + E(s - 1))` and its first two derivatives.
/// `psi = 1` on `s <= 1`, `psi = 0` on `s >= 2`, decreasing in between.
pub fn profile(s: f64) -> (f64, f64, f64) {
    if s <= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    if s >= 2.0 {
        return (0.0, 0.0, 0.0);
    }
    let (a, da, dda) = smooth_exp(2.0 - s);
    let (b, db, ddb) = smooth_exp(s - 1.0);
    let (da, dda) = (-da, dda);
    let sum = a + b;
    let dsum = da + db;
    let n = da * b - a * db;
    let dn = dda * b - a * ddb;
    let s2 = sum * sum;
    (a / sum, n / s2, dn / s2 - 2.0 * n * dsum / (s2 * sum))
}

/// `chi_k(s) = psi(|s| / k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutoffFamily {
    pub k: u32,
}

impl CutoffFamily {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "cutoff index must be at least 1"));
        }
        Ok(Self { k })
    }

    fn scaled(&self, s: f64) -> (f64, f64, f64) {
        let k = self.k as f64;
        let (v, d, dd) = profile(s.abs() / k);
        (v, s.signum() * d / k, dd / (k * k))
    }

    pub fn chi(&self, s: f64) -> f64 {
        self.scaled(s).0
    }

    pub fn chi_prime(&self, s: f64) -> f64 {
        self.scaled(s).1
    }

    pub fn chi_jet(&self, s: Jet) -> Jet {
        let (v, d, dd) = self.scaled(s.value);
        s.compose(v, d, dd)
    }

    /// `C / k`, the bound on `|chi_k'|`.
    pub fn derivative_bound(&self) -> f64 {
        PROFILE_SUP_DERIVATIVE / self.k as f64
    }

    /// Break points `-2k, -k, 0, k, 2k` of the transition bands.
    pub fn breaks(&self) -> [f64; 5] {
        let k = self.k as f64;
        [-2.0 * k, -k, 0.0, k, 2.0 * k]
    }

    /// `[-2k, 2k]^2` with the transition bands as break lines.
    pub fn window(&self) -> Window {
        let b = self.breaks();
        Window::new(Rect::square(b[4])).with_breaks(&b[1..4], &b[1..4])
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("alpha", format!("must be positive, got {alpha}")))
    }
}

/// `f_k(y) = chi_k(y) / sqrt(1 + alpha y^2 / 2)` as a jet in `y`.
pub fn f_k_jet(k: CutoffFamily, alpha: f64, y: Jet) -> Jet {
    k.chi_jet(y) / (y * y * (0.5 * alpha) + 1.0).sqrt()
}

/// `(f_k(y), f_k'(y))`.
pub fn f_k(k: CutoffFamily, alpha: f64, y: f64) -> (f64, f64) {
    let j = f_k_jet(k, alpha, Jet::variable(0, y));
    (j.value, j.grad[0])
}

/// Both sides of the reverse Hardy inequality at one `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardySides {
    pub k: u32,
    pub alpha: f64,
    /// `int f_k^2 / (1 + alpha y^2 / 2) dy`
    pub lhs: f64,
    /// `int (1 + alpha y^2 / 2) f_k'^2 dy`
    pub rhs: f64,
    /// `lhs - rhs / (2 alpha)`
    pub gap: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    pub gap_error: f64,
}

/// `k -> infinity` limits of [`HardySides`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyLimits {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

pub fn hardy_limits(alpha: f64) -> HardyLimits {
    HardyLimits {
        lhs: 0.5 * PI * (2.0 / alpha).sqrt(),
        rhs: 0.5 * PI * (alpha / 2.0).sqrt(),
        gap: 0.375 * PI * (2.0 / alpha).sqrt(),
    }
}

/// Integrals over `R` evaluated as twice the integral over `[0, 2k]` (both
/// integrands are even), with breaks at the transition band.
pub fn hardy_sides(k: CutoffFamily, alpha: f64, quad: &QuadratureSpec) -> Result<HardySides> {
    check_alpha(alpha)?;
    let kf = k.k as f64;
    let breaks = [0.0, kf, 2.0 * kf];
    let weight = |y: f64| 1.0 + 0.5 * alpha * y * y;
    let lhs = try_integrate_1d(
        |y| {
            let (f, _) = f_k(k, alpha, y);
            Ok(f * f / weight(y))
        },
        &breaks,
        quad,
    )?;
    let rhs = try_integrate_1d(
        |y| {
            let (_, df) = f_k(k, alpha, y);
            Ok(weight(y) * df * df)
        },
        &breaks,
        quad,
    )?;
    let (l, r) = (2.0 * lhs.value, 2.0 * rhs.value);
    let (le, re) = (2.0 * lhs.error, 2.0 * rhs.error);
    Ok(HardySides {
        k: k.k,
        alpha,
        lhs: l,
        rhs: r,
        gap: l - r / (2.0 * alpha),
        lhs_error: le,
        rhs_error: re,
        gap_error: le + re / (2.0 * alpha),
    })
}

/// `u_k(y, t) = f_k(y) chi_k(t)`.
pub fn u_k_field(k: CutoffFamily, alpha: f64) -> PlaneField {
    PlaneField::new(move |y, t| f_k_jet(k, alpha, y) * k.chi_jet(t))
}

/// `a_k(x, y, t) = chi_k(y) chi_k(t) chi_k(x - y (alpha t + beta)) / sqrt(1 + alpha y^2 / 2)`;
/// compactly supported in the group with `a_k o theta = u_k`.
pub fn a_k_field(k: CutoffFamily, alpha: f64, beta: f64) -> ScalarField {
    ScalarField::new(move |x, y, t| f_k_jet(k, alpha, y) * k.chi_jet(t) * k.chi_jet(x - y * (t * alpha + beta)))
}

/// Deformation direction of a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `a X1`
    X1,
    /// `h nu_H`
    NuH,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::X1 => "x1",
            Direction::NuH => "nuh",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x1" => Ok(Direction::X1),
            "nuh" | "nu" | "nu_h" => Ok(Direction::NuH),
            other => Err(Error::invalid("direction", format!("expected x1 or nuh, got {other}"))),
        }
    }
}

/// Pulled-back second variation along `u_k` at one `k` of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: u32,
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

impl ScanRow {
    /// The sign is resolved negative: `value + error < 0`.
    pub fn certifies(&self) -> bool {
        self.converged && self.value + self.error < 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileInfo {
    pub id: String,
    /// `sup |psi'|`, the constant in `|chi_k'| <= C / k`.
    pub sup_derivative: f64,
}

pub fn profile_info() -> ProfileInfo {
    ProfileInfo {
        id: PROFILE_ID.to_string(),
        sup_derivative: PROFILE_SUP_DERIVATIVE,
    }
}

/// A deformation `a_k X1` or `a_k nu_H` with certified negative second
/// variation. Only issued when `value + error < 0` and the surface-integral
/// route reproduces the value within `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstabilityCertificate {
    pub alpha: f64,
    pub beta: f64,
    pub direction: Direction,
    pub k: u32,
    pub value: f64,
    pub error: f64,
    pub surface_value: f64,
    pub surface_error: f64,
    /// Allowed `|value - surface_value|`.
    pub tolerance: f64,
    /// Quadrature settings at the certified `k`.
    pub quadrature: QuadratureSpec,
    pub profile: ProfileInfo,
    pub scan: Vec<ScanRow>,
}

/// Quadrature settings for index `k`: relative tolerance scaled by `1/k^2`.
pub fn scan_quadrature(quad: &QuadratureSpec, k: u32) -> QuadratureSpec {
    let k = k as f64;
    quad.with_rel_tol((quad.rel_tol / (k * k)).max(MIN_SCAN_REL_TOL))
}

/// Pulled-back second variation along `u_k`.
pub fn pulled_back_row(
    graph: &AlphaBetaGraph,
    direction: Direction,
    k: CutoffFamily,
    quad: &QuadratureSpec,
) -> Result<VariationResult> {
    let u = u_k_field(k, graph.alpha);
    match direction {
        Direction::X1 => pulled_back_x1(graph, &u, &k.window(), quad),
        Direction::NuH => pulled_back_nu(graph, &u, &k.window(), quad),
    }
}

/// Second variation along `a_k X1` or `a_k nu_H` as a surface integral with
/// the general integrand.
pub fn surface_row(
    graph: &AlphaBetaGraph,
    direction: Direction,
    k: CutoffFamily,
    quad: &QuadratureSpec,
) -> Result<VariationResult> {
    let w = k.window();
    let a = a_k_field(k, graph.alpha, graph.beta);
    let x = match direction {
        Direction::X1 => DeformationField::along_x1(a, w.rect),
        Direction::NuH => DeformationField::horizontal_normal(a, ScalarField::zero(), w.rect),
    };
    let patch: SurfacePatch = graph
        .patch(w.rect)
        .with_breaks(w.u_breaks.clone(), w.v_breaks.clone());
    second_variation_general(&graph.surface(), &patch, &x, quad)
}

/// Allowed disagreement between two routes: both error estimates plus the
/// requested relative tolerance on each value.
pub fn combined_tolerance(a: &VariationResult, b: &VariationResult, quad: &QuadratureSpec) -> f64 {
    a.error + b.error + quad.rel_tol * (a.value.abs() + b.value.abs())
}

/// Pulled-back values for `k = 1..=k_max`.
pub fn scan(
    graph: &AlphaBetaGraph,
    direction: Direction,
    k_max: u32,
    quad: &QuadratureSpec,
) -> Result<Vec<ScanRow>> {
    (1..=k_max)
        .map(|k| {
            let r = pulled_back_row(graph, direction, CutoffFamily::new(k)?, &scan_quadrature(quad, k))?;
            Ok(ScanRow {
                k,
                value: r.value,
                error: r.error,
                converged: r.converged,
            })
        })
        .collect()
}

/// Scans `k = 1, 2, ...` and certifies the first `k` whose pulled-back second
/// variation is resolved negative, after confirming it through the surface
/// integral.
pub fn certify_instability(
    alpha: f64,
    beta: f64,
    direction: Direction,
    k_max: u32,
    quad: &QuadratureSpec,
) -> Result<InstabilityCertificate> {
    let graph = AlphaBetaGraph::new(alpha, beta)?;
    quad.validate()?;
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let qk = scan_quadrature(quad, k);
        let cutoff = CutoffFamily::new(k)?;
        let pb = pulled_back_row(&graph, direction, cutoff, &qk)?;
        let row = ScanRow {
            k,
            value: pb.value,
            error: pb.error,
            converged: pb.converged,
        };
        rows.push(row);
        if !row.certifies() {
            continue;
        }
        let surf = surface_row(&graph, direction, cutoff, &qk)?;
        let tolerance = combined_tolerance(&pb, &surf, &qk);
        if !surf.converged || (pb.value - surf.value).abs() > tolerance {
            return Err(Error::RouteDisagreement {
                pulled_back: pb.value,
                surface: surf.value,
                tolerance,
            });
        }
        return Ok(InstabilityCertificate {
            alpha,
            beta,
            direction,
            k,
            value: pb.value,
            error: pb.error,
            surface_value: surf.value,
            surface_error: surf.error,
            tolerance,
            quadrature: qk,
            profile: profile_info(),
            scan: rows,
        });
    }
    Err(Error::ScanExhausted { k_max, rows })
}
