use anyhow::Result;
use clap::{Args, Subcommand, ValueEnum};
use hminimal::checks::{run_suite, SuiteConfig};
use hminimal::instability::{certify_instability, hardy_limits, hardy_sides, CutoffFamily, Direction, ScanRow};
use hminimal::intrinsic::{graph_first_variation, graph_perimeter, FirstVariationForm, IntrinsicGraph};
use hminimal::{AlphaBetaGraph, Error, Jet, PlaneField, QuadratureSpec, Rect, VerticalPlane, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::record::{csv_text, num};

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// H-mean curvature of an alpha, beta graph (or a vertical plane) on a grid.
    Curvature(CurvatureArgs),
    /// Frame identities and integration-by-parts lemmas at random points.
    Identities(IdentitiesArgs),
    /// Scan k and certify a negative second variation.
    Instability(InstabilityArgs),
    /// Both sides of the reverse Hardy inequality for a list of k.
    Hardy(HardyArgs),
    /// Intrinsic-graph perimeter, first variation and curvature.
    Burgers(BurgersArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curvature(_) => "curvature",
            Command::Identities(_) => "identities",
            Command::Instability(_) => "instability",
            Command::Hardy(_) => "hardy",
            Command::Burgers(_) => "burgers",
        }
    }

    pub fn execute(&self) -> Result<Execution, Error> {
        match self {
            Command::Curvature(a) => curvature(a),
            Command::Identities(a) => identities(a),
            Command::Instability(a) => instability(a),
            Command::Hardy(a) => hardy(a),
            Command::Burgers(a) => burgers(a),
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureArgs {
    #[arg(long, default_value = "1", value_parser = positive, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value = "0", value_parser = finite, allow_hyphen_values = true)]
    pub beta: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    /// The grid covers `[-range, range]^2`.
    #[arg(long, default_value = "5", value_parser = positive)]
    pub range: f64,
    /// Use the vertical plane `a x + b y = gamma` instead of the graph.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub plane: Option<Vec<f64>>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitiesArgs {
    #[arg(long, default_value = "1", value_parser = positive, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value = "0", value_parser = finite, allow_hyphen_values = true)]
    pub beta: f64,
    /// Random points per surface.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 24301)]
    pub seed: u64,
    /// Random test functions for the integration-by-parts lemmas.
    #[arg(long, default_value_t = 10)]
    pub ibp_trials: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    X1,
    Nuh,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::X1 => Direction::X1,
            DirectionArg::Nuh => Direction::NuH,
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstabilityArgs {
    #[arg(long, default_value = "1", value_parser = positive, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value = "0", value_parser = finite, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = DirectionArg::X1)]
    pub direction: DirectionArg,
    #[arg(long, default_value_t = 64)]
    pub kmax: u32,
    /// Base relative quadrature tolerance, tightened by `1/k^2` during the scan.
    #[arg(long, default_value = "1e-8", value_parser = positive)]
    pub tol: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyArgs {
    #[arg(long, default_value = "2", value_parser = positive, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Comma-separated k values; an empty string gives a header-only table.
    #[arg(long, default_value = "1,2,4,8,16,32,64,128,200")]
    pub klist: String,
    #[arg(long, default_value = "1e-10", value_parser = positive)]
    pub tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BurgersMode {
    /// `phi` of the alpha, beta graph.
    Family,
    /// `phi = (gamma - b u) / a`.
    Plane,
    /// Quadratic `phi = c0 + c1 u + c2 v + c3 u^2 + c4 u v + c5 v^2`.
    Custom,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurgersArgs {
    #[arg(long, value_enum, default_value_t = BurgersMode::Family)]
    pub mode: BurgersMode,
    #[arg(long, default_value = "1", value_parser = positive, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value = "0", value_parser = finite, allow_hyphen_values = true)]
    pub beta: f64,
    /// Plane coefficients `a, b, gamma`.
    #[arg(long, value_delimiter = ',', default_value = "1,2,0", allow_hyphen_values = true)]
    pub plane: Vec<f64>,
    /// Six coefficients of the quadratic `phi` for custom mode.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,-0.25,0.3,0.2,-0.1", allow_hyphen_values = true)]
    pub coeffs: Vec<f64>,
    /// `u0, u1, v0, v1`; defaults to `[0,1]^2` for planes and `[-1,1]^2` otherwise.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
    /// Random test functions for the first variation.
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

/// Result of executing a command.
pub struct Execution {
    pub outputs: Value,
    pub quadrature: Option<QuadratureSpec>,
    /// Files to write into the output directory.
    pub files: Vec<(String, String)>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Ok,
    /// A check failed (exit code 1).
    Failed(String),
    /// The instability scan found no certificate (exit code 3).
    Exhausted,
}

fn io(e: anyhow::Error) -> Error {
    Error::InvalidParameter {
        name: "output",
        reason: e.to_string(),
    }
}

fn fixed<const N: usize>(v: &[f64], name: &'static str) -> Result<[f64; N], Error> {
    v.try_into().map_err(|_| Error::InvalidParameter {
        name,
        reason: format!("expected {N} comma-separated values, got {}", v.len()),
    })
}

fn grid(n: usize, range: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| -range + 2.0 * range * i as f64 / (n - 1) as f64).collect(),
    }
}

fn curvature(a: &CurvatureArgs) -> Result<Execution, Error> {
    let axis = grid(a.grid, a.range);
    let mut rows = Vec::with_capacity(axis.len() * axis.len());
    let mut sup: f64 = 0.0;
    let (surface, patch, label) = match &a.plane {
        Some(p) => {
            let p = fixed::<3>(p, "plane")?;
            let plane = VerticalPlane::new(p[0], p[1], p[2])?;
            (plane.surface(), plane.patch(Rect::square(a.range)), format!("plane({}, {}, {})", p[0], p[1], p[2]))
        }
        None => {
            let g = AlphaBetaGraph::new(a.alpha, a.beta)?;
            (g.surface(), g.patch(Rect::square(a.range)), format!("graph({}, {})", a.alpha, a.beta))
        }
    };
    for &y in &axis {
        for &t in &axis {
            let h = surface.geometry(patch.point(y, t))?.mean_curvature();
            sup = sup.max(h.abs());
            rows.push(vec![num(y), num(t), num(h)]);
        }
    }
    let csv = csv_text(&["y", "t", "H"], rows).map_err(io)?;
    Ok(Execution {
        outputs: json!({
            "surface": label,
            "points": axis.len() * axis.len(),
            "sup_abs_h": sup,
            "csv": "curvature.csv",
        }),
        quadrature: None,
        files: vec![("curvature.csv".into(), csv)],
        status: Status::Ok,
    })
}

fn identities(a: &IdentitiesArgs) -> Result<Execution, Error> {
    let cfg = SuiteConfig {
        alpha: a.alpha,
        beta: a.beta,
        samples: a.samples,
        seed: a.seed,
        ibp_trials: a.ibp_trials,
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg)?;
    let status = if report.all_passed() {
        Status::Ok
    } else {
        let first = report
            .identities
            .iter()
            .find(|r| !r.passed)
            .map(|r| match r.worst_point {
                Some(p) => format!("{} on {} at {p}: residual {:e}", r.identity, r.surface, r.max_residual),
                None => format!("{} on {}", r.identity, r.surface),
            })
            .or_else(|| {
                report
                    .integration_by_parts
                    .iter()
                    .find(|r| !r.passed)
                    .map(|r| format!("lemma {} trial {}: residual {:e} > {:e}", r.lemma, r.trial, r.residual, r.bound))
            })
            .unwrap_or_default();
        Status::Failed(first)
    };
    let outputs = serde_json::to_value(&report).map_err(|e| io(e.into()))?;
    Ok(Execution {
        files: vec![("identities.json".into(), serde_json::to_string_pretty(&report).map_err(|e| io(e.into()))?)],
        outputs,
        quadrature: Some(cfg.quadrature),
        status,
    })
}

fn scan_csv(rows: &[ScanRow]) -> Result<String, Error> {
    csv_text(
        &["k", "value", "error", "converged"],
        rows.iter()
            .map(|r| vec![r.k.to_string(), num(r.value), num(r.error), r.converged.to_string()]),
    )
    .map_err(io)
}

fn instability(a: &InstabilityArgs) -> Result<Execution, Error> {
    let quad = QuadratureSpec::default().with_rel_tol(a.tol);
    match certify_instability(a.alpha, a.beta, a.direction.into(), a.kmax, &quad) {
        Ok(cert) => {
            let text = serde_json::to_string_pretty(&cert).map_err(|e| io(e.into()))?;
            Ok(Execution {
                outputs: serde_json::to_value(&cert).map_err(|e| io(e.into()))?,
                quadrature: Some(cert.quadrature),
                files: vec![("certificate.json".into(), text), ("scan.csv".into(), scan_csv(&cert.scan)?)],
                status: Status::Ok,
            })
        }
        Err(Error::ScanExhausted { k_max, rows }) => Ok(Execution {
            outputs: json!({ "exhausted": true, "k_max": k_max, "scan": rows }),
            quadrature: Some(quad),
            files: vec![("scan.csv".into(), scan_csv(&rows)?)],
            status: Status::Exhausted,
        }),
        Err(e) => Err(e),
    }
}

fn parse_klist(s: &str) -> Result<Vec<u32>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<u32>()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::InvalidParameter {
                    name: "klist",
                    reason: format!("expected positive integers, got {p:?}"),
                })
        })
        .collect()
}

fn hardy(a: &HardyArgs) -> Result<Execution, Error> {
    let quad = QuadratureSpec::default().with_rel_tol(a.tol);
    let ks = parse_klist(&a.klist)?;
    let lim = hardy_limits(a.alpha);
    let sides = ks
        .iter()
        .map(|&k| hardy_sides(CutoffFamily::new(k)?, a.alpha, &quad))
        .collect::<Result<Vec<_>, _>>()?;
    let csv = csv_text(
        &["k", "lhs", "rhs", "gap", "lhs_limit", "rhs_limit", "gap_limit"],
        sides.iter().map(|s| {
            vec![
                s.k.to_string(),
                num(s.lhs),
                num(s.rhs),
                num(s.gap),
                num(lim.lhs),
                num(lim.rhs),
                num(lim.gap),
            ]
        }),
    )
    .map_err(io)?;
    Ok(Execution {
        outputs: json!({ "alpha": a.alpha, "limits": lim, "rows": sides }),
        quadrature: Some(quad),
        files: vec![("hardy.csv".into(), csv)],
        status: Status::Ok,
    })
}

fn bump(s: Jet) -> Jet {
    if s.value.abs() >= 1.0 {
        Jet::constant(0.0)
    } else {
        (1.0 - s * s).powi(4)
    }
}

fn burgers(a: &BurgersArgs) -> Result<Execution, Error> {
    let (phi, default_window) = match a.mode {
        BurgersMode::Family => (AlphaBetaGraph::new(a.alpha, a.beta)?.intrinsic_phi(), Rect::square(1.0)),
        BurgersMode::Plane => (
            {
                let p = fixed::<3>(&a.plane, "plane")?;
                VerticalPlane::new(p[0], p[1], p[2])?.intrinsic_phi()?
            },
            Rect::new(0.0, 1.0, 0.0, 1.0),
        ),
        BurgersMode::Custom => {
            let c = fixed::<6>(&a.coeffs, "coeffs")?;
            (
                PlaneField::new(move |u, v| {
                    u * u * c[3] + u * v * c[4] + v * v * c[5] + u * c[1] + v * c[2] + c[0]
                }),
                Rect::square(1.0),
            )
        }
    };
    let window = match &a.window {
        Some(w) => {
            let w = fixed::<4>(w, "window")?;
            let r = Rect::new(w[0], w[1], w[2], w[3]);
            if !(r.u.0 < r.u.1 && r.v.0 < r.v.1) {
                return Err(Error::InvalidParameter {
                    name: "window",
                    reason: "expected u0 < u1 and v0 < v1".into(),
                });
            }
            r
        }
        None => default_window,
    };
    let quad = QuadratureSpec::default().with_rel_tol(1e-10).with_abs_tol(1e-12);
    let graph = IntrinsicGraph::new(phi.clone(), window);
    let perimeter = graph_perimeter(&phi, &Window::new(window), &quad)?;

    let mut sup: f64 = 0.0;
    let n = 41;
    for i in 0..n {
        for j in 0..n {
            let u = window.u.0 + (window.u.1 - window.u.0) * i as f64 / (n - 1) as f64;
            let v = window.v.0 + (window.v.1 - window.v.0) * j as f64 / (n - 1) as f64;
            sup = sup.max(graph.mean_curvature(u, v).abs());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut trials = Vec::new();
    let (mut max_diff, mut max_abs): (f64, f64) = (0.0, 0.0);
    for _ in 0..a.trials {
        let (hu, hv) = (0.5 * (window.u.1 - window.u.0), 0.5 * (window.v.1 - window.v.0));
        let (ru, rv) = (hu * rng.gen_range(0.3..1.0), hv * rng.gen_range(0.3..1.0));
        let cu = window.u.0 + ru + (2.0 * (hu - ru)) * rng.gen_range(0.0..1.0);
        let cv = window.v.0 + rv + (2.0 * (hv - rv)) * rng.gen_range(0.0..1.0);
        let c = rng.gen_range(-1.0..1.0);
        let zeta = PlaneField::new(move |u, v| bump((u - cu) / ru) * bump((v - cv) / rv) * (u * c + 1.5));
        let w = Window::new(Rect::new(cu - ru, cu + ru, cv - rv, cv + rv));
        let weak = graph_first_variation(&phi, &zeta, &w, &quad, FirstVariationForm::Weak)?;
        let strong = graph_first_variation(&phi, &zeta, &w, &quad, FirstVariationForm::Strong)?;
        max_diff = max_diff.max((weak.value - strong.value).abs());
        max_abs = max_abs.max(weak.value.abs()).max(strong.value.abs());
        trials.push(json!({ "center": [cu, cv], "radii": [ru, rv], "weak": weak, "strong": strong }));
    }
    let outputs = json!({
        "mode": a.mode,
        "window": window,
        "perimeter": perimeter,
        "sup_abs_mean_curvature": sup,
        "first_variation": {
            "trials": trials,
            "max_weak_strong_difference": max_diff,
            "max_abs_value": max_abs,
        },
    });
    Ok(Execution {
        files: vec![("burgers.json".into(), serde_json::to_string_pretty(&outputs).map_err(|e| io(e.into()))?)],
        outputs,
        quadrature: Some(quad),
        status: Status::Ok,
    })
}
