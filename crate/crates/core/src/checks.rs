//! Seeded numerical checks of the frame identities and integration-by-parts
//! lemmas. Used by the command-line tool and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph_family::AlphaBetaGraph;
use crate::heisenberg::{Point, ScalarField};
use crate::jet::Jet;
use crate::quadrature::{QuadratureSpec, Rect};
use crate::surface::{FrameGeometry, LevelSurface, SurfaceFrame};

/// Pointwise identities pass when every normalized residual is below this.
pub const IDENTITY_THRESHOLD: f64 = 1e-9;

/// Integration-by-parts residuals must stay below this multiple of the
/// combined quadrature error estimate.
pub const IBP_SAFETY: f64 = 10.0;

/// Points with `W / |N|` below this are not sampled.
const SAMPLE_MIN_RATIO: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub alpha: f64,
    pub beta: f64,
    pub samples: usize,
    pub seed: u64,
    pub ibp_trials: usize,
    pub quadrature: QuadratureSpec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            samples: 1000,
            seed: 0x5eed,
            ibp_trials: 10,
            quadrature: QuadratureSpec::default().with_rel_tol(1e-10),
        }
    }
}

/// Largest normalized residual of one identity on one surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub surface: String,
    pub samples: usize,
    pub max_residual: f64,
    pub worst_point: Option<Point>,
    pub threshold: f64,
    pub passed: bool,
}

/// One integration-by-parts trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IbpReport {
    pub lemma: String,
    pub trial: usize,
    pub residual: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub identities: Vec<IdentityReport>,
    pub integration_by_parts: Vec<IbpReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.identities.iter().all(|r| r.passed) && self.integration_by_parts.iter().all(|r| r.passed)
    }
}

/// `|lhs - rhs| / max(1, |lhs|, |rhs|)`.
pub fn normalized_residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / 1f64.max(lhs.abs()).max(rhs.abs())
}

/// A named surface and a sampler of points on it.
struct TestSurface {
    name: String,
    surface: LevelSurface,
    sample: Box<dyn Fn(&mut ChaCha8Rng) -> Point>,
    graph: Option<AlphaBetaGraph>,
}

fn test_surfaces(alpha: f64, beta: f64) -> Result<Vec<TestSurface>> {
    let graph = AlphaBetaGraph::new(alpha, beta)?;
    Ok(vec![
        TestSurface {
            name: format!("graph(alpha={alpha}, beta={beta})"),
            surface: graph.surface(),
            sample: Box::new(move |rng| graph.chart(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))),
            graph: Some(graph),
        },
        TestSurface {
            name: "cylinder x^2 + y^2 = 1".into(),
            surface: LevelSurface::new(ScalarField::new(|x, y, _| x * x + y * y - 1.0)),
            sample: Box::new(|rng| {
                let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                Point::new(th.cos(), th.sin(), rng.gen_range(-5.0..5.0))
            }),
            graph: None,
        },
        TestSurface {
            name: "paraboloid t = (x^2 + y^2) / 4 + x y^2 / 3".into(),
            surface: LevelSurface::new(ScalarField::new(|x, y, t| t - (x * x + y * y) * 0.25 - x * y * y / 3.0)),
            sample: Box::new(|rng| {
                let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                Point::new(x, y, (x * x + y * y) * 0.25 + x * y * y / 3.0)
            }),
            graph: None,
        },
    ])
}

/// A random smooth test field.
fn random_field(rng: &mut ChaCha8Rng) -> ScalarField {
    let c: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    ScalarField::new(move |x, y, t| {
        (x * c[0] + y * c[1] + t * c[2]).sin() + x * y * t * c[3] + y * y * c[4] + (t * c[5]).cos() * x
    })
}

struct Accumulator {
    identity: &'static str,
    max: f64,
    worst: Option<Point>,
}

impl Accumulator {
    fn new(identity: &'static str) -> Self {
        Self {
            identity,
            max: 0.0,
            worst: None,
        }
    }

    fn record(&mut self, residual: f64, g: Point) {
        if residual > self.max || residual.is_nan() {
            self.max = if residual.is_nan() { f64::INFINITY } else { residual };
            self.worst = Some(g);
        }
    }

    fn report(self, surface: &str, samples: usize) -> IdentityReport {
        IdentityReport {
            identity: self.identity.into(),
            surface: surface.into(),
            samples,
            max_residual: self.max,
            worst_point: self.worst,
            threshold: IDENTITY_THRESHOLD,
            passed: self.max < IDENTITY_THRESHOLD,
        }
    }
}

fn pointwise(geo: &FrameGeometry, f: &Jet) -> [f64; 5] {
    let SurfaceFrame { pbar, qbar, .. } = geo.frame;
    let h = geo.mean_curvature();
    let zp = geo.z(&geo.pbar.grad);
    let zq = geo.z(&geo.qbar.grad);
    let mc = normalized_residual(qbar * zp - pbar * zq, h);
    let acca = normalized_residual(h * h, zp * zp + zq * zq);
    let zob = normalized_residual(-geo.z(&geo.obar.grad), geo.a_coefficient());
    let (x1, x2) = (geo.x1(&f.grad), geo.x2(&f.grad));
    let (zf, yf) = (geo.z(&f.grad), geo.y(&f.grad));
    let xs = normalized_residual(x1, qbar * zf + pbar * yf).max(normalized_residual(x2, -pbar * zf + qbar * yf));
    let delz = normalized_residual(zf * zf, x1 * x1 + x2 * x2 - yf * yf);
    [mc, acca, zob, xs, delz]
}

/// Pointwise identities on every test surface at `samples` random points.
pub fn pointwise_identities(alpha: f64, beta: f64, samples: usize, seed: u64) -> Result<Vec<IdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for ts in test_surfaces(alpha, beta)? {
        let field = random_field(&mut rng);
        let mut acc = ["mc", "accasquare", "Zob", "Xs", "delZ"].map(Accumulator::new);
        let mut coef = ["1def", "2def"].map(Accumulator::new);
        let mut taken = 0;
        while taken < samples {
            let g = (ts.sample)(&mut rng);
            let geo = match ts.surface.geometry(g) {
                Ok(geo) if geo.frame.w / geo.normal_norm >= SAMPLE_MIN_RATIO => geo,
                _ => continue,
            };
            taken += 1;
            let f = field.jet(g);
            for (a, r) in acc.iter_mut().zip(pointwise(&geo, &f)) {
                a.record(r, g);
            }
            if let Some(graph) = ts.graph {
                coef[0].record(normalized_residual(geo.x1_coefficient(), graph.coefficient_x1(g.y, g.t)), g);
                coef[1].record(normalized_residual(geo.nu_coefficient(), graph.coefficient_nu(g.y, g.t)), g);
            }
        }
        out.extend(acc.into_iter().map(|a| a.report(&ts.name, samples)));
        if ts.graph.is_some() {
            out.extend(coef.into_iter().map(|a| a.report(&ts.name, samples)));
        }
    }
    Ok(out)
}

/// Largest deviation of the generic frame from the closed forms on the graph,
/// each component normalized by `max(|closed|, W)`.
pub fn frame_agreement(graph: &AlphaBetaGraph, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let surface = graph.surface();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (y, t) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let gen = surface.frame(graph.chart(y, t))?;
        let closed = graph.closed_frame(y, t);
        let pairs = [
            (gen.p, closed.p),
            (gen.q, closed.q),
            (gen.omega, closed.omega),
            (gen.w, closed.w),
        ];
        for (a, b) in pairs {
            worst = worst.max((a - b).abs() / b.abs().max(closed.w));
        }
        for (a, b) in [(gen.pbar, closed.pbar), (gen.qbar, closed.qbar), (gen.obar, closed.obar)] {
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// `(1 - s^2)^4` on `|s| < 1`, zero outside.
fn bump(s: Jet) -> Jet {
    if s.value.abs() >= 1.0 {
        Jet::constant(0.0)
    } else {
        (1.0 - s * s).powi(4)
    }
}

/// Integration-by-parts lemmas on the `alpha = 1, beta = 0` graph for random
/// compactly supported `zeta`:
/// `int Z zeta + int zeta obar = 0` and
/// `int T zeta - int obar Y zeta - int zeta obar H = 0`.
pub fn integration_by_parts(trials: usize, seed: u64, quad: &QuadratureSpec) -> Result<Vec<IbpReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1b9);
    let graph = AlphaBetaGraph::new(1.0, 0.0)?;
    let surface = graph.surface();
    let mut out = Vec::new();
    for trial in 0..trials {
        let (cy, ct) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (ry, rt) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
        let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let zeta = ScalarField::new(move |x, y, t| {
            bump((y - cy) / ry) * bump((t - ct) / rt) * (x * c[0] + y * t * c[1] + (y * c[2]).cos())
        });
        let patch = graph.patch(Rect::new(cy - ry, cy + ry, ct - rt, ct + rt));
        let integral = |f: &(dyn Fn(&FrameGeometry, &Jet) -> f64 + Sync)| {
            patch.integrate(&surface, quad, |s| Ok(f(&s.geometry, &zeta.jet(s.geometry.point))))
        };
        let z = integral(&|geo, j| geo.z(&j.grad))?;
        let zo = integral(&|geo, j| j.value * geo.frame.obar)?;
        let residual = (z.value + zo.value).abs();
        let bound = IBP_SAFETY * (z.error + zo.error);
        out.push(IbpReport {
            lemma: "Zf".into(),
            trial,
            residual,
            bound,
            passed: residual < bound,
        });

        let t = integral(&|geo, j| geo.t(&j.grad))?;
        let yo = integral(&|geo, j| geo.y(&j.grad) * geo.frame.obar)?;
        let oh = integral(&|geo, j| j.value * geo.frame.obar * geo.mean_curvature())?;
        let residual = (t.value - yo.value - oh.value).abs();
        let bound = IBP_SAFETY * (t.error + yo.error + oh.error);
        out.push(IbpReport {
            lemma: "Y".into(),
            trial,
            residual,
            bound,
            passed: residual < bound,
        });
    }
    Ok(out)
}

/// Pointwise identities plus integration by parts.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    Ok(SuiteReport {
        identities: pointwise_identities(config.alpha, config.beta, config.samples, config.seed)?,
        integration_by_parts: integration_by_parts(config.ibp_trials, config.seed, &config.quadrature)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let cfg = SuiteConfig {
            samples: 200,
            ibp_trials: 3,
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg).unwrap();
        for i in &r.identities {
            assert!(i.passed, "{i:?}");
        }
        for i in &r.integration_by_parts {
            assert!(i.passed, "{i:?}");
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = pointwise_identities(2.0, 1.0, 50, 7).unwrap();
        let b = pointwise_identities(2.0, 1.0, 50, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frame_agreement_is_tight() {
        let g = AlphaBetaGraph::new(0.5, -3.0).unwrap();
        assert!(frame_agreement(&g, 500, 1).unwrap() < 1e-12);
    }

    #[test]
    fn zero_samples_vacuous() {
        let r = pointwise_identities(1.0, 0.0, 0, 1).unwrap();
        assert!(r.iter().all(|i| i.passed && i.samples == 0));
    }
}
