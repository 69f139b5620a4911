//! Acceptance criteria. Run with `cargo test --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use hminimal::checks::{frame_agreement, integration_by_parts, pointwise_identities};
use hminimal::graph_family::AlphaBetaGraph;
use hminimal::heisenberg::{PlaneField, ScalarField};
use hminimal::instability::{
    certify_instability, hardy_limits, hardy_sides, surface_row, CutoffFamily, Direction,
};
use hminimal::intrinsic::{graph_first_variation, graph_mean_curvature, FirstVariationForm};
use hminimal::jet::Jet;
use hminimal::quadrature::{integrate_1d, integrate_2d, Estimate, QuadratureSpec, Rect, Window};
use hminimal::variation::{
    pulled_back_nu, pulled_back_x1, second_variation_general, second_variation_nu, second_variation_x1,
    DeformationField, Form,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(id: u32, name: &str, elapsed: Duration, o: &Outcome) {
    println!(
        "criterion {id} [{}] {name}: {} ({:.2} s)",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64()
    );
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let o = f();
    (o, start.elapsed())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn bump(s: Jet) -> Jet {
    if s.value.abs() >= 1.0 {
        Jet::constant(0.0)
    } else {
        (1.0 - s * s).powi(4)
    }
}

const FAMILY: [(f64, f64); 3] = [(1.0, 0.0), (2.0, 1.0), (0.5, -3.0)];

fn c1_minimality() -> Outcome {
    let mut worst: f64 = 0.0;
    for (a, b) in FAMILY {
        let g = AlphaBetaGraph::new(a, b).unwrap();
        let s = g.surface();
        for i in 0..50 {
            for j in 0..50 {
                let y = -5.0 + 10.0 * i as f64 / 49.0;
                let t = -5.0 + 10.0 * j as f64 / 49.0;
                worst = worst.max(s.geometry(g.chart(y, t)).unwrap().mean_curvature().abs());
            }
        }
    }
    Outcome {
        passed: worst < 1e-9,
        detail: format!("sup |H| = {worst:.3e} (< 1e-9)"),
    }
}

fn c2_frames() -> Outcome {
    let worst = FAMILY
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| frame_agreement(&AlphaBetaGraph::new(a, b).unwrap(), 10_000, 100 + i as u64).unwrap())
        .fold(0.0, f64::max);
    Outcome {
        passed: worst < 1e-12,
        detail: format!("max relative deviation {worst:.3e} over 3 x 10^4 points (< 1e-12)"),
    }
}

fn c3_identities() -> Outcome {
    let mut reports = Vec::new();
    for (i, (a, b)) in FAMILY.into_iter().enumerate() {
        reports.extend(pointwise_identities(a, b, 1000, 7 + i as u64).unwrap());
    }
    let worst = reports.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} on {}", r.identity, r.surface))
        .collect();
    Outcome {
        passed: failed.is_empty(),
        detail: format!(
            "{} identity/surface pairs, worst residual {worst:.3e} (< 1e-9){}",
            reports.len(),
            if failed.is_empty() { String::new() } else { format!("; failed: {failed:?}") }
        ),
    }
}

fn c4_integration_by_parts() -> Outcome {
    let quad = QuadratureSpec::default().with_rel_tol(1e-10);
    let r = integration_by_parts(10, 11, &quad).unwrap();
    let worst = r.iter().map(|x| x.residual / x.bound).fold(0.0, f64::max);
    Outcome {
        passed: r.len() == 20 && r.iter().all(|x| x.passed),
        detail: format!("{} trials, worst residual / (10 x error) = {worst:.3e} (< 1)", r.len()),
    }
}

fn c5_hardy() -> Outcome {
    let quad = QuadratureSpec::default().with_rel_tol(1e-10);
    let lim = hardy_limits(2.0);
    let s = hardy_sides(CutoffFamily::new(200).unwrap(), 2.0, &quad).unwrap();
    let (dl, dr, dg) = (rel(s.lhs, PI / 2.0), rel(s.rhs, PI / 2.0), rel(s.gap, 3.0 * PI / 8.0));
    assert!((lim.lhs - PI / 2.0).abs() < 1e-15 && (lim.gap - 3.0 * PI / 8.0).abs() < 1e-15);
    let ks: Vec<u32> = (1..=20).chain([40, 80, 160, 200]).collect();
    let gaps: Vec<(u32, f64)> = ks
        .iter()
        .map(|&k| (k, hardy_sides(CutoffFamily::new(k).unwrap(), 2.0, &quad).unwrap().gap))
        .collect();
    let k0 = gaps.iter().find(|(_, g)| *g > 0.0).map(|(k, _)| *k);
    let positive = gaps.iter().filter(|(k, _)| *k >= 4).all(|(_, g)| *g > 0.0);
    Outcome {
        passed: dl < 0.01 && dr < 0.02 && dg < 0.05 && positive,
        detail: format!(
            "k=200: lhs {:.6} ({:.2}%), rhs {:.6} ({:.2}%), gap {:.6} ({:.2}%); gap > 0 for all tested k >= 4: {positive}; first positive k = {k0:?}",
            s.lhs,
            100.0 * dl,
            s.rhs,
            100.0 * dr,
            s.gap,
            100.0 * dg
        ),
    }
}

fn c6_certificates() -> Outcome {
    let quad = QuadratureSpec::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, b) in [(1.0, 0.0), (1.0, 5.0), (3.0, -1.0)] {
        for dir in [Direction::X1, Direction::NuH] {
            match certify_instability(a, b, dir, 64, &quad) {
                Ok(c) => {
                    let good = c.value + c.error < 0.0 && (c.value - c.surface_value).abs() <= c.tolerance;
                    ok &= good;
                    parts.push(format!("({a},{b},{dir}) k={} V={:.4e}", c.k, c.value));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("({a},{b},{dir}) error: {e}"));
                }
            }
        }
    }
    Outcome {
        passed: ok,
        detail: parts.join("; "),
    }
}

/// A random deformation on a random graph, given both as a planar function
/// and as a field on the group that restricts to it.
struct Trial {
    graph: AlphaBetaGraph,
    u: PlaneField,
    a: ScalarField,
    support: Rect,
}

fn random_trial(rng: &mut ChaCha8Rng) -> Trial {
    let graph = AlphaBetaGraph::new(rng.gen_range(0.5..3.0), rng.gen_range(-2.0..2.0)).unwrap();
    let (cy, ct) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let (ry, rt) = (rng.gen_range(0.5..2.5), rng.gen_range(0.5..2.5));
    let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let rule = move |y: Jet, t: Jet| bump((y - cy) / ry) * bump((t - ct) / rt) * (y * c[0] + t * t * c[1] + 1.0 + c[2]);
    Trial {
        graph,
        u: PlaneField::new(rule),
        a: ScalarField::new(move |_, y, t| rule(y, t)),
        support: Rect::new(cy - ry, cy + ry, ct - rt, ct + rt),
    }
}

fn max_pairwise(values: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            worst = worst.max(rel(values[i], values[j]));
        }
    }
    worst
}

fn c7_routes() -> Outcome {
    let quad = QuadratureSpec::default().with_rel_tol(1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut wx, mut wn) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let tr = random_trial(&mut rng);
        let s = tr.graph.surface();
        let patch = tr.graph.patch(tr.support);
        let w = Window::new(tr.support);
        let x1 = [
            second_variation_general(&s, &patch, &DeformationField::along_x1(tr.a.clone(), tr.support), &quad),
            second_variation_x1(&s, &patch, &tr.a, &quad, Form::Raw),
            second_variation_x1(&s, &patch, &tr.a, &quad, Form::Reduced),
            pulled_back_x1(&tr.graph, &tr.u, &w, &quad),
        ]
        .map(|r| r.unwrap().value);
        let nu_x = DeformationField::horizontal_normal(tr.a.clone(), ScalarField::zero(), tr.support);
        let nu = [
            second_variation_general(&s, &patch, &nu_x, &quad),
            second_variation_nu(&s, &patch, &tr.a, None, &quad, Form::Raw),
            second_variation_nu(&s, &patch, &tr.a, None, &quad, Form::Reduced),
            pulled_back_nu(&tr.graph, &tr.u, &w, &quad),
        ]
        .map(|r| r.unwrap().value);
        wx = wx.max(max_pairwise(&x1));
        wn = wn.max(max_pairwise(&nu));
    }
    Outcome {
        passed: wx < 1e-6 && wn < 1e-6,
        detail: format!("5 random deformations: X1 chain max pairwise {wx:.3e}, nu_H chain {wn:.3e} (< 1e-6)"),
    }
}

fn c8_burgers() -> Outcome {
    let mut sup: f64 = 0.0;
    for (a, b) in FAMILY {
        let phi = AlphaBetaGraph::new(a, b).unwrap().intrinsic_phi();
        for i in 0..50 {
            for j in 0..50 {
                let u = -5.0 + 10.0 * i as f64 / 49.0;
                let v = -5.0 + 10.0 * j as f64 / 49.0;
                sup = sup.max(graph_mean_curvature(&phi, u, v).abs());
            }
        }
    }
    let quad = QuadratureSpec::default().with_rel_tol(1e-10).with_abs_tol(1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut weak_strong: f64 = 0.0;
    let mut family_fv: f64 = 0.0;
    let generic = PlaneField::new(|u, v| (u * 0.7).sin() * v + u * u * 0.2 - (v * 0.5).cos());
    let family = AlphaBetaGraph::new(1.0, 0.0).unwrap().intrinsic_phi();
    for _ in 0..5 {
        let (cu, cv) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let r = rng.gen_range(0.5..1.5);
        let c = rng.gen_range(-1.0..1.0);
        let zeta = PlaneField::new(move |u, v| bump((u - cu) / r) * bump((v - cv) / r) * (u * c + 1.5));
        let w = Window::new(Rect::new(cu - r, cu + r, cv - r, cv + r));
        for phi in [&generic, &family] {
            let weak = graph_first_variation(phi, &zeta, &w, &quad, FirstVariationForm::Weak).unwrap();
            let strong = graph_first_variation(phi, &zeta, &w, &quad, FirstVariationForm::Strong).unwrap();
            weak_strong = weak_strong.max((weak.value - strong.value).abs());
            if std::ptr::eq(phi, &family) {
                family_fv = family_fv.max(weak.value.abs()).max(strong.value.abs());
            }
        }
    }
    Outcome {
        passed: sup < 1e-8 && weak_strong < 1e-7 && family_fv < 1e-8,
        detail: format!(
            "sup |H| on family {sup:.3e} (< 1e-8); weak - strong {weak_strong:.3e} (< 1e-7); family first variation {family_fv:.3e}"
        ),
    }
}

fn battery() -> Vec<(String, Estimate, f64)> {
    let q = QuadratureSpec::default();
    let one = |name: &str, f: fn(f64) -> f64, a: f64, b: f64, exact: f64| {
        (name.to_string(), integrate_1d(f, a, b, &q).unwrap(), exact)
    };
    let two = |name: &str, f: fn(f64, f64) -> f64, r: Rect, exact: f64| {
        (name.to_string(), integrate_2d(f, r, &q).unwrap(), exact)
    };
    let s2 = 2f64.sqrt();
    vec![
        one("1/(1+y^2)^2 on [-1,1]", |y| 1.0 / (1.0 + y * y).powi(2), -1.0, 1.0, (PI + 2.0) / 4.0),
        one("1/(1+x^2) on [0,1]", |x| 1.0 / (1.0 + x * x), 0.0, 1.0, PI / 4.0),
        one("x^2/(1+x^2) on [0,1]", |x| x * x / (1.0 + x * x), 0.0, 1.0, 1.0 - PI / 4.0),
        one("1/(1+y^2/2) on [-5,5]", |y| 1.0 / (1.0 + 0.5 * y * y), -5.0, 5.0, 2.0 * s2 * (5.0 / s2).atan()),
        one("(1+x^2)^(-3/2) on [0,10]", |x| (1.0 + x * x).powf(-1.5), 0.0, 10.0, 10.0 / 101f64.sqrt()),
        one("1/(x+0.01) on [0,1]", |x| 1.0 / (x + 0.01), 0.0, 1.0, 101f64.ln()),
        one("x^3/(1+x) on [0,1]", |x| x.powi(3) / (1.0 + x), 0.0, 1.0, 5.0 / 6.0 - LN_2),
        one("1/(1+25x^2) on [-1,1]", |x| 1.0 / (1.0 + 25.0 * x * x), -1.0, 1.0, 0.4 * 5f64.atan()),
        one("x/(1+x^2)^2 on [0,2]", |x| x / (1.0 + x * x).powi(2), 0.0, 2.0, 0.4),
        one("sqrt(1+x^2) on [0,1]", |x| (1.0 + x * x).sqrt(), 0.0, 1.0, 0.5 * (s2 + 1f64.asinh())),
        one("1/(1+x^2)^3 on [-3,3]", |x| 1.0 / (1.0 + x * x).powi(3), -3.0, 3.0, 2.0 * (0.0075 + 0.1125 + 0.375 * 3f64.atan())),
        one("1/(1+x)^2 on [0,4]", |x| 1.0 / (1.0 + x).powi(2), 0.0, 4.0, 0.8),
        two("1/(1+x+y) on [0,1]^2", |x, y| 1.0 / (1.0 + x + y), Rect::new(0.0, 1.0, 0.0, 1.0), 3.0 * 3f64.ln() - 4.0 * LN_2),
        two("1/((1+x^2)(1+y^2)) on [-1,1]^2", |x, y| 1.0 / ((1.0 + x * x) * (1.0 + y * y)), Rect::square(1.0), PI * PI / 4.0),
        two(
            "(1+y^2/2)/(1+t^2)^(3/2) on [-2,2]^2",
            |y, t| (1.0 + 0.5 * y * y) / (1.0 + t * t).powf(1.5),
            Rect::square(2.0),
            (4.0 + 8.0 / 3.0) * 4.0 / 5f64.sqrt(),
        ),
        two("x y^2/(1+x^2) on [0,1]^2", |x, y| x * y * y / (1.0 + x * x), Rect::new(0.0, 1.0, 0.0, 1.0), LN_2 / 6.0),
        two("1/(1+x+y)^2 on [0,1]^2", |x, y| 1.0 / (1.0 + x + y).powi(2), Rect::new(0.0, 1.0, 0.0, 1.0), (4.0f64 / 3.0).ln()),
        two(
            "(x+y)^2/(1+x^2) on [0,1]^2",
            |x, y| (x + y).powi(2) / (1.0 + x * x),
            Rect::new(0.0, 1.0, 0.0, 1.0),
            1.0 - PI / 4.0 + LN_2 / 2.0 + PI / 12.0,
        ),
        two("x^2 y^3/(1+x) on [0,2]^2", |x, y| x * x * y.powi(3) / (1.0 + x), Rect::new(0.0, 2.0, 0.0, 2.0), 4.0 * 3f64.ln()),
        two(
            "1/((1+y^2/2) sqrt(1+t^2)) on [-4,4]^2",
            |y, t| 1.0 / ((1.0 + 0.5 * y * y) * (1.0 + t * t).sqrt()),
            Rect::square(4.0),
            2.0 * s2 * (4.0 / s2).atan() * 2.0 * 4f64.asinh(),
        ),
    ]
}

fn determinism_sample() -> Vec<u64> {
    let g = AlphaBetaGraph::new(1.0, 0.0).unwrap();
    let quad = QuadratureSpec::default();
    let s = surface_row(&g, Direction::X1, CutoffFamily::new(2).unwrap(), &quad).unwrap();
    let c = certify_instability(3.0, -1.0, Direction::NuH, 8, &quad).unwrap();
    let mut bits = vec![s.value.to_bits(), s.error.to_bits(), c.value.to_bits(), c.surface_value.to_bits()];
    bits.extend(battery().iter().map(|(_, e, _)| e.value.to_bits()));
    bits
}

fn c9_quadrature() -> Outcome {
    let b = battery();
    assert_eq!(b.len(), 20);
    let bounded = b.iter().filter(|(_, e, exact)| e.error >= (e.value - exact).abs()).count();
    let misses: Vec<&str> = b
        .iter()
        .filter(|(_, e, exact)| e.error < (e.value - exact).abs())
        .map(|(n, _, _)| n.as_str())
        .collect();
    let run = |n: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(determinism_sample)
    };
    let identical = run(1) == run(4);
    Outcome {
        passed: bounded * 100 >= 95 * b.len() && identical,
        detail: format!("error bound holds on {bounded}/20 (misses: {misses:?}); 1 vs 4 workers bit-identical: {identical}"),
    }
}

#[test]
fn acceptance() {
    let mut all = true;
    let mut run = |id: u32, name: &str, limit: Option<Duration>, f: fn() -> Outcome| {
        let (mut o, t) = timed(f);
        if let Some(limit) = limit {
            if t > limit {
                o.passed = false;
                o.detail.push_str(&format!("; runtime over {} s", limit.as_secs()));
            }
        }
        report(id, name, t, &o);
        all &= o.passed;
    };
    run(1, "H-minimality of the graph family", Some(Duration::from_secs(5)), c1_minimality);
    run(2, "closed-form frame agreement", None, c2_frames);
    run(3, "identity suite", None, c3_identities);
    run(4, "integration by parts", None, c4_integration_by_parts);
    run(5, "Hardy limits", Some(Duration::from_secs(10)), c5_hardy);
    run(6, "instability certificates", Some(Duration::from_secs(300)), c6_certificates);
    run(7, "route agreement", None, c7_routes);
    run(8, "Burgers chain", None, c8_burgers);
    run(9, "quadrature soundness and determinism", None, c9_quadrature);
    assert!(all, "at least one acceptance criterion failed");
}
