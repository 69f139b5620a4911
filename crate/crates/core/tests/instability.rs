use hminimal::instability::{
    certify_instability, hardy_limits, hardy_sides, scan, CutoffFamily, Direction, InstabilityCertificate,
};
use hminimal::quadrature::QuadratureSpec;
use hminimal::{AlphaBetaGraph, Error};

fn quad() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-11)
}

#[test]
fn gap_converges_at_rate_one_over_k() {
    for alpha in [0.5, 1.0, 2.0, 3.0] {
        let lim = hardy_limits(alpha).gap;
        let mut prev = f64::INFINITY;
        for k in [10, 20, 40, 80, 160] {
            let gap = hardy_sides(CutoffFamily::new(k).unwrap(), alpha, &quad()).unwrap().gap;
            let dev = (gap - lim).abs();
            assert!(gap < lim, "alpha {alpha}, k {k}: gap {gap} above limit {lim}");
            assert!(dev < prev, "alpha {alpha}, k {k}: not monotone");
            assert!(dev * k as f64 <= 3.0 * lim, "alpha {alpha}, k {k}: deviation {dev} not O(1/k)");
            prev = dev;
        }
    }
}

#[test]
fn hardy_sides_do_not_depend_on_beta() {
    // only the y-integrals enter the Hardy sides
    let g1 = AlphaBetaGraph::new(1.0, -1.0).unwrap();
    let g2 = AlphaBetaGraph::new(1.0, 5.0).unwrap();
    let s1 = hardy_sides(CutoffFamily::new(3).unwrap(), g1.alpha, &quad()).unwrap();
    let s2 = hardy_sides(CutoffFamily::new(3).unwrap(), g2.alpha, &quad()).unwrap();
    assert_eq!(s1, s2);
}

#[test]
fn certificates_exist_for_several_beta() {
    for beta in [-1.0, 0.0, 5.0] {
        for dir in [Direction::X1, Direction::NuH] {
            let c = certify_instability(1.0, beta, dir, 64, &QuadratureSpec::default()).unwrap();
            assert!(c.value + c.error < 0.0);
            assert!((c.value - c.surface_value).abs() <= c.tolerance);
        }
    }
}

#[test]
fn certificate_round_trips_through_json() {
    let c = certify_instability(2.0, 0.5, Direction::NuH, 16, &QuadratureSpec::default()).unwrap();
    let text = serde_json::to_string(&c).unwrap();
    let back: InstabilityCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["alpha", "beta", "direction", "k", "value", "error", "quadrature", "profile"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["direction"], "nuh");
    assert_eq!(v["profile"]["sup_derivative"], 2.0);
}

#[test]
fn scan_rows_are_negative_after_certification() {
    let g = AlphaBetaGraph::new(1.0, 0.0).unwrap();
    let rows = scan(&g, Direction::X1, 6, &QuadratureSpec::default()).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].value > 0.0);
    assert!(rows[1..].iter().all(|r| r.certifies()));
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(matches!(
        certify_instability(0.0, 0.0, Direction::X1, 4, &QuadratureSpec::default()),
        Err(Error::InvalidParameter { name: "alpha", .. })
    ));
    assert!(matches!(
        certify_instability(1.0, 0.0, Direction::X1, 4, &QuadratureSpec::default().with_rel_tol(0.0)),
        Err(Error::InvalidParameter { .. })
    ));
}
