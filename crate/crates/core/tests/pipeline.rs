use cesembed_core::oracle::{embedding_ratio, ratio};
use cesembed_core::reduce::{multiplier_to_embedding, triviality_check, Triviality};
use cesembed_core::{
    canonicalize, estimate_best_constant, estimate_original_constant, parse_weight, theorem_verdict, EmbeddingProblem,
    Exponent, Interval, OracleConfig, SpaceKind, SpaceSpec, StepFunction,
};

fn ces(p: (i64, i64), q: (i64, i64), u: &str, v: &str) -> SpaceSpec<f64> {
    SpaceSpec::new(
        SpaceKind::Ces,
        Exponent::finite(p.0, p.1).unwrap(),
        Exponent::finite(q.0, q.1).unwrap(),
        parse_weight(u).unwrap(),
        parse_weight(v).unwrap(),
        Interval::new(0.0, 1.0).unwrap(),
    )
    .unwrap()
}

fn quick() -> OracleConfig<f64> {
    OracleConfig { grid_size: 64, restarts: 8, ..OracleConfig::default() }
}

#[test]
fn canonical_ratio_matches_original_power() {
    let configs = [((2, 1), (3, 1), (1, 1), (2, 1)), ((1, 1), (1, 2), (1, 2), (1, 1)), ((3, 2), (2, 1), (1, 1), (5, 2))];
    let f = StepFunction::new(vec![0.1, 0.3, 0.35, 0.8], vec![1.5, 0.2, 3.0]).unwrap();
    for (p1, q1, p2, q2) in configs {
        let src = ces(p1, q1, "pow:0.4", "scale:2*pow:0");
        let tgt = ces(p2, q2, "pow:-0.2", "pow:0.3");
        let e = EmbeddingProblem::new(src, tgt).unwrap();
        let (c, p1r) = canonicalize(&e).unwrap();
        let p1f = *p1r.numer() as f64 / *p1r.denom() as f64;
        let original = embedding_ratio(&e, &f).unwrap().value();
        let g = f.map_values(|x| (2.0 * x).powf(p1f));
        let canonical = ratio(&c, &g).unwrap().value();
        assert!((original.powf(p1f) / canonical - 1.0).abs() < 1e-8, "{e}: {original}^{p1f} vs {canonical}");
    }
}

#[test]
fn constant_multiplier_scales_oracle_exactly() {
    let base = EmbeddingProblem::new(ces((1, 1), (2, 1), "pow:0", "pow:0"), ces((1, 1), (1, 1), "pow:0.5", "pow:0")).unwrap();
    let scaled = multiplier_to_embedding(&base, &parse_weight("scale:3*pow:0").unwrap()).unwrap();
    let a = estimate_original_constant(&base, &quick()).unwrap().best_ratio.value();
    let b = estimate_original_constant(&scaled, &quick()).unwrap().best_ratio.value();
    assert!((b / a - 3.0).abs() < 1e-9, "{a} -> {b}");
}

#[test]
fn oracle_agrees_through_canonicalization() {
    let e = EmbeddingProblem::new(ces((2, 1), (2, 1), "pow:0", "pow:0"), ces((2, 1), (4, 1), "pow:0", "pow:0")).unwrap();
    let (c, p1) = canonicalize(&e).unwrap();
    assert_eq!(p1, 2.into());
    let orig = estimate_original_constant(&e, &quick()).unwrap().best_ratio.value();
    let canon = estimate_best_constant(&c, &quick()).unwrap().best_ratio.value();
    assert!((orig.powi(2) / canon - 1.0).abs() < 0.03, "{orig}^2 vs {canon}");
}

#[test]
fn theorem_and_oracle_on_a_regime_i_embedding() {
    let e = EmbeddingProblem::new(ces((1, 1), (1, 1), "pow:0", "pow:0"), ces((1, 1), (1, 1), "pow:0", "pow:0")).unwrap();
    let (c, _) = canonicalize(&e).unwrap();
    assert_eq!(triviality_check(&c), Triviality::Proceed);
    let rep = theorem_verdict(&c).unwrap();
    assert!(rep.finite);
    assert!((rep.estimate.value() - 1.0).abs() < 1e-6);
    let o = estimate_best_constant(&c, &quick()).unwrap();
    assert!((o.best_ratio.value() - 1.0).abs() < 0.02);
    let json = serde_json::to_value(&o).unwrap();
    for key in ["best_ratio", "argmax", "ladder_trace", "diverging"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}
