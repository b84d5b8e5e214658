//! End-to-end acceptance checks. Runs without the libtest harness and prints
//! one `PASS`/`FAIL` line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use cesembed::{run_check, Command, RunRequest, Verdict};
use cesembed_core::constants::ConstantsConfig;
use cesembed_core::exponent::ratio_from_f64;
use cesembed_core::funcspace::{lebesgue_norm, pp_weight};
use cesembed_core::reduce::tilde_transform;
use cesembed_core::{
    canonicalize, classify_regime, estimate_best_constant, estimate_original_constant, eval_constant, parse_weight,
    space_norm, theorem_verdict, CanonicalProblem, ConstantId, EmbeddingProblem, Exponent, Interval, OracleConfig,
    Rational, Regime, SpaceKind, SpaceSpec, StepFunction, Weight, WeightExpr,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INF: f64 = f64::INFINITY;

fn canon(p: f64, q: f64, r: f64, u: &str, v: &str, w: &str, a: f64, b: f64) -> Result<CanonicalProblem<f64>> {
    let x = |t: f64| ratio_from_f64(t).ok_or_else(|| anyhow::anyhow!("exponent {t}"));
    Ok(CanonicalProblem::new(
        x(p)?,
        x(q)?,
        x(r)?,
        parse_weight(u)?,
        parse_weight(v)?,
        parse_weight(w)?,
        Interval::new(a, b)?,
    )?)
}

fn unit(p: f64, q: f64, r: f64) -> Result<CanonicalProblem<f64>> {
    canon(p, q, r, "pow:0", "pow:0", "pow:0", 0.0, 1.0)
}

fn space(kind: SpaceKind, p: Exponent, q: Exponent, u: &str, v: &str, a: f64, b: f64) -> Result<SpaceSpec<f64>> {
    Ok(SpaceSpec::new(kind, p, q, parse_weight(u)?, parse_weight(v)?, Interval::new(a, b)?)?)
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn a1() -> Result<String> {
    // (u, v, w, a, b, sup_s v(s) U(s) / W(s))
    let configs = [
        ("pow:0", "pow:0", "pow:0", 0.0, 1.0, 1.0),
        ("pow:1", "pow:0", "pow:0", 0.0, 1.0, 1.0),
        ("pow:0", "pow:0", "pow:1", 0.0, 1.0, 2.0),
        ("pow:0", "pow:0.5", "pow:0", 0.0, 1.0, 1.0),
        ("pow:-0.5", "pow:0", "pow:0", 0.0, 1.0, 2.0),
        ("pow:-2", "pow:0", "pow:-2", 1.0, INF, 1.0),
        ("pow:-3", "pow:1", "pow:-2", 1.0, INF, 0.5),
        ("pow:-3", "pow:0", "pow:-2", 1.0, INF, 0.5),
        ("pow:-2", "pow:-1", "pow:-2", 1.0, INF, 1.0),
        ("pow:-2", "pow:0", "pow:-1.5", 1.0, INF, 0.5),
    ];
    let cfg = OracleConfig::default();
    let start = Instant::now();
    let (mut worst, mut c1_margin) = (0.0f64, f64::INFINITY);
    for (u, v, w, a, b, exact) in configs {
        let c = canon(1.0, 1.0, 1.0, u, v, w, a, b)?;
        let o = estimate_best_constant(&c, &cfg)?;
        let err = rel(o.best_ratio.value(), exact);
        ensure!(err <= 0.02, "u={u} v={v} w={w}: oracle {} vs {exact}", o.best_ratio);
        let c1 = eval_constant(ConstantId::C1, &c, &ConstantsConfig::default())?;
        let rungs: Vec<f64> = c1.ladder.iter().map(|x| x.value()).collect();
        let last = c1.value.value();
        // truncation error of the deepest rung, bounded by the last rung step
        let trunc = rungs.windows(2).last().map_or(0.0, |w| (w[1] - w[0]).abs());
        ensure!(last + trunc >= exact * (1.0 - 1e-12), "u={u} v={v} w={w}: C1 {last} (+{trunc:.1e}) < {exact}");
        worst = worst.max(err);
        c1_margin = c1_margin.min((last + trunc) / exact - 1.0);
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(30), "runtime {took:?}");
    Ok(format!("10 configs, max oracle error {worst:.2e}, min (C1 + truncation)/exact - 1 = {c1_margin:.1e}, {took:.1?}"))
}

fn a2() -> Result<String> {
    let cfg = ConstantsConfig::default();
    let half_line = canon(1.0, 1.0, 1.0, "pow:-2", "pow:0", "pow:-2", 1.0, INF)?;
    let cases = [
        (ConstantId::C1, half_line, 1.0),
        (ConstantId::C2, unit(0.5, 0.5, 1.0)?, 0.5),
        (ConstantId::C3, unit(2.0, 2.0, 1.0)?, 1.0),
        (ConstantId::C4, unit(1.0, 0.5, 1.0)?, 1.0),
        (ConstantId::C5, unit(1.0, 0.5, 1.0)?, 1.0 / 6.0),
    ];
    let mut parts = Vec::new();
    for (id, c, want) in cases {
        let got = eval_constant(id, &c, &cfg)?.value.value();
        ensure!(rel(got, want) <= 0.01, "{id} = {got}, expected {want}");
        if id == ConstantId::C3 {
            ensure!(got >= 0.99, "C3 = {got}");
        }
        parts.push(format!("{id} = {got:.6}"));
    }
    Ok(parts.join(", "))
}

fn a3() -> Result<String> {
    let cfg = OracleConfig::default();
    let start = Instant::now();
    let finite = [
        ((1.0, 1.0, 1.0), Regime::I),
        ((0.5, 0.5, 1.0), Regime::II),
        ((2.0, 2.0, 1.0), Regime::III),
        ((0.5, 0.75, 0.25), Regime::IV),
        ((1.0, 0.5, 1.0), Regime::V),
        ((2.0, 0.5, 1.0), Regime::VI),
        ((2.0, 1.0, 1.0), Regime::VII),
    ];
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for ((p, q, r), regime) in finite {
        let c = unit(p, q, r)?;
        let t = theorem_verdict(&c)?;
        ensure!(t.regime == regime, "({p},{q},{r}) classified {}", t.regime);
        ensure!(t.finite, "({p},{q},{r}) theorem estimate {}", t.estimate);
        let o = estimate_best_constant(&c, &cfg)?;
        let a = o.best_ratio.value() / t.estimate.value();
        ensure!((0.01..=100.0).contains(&a), "regime {regime}: oracle/theorem = {a}");
        lo = lo.min(a);
        hi = hi.max(a);
    }
    let infinite = [
        canon(1.0, 1.0, 1.0, "pow:-2", "pow:0", "pow:0", 0.0, 1.0)?,
        canon(0.5, 2.0, 1.0, "pow:0", "pow:0", "pow:0", 0.0, 1.0)?,
        canon(1.0, 1.0, 1.0, "pow:-2", "pow:1", "pow:-2", 1.0, INF)?,
    ];
    for c in &infinite {
        let t = theorem_verdict(c)?;
        ensure!(!t.finite, "{}: theorem reports finite {}", c.summary().interval, t.estimate);
        let o = estimate_best_constant(c, &cfg)?;
        ensure!(o.diverging, "oracle not diverging, best {}", o.best_ratio);
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(240), "runtime {took:?}");
    Ok(format!("7 regimes, oracle/theorem in [{lo:.3}, {hi:.3}]; 3 infinite configs diverge; {took:.1?}"))
}

fn a4() -> Result<String> {
    let cases = [
        (ConstantId::C1, (1.0, 1.0, 1.0)),
        (ConstantId::C2, (0.5, 0.5, 1.0)),
        (ConstantId::C3, (2.0, 2.0, 0.5)),
        (ConstantId::C4, (1.0, 0.5, 1.0)),
        (ConstantId::C5, (1.0, 0.5, 0.5)),
        (ConstantId::C6, (2.0, 0.5, 1.0)),
        (ConstantId::C7, (2.0, 1.0, 0.5)),
    ];
    let (lambda, mu, nu) = (3.0, 5.0, 7.0);
    let ccfg = ConstantsConfig::default();
    let ocfg = OracleConfig::default();
    let (mut worst_c, mut worst_o) = (0.0f64, 0.0f64);
    for (id, (p, q, r)) in cases {
        let c = canon(p, q, r, "pow:0.5", "refl:1:pow:0.3", "pow:-0.25", 0.0, 1.0)?;
        let s = c.scaled(lambda, mu, nu)?;
        let law = lambda.powf(-1.0 / p) * mu.powf(1.0 / q) * nu.powf(1.0 / r);
        let base = eval_constant(id, &c, &ccfg)?.value.value();
        let scaled = eval_constant(id, &s, &ccfg)?.value.value();
        let e = rel(scaled / base, law);
        ensure!(e <= 1e-6, "{id}: ratio {} vs law {law}", scaled / base);
        let ob = estimate_best_constant(&c, &ocfg)?.best_ratio.value();
        let os = estimate_best_constant(&s, &ocfg)?.best_ratio.value();
        let eo = rel(os / ob, law);
        ensure!(eo <= 0.02, "oracle on {id} config: ratio {} vs law {law}", os / ob);
        worst_c = worst_c.max(e);
        worst_o = worst_o.max(eo);
    }
    Ok(format!("C1..C7 max error {worst_c:.1e}, oracle max error {worst_o:.1e}"))
}

fn a5() -> Result<String> {
    let one = Exponent::integer(1);
    let two = Exponent::integer(2);
    let cfg = OracleConfig::default();
    let pairs = [
        (space(SpaceKind::Cop, one, one, "pow:0", "pow:0", 0.0, 1.0)?, space(SpaceKind::Cop, one, one, "pow:1", "pow:0", 0.0, 1.0)?),
        (
            space(SpaceKind::Cop, two, two, "pow:0.5", "pow:0", 0.0, 1.0)?,
            space(SpaceKind::Cop, two, one, "pow:0", "pow:0.25", 0.0, 1.0)?,
        ),
    ];
    let mut worst = 0.0f64;
    for (src, tgt) in pairs {
        let e = EmbeddingProblem::new(src.clone(), tgt)?;
        let t = tilde_transform(&e)?;
        ensure!(t.source.kind == SpaceKind::Ces && t.target.kind == SpaceKind::Ces, "tilde of {e} is {t}");
        let before = estimate_original_constant(&e, &cfg)?.best_ratio.value();
        let after = estimate_original_constant(&t, &cfg)?.best_ratio.value();
        ensure!(rel(before, after) <= 0.05, "{e}: {before} vs {after}");
        worst = worst.max(rel(before, after));

        // reflection is an involution on dyadic points
        let f = StepFunction::new(vec![0.125, 0.25, 0.5, 0.875], vec![1.0, 2.0, 0.5])?;
        ensure!(f.reflected(1.0).reflected(1.0) == f, "f reflected twice differs");
        let twice = Weight::compile(&src.u_expr().clone().reflect(1.0).reflect(1.0))?;
        for x in [0.0625, 0.25, 0.5, 0.75, 0.9375] {
            ensure!(twice.eval(x) == src.u().eval(x), "u reflected twice differs at {x}");
        }
    }
    Ok(format!("2 Cop -> Cop configs, max before/after gap {worst:.2e}; involution exact"))
}

fn a6() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pool = [(1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];
    let pick = |rng: &mut ChaCha8Rng| pool[rng.random_range(0..pool.len())];
    let (p1, q1, p2, q2) = loop {
        let (p1, q1, p2, q2) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let frac = |x: (i64, i64)| x.0 as f64 / x.1 as f64;
        if frac(p2) <= frac(p1) && p1 != (1, 1) {
            break (p1, q1, p2, q2);
        }
    };
    let ex = |x: (i64, i64)| Exponent::finite(x.0, x.1);
    let alpha = rng.random_range(0.0..0.5f64);
    let beta = rng.random_range(0.0..0.5f64);
    let src = space(SpaceKind::Ces, ex(p1)?, ex(q1)?, "pow:0", &format!("pow:{alpha:.3}"), 0.0, 1.0)?;
    let tgt = space(SpaceKind::Ces, ex(p2)?, ex(q2)?, &format!("pow:{beta:.3}"), "pow:0", 0.0, 1.0)?;
    let e = EmbeddingProblem::new(src, tgt)?;
    let (c, p1r) = canonicalize(&e)?;
    let cfg = OracleConfig::default();
    let orig = estimate_original_constant(&e, &cfg)?;
    let can = estimate_best_constant(&c, &cfg)?;
    ensure!(!orig.diverging && !can.diverging, "{e}: diverging");
    let p1f = *p1r.numer() as f64 / *p1r.denom() as f64;
    let lifted = orig.best_ratio.value().powf(p1f);
    let err = rel(lifted, can.best_ratio.value());
    ensure!(err <= 0.03, "{e}: {lifted} vs {}", can.best_ratio);
    Ok(format!("{e}: (original)^{p1r} = {lifted:.6}, canonical {:.6}, gap {err:.2e}", can.best_ratio.value()))
}

fn random_step(rng: &mut ChaCha8Rng) -> Result<StepFunction<f64>> {
    let cells = rng.random_range(1..=6);
    let mut breaks: Vec<f64> = (0..=cells).map(|_| rng.random_range(0.01..0.99)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    if breaks.len() < 2 {
        breaks = vec![0.2, 0.7];
    }
    let values = (1..breaks.len()).map(|_| rng.random_range(0.0..3.0)).collect();
    Ok(StepFunction::new(breaks, values)?)
}

fn a7() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = |n, d| Exponent::finite(n, d);
    let spaces = [
        space(SpaceKind::Ces, p(3, 2)?, p(3, 2)?, "refl:1:pow:-0.4", "pow:0.5", 0.0, 1.0)?,
        space(SpaceKind::Ces, p(1, 1)?, p(1, 1)?, "pow:0.3", "pow:-0.2", 0.0, 1.0)?,
        space(SpaceKind::Cop, p(3, 2)?, p(3, 2)?, "pow:-0.6", "pow:-0.3", 0.0, 1.0)?,
        space(SpaceKind::Cop, p(2, 1)?, p(2, 1)?, "pow:0", "pow:0.25", 0.0, 1.0)?,
    ];
    let mut worst = 0.0f64;
    let mut counts = [0usize; 2];
    for (i, s) in spaces.iter().enumerate() {
        let pw: WeightExpr<f64> = pp_weight(s)?;
        let w = Weight::compile(&pw)?;
        for _ in 0..10 {
            let f = random_step(&mut rng)?;
            let lhs = space_norm(&f, s)?.value();
            let rhs = lebesgue_norm(&f, s.p, &w, s.interval)?.value();
            let err = if rhs == 0.0 { lhs.abs() } else { rel(lhs, rhs) };
            ensure!(err <= 1e-9, "{s}: {lhs} vs {rhs}");
            worst = worst.max(err);
        }
        counts[usize::from(i >= 2)] += 10;
    }
    Ok(format!("{} Ces and {} Cop step functions, max error {worst:.1e}", counts[0], counts[1]))
}

fn a8() -> Result<String> {
    let src = space(SpaceKind::Ces, Exponent::integer(1), Exponent::integer(1), "pow:0", "pow:0", 0.0, 1.0)?;
    let tgt = space(SpaceKind::Ces, Exponent::integer(2), Exponent::integer(2), "pow:0", "pow:0", 0.0, 1.0)?;
    let rep = run_check(&RunRequest::new(Command::Check, src, tgt))?;
    ensure!(rep.verdict == Verdict::Trivial, "verdict {}", rep.verdict);
    let oracle = rep.oracle.as_ref().ok_or_else(|| anyhow::anyhow!("no oracle result"))?;
    let trace: Vec<f64> = oracle.ladder_trace.iter().map(|s| s.ratio.value()).collect();
    let growth: Vec<f64> = trace.windows(2).map(|w| w[1] / w[0]).collect();
    ensure!(!growth.is_empty() && growth.iter().all(|&g| g >= 10.0), "rung growth {growth:?}");
    ensure!(oracle.diverging, "oracle not diverging");
    let g: Vec<String> = growth.iter().map(|g| format!("x{g:.1}")).collect();
    Ok(format!("verdict {}, rung growth [{}]", rep.verdict, g.join(", ")))
}

fn a9() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10_000 {
        let p = rng.random_range(1e-3..10.0f64);
        let q = rng.random_range(1e-3..10.0f64);
        let r = rng.random_range(1e-3..=1.0f64);
        let hits: Vec<Regime> = Regime::ALL.into_iter().filter(|g| g.admits(p, q, r)).collect();
        ensure!(hits.len() == 1, "({p}, {q}, {r}) admitted by {hits:?}");
        ensure!(classify_regime(p, q, r)? == hits[0], "({p}, {q}, {r}) misclassified");
    }
    let e = |n, d| Rational::new(n, d);
    let boundary = [
        ((e(1, 2), e(1, 1), e(1, 2)), Regime::I),
        ((e(1, 2), e(1, 1), e(1, 4)), Regime::III),
        ((e(3, 2), e(1, 1), e(1, 1)), Regime::VII),
        ((e(1, 2), e(1, 2), e(1, 2)), Regime::II),
        ((e(3, 4), e(3, 4), e(1, 2)), Regime::IV),
        ((e(3, 4), e(1, 2), e(3, 4)), Regime::V),
        ((e(2, 1), e(2, 1), e(1, 1)), Regime::III),
        ((e(1, 1), e(2, 1), e(1, 1)), Regime::I),
    ];
    for ((p, q, r), want) in boundary {
        let got = classify_regime(p, q, r)?;
        ensure!(got == want, "p={p} q={q} r={r}: {got}, expected {want}");
    }
    Ok(format!("10000 random triples, {} boundary cases", boundary.len()))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Result<String>); 9] = [
        ("A1 Fubini exactness", a1),
        ("A2 worked constants", a2),
        ("A3 two-sided battery", a3),
        ("A4 homogeneity", a4),
        ("A5 transform consistency", a5),
        ("A6 canonicalization link", a6),
        ("A7 p = q norm identity", a7),
        ("A8 triviality", a8),
        ("A9 classifier totality", a9),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e:#}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
