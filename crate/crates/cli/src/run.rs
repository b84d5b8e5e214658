use std::collections::BTreeMap;

use cesembed_core::reduce::{detect_degenerate, tilde_transform, triviality_check, Triviality};
use cesembed_core::{
    canonicalize, estimate_best_constant, estimate_original_constant, space_norm, theorem_verdict, EmbeddingProblem,
    ExtReal, OracleConfig, Result, SpaceKind, SpaceSpec, StepFunction,
};

use crate::report::{EmbeddingReport, Format, Verdict};

pub const OUT_OF_SCOPE: &str = "theorem path: out of scope (cited literature)";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Theorem constants and oracle.
    Check,
    /// Theorem constants only.
    Constants,
    /// Oracle only.
    Oracle,
}

#[derive(Clone, Debug)]
pub struct RunRequest {
    pub command: Command,
    pub source: SpaceSpec<f64>,
    pub target: SpaceSpec<f64>,
    pub oracle: OracleConfig<f64>,
    pub seed: u64,
    pub format: Format,
}

impl RunRequest {
    pub fn new(command: Command, source: SpaceSpec<f64>, target: SpaceSpec<f64>) -> Self {
        Self { command, source, target, oracle: OracleConfig::default(), seed: 0, format: Format::Json }
    }
}

pub fn run_check(req: &RunRequest) -> Result<EmbeddingReport> {
    let original = EmbeddingProblem::new(req.source.clone(), req.target.clone())?;
    let mut notes = Vec::new();
    let oracle_cfg = OracleConfig { seed: req.seed, ..req.oracle.clone() };
    let want_theorem = req.command != Command::Oracle;
    let want_oracle = req.command != Command::Constants;

    let degenerate = detect_degenerate(&original)?;
    if let Some(d) = &degenerate {
        notes.push(format!("degenerate reduction: {d}"));
    }
    let mut e = original.clone();
    if e.target.kind == SpaceKind::Cop && e.source.kind != SpaceKind::Leb {
        e = tilde_transform(&e)?;
        notes.push(format!("tilde transform: {e}"));
    }

    let mut rep = EmbeddingReport {
        embedding: original.to_string(),
        canonical: None,
        regime: None,
        constants: BTreeMap::new(),
        estimate: None,
        finite: None,
        oracle: None,
        agreement: None,
        notes: Vec::new(),
        verdict: Verdict::Undecided,
    };

    if e.source.kind == SpaceKind::Ces && e.target.kind == SpaceKind::Ces {
        let (c, p1) = canonicalize(&e)?;
        rep.canonical = Some(c.summary());
        notes.push(format!("constants refer to the canonical inequality; embedding constant = C^(1/{p1})"));
        if triviality_check(&c) == Triviality::Trivial {
            notes.push(Triviality::Trivial.to_string());
            rep.verdict = Verdict::Trivial;
        } else if want_theorem {
            let t = theorem_verdict(&c)?;
            rep.regime = Some(t.regime);
            rep.constants = t.values.clone();
            rep.estimate = Some(t.estimate);
            rep.finite = Some(t.finite);
            if !t.finite {
                let ids: Vec<String> = t.infinite.iter().map(|id| id.to_string()).collect();
                notes.push(format!("infinite constants: {}", ids.join(", ")));
            }
            rep.verdict = if t.finite { Verdict::Finite } else { Verdict::Infinite };
        }
        if want_oracle {
            rep.oracle = Some(estimate_best_constant(&c, &oracle_cfg)?);
        }
    } else {
        notes.push(OUT_OF_SCOPE.to_string());
        if want_oracle {
            let target = degenerate.unwrap_or(e);
            rep.oracle = Some(estimate_original_constant(&target, &oracle_cfg)?);
        }
    }

    if let Some(o) = &rep.oracle {
        if rep.verdict == Verdict::Undecided {
            rep.verdict = if o.diverging { Verdict::Infinite } else { Verdict::Finite };
        }
        if let (Some(true), Some(est)) = (rep.finite, rep.estimate) {
            let best = o.best_ratio;
            if best.is_finite() && !o.diverging && est.value() > 0.0 {
                rep.agreement = Some(best.value() / est.value());
            }
        }
    }
    rep.notes = notes;
    Ok(rep)
}

pub fn run_norm(space: &SpaceSpec<f64>, f: &StepFunction<f64>) -> Result<ExtReal<f64>> {
    space_norm(f, space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::emit_report;
    use crate::spec::parse_spec;

    fn quick(mut req: RunRequest) -> RunRequest {
        req.oracle = OracleConfig { grid_size: 48, restarts: 6, ..OracleConfig::default() };
        req
    }

    fn request(cmd: Command, src: &str, tgt: &str) -> RunRequest {
        quick(RunRequest::new(cmd, parse_spec(src).unwrap(), parse_spec(tgt).unwrap()))
    }

    #[test]
    fn regime_i_worked_config() {
        let req = request(Command::Check, "ces:1,1:pow:0,pow:0@(0,1)", "ces:1,1:pow:0,pow:0@(0,1)");
        let rep = run_check(&req).unwrap();
        assert_eq!(rep.verdict, Verdict::Finite);
        assert!((rep.estimate.unwrap().value() - 1.0).abs() < 1e-6);
        let a = rep.agreement.unwrap();
        assert!((1e-2..=1e2).contains(&a));
        assert!((rep.oracle.as_ref().unwrap().best_ratio.value() - 1.0).abs() < 0.02);
        assert!(rep.notes.iter().any(|n| n.starts_with("degenerate reduction")));
    }

    #[test]
    fn identity_embedding() {
        let s = "ces:1,2:pow:0,pow:0@(0,1)";
        let rep = run_check(&request(Command::Check, s, s)).unwrap();
        assert_eq!(rep.verdict, Verdict::Finite);
        let a = rep.agreement.unwrap();
        assert!((1e-2..=1e2).contains(&a));
        assert!((rep.oracle.unwrap().best_ratio.value() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn r_above_one_is_trivial() {
        let req = request(Command::Check, "ces:1,1:pow:0,pow:0@(0,1)", "ces:2,2:pow:0,pow:0@(0,1)");
        let rep = run_check(&req).unwrap();
        assert_eq!(rep.verdict, Verdict::Trivial);
        assert_eq!(rep.verdict.exit_code(), 2);
        assert!(rep.oracle.unwrap().diverging);
        assert!(rep.constants.is_empty());
    }

    #[test]
    fn copson_into_cesaro_is_oracle_only() {
        let req = request(Command::Check, "cop:1,2:pow:0,pow:0@(0,1)", "ces:1,2:pow:0,pow:0@(0,1)");
        let rep = run_check(&req).unwrap();
        assert!(rep.notes.iter().any(|n| n == OUT_OF_SCOPE));
        assert!(rep.regime.is_none() && rep.finite.is_none());
        assert!(rep.oracle.is_some());
        let text = emit_report(&rep, Format::Text);
        assert!(text.contains(OUT_OF_SCOPE));
    }

    #[test]
    fn infinite_case_names_constant() {
        let req = request(Command::Constants, "ces:1,1:pow:0,pow:0@(0,1)", "ces:1,1:pow:-2,pow:0@(0,1)");
        let rep = run_check(&req).unwrap();
        assert_eq!(rep.verdict, Verdict::Infinite);
        assert_eq!(rep.finite, Some(false));
        assert!(rep.notes.iter().any(|n| n == "infinite constants: C1"));
        let text = emit_report(&rep, Format::Text);
        assert!(text.contains("finite: false") && text.contains("C1 = inf"));
    }

    #[test]
    fn text_and_json_keys() {
        let req = request(Command::Constants, "ces:1,2:pow:0,pow:0@(0,1)", "ces:1,2:pow:0,pow:0@(0,1)");
        let rep = run_check(&req).unwrap();
        let text = emit_report(&rep, Format::Text);
        assert!(text.contains("finite: true"));
        assert!(text.contains("constants: C1 ="));
        let json: serde_json::Value = serde_json::from_str(&emit_report(&rep, Format::Json)).unwrap();
        for key in ["canonical", "regime", "constants", "estimate", "finite", "oracle", "agreement", "notes", "verdict"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn determinism() {
        let req = request(Command::Check, "ces:1,1:pow:0,pow:0.5@(0,1)", "ces:2,2:pow:0.5,pow:0@(0,1)");
        let a = emit_report(&run_check(&req).unwrap(), Format::Json);
        let b = emit_report(&run_check(&req).unwrap(), Format::Json);
        assert_eq!(a, b);
    }
}
