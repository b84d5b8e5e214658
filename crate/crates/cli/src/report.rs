use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use cesembed_core::reduce::CanonicalSummary;
use cesembed_core::{ConstantId, ExtReal, OracleResult, Regime};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Finite,
    Infinite,
    /// `r > 1`: only `f = 0` satisfies the inequality.
    Trivial,
    /// Neither the theorem nor the oracle ran.
    Undecided,
}

impl Verdict {
    /// Process exit code: 0 finite, 1 infinite or undecided, 2 trivial.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Finite => 0,
            Verdict::Infinite | Verdict::Undecided => 1,
            Verdict::Trivial => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Finite => "finite",
            Verdict::Infinite => "infinite",
            Verdict::Trivial => "trivial",
            Verdict::Undecided => "undecided",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub embedding: String,
    pub canonical: Option<CanonicalSummary>,
    pub regime: Option<Regime>,
    pub constants: BTreeMap<ConstantId, ExtReal<f64>>,
    pub estimate: Option<ExtReal<f64>>,
    pub finite: Option<bool>,
    pub oracle: Option<OracleResult<f64>>,
    /// Oracle best ratio over the theorem estimate, when both are finite.
    pub agreement: Option<f64>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

pub fn emit_report(rep: &EmbeddingReport, fmt: Format) -> String {
    match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rep).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text(rep),
    }
}

fn text(rep: &EmbeddingReport) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k}: {v}");
    };
    line("embedding", rep.embedding.clone());
    if let Some(c) = &rep.canonical {
        line(
            "canonical",
            format!("p = {}, q = {}, r = {} on {}; u = {}, v = {}, w = {}", c.p, c.q, c.r, c.interval, c.u, c.v, c.w),
        );
    }
    if let Some(r) = rep.regime {
        line("regime", r.to_string());
    }
    if !rep.constants.is_empty() {
        let list: Vec<String> = rep.constants.iter().map(|(id, v)| format!("{id} = {v}")).collect();
        line("constants", list.join(", "));
    }
    if let Some(e) = rep.estimate {
        line("estimate", e.to_string());
    }
    if let Some(f) = rep.finite {
        line("finite", f.to_string());
    }
    if let Some(o) = &rep.oracle {
        let trace: Vec<String> = o.ladder_trace.iter().map(|s| s.ratio.to_string()).collect();
        line("oracle", format!("best_ratio = {}, diverging = {}, ladder = [{}]", o.best_ratio, o.diverging, trace.join(", ")));
    }
    if let Some(a) = rep.agreement {
        line("agreement", a.to_string());
    }
    line("verdict", rep.verdict.to_string());
    for n in &rep.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}
