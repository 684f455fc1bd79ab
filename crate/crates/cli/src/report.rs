//! Running a config against a spec and rendering the result.

use std::fmt::Write as _;

use escape_core::{
    compute_escape, enclose_escape, intervalize, AdjoinDemo, Enclosure, EnumerationSpec,
    EscapeCertificate, Location, Rational, Relation, VerdictValue,
};
use serde_json::{json, Value};

use crate::config::{Mode, OutputFormat, RunConfig};
use crate::spec_format::spec_to_json;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Report {
    Certificate(EscapeCertificate),
    Enclosure {
        n_known: u64,
        eps: Rational,
        jitter: Rational,
        enclosure: Enclosure,
    },
}

pub fn run(config: &RunConfig, spec: &EnumerationSpec) -> Result<Report, CliError> {
    match &config.mode {
        Mode::Exact => Ok(Report::Certificate(compute_escape(spec, config.budget)?)),
        Mode::Interval {
            n_known,
            eps,
            jitter,
        } => {
            let ienum = intervalize(spec, jitter.clone())
                .map_err(|e| CliError::Config(e.to_string()))?;
            let enclosure = enclose_escape(&ienum, *n_known, eps, config.budget)?;
            Ok(Report::Enclosure {
                n_known: *n_known,
                eps: eps.clone(),
                jitter: jitter.clone(),
                enclosure,
            })
        }
    }
}

fn chain(trace: &[Rational]) -> String {
    trace.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> ")
}

fn relation_word(r: Relation) -> &'static str {
    match r {
        Relation::Below => "below",
        Relation::Above => "above",
    }
}

pub fn certificate_text(cert: &EscapeCertificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "x0 = {}", cert.x0);
    let _ = writeln!(out, "g(x0) = {}", cert.fixpoint_witness);
    let _ = writeln!(out, "trace: {}", chain(&cert.trace));
    let _ = writeln!(
        out,
        "oracle agreement: {}",
        if cert.oracle_agreement { "yes" } else { "NO" }
    );
    for v in &cert.verdicts {
        let place = match &v.location {
            Location::Index(n) => format!("f({n})"),
            Location::Tail => "tail".to_string(),
        };
        let value = match &v.value {
            VerdictValue::Exact(r) => r.to_string(),
            VerdictValue::AffineRun(run) => {
                let to = run.to.map_or("inf".to_string(), |t| t.to_string());
                format!("{}*n + {} for n in [{}, {}]", run.a, run.b, run.from, to)
            }
        };
        let _ = writeln!(
            out,
            "{place}: {value} is {} x0 by {}",
            relation_word(v.relation),
            v.gap
        );
    }
    out
}

impl Report {
    pub fn to_json(&self) -> Value {
        match self {
            Report::Certificate(cert) => {
                serde_json::to_value(cert).expect("certificates serialize")
            }
            Report::Enclosure {
                n_known,
                eps,
                jitter,
                enclosure,
            } => json!({
                "enclosure": [enclosure.interval.lo(), enclosure.interval.hi()],
                "n_known": n_known,
                "eps": eps,
                "jitter": jitter,
                "lower_trace": enclosure.lower_trace.iterates,
                "upper_trace": enclosure.upper_trace.iterates,
            }),
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json");
                s.push('\n');
                s
            }
            OutputFormat::Text => match self {
                Report::Certificate(cert) => certificate_text(cert),
                Report::Enclosure {
                    n_known,
                    eps,
                    enclosure,
                    ..
                } => format!(
                    "x0 in {} (n_known = {n_known}, eps = {eps})\nlower map: {}\nupper map: {}\n",
                    enclosure.interval,
                    chain(&enclosure.lower_trace.iterates),
                    chain(&enclosure.upper_trace.iterates),
                ),
            },
        }
    }
}

pub fn demo_json(demo: &AdjoinDemo) -> Value {
    json!({
        "extended_spec": spec_to_json(&demo.extended),
        "x0": demo.x0,
        "new_x0": demo.new_x0,
        "weight": demo.weight,
        "strict_increase": demo.new_x0 >= &demo.x0 + &demo.weight,
    })
}

pub fn demo_text(demo: &AdjoinDemo) -> String {
    let target = &demo.x0 + &demo.weight;
    format!(
        "x0 = {}\nappended x0 at index {}\nx0' = {} >= x0 + {} = {}\n",
        demo.x0,
        demo.extended.prefix().len() - 1,
        demo.new_x0,
        demo.weight,
        target
    )
}
