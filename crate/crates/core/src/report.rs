//! Text serializations: key-value anomaly reports and trace CSV.

use std::fmt::Write;

use crate::anomaly::{AnomalyResult, Limit};
use crate::perturbation::TraceSamples;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    KeyValue,
}

pub const REPORT_KEYS: [&str; 8] = [
    "case",
    "a_n_reduced",
    "a_n_status",
    "a_e_reduced",
    "a_e_status",
    "gamma",
    "gamma_err",
    "fit_residual",
];

/// Four decimals, switching to scientific notation for small magnitudes.
fn number(v: f64) -> String {
    if v == 0.0 || v.abs() >= 1e-3 {
        format!("{v:.4}")
    } else {
        format!("{v:.4e}")
    }
}

fn reduced(limit: &Limit) -> String {
    match limit {
        Limit::Finite { value, .. } => number(*value),
        Limit::Zero { .. } => "0 (below tolerance)".into(),
        Limit::Divergent { .. } => "none (divergent)".into(),
    }
}

fn status(limit: &Limit) -> String {
    match limit {
        Limit::Divergent { growth_exponent, .. } => {
            format!("divergent growth_exponent={growth_exponent:.2}")
        }
        other => other.status().as_str().into(),
    }
}

fn fields(result: &AnomalyResult) -> [String; 8] {
    let (gamma, gamma_err, residual) = match &result.fit {
        Some(f) => (format!("{:.4}", f.exponent), format!("{:.2e}", f.exponent_err), format!("{:.2e}", f.residual)),
        None => ("none".into(), "none".into(), "none".into()),
    };
    [
        result.case_label.to_string(),
        reduced(&result.a_n),
        status(&result.a_n),
        reduced(&result.a_e),
        status(&result.a_e),
        gamma,
        gamma_err,
        residual,
    ]
}

/// Key-value (one `key=value` per line) or a two-line CSV with the same
/// keys as header.
pub fn emit_report(result: &AnomalyResult, format: Format) -> String {
    let values = fields(result);
    match format {
        Format::KeyValue => {
            let mut out = String::new();
            for (k, v) in REPORT_KEYS.iter().zip(&values) {
                writeln!(out, "{k}={v}").unwrap();
            }
            out
        }
        Format::Csv => format!("{}\n{}\n", REPORT_KEYS.join(","), values.join(",")),
    }
}

/// `lambda,w,err,source` with 17 significant digits.
pub fn samples_csv(samples: &TraceSamples) -> String {
    let mut out = String::from("lambda,w,err,source\n");
    let source = samples.source().as_str();
    for e in samples.entries() {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{source}", e.lambda, e.w, e.err).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anomaly::analyze;
    use crate::perturbation::{w2_closed_form, Source, TraceSample};
    use crate::potentials::{PotentialSpec, UnitSystem};
    use crate::quadrature::geometric_grid;

    const AU: UnitSystem = UnitSystem::atomic();

    fn samples(f: impl Fn(f64) -> f64) -> TraceSamples {
        let entries = geometric_grid(10.0, 100.0, 6)
            .unwrap()
            .into_iter()
            .map(|lambda| TraceSample { lambda, w: f(lambda), err: 1e-12 })
            .collect();
        TraceSamples::new(entries, Source::SecondOrder, PotentialSpec::coulomb(1.0).unwrap(), AU).unwrap()
    }

    #[test]
    fn case_b_report() {
        let r = analyze(&samples(|l| w2_closed_form(1.0, &AU, l))).unwrap();
        let text = emit_report(&r, Format::KeyValue);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        for (line, key) in lines.iter().zip(REPORT_KEYS) {
            assert!(line.starts_with(&format!("{key}=")), "{line}");
        }
        assert!(lines.contains(&"case=B"));
        assert!(lines.contains(&"a_e_reduced=0.2500"));
        assert!(lines.contains(&"a_n_reduced=0 (below tolerance)"));
        assert!(lines.contains(&"a_e_status=finite"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn divergent_report() {
        let r = analyze(&samples(|l| -0.1 * l.powf(-1.5))).unwrap();
        let text = emit_report(&r, Format::KeyValue);
        assert!(text.contains("a_e_status=divergent growth_exponent=0.50\n"));
        assert!(text.contains("a_e_reduced=none (divergent)\n"));
    }

    #[test]
    fn csv_report_has_one_row() {
        let r = analyze(&samples(|l| 5.0 / l)).unwrap();
        let text = emit_report(&r, Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], REPORT_KEYS.join(","));
        assert!(lines[1].starts_with("B,10.0000,finite,"));
    }

    #[test]
    fn trace_csv_round_trips() {
        let s = samples(|l| w2_closed_form(1.0, &AU, l));
        let text = samples_csv(&s);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("lambda,w,err,source"));
        for (line, e) in lines.zip(s.entries()) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 4);
            assert_eq!(cols[0].parse::<f64>().unwrap(), e.lambda);
            assert_eq!(cols[1].parse::<f64>().unwrap(), e.w);
            assert_eq!(cols[3], "second-order");
        }
    }

    #[test]
    fn small_values_use_exponent() {
        assert_eq!(number(-7.8125e-5), "-7.8125e-5");
        assert_eq!(number(0.25), "0.2500");
    }
}
