use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::arms::{ArmDistribution, ArmSpec};
use crate::concentration::Range;
use crate::harness::Problem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemFileError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("line {line}, field '{field}': {message}")]
    Field {
        line: usize,
        field: String,
        message: String,
    },
    #[error("problem file lists no arms")]
    Empty,
}

pub fn load_problem(path: &Path) -> Result<Problem, ProblemFileError> {
    let text = std::fs::read_to_string(path).map_err(|e| ProblemFileError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_problem(&text)
}

/// Parses the line format
///
/// ```text
/// # comment
/// uniform-shifted shift=0.886 half_width=0.05 a=0.836 b=0.936 xi=6.2
/// bernoulli-affine p=0.3 low=0 high=1 a=0 b=1
/// degenerate value=1 a=0 b=1 mean=1
/// ```
///
/// One arm per non-blank line, in order. `a` and `b` give the arm's range;
/// `xi` (a label) and `mean` (overriding the analytic mean) are optional.
pub fn parse_problem(text: &str) -> Result<Problem, ProblemFileError> {
    let mut arms = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        arms.push(parse_arm(line, content)?);
    }
    if arms.is_empty() {
        return Err(ProblemFileError::Empty);
    }
    Ok(Problem::new(arms).expect("non-empty"))
}

struct Fields {
    line: usize,
    values: HashMap<String, f64>,
}

impl Fields {
    fn take(&mut self, name: &str) -> Result<f64, ProblemFileError> {
        self.values
            .remove(name)
            .ok_or_else(|| ProblemFileError::Field {
                line: self.line,
                field: name.into(),
                message: "missing".into(),
            })
    }

    fn take_opt(&mut self, name: &str) -> Option<f64> {
        self.values.remove(name)
    }

    fn field_error(&self, name: &str, message: impl Into<String>) -> ProblemFileError {
        ProblemFileError::Field {
            line: self.line,
            field: name.into(),
            message: message.into(),
        }
    }
}

fn parse_arm(line: usize, content: &str) -> Result<ArmSpec, ProblemFileError> {
    let mut tokens = content.split_whitespace();
    let tag = tokens.next().expect("non-empty line");
    let mut fields = Fields {
        line,
        values: HashMap::new(),
    };
    for token in tokens {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| ProblemFileError::Line {
                line,
                message: format!("expected key=value, found '{token}'"),
            })?;
        let parsed: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| fields.field_error(key, format!("'{value}' is not a finite number")))?;
        if fields.values.insert(key.to_string(), parsed).is_some() {
            return Err(fields.field_error(key, "given twice"));
        }
    }

    let distribution = match tag {
        "uniform-shifted" => ArmDistribution::UniformShifted {
            shift: fields.take("shift")?,
            half_width: fields.take("half_width")?,
        },
        "bernoulli-affine" => ArmDistribution::BernoulliAffine {
            p: fields.take("p")?,
            low: fields.take("low")?,
            high: fields.take("high")?,
        },
        "degenerate" => ArmDistribution::Degenerate {
            value: fields.take("value")?,
        },
        other => {
            return Err(ProblemFileError::Line {
                line,
                message: format!(
                    "unknown distribution '{other}' (expected uniform-shifted, bernoulli-affine or degenerate)"
                ),
            })
        }
    };
    match distribution {
        ArmDistribution::UniformShifted { half_width, .. } if !(half_width >= 0.0) => {
            return Err(fields.field_error("half_width", "must be nonnegative"));
        }
        ArmDistribution::BernoulliAffine { p, .. } if !(0.0..=1.0).contains(&p) => {
            return Err(fields.field_error("p", "must lie in [0, 1]"));
        }
        ArmDistribution::BernoulliAffine { low, high, .. } if low > high => {
            return Err(fields.field_error("high", "must be at least low"));
        }
        _ => {}
    }

    let a = fields.take("a")?;
    let b = fields.take("b")?;
    if a >= b {
        return Err(fields.field_error("b", format!("range needs a < b (a = {a}, b = {b})")));
    }
    let range = Range::new(a, b).map_err(|e| fields.field_error("b", e.to_string()))?;
    let xi = fields.take_opt("xi");
    let mean = fields.take_opt("mean");
    if let Some(extra) = fields.values.keys().min() {
        return Err(fields.field_error(extra, format!("unknown field for '{tag}'")));
    }

    let mut spec = ArmSpec::new(distribution, range).map_err(|e| ProblemFileError::Line {
        line,
        message: e.to_string(),
    })?;
    if let Some(xi) = xi {
        spec = spec.with_label(xi);
    }
    if let Some(mean) = mean {
        spec = spec.with_true_mean(mean);
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_degenerate_arm() {
        let p = parse_problem("degenerate value=1.0 a=0 b=1\n").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.oracle_means(), vec![1.0]);
    }

    #[test]
    fn comments_labels_and_mean_override() {
        let text =
            "# two arms\n\nuniform-shifted shift=0.5 half_width=0.1 a=0.4 b=0.6 xi=2 # trailing\n\
                    bernoulli-affine p=0.25 low=-1 high=1 a=-1 b=1 mean=-0.4\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.label(0), Some(2.0));
        assert_eq!(p.label(1), None);
        assert_eq!(p.oracle_means(), vec![0.5, -0.4]);
    }

    fn line_of(e: ProblemFileError) -> usize {
        match e {
            ProblemFileError::Line { line, .. } | ProblemFileError::Field { line, .. } => line,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_name_line_and_field() {
        let e =
            parse_problem("degenerate value=1 a=0 b=1\ndegenerate value=1 a=1 b=1\n").unwrap_err();
        assert!(
            matches!(&e, ProblemFileError::Field { line: 2, field, .. } if field == "b"),
            "{e}"
        );

        let e = parse_problem("gaussian mu=0 a=0 b=1").unwrap_err();
        assert!(e.to_string().contains("unknown distribution 'gaussian'"));
        assert_eq!(line_of(e), 1);

        let e = parse_problem("\n\ndegenerate value=x a=0 b=1").unwrap_err();
        assert!(matches!(&e, ProblemFileError::Field { line: 3, field, .. } if field == "value"));

        let e = parse_problem("degenerate a=0 b=1").unwrap_err();
        assert!(matches!(&e, ProblemFileError::Field { field, .. } if field == "value"));

        let e = parse_problem("degenerate value=1 a=0 b=1 colour=3").unwrap_err();
        assert!(matches!(&e, ProblemFileError::Field { field, .. } if field == "colour"));

        let e = parse_problem("degenerate value=2 a=0 b=1").unwrap_err();
        assert_eq!(line_of(e), 1);

        assert!(parse_problem("degenerate value=1 value=2 a=0 b=1").is_err());
        assert!(parse_problem("degenerate value=1 a=0 b").is_err());
        assert_eq!(parse_problem("# nothing\n"), Err(ProblemFileError::Empty));
    }
}
