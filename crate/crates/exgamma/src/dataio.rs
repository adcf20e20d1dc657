//! Dataset parsing and summarization for lifetime samples.
//!
//! Input format: whitespace/newline-separated positive floats; `#` starts a
//! comment that runs to end of line. Every value must be finite and strictly
//! positive (lifetimes). Parse errors carry 1-based line and column of the
//! offending token.

use std::fmt::Write as _;

/// Errors from dataset parsing or sample construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    /// A token did not parse as a floating-point number.
    #[error("line {line}, column {column}: cannot parse '{token}' as a number")]
    Malformed {
        line: usize,
        column: usize,
        token: String,
    },
    /// A value parsed but is not a valid lifetime (must be finite and > 0).
    #[error("line {line}, column {column}: {value} is not a positive finite lifetime")]
    InvalidValue {
        line: usize,
        column: usize,
        value: f64,
    },
    /// No values at all.
    #[error("dataset contains no values")]
    Empty,
}

/// An immutable, validated sample of positive lifetimes (n ≥ 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    source: String,
}

/// Location and spread summary of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 when n = 1.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
}

impl Sample {
    /// Wraps pre-validated values; rejects empty input and any value that is
    /// not finite and strictly positive.
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self, ParseError> {
        if values.is_empty() {
            return Err(ParseError::Empty);
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(ParseError::InvalidValue {
                    line: 1,
                    column: i + 1,
                    value: v,
                });
            }
        }
        Ok(Self {
            values,
            source: source.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees n >= 1
    }

    /// Label describing where the sample came from (path, "<stdin>", ...).
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Values sorted ascending (copy; NaN cannot occur by construction).
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).expect("sample values are never NaN"));
        v
    }

    /// Compensated sum of the values.
    pub fn sum(&self) -> f64 {
        compensated_sum(self.values.iter().copied())
    }

    /// Compensated sum of the natural logs of the values.
    pub fn log_sum(&self) -> f64 {
        compensated_sum(self.values.iter().map(|x| x.ln()))
    }

    /// Location/spread summary; `mean · n` matches the compensated sum to
    /// within 1e-12 relative.
    pub fn summary(&self) -> Summary {
        let n = self.len();
        let mean = self.sum() / n as f64;
        let sd = if n > 1 {
            let ss = compensated_sum(self.values.iter().map(|x| (x - mean) * (x - mean)));
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let sorted = self.sorted();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Summary {
            n,
            mean,
            sd,
            min: sorted[0],
            max: sorted[n - 1],
            median,
        }
    }
}

/// Kahan–Babuška compensated summation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Parses whitespace-separated floats (with `#` line comments) into a
/// [`Sample`] labelled with `source`.
pub fn parse_dataset(text: &str, source: impl Into<String>) -> Result<Sample, ParseError> {
    let mut values = Vec::new();
    for (line_idx, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let mut column = 0usize; // 1-based column of the current token start
        let mut token = String::new();
        let mut flush = |token: &mut String, column: usize| -> Result<(), ParseError> {
            if token.is_empty() {
                return Ok(());
            }
            let parsed: f64 = token.parse().map_err(|_| ParseError::Malformed {
                line: line_idx + 1,
                column,
                token: std::mem::take(token),
            })?;
            if !parsed.is_finite() || parsed <= 0.0 {
                return Err(ParseError::InvalidValue {
                    line: line_idx + 1,
                    column,
                    value: parsed,
                });
            }
            values.push(parsed);
            token.clear();
            Ok(())
        };
        for (char_idx, ch) in line.chars().enumerate() {
            if ch.is_whitespace() {
                flush(&mut token, column)?;
            } else {
                if token.is_empty() {
                    column = char_idx + 1;
                }
                token.push(ch);
            }
        }
        flush(&mut token, column)?;
    }
    if values.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(Sample {
        values,
        source: source.into(),
    })
}

/// Serializes a sample one value per line at full round-trip precision.
pub fn serialize_dataset(sample: &Sample) -> String {
    let mut out = String::with_capacity(sample.len() * 24);
    for v in sample.values() {
        writeln!(out, "{v:.16e}").expect("writing to String cannot fail");
    }
    out
}
