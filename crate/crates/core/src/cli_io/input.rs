use std::path::Path;

use crate::error::{Error, Result, SampleError};
use crate::estimators::Sample;

/// Parses whitespace-, newline- or comma-separated numbers.
pub fn parse_sample(text: &str) -> Result<Sample> {
    let mut values = Vec::new();
    let tokens = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty());
    for (index, token) in tokens.enumerate() {
        let v: f64 = token.parse().map_err(|_| SampleError::NotANumber {
            index,
            token: token.to_string(),
        })?;
        values.push(v);
    }
    Ok(Sample::new(values)?)
}

fn looks_inline(arg: &str) -> bool {
    arg.contains(',')
        || arg
            .chars()
            .all(|c| c.is_ascii_digit() || c.is_whitespace() || ".-+eE".contains(c))
}

/// `arg` is read as a file when one exists at that path, otherwise as an
/// inline list such as `1,2,3`.
pub fn read_sample(arg: &str) -> Result<Sample> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{arg}: {e}")))?;
        return parse_sample(&text);
    }
    if looks_inline(arg) {
        return parse_sample(arg);
    }
    Err(Error::Io(format!("{arg}: no such file, and not a numeric list")))
}
