use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use twistcalc::algebras::{embedded_fixture, fixture_names, parse_spec_file, AlgebraSpec, SpecFile};
use twistcalc::exactcalc::{parse_in, Matrix};
use twistcalc::{Exponent, Scalar};

pub const FIXTURE_DIR_VAR: &str = "TWISTCALC_FIXTURE_DIR";

/// Raw spec text and a display name.
pub fn load_text(spec: Option<&Path>, fixture: Option<&str>) -> Result<(String, String)> {
    match (spec, fixture) {
        (Some(p), None) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Ok((p.display().to_string(), text))
        }
        (None, Some(name)) => {
            if let Ok(dir) = std::env::var(FIXTURE_DIR_VAR) {
                let p = PathBuf::from(dir).join(format!("{}.json", name));
                if p.exists() {
                    let text = std::fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
                    return Ok((name.to_string(), text));
                }
            }
            let text = embedded_fixture(name)
                .ok_or_else(|| anyhow!("unknown fixture {} (known: {})", name, fixture_names().join(", ")))?;
            Ok((name.to_string(), text.to_string()))
        }
        (None, None) => bail!("one of --spec or --fixture is required"),
        (Some(_), Some(_)) => bail!("--spec and --fixture are exclusive"),
    }
}

pub fn parse_file(text: &str) -> Result<SpecFile> {
    Ok(parse_spec_file(text)?)
}

pub fn load_spec(file: &SpecFile) -> Result<AlgebraSpec<Scalar>> {
    Ok(AlgebraSpec::from_file(file)?)
}

pub fn exponent(text: &str, what: &str) -> Result<Exponent> {
    text.trim().parse::<Exponent>().map_err(|_| anyhow!("bad {}: {}", what, text))
}

/// `LO:HI` with integer or fractional bounds.
pub fn window(text: &str) -> Result<(Exponent, Exponent)> {
    let (lo, hi) = text.split_once(':').ok_or_else(|| anyhow!("window must look like LO:HI, got {}", text))?;
    let (lo, hi) = (exponent(lo, "window")?, exponent(hi, "window")?);
    if hi - lo < Exponent::from_integer(2) {
        bail!("window {} is narrower than 2", text);
    }
    Ok((lo, hi))
}

pub fn scalar(text: &str, what: &str) -> Result<Scalar> {
    parse_in(text).map_err(|e| anyhow!("bad {}: {}", what, e))
}

/// One row per line; entries separated by whitespace or commas; `#` starts
/// a comment.
pub fn matrix(text: &str) -> Result<Matrix<Scalar>> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<Scalar> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| scalar(t, "matrix entry"))
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        bail!("the matrix must be square and nonempty");
    }
    Ok(Matrix::from_rows(rows))
}
