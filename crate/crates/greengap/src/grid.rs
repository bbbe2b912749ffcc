//! Grid expressions for sweep flags: either a comma-separated list of
//! values (`0.05,0.1,0.27`) or an inclusive range `start:stop:step`
//! (`0:0.30:0.01` yields 31 points).

use crate::{Error, Result};

/// Parses a grid expression into its point values.
pub fn parse_grid(expr: &str) -> Result<Vec<f64>> {
    let expr = expr.trim();
    if expr.is_empty() {
        return Err(Error::Config("empty grid expression".into()));
    }
    if expr.contains(':') {
        parse_range(expr)
    } else {
        expr.split(',')
            .map(|part| parse_value(part.trim()))
            .collect()
    }
}

fn parse_value(raw: &str) -> Result<f64> {
    let value: f64 = raw
        .parse()
        .map_err(|_| Error::Config(format!("unparseable grid value '{raw}'")))?;
    if !value.is_finite() {
        return Err(Error::Config(format!(
            "grid value must be finite, got '{raw}'"
        )));
    }
    Ok(value)
}

fn parse_range(expr: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = expr.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "range grids use start:stop:step, got '{expr}'"
        )));
    }
    let start = parse_value(parts[0].trim())?;
    let stop = parse_value(parts[1].trim())?;
    let step = parse_value(parts[2].trim())?;
    if step <= 0.0 {
        return Err(Error::Config(format!(
            "grid step must be positive, got {step}"
        )));
    }
    if stop < start {
        return Err(Error::Config(format!(
            "grid stop {stop} is below start {start}"
        )));
    }
    let eps = 1e-9 * step.max(stop.abs()).max(1.0);
    let mut values = Vec::new();
    let mut i = 0u64;
    loop {
        let v = start + i as f64 * step;
        if v > stop + eps {
            break;
        }
        // snap near-endpoint values so inclusive bounds are exact
        values.push(if (v - stop).abs() <= eps { stop } else { v });
        i += 1;
        if i > 10_000_000 {
            return Err(Error::Config(format!("grid '{expr}' has too many points")));
        }
    }
    Ok(values)
}
