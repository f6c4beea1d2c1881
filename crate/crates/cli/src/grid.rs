//! Parameter grid syntax: comma-separated values or ranges `a:b` (step 1)
//! and `a:b:step`, all inclusive.

pub fn parse(text: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("invalid grid value {s:?}"))
        };
        match parts.as_slice() {
            [v] => values.push(num(v)?),
            [a, b] => values.extend(range(num(a)?, num(b)?, 1.0)?),
            [a, b, s] => values.extend(range(num(a)?, num(b)?, num(s)?)?),
            _ => return Err(format!("invalid grid item {item:?}")),
        }
    }
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(values)
}

fn range(start: f64, end: f64, step: f64) -> Result<Vec<f64>, String> {
    if step <= 0.0 || end < start {
        return Err(format!("invalid range {start}:{end}:{step}"));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err("grid too large".into());
    }
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
