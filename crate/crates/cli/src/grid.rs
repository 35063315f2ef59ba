/// Parses `start:stop:step` (inclusive), a comma list, or a single number.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty grid".into());
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid {spec:?} is not start:stop:step"));
        }
        let nums = parts.iter().map(|p| parse_num(p)).collect::<Result<Vec<_>, _>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || stop < start {
            return Err(format!("grid {spec:?} needs step > 0 and stop >= start"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        if n > 10_000_000 {
            return Err(format!("grid {spec:?} has too many points"));
        }
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    spec.split(',').map(parse_num).collect()
}

fn parse_num(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !x.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(x)
}

/// Parses a comma list of positive integers, e.g. class sizes `2,3`.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, String> {
    spec.split(',').map(|s| s.trim().parse::<usize>().map_err(|_| format!("{s:?} is not a nonnegative integer"))).collect()
}
