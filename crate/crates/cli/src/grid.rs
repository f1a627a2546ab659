//! Parsing of grid tokens for sizes, separations and times.

use lr_horizon::analysis::log_spaced;

use crate::error::CliError;

fn input<T>(msg: String) -> Result<T, CliError> {
    Err(CliError::Input(msg))
}

fn parse_size(token: &str) -> Result<usize, CliError> {
    let x: f64 = token
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("cannot parse size {token:?}")))?;
    if !(x.is_finite() && x >= 2.0 && x.fract() == 0.0 && x <= 1e12) {
        return input(format!("size must be an integer >= 2, got {token:?}"));
    }
    Ok(x as usize)
}

/// Sizes from tokens like `1000`, `1e6` or `1e4..1e6:5`.
pub fn parse_sizes(tokens: &[String]) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for token in tokens {
        if let Some((range, count)) = token.split_once(':') {
            let (lo, hi) = range
                .split_once("..")
                .ok_or_else(|| CliError::Input(format!("expected LO..HI:COUNT, got {token:?}")))?;
            let (lo, hi) = (parse_size(lo)?, parse_size(hi)?);
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad point count in {token:?}")))?;
            if count < 2 || hi <= lo {
                return input(format!("log grid {token:?} needs HI > LO and at least 2 points"));
            }
            out.extend(log_spaced(lo as f64, hi as f64, count).into_iter().map(|x| x as usize));
        } else {
            out.push(parse_size(token)?);
        }
    }
    Ok(out)
}

/// Separations for a lattice whose largest integer separation is `max_r`.
pub fn resolve_separations(tokens: &[String], n: usize, max_r: usize) -> Result<Vec<(usize, String)>, CliError> {
    let mut out = Vec::new();
    for token in tokens {
        let t = token.trim();
        let r = match t {
            "all" => {
                out.extend((1..=max_r).map(|r| (r, "all".to_string())));
                continue;
            }
            "N/2" => n / 2,
            "N/4" => n / 4,
            _ => t
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("cannot parse separation {token:?}")))?,
        };
        if r < 1 || r > max_r {
            return input(format!("separation {t} resolves to {r}, outside 1..={max_r} for N = {n}"));
        }
        out.push((r, t.to_string()));
    }
    Ok(out)
}

/// Times from tokens like `0.1` or `2/lambda`.
pub fn resolve_times(tokens: &[String], lambda: f64) -> Result<Vec<f64>, CliError> {
    tokens
        .iter()
        .map(|token| {
            let t = token.trim();
            let value = match t.strip_suffix("/lambda") {
                Some(num) => {
                    let x: f64 = if num.is_empty() { 1.0 } else { parse_float(num)? };
                    x / lambda
                }
                None => parse_float(t)?,
            };
            if !(value.is_finite() && value >= 0.0) {
                return input(format!("time must be finite and non-negative, got {t:?}"));
            }
            Ok(value)
        })
        .collect()
}

fn parse_float(s: &str) -> Result<f64, CliError> {
    s.parse().map_err(|_| CliError::Input(format!("cannot parse number {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes(&s(&["100", "1e3"])).unwrap(), vec![100, 1000]);
        assert_eq!(parse_sizes(&s(&["1e4..1e6:3"])).unwrap(), vec![10000, 100000, 1000000]);
        assert!(parse_sizes(&s(&["1"])).is_err());
        assert!(parse_sizes(&s(&["10.5"])).is_err());
        assert!(parse_sizes(&s(&["1e6..1e4:3"])).is_err());
    }

    #[test]
    fn separations() {
        let r = resolve_separations(&s(&["1", "N/2", "N/4"]), 16, 8).unwrap();
        assert_eq!(r.iter().map(|x| x.0).collect::<Vec<_>>(), vec![1, 8, 4]);
        assert_eq!(resolve_separations(&s(&["all"]), 6, 3).unwrap().len(), 3);
        assert!(resolve_separations(&s(&["9"]), 16, 8).is_err());
        assert!(resolve_separations(&s(&["N/4"]), 3, 1).is_err());
    }

    #[test]
    fn times() {
        assert_eq!(resolve_times(&s(&["0.5", "2/lambda", "/lambda"]), 4.0).unwrap(), vec![0.5, 0.5, 0.25]);
        assert!(resolve_times(&s(&["-1"]), 1.0).is_err());
        assert!(resolve_times(&s(&["x/lambda"]), 1.0).is_err());
    }
}
