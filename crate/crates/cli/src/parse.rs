//! Argument value parsers.

use num_complex::Complex64;

/// Parses `a+bi` or `a-bi`. Both parts are required, so `2i` and `3` are
/// rejected.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let err = || format!("expected a complex literal like 1.5-2i, got {s:?}");
    let body = s.trim().strip_suffix('i').ok_or_else(err)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(err)?;
    let re: f64 = body[..split].parse().map_err(|_| err())?;
    let im: f64 = body[split..].parse().map_err(|_| err())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(err());
    }
    Ok(Complex64::new(re, im))
}

/// Evenly spaced sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples(pub Vec<f64>);

/// Parses `min:max:count` into evenly spaced points; `count = 1` gives `[min]`.
pub fn range(s: &str) -> Result<Samples, String> {
    let err = |why: &str| format!("{s:?}: {why} (expected min:max:count)");
    let fields: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = fields[..] else {
        return Err(err("wrong number of fields"));
    };
    let lo: f64 = lo.trim().parse().map_err(|_| err("bad min"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| err("bad max"))?;
    let n: usize = n.trim().parse().map_err(|_| err("bad count"))?;
    if n == 0 {
        return Err(err("count must be at least 1"));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(err("bounds must be finite"));
    }
    if n > 1 && hi <= lo {
        return Err(err("max must exceed min when count > 1"));
    }
    if n == 1 {
        return Ok(Samples(vec![lo]));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok(Samples(
        (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(complex("1+0i").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(complex("0+2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(complex("-1.5-2.25i").unwrap(), Complex64::new(-1.5, -2.25));
        assert_eq!(complex("1e-3+2E+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert_eq!(complex("-2e-1-1e-2i").unwrap(), Complex64::new(-0.2, -0.01));
        for bad in ["2i", "3", "1+i", "i", "", "1+2j", "a+bi", "1++2i", "inf+0i"] {
            assert!(complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ranges() {
        assert_eq!(range("0:0:1").unwrap().0, vec![0.0]);
        assert_eq!(range("-1:1:3").unwrap().0, vec![-1.0, 0.0, 1.0]);
        for bad in ["0:1", "0:1:0", "1:0:2", "a:1:2", "0:1:2:3"] {
            assert!(range(bad).is_err(), "{bad}");
        }
    }
}
