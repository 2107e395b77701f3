//! Deterministic JSON formatting helpers. Output files must be byte-stable
//! across runs, so floats are written with 17 significant digits and object
//! keys in fixed order by hand.

/// Shortest 17-significant-digit form that round-trips f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        // keep small integers readable: 1.0, -3.0, 0.0
        format!("{:.1}", x)
    } else {
        format!("{:.16e}", x)
    }
}

pub fn fmt_bool_opt(v: Option<bool>) -> String {
    match v {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => "null".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [
            0.0,
            1.0,
            -2.5,
            std::f64::consts::PI,
            1.0843484508566490e-7,
            -9.87654321e12,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
            // valid JSON number
            let v: serde_json::Value = serde_json::from_str(&s).unwrap();
            assert_eq!(v.as_f64().unwrap(), x);
        }
    }
}
