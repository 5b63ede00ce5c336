//! Text formatting of floating point values for CSV output.

/// Shortest decimal that parses back to the same `f64`.
///
/// Plain notation inside `[1e-4, 1e16)`, exponent notation elsewhere.
pub fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let a = v.abs();
    if (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
