//! Number formatting for file output. Everything here round-trips through
//! `str::parse::<f64>` bit-exactly.

/// Shortest round-trip representation, switching to exponent notation for
/// very small or very large magnitudes.
pub fn round_trip(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Seventeen significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}
