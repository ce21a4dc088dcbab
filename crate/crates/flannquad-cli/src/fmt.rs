//! Deterministic CSV number formatting: 12 significant digits, `.` decimal
//! separator, normalized exponent form.

pub fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}
