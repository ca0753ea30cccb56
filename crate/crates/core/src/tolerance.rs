//! Error measures shared by the checks.

/// `|a - b| / max(|a|, |b|, 1e-8)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

/// `tol * (1 + sum |summands|)`: the comparison scale for margins of
/// inequality chains that mix magnitudes.
pub fn scaled_tolerance(tol: f64, summands: &[f64]) -> f64 {
    tol * (1.0 + summands.iter().map(|s| s.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_floors_tiny_values() {
        assert_eq!(relative_error(2.0, 1.0), 0.5);
        assert!((relative_error(1e-12, 0.0) - 1e-4).abs() < 1e-18);
        assert_eq!(scaled_tolerance(1e-10, &[1.0, -2.0]), 4e-10);
    }
}
