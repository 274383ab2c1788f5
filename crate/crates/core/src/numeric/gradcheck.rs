use super::Matrix;

/// Central-difference gradient of `f` at `x`, one coordinate at a time.
pub fn finite_difference_gradient<F>(f: F, x: &Matrix, h: f64) -> Matrix
where
    F: Fn(&Matrix) -> f64,
{
    let mut probe = x.clone();
    let mut grad = Matrix::zeros(x.rows(), x.cols());
    for i in 0..x.len() {
        let original = probe.as_slice()[i];
        probe.as_mut_slice()[i] = original + h;
        let plus = f(&probe);
        probe.as_mut_slice()[i] = original - h;
        let minus = f(&probe);
        probe.as_mut_slice()[i] = original;
        grad.as_mut_slice()[i] = (plus - minus) / (2.0 * h);
    }
    grad
}

/// `|a - b| / max(|a|, |b|, floor)`; the floor keeps near-zero entries from
/// dominating.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

pub fn max_relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| relative_error(x, y, floor))
        .fold(0.0, f64::max)
}
