use super::{Matrix, NumericError, SeededRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Sigmoid,
}

/// Logistic function, evaluated on the branch that cannot overflow `exp`.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Elementwise activation value and its derivative at `x`.
pub fn activation(kind: Activation, x: &Matrix) -> (Matrix, Matrix) {
    match kind {
        Activation::Relu => (
            x.map(|v| v.max(0.0)),
            x.map(|v| if v > 0.0 { 1.0 } else { 0.0 }),
        ),
        Activation::Sigmoid => {
            let value = x.map(sigmoid);
            let derivative = value.map(|s| s * (1.0 - s));
            (value, derivative)
        }
    }
}

/// Inverted-dropout mask: each entry is 0 with probability `rate`, otherwise
/// `1 / (1 - rate)`, so the mask has unit expectation.
pub fn dropout_mask(
    rng: &mut SeededRng,
    rows: usize,
    cols: usize,
    rate: f64,
) -> Result<Matrix, NumericError> {
    if !(0.0..1.0).contains(&rate) {
        return Err(NumericError::InvalidParameter(format!(
            "dropout rate must lie in [0, 1), got {rate}"
        )));
    }
    if rate == 0.0 {
        return Ok(Matrix::filled(rows, cols, 1.0));
    }
    let keep = 1.0 / (1.0 - rate);
    let data = (0..rows * cols)
        .map(|_| if rng.uniform() < rate { 0.0 } else { keep })
        .collect();
    Matrix::from_vec(rows, cols, data)
}
