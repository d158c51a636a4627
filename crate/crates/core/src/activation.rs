//! Elementwise nonlinearities and their derivatives.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Relu,
    LeakyRelu(f64),
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn validate(self) -> Result<Self> {
        match self {
            Activation::LeakyRelu(slope) if !(0.0..1.0).contains(&slope) => Err(
                Error::Argument(format!("leaky ReLU slope must lie in [0, 1), got {slope}")),
            ),
            a => Ok(a),
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::LeakyRelu(slope) => {
                if x >= 0.0 {
                    x
                } else {
                    slope * x
                }
            }
            Activation::Sigmoid => sigmoid_scalar(x),
            Activation::Identity => x,
        }
    }

    /// Derivative given the pre-activation `x` and the output `y = f(x)`.
    ///
    /// The ReLU family takes the positive branch at exactly zero.
    pub fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu(slope) => {
                if x >= 0.0 {
                    1.0
                } else {
                    slope
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }
}

/// Overflow-free logistic function.
pub fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid(x: &Tensor) -> Tensor {
    x.map(sigmoid_scalar)
}

/// `y (1 - y)` evaluated on sigmoid outputs `y`.
pub fn sigmoid_derivative(y: &Tensor) -> Tensor {
    y.map(|y| y * (1.0 - y))
}

pub fn relu(x: &Tensor) -> Tensor {
    x.map(|v| Activation::Relu.apply(v))
}

pub fn relu_derivative(x: &Tensor) -> Tensor {
    x.map(|v| Activation::Relu.derivative(v, 0.0))
}

pub fn leaky_relu(x: &Tensor, slope: f64) -> Result<Tensor> {
    let a = Activation::LeakyRelu(slope).validate()?;
    Ok(x.map(|v| a.apply(v)))
}

pub fn leaky_relu_derivative(x: &Tensor, slope: f64) -> Result<Tensor> {
    let a = Activation::LeakyRelu(slope).validate()?;
    Ok(x.map(|v| a.derivative(v, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sample_uniform, Prng};

    fn scalar(v: f64) -> Tensor {
        Tensor::new(vec![1], vec![v]).unwrap()
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(&scalar(0.0)).data()[0], 0.5);
        assert_eq!(sigmoid_derivative(&scalar(0.5)).data()[0], 0.25);
        let xs = sample_uniform(&mut Prng::new(3), &[200], -40.0, 40.0).unwrap();
        for &x in xs.data() {
            let s = sigmoid_scalar(x) + sigmoid_scalar(-x);
            assert!((s - 1.0).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn sigmoid_saturates_without_overflow() {
        for x in [30.0, 100.0, 800.0, -30.0, -100.0, -800.0] {
            let y = sigmoid_scalar(x);
            assert!(y.is_finite() && (0.0..=1.0).contains(&y));
        }
        assert_eq!(sigmoid_scalar(800.0), 1.0);
        assert_eq!(sigmoid_scalar(-800.0), 0.0);
    }

    #[test]
    fn relu_family_values() {
        assert_eq!(relu(&scalar(-3.0)).data()[0], 0.0);
        assert_eq!(relu(&scalar(5.0)).data()[0], 5.0);
        assert!((leaky_relu(&scalar(-2.0), 0.2).unwrap().data()[0] + 0.4).abs() < 1e-15);
        assert_eq!(relu_derivative(&scalar(0.0)).data()[0], 1.0);
        assert_eq!(leaky_relu_derivative(&scalar(0.0), 0.2).unwrap().data()[0], 1.0);
        assert_eq!(leaky_relu_derivative(&scalar(-1.0), 0.2).unwrap().data()[0], 0.2);
    }

    #[test]
    fn leaky_slope_validated() {
        assert!(leaky_relu(&scalar(1.0), 1.0).is_err());
        assert!(leaky_relu(&scalar(1.0), -0.1).is_err());
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-6;
        let xs = sample_uniform(&mut Prng::new(17), &[100], -5.0, 5.0).unwrap();
        for act in [
            Activation::Relu,
            Activation::LeakyRelu(0.2),
            Activation::Sigmoid,
            Activation::Identity,
        ] {
            for &x in xs.data() {
                let fd = (act.apply(x + h) - act.apply(x - h)) / (2.0 * h);
                let an = act.derivative(x, act.apply(x));
                let rel = (fd - an).abs() / an.abs().max(fd.abs()).max(1e-12);
                let tiny = an.abs() < 1e-12 && fd.abs() < 1e-12;
                assert!(tiny || rel <= 1e-6, "{act:?} at {x}: fd {fd} vs {an}");
            }
        }
    }
}
