use crate::error::{Error, Result};
use crate::nn::mlp::MlpParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    /// α = 2e-4, β₁ = 0.5, β₂ = 0.999 (the DCGAN-style settings), ε = 1e-8.
    fn default() -> Self {
        AdamConfig {
            learning_rate: 2e-4,
            beta1: 0.5,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && self.learning_rate.is_finite()
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!("invalid Adam settings {self:?}")))
        }
    }
}

/// First and second moment estimates for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    first_moment: MlpParams,
    second_moment: MlpParams,
}

impl AdamState {
    pub fn new(params: &MlpParams, config: AdamConfig) -> Result<Self> {
        config.validate()?;
        Ok(AdamState {
            config,
            step: 0,
            first_moment: params.zeros_like(),
            second_moment: params.zeros_like(),
        })
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut MlpParams, grads: &MlpParams) -> Result<()> {
        let grad_tensors = grads.tensors();
        let param_tensors = params.tensors();
        if grad_tensors.len() != param_tensors.len()
            || grad_tensors
                .iter()
                .zip(&param_tensors)
                .any(|(g, p)| g.shape() != p.shape())
        {
            return Err(Error::Argument(
                "gradient shapes do not match parameters".into(),
            ));
        }
        if let Some(i) = grad_tensors.iter().position(|g| !g.all_finite()) {
            return Err(Error::Numeric(format!(
                "gradient of {} is not finite",
                MlpParams::tensor_name(i)
            )));
        }

        self.step += 1;
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let t = self.step as i32;
        let bias1 = 1.0 - beta1.powi(t);
        let bias2 = 1.0 - beta2.powi(t);

        let moments = self
            .first_moment
            .tensors_mut()
            .into_iter()
            .zip(self.second_moment.tensors_mut());
        for ((p, g), (m, v)) in params.tensors_mut().into_iter().zip(grad_tensors).zip(moments) {
            let (p, g, m, v) = (p.data_mut(), g.data(), m.data_mut(), v.data_mut());
            for k in 0..p.len() {
                m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
                let m_hat = m[k] / bias1;
                let v_hat = v[k] / bias2;
                p[k] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::mlp::Dense;
    use crate::tensor::Tensor;

    fn scalar_params(v: f64) -> MlpParams {
        MlpParams {
            layers: vec![Dense {
                weight: Tensor::new(vec![1, 1], vec![v]).unwrap(),
                bias: Tensor::new(vec![1], vec![0.0]).unwrap(),
            }],
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = scalar_params(0.3);
        let mut state = AdamState::new(&p, AdamConfig::default()).unwrap();
        state.step(&mut p, &scalar_params(0.0)).unwrap();
        assert_eq!(p, scalar_params(0.3));
        assert_eq!(state.step, 1);
    }

    #[test]
    fn first_step_has_learning_rate_magnitude() {
        let mut p = scalar_params(0.0);
        let mut state = AdamState::new(&p, AdamConfig::default()).unwrap();
        state.step(&mut p, &scalar_params(1.0)).unwrap();
        let moved = p.layers[0].weight.data()[0];
        assert!((moved + 2e-4 / (1.0 + 1e-8)).abs() < 1e-15, "{moved}");
    }

    #[test]
    fn constant_gradient_moves_monotonically() {
        for g in [0.7, -2.5] {
            let mut p = scalar_params(0.0);
            let mut state = AdamState::new(&p, AdamConfig::default()).unwrap();
            let mut prev = 0.0;
            for _ in 0..100 {
                state.step(&mut p, &scalar_params(g)).unwrap();
                let now = p.layers[0].weight.data()[0];
                assert!((now - prev) * g < 0.0);
                prev = now;
            }
        }
    }

    #[test]
    fn non_finite_gradient_named() {
        let mut p = scalar_params(0.0);
        let mut state = AdamState::new(&p, AdamConfig::default()).unwrap();
        let mut g = scalar_params(0.0);
        g.layers[0].bias.data_mut()[0] = f64::NAN;
        match state.step(&mut p, &g) {
            Err(Error::Numeric(msg)) => assert!(msg.contains("layer 0 bias"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(state.step, 0);
    }
}
