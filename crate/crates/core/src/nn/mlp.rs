use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::rng::Prng;
use crate::tensor::Tensor;

/// Architecture of a fully-connected network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpSpec {
    /// Layer widths, input dimension first.
    pub layer_sizes: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
}

impl MlpSpec {
    pub fn new(
        layer_sizes: Vec<usize>,
        hidden_activation: Activation,
        output_activation: Activation,
    ) -> Result<Self> {
        let spec = MlpSpec {
            layer_sizes,
            hidden_activation,
            output_activation,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 2 {
            return Err(Error::Argument(format!(
                "an MLP needs at least input and output sizes, got {:?}",
                self.layer_sizes
            )));
        }
        if self.layer_sizes.contains(&0) {
            return Err(Error::Argument(format!(
                "layer sizes must be positive, got {:?}",
                self.layer_sizes
            )));
        }
        self.hidden_activation.validate()?;
        self.output_activation.validate()?;
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().expect("validated spec")
    }

    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    fn activation(&self, layer: usize) -> Activation {
        if layer + 1 == self.num_layers() {
            self.output_activation
        } else {
            self.hidden_activation
        }
    }
}

/// One affine layer: `y = x Wᵀ + b` with `W` stored `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Tensor,
    pub bias: Tensor,
}

/// Weights and biases of every layer, in forward order.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub layers: Vec<Dense>,
}

impl MlpParams {
    pub fn zeros_like(&self) -> Self {
        MlpParams {
            layers: self
                .layers
                .iter()
                .map(|l| Dense {
                    weight: Tensor::zeros(l.weight.shape()),
                    bias: Tensor::zeros(l.bias.shape()),
                })
                .collect(),
        }
    }

    /// Parameter tensors in declaration order: weight then bias, layer by layer.
    pub fn tensors(&self) -> Vec<&Tensor> {
        self.layers
            .iter()
            .flat_map(|l| [&l.weight, &l.bias])
            .collect()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        self.layers
            .iter_mut()
            .flat_map(|l| [&mut l.weight, &mut l.bias])
            .collect()
    }

    /// Name of the `i`-th tensor returned by [`MlpParams::tensors`].
    pub fn tensor_name(i: usize) -> String {
        let kind = if i % 2 == 0 { "weight" } else { "bias" };
        format!("layer {} {kind}", i / 2)
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn add_assign(&mut self, other: &MlpParams) -> Result<()> {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.add_assign(b)?;
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.all_finite())
    }

    fn matches(&self, spec: &MlpSpec) -> bool {
        self.layers.len() == spec.num_layers()
            && self.layers.iter().enumerate().all(|(i, l)| {
                l.weight.shape() == [spec.layer_sizes[i + 1], spec.layer_sizes[i]]
                    && l.bias.shape() == [spec.layer_sizes[i + 1]]
            })
    }
}

/// How a forward pass treats dropout.
pub enum ForwardMode<'a> {
    Eval,
    Train {
        dropout_rate: f64,
        rng: Option<&'a mut Prng>,
    },
}

/// Intermediate values recorded by [`Mlp::forward`] for [`Mlp::backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    layer_inputs: Vec<Tensor>,
    pre_activations: Vec<Tensor>,
    activations: Vec<Tensor>,
    dropout_masks: Vec<Option<Tensor>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub spec: MlpSpec,
    pub params: MlpParams,
}

impl Mlp {
    /// Glorot-uniform weights, zero biases.
    pub fn init(spec: MlpSpec, rng: &mut Prng) -> Result<Self> {
        spec.validate()?;
        let layers = spec
            .layer_sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let mut weight = Tensor::zeros(&[fan_out, fan_in]);
                for v in weight.data_mut() {
                    *v = limit * (2.0 * rng.next_f64() - 1.0);
                }
                Dense {
                    weight,
                    bias: Tensor::zeros(&[fan_out]),
                }
            })
            .collect();
        Ok(Mlp {
            spec,
            params: MlpParams { layers },
        })
    }

    pub fn from_parts(spec: MlpSpec, params: MlpParams) -> Result<Self> {
        spec.validate()?;
        if !params.matches(&spec) {
            return Err(Error::Argument(format!(
                "parameter shapes do not match layer sizes {:?}",
                spec.layer_sizes
            )));
        }
        Ok(Mlp { spec, params })
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        if x.shape().len() != 2 || x.cols() != self.spec.input_dim() {
            return Err(Error::shape(
                "mlp input",
                x.shape(),
                &[x.rows(), self.spec.input_dim()],
            ));
        }
        Ok(())
    }

    /// Eval-mode forward pass without recording a cache.
    pub fn predict(&self, x: &Tensor) -> Result<Tensor> {
        self.check_input(x)?;
        let mut h = x.clone();
        for (i, layer) in self.params.layers.iter().enumerate() {
            let mut z = h.matmul_transposed(&layer.weight)?;
            z.add_row_broadcast(&layer.bias)?;
            let act = self.spec.activation(i);
            z.map_inplace(|v| act.apply(v));
            h = z;
        }
        Ok(h)
    }

    pub fn forward(&self, x: &Tensor, mode: ForwardMode<'_>) -> Result<(Tensor, ForwardCache)> {
        self.check_input(x)?;
        let (dropout_rate, mut rng) = match mode {
            ForwardMode::Eval => (0.0, None),
            ForwardMode::Train { dropout_rate, rng } => {
                if !(0.0..1.0).contains(&dropout_rate) {
                    return Err(Error::Argument(format!(
                        "dropout rate must lie in [0, 1), got {dropout_rate}"
                    )));
                }
                if dropout_rate > 0.0 && rng.is_none() {
                    return Err(Error::Argument(
                        "dropout in train mode needs a random stream".into(),
                    ));
                }
                (dropout_rate, rng)
            }
        };

        let n = self.params.layers.len();
        let mut cache = ForwardCache {
            layer_inputs: Vec::with_capacity(n),
            pre_activations: Vec::with_capacity(n),
            activations: Vec::with_capacity(n),
            dropout_masks: Vec::with_capacity(n),
        };
        let mut h = x.clone();
        for (i, layer) in self.params.layers.iter().enumerate() {
            let mut z = h.matmul_transposed(&layer.weight)?;
            z.add_row_broadcast(&layer.bias)?;
            let act = self.spec.activation(i);
            let y = z.map(|v| act.apply(v));
            cache.layer_inputs.push(h);

            let is_hidden = i + 1 < n;
            let (next, mask) = match rng.as_deref_mut() {
                Some(rng) if is_hidden && dropout_rate > 0.0 => {
                    let keep = 1.0 / (1.0 - dropout_rate);
                    let mut mask = Tensor::zeros(y.shape());
                    for m in mask.data_mut() {
                        if rng.next_f64() >= dropout_rate {
                            *m = keep;
                        }
                    }
                    (y.mul(&mask)?, Some(mask))
                }
                _ => (y.clone(), None),
            };
            cache.pre_activations.push(z);
            cache.activations.push(y);
            cache.dropout_masks.push(mask);
            h = next;
        }
        Ok((h, cache))
    }

    /// Reverse-mode gradients of `sum(grad_output ⊙ output)` with respect to
    /// every parameter and to the input.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        grad_output: &Tensor,
    ) -> Result<(MlpParams, Tensor)> {
        let n = self.params.layers.len();
        if cache.layer_inputs.len() != n {
            return Err(Error::Contract(format!(
                "cache has {} layers, network has {n}",
                cache.layer_inputs.len()
            )));
        }
        for (i, (input, layer)) in cache.layer_inputs.iter().zip(&self.params.layers).enumerate() {
            if input.cols() != layer.weight.shape()[1]
                || cache.pre_activations[i].cols() != layer.weight.shape()[0]
            {
                return Err(Error::Contract(format!("layer {i} shapes differ")));
            }
        }
        let last = &cache.activations[n - 1];
        if grad_output.shape() != last.shape() {
            return Err(Error::shape("mlp backward", grad_output.shape(), last.shape()));
        }

        let mut grads = Vec::with_capacity(n);
        let mut g = grad_output.clone();
        for i in (0..n).rev() {
            if let Some(mask) = &cache.dropout_masks[i] {
                g = g.mul(mask)?;
            }
            let act = self.spec.activation(i);
            let z = &cache.pre_activations[i];
            let y = &cache.activations[i];
            for ((gv, &zv), &yv) in g.data_mut().iter_mut().zip(z.data()).zip(y.data()) {
                *gv *= act.derivative(zv, yv);
            }
            let weight = g.transposed_matmul(&cache.layer_inputs[i])?;
            let bias = g.sum_rows()?;
            g = g.matmul(&self.params.layers[i].weight)?;
            grads.push(Dense { weight, bias });
        }
        grads.reverse();
        Ok((MlpParams { layers: grads }, g))
    }
}
