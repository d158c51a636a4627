//! Binary model checkpoints.
//!
//! Layout (all integers and reals little-endian):
//!
//! ```text
//! "DAEB"  u32 version  u8 model kind  f64 sigma  u32 latent dim  f64 dropout
//! network × (2 or 3):  u32 n_sizes, u32 sizes…, u8 hidden act, f64 slope,
//!                      u8 output act, f64 slope
//! parameters:          f64… per network, weight then bias per layer
//! ```
//!
//! Networks appear as encoder, decoder and (DAAE only) discriminator.

use std::path::Path;

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::models::{Autoencoder, CorruptionSpec, Discriminator, ModelKind};
use crate::nn::{Dense, Mlp, MlpParams, MlpSpec};
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 4] = b"DAEB";
pub const FORMAT_VERSION: u32 = 1;

fn activation_tag(a: Activation) -> (u8, f64) {
    match a {
        Activation::Relu => (0, 0.0),
        Activation::LeakyRelu(s) => (1, s),
        Activation::Sigmoid => (2, 0.0),
        Activation::Identity => (3, 0.0),
    }
}

fn write_spec(out: &mut Vec<u8>, spec: &MlpSpec) {
    out.extend_from_slice(&(spec.layer_sizes.len() as u32).to_le_bytes());
    for &s in &spec.layer_sizes {
        out.extend_from_slice(&(s as u32).to_le_bytes());
    }
    for a in [spec.hidden_activation, spec.output_activation] {
        let (tag, slope) = activation_tag(a);
        out.push(tag);
        out.extend_from_slice(&slope.to_le_bytes());
    }
}

fn write_params(out: &mut Vec<u8>, params: &MlpParams) {
    for t in params.tensors() {
        for v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
}

pub fn encode_checkpoint(model: &Autoencoder) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(model.kind.tag());
    out.extend_from_slice(&model.corruption.sigma.to_le_bytes());
    out.extend_from_slice(&(model.latent_dim() as u32).to_le_bytes());
    let dropout = model.discriminator.as_ref().map(|d| d.dropout_rate).unwrap_or(0.0);
    out.extend_from_slice(&dropout.to_le_bytes());

    let mut nets = vec![&model.encoder, &model.decoder];
    if let Some(d) = &model.discriminator {
        nets.push(&d.net);
    }
    for net in &nets {
        write_spec(&mut out, &net.spec);
    }
    for net in &nets {
        write_params(&mut out, &net.params);
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or(Error::Truncated { offset: self.bytes.len() })?;
        self.pos = end;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn format_error(&self, message: String) -> Error {
        Error::Format {
            offset: self.pos,
            message,
        }
    }

    fn activation(&mut self) -> Result<Activation> {
        let tag = self.u8()?;
        let slope = self.f64()?;
        match tag {
            0 => Ok(Activation::Relu),
            1 => Ok(Activation::LeakyRelu(slope)),
            2 => Ok(Activation::Sigmoid),
            3 => Ok(Activation::Identity),
            t => Err(self.format_error(format!("unknown activation tag {t}"))),
        }
    }

    fn spec(&mut self) -> Result<MlpSpec> {
        let n = self.u32()? as usize;
        if !(2..=64).contains(&n) {
            return Err(self.format_error(format!("implausible layer count {n}")));
        }
        let sizes = (0..n)
            .map(|_| self.u32().map(|s| s as usize))
            .collect::<Result<Vec<_>>>()?;
        let hidden = self.activation()?;
        let output = self.activation()?;
        MlpSpec::new(sizes, hidden, output).map_err(|e| self.format_error(e.to_string()))
    }

    fn params(&mut self, spec: &MlpSpec) -> Result<MlpParams> {
        let mut layers = Vec::with_capacity(spec.num_layers());
        for w in spec.layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let mut tensor = |shape: Vec<usize>| -> Result<Tensor> {
                let n: usize = shape.iter().product();
                let data = (0..n).map(|_| self.f64()).collect::<Result<Vec<_>>>()?;
                Tensor::new(shape, data)
            };
            let weight = tensor(vec![fan_out, fan_in])?;
            let bias = tensor(vec![fan_out])?;
            layers.push(Dense { weight, bias });
        }
        Ok(MlpParams { layers })
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Autoencoder> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: "missing DAEB magic".into(),
        });
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let tag = r.u8()?;
    let kind = ModelKind::from_tag(tag).ok_or_else(|| r.format_error(format!("unknown model kind {tag}")))?;
    let sigma = r.f64()?;
    let latent = r.u32()? as usize;
    let dropout = r.f64()?;

    let n_nets = if kind == ModelKind::Daae { 3 } else { 2 };
    let specs = (0..n_nets).map(|_| r.spec()).collect::<Result<Vec<_>>>()?;
    if specs[1].input_dim() != latent {
        return Err(r.format_error(format!(
            "decoder input {} disagrees with latent dimension {latent}",
            specs[1].input_dim()
        )));
    }
    let mut nets = Vec::with_capacity(n_nets);
    for spec in specs {
        let params = r.params(&spec)?;
        nets.push(Mlp::from_parts(spec, params).map_err(|e| r.format_error(e.to_string()))?);
    }
    if r.pos != bytes.len() {
        return Err(r.format_error(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    let discriminator = (nets.len() == 3).then(|| Discriminator {
        net: nets.pop().expect("three networks"),
        dropout_rate: dropout,
    });
    let decoder = nets.pop().expect("decoder");
    let encoder = nets.pop().expect("encoder");
    let corruption = CorruptionSpec::new(sigma).map_err(|e| r.format_error(e.to_string()))?;
    Autoencoder::from_parts(kind, encoder, decoder, discriminator, corruption)
        .map_err(|e| Error::Format { offset: bytes.len(), message: e.to_string() })
}

pub fn save_checkpoint(model: &Autoencoder, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_checkpoint(model)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Autoencoder> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes)
}
