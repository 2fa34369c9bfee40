use ndarray::{Array1, Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{ModelConfig, Stream};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Conv1d {
    /// `(out_channels, in_channels, kernel)`
    pub weight: Array3<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    /// `(out_features, in_features)`; `y = x Aᵀ + b`.
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamParams {
    /// `(vocab + 1, embed_dim)`; row 0 embeds the padding label.
    pub embedding: Array2<f64>,
    pub convs: Vec<Conv1d>,
    pub projection: Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedParams {
    pub convs: Vec<Conv1d>,
    pub projection: Linear,
}

/// All learned weights. The same type doubles as a gradient buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub config: ModelConfig,
    pub drug: StreamParams,
    pub protein: StreamParams,
    pub combined: CombinedParams,
    pub head: Vec<Linear>,
}

/// A named, shaped view of one parameter array.
pub struct TensorRef<'a> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a [f64],
}

pub struct TensorMut<'a> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a mut [f64],
}

fn uniform_fan_in(rng: &mut ChaCha8Rng, shape: &[usize], fan_in: usize) -> Vec<f64> {
    let bound = 1.0 / (fan_in as f64).sqrt();
    let n: usize = shape.iter().product();
    (0..n).map(|_| rng.gen_range(-bound..bound)).collect()
}

impl Conv1d {
    fn init(rng: &mut ChaCha8Rng, out_ch: usize, in_ch: usize, kernel: usize) -> Self {
        let fan_in = in_ch * kernel;
        let w = uniform_fan_in(rng, &[out_ch, in_ch, kernel], fan_in);
        let b = uniform_fan_in(rng, &[out_ch], fan_in);
        Conv1d {
            weight: Array3::from_shape_vec((out_ch, in_ch, kernel), w).unwrap(),
            bias: Array1::from(b),
        }
    }

    pub fn out_channels(&self) -> usize {
        self.weight.dim().0
    }

    pub fn in_channels(&self) -> usize {
        self.weight.dim().1
    }
}

impl Linear {
    fn init(rng: &mut ChaCha8Rng, out_f: usize, in_f: usize) -> Self {
        let w = uniform_fan_in(rng, &[out_f, in_f], in_f);
        let b = uniform_fan_in(rng, &[out_f], in_f);
        Linear {
            weight: Array2::from_shape_vec((out_f, in_f), w).unwrap(),
            bias: Array1::from(b),
        }
    }
}

fn init_stream(rng: &mut ChaCha8Rng, cfg: &ModelConfig, stream: Stream, pool_width: usize) -> StreamParams {
    let rows = cfg.vocab_size(stream) + 1;
    let emb: Vec<f64> = (0..rows * cfg.embed_dim)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let f = cfg.stream_filters;
    let k = cfg.kernel_size;
    StreamParams {
        embedding: Array2::from_shape_vec((rows, cfg.embed_dim), emb).unwrap(),
        convs: vec![
            Conv1d::init(rng, f[0], cfg.embed_dim, k),
            Conv1d::init(rng, f[1], f[0], k),
            Conv1d::init(rng, f[2], f[1], k),
        ],
        projection: Linear::init(rng, cfg.stream_repr_dim, pool_width),
    }
}

impl ModelParams {
    /// Seeded initialization: N(0, 1) embeddings, U(±1/√fan_in) for conv and
    /// linear weights and biases.
    pub fn init(config: &ModelConfig, seed: u64) -> Result<Self> {
        let shapes = config.shapes()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let drug = init_stream(&mut rng, config, Stream::Drug, shapes.stream_pool_width);
        let protein = init_stream(&mut rng, config, Stream::Protein, shapes.stream_pool_width);
        let cf = config.combined_filters;
        let k = config.kernel_size;
        let combined = CombinedParams {
            convs: vec![
                Conv1d::init(&mut rng, cf[0], shapes.combined_channels, k),
                Conv1d::init(&mut rng, cf[1], cf[0], k),
                Conv1d::init(&mut rng, cf[2], cf[1], k),
            ],
            projection: Linear::init(&mut rng, config.combined_repr_dim, shapes.combined_pool_width),
        };
        let mut head = Vec::with_capacity(config.fc_dims.len());
        let mut width = shapes.fc_input;
        for &out in &config.fc_dims {
            head.push(Linear::init(&mut rng, out, width));
            width = out;
        }
        Ok(ModelParams {
            config: config.clone(),
            drug,
            protein,
            combined,
            head,
        })
    }

    pub fn stream(&self, stream: Stream) -> &StreamParams {
        match stream {
            Stream::Drug => &self.drug,
            Stream::Protein => &self.protein,
        }
    }

    pub fn stream_mut(&mut self, stream: Stream) -> &mut StreamParams {
        match stream {
            Stream::Drug => &mut self.drug,
            Stream::Protein => &mut self.protein,
        }
    }

    /// Same shapes, all zeros.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.fill(0.0);
        z
    }

    pub fn fill(&mut self, value: f64) {
        for t in self.tensors_mut() {
            t.data.fill(value);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.data.iter_mut().for_each(|x| *x *= factor);
        }
    }

    pub fn add_assign(&mut self, other: &ModelParams) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.data.iter_mut().zip(b.data).for_each(|(x, y)| *x += y);
        }
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.data.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.data.iter().all(|x| x.is_finite()))
    }

    /// Every parameter array in a fixed order with a stable name.
    pub fn tensors(&self) -> Vec<TensorRef<'_>> {
        let mut out = Vec::new();
        macro_rules! visit {
            ($name:expr, $arr:expr) => {
                out.push(TensorRef {
                    name: $name,
                    shape: $arr.shape().to_vec(),
                    data: $arr.as_slice().expect("standard layout"),
                })
            };
        }
        for (prefix, s) in [("drug", &self.drug), ("protein", &self.protein)] {
            visit!(format!("{prefix}.embedding"), s.embedding);
            for (i, c) in s.convs.iter().enumerate() {
                visit!(format!("{prefix}.conv{}.weight", i + 1), c.weight);
                visit!(format!("{prefix}.conv{}.bias", i + 1), c.bias);
            }
            visit!(format!("{prefix}.projection.weight"), s.projection.weight);
            visit!(format!("{prefix}.projection.bias"), s.projection.bias);
        }
        for (i, c) in self.combined.convs.iter().enumerate() {
            visit!(format!("combined.conv{}.weight", i + 1), c.weight);
            visit!(format!("combined.conv{}.bias", i + 1), c.bias);
        }
        visit!("combined.projection.weight".to_string(), self.combined.projection.weight);
        visit!("combined.projection.bias".to_string(), self.combined.projection.bias);
        for (i, l) in self.head.iter().enumerate() {
            visit!(format!("head.fc{}.weight", i + 1), l.weight);
            visit!(format!("head.fc{}.bias", i + 1), l.bias);
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<TensorMut<'_>> {
        let mut out = Vec::new();
        macro_rules! visit {
            ($name:expr, $arr:expr) => {{
                let shape = $arr.shape().to_vec();
                out.push(TensorMut {
                    name: $name,
                    shape,
                    data: $arr.as_slice_mut().expect("standard layout"),
                })
            }};
        }
        let ModelParams {
            drug,
            protein,
            combined,
            head,
            ..
        } = self;
        for (prefix, s) in [("drug", drug), ("protein", protein)] {
            visit!(format!("{prefix}.embedding"), s.embedding);
            for (i, c) in s.convs.iter_mut().enumerate() {
                visit!(format!("{prefix}.conv{}.weight", i + 1), c.weight);
                visit!(format!("{prefix}.conv{}.bias", i + 1), c.bias);
            }
            visit!(format!("{prefix}.projection.weight"), s.projection.weight);
            visit!(format!("{prefix}.projection.bias"), s.projection.bias);
        }
        for (i, c) in combined.convs.iter_mut().enumerate() {
            visit!(format!("combined.conv{}.weight", i + 1), c.weight);
            visit!(format!("combined.conv{}.bias", i + 1), c.bias);
        }
        visit!("combined.projection.weight".to_string(), combined.projection.weight);
        visit!("combined.projection.bias".to_string(), combined.projection.bias);
        for (i, l) in head.iter_mut().enumerate() {
            visit!(format!("head.fc{}.weight", i + 1), l.weight);
            visit!(format!("head.fc{}.bias", i + 1), l.bias);
        }
        out
    }
}

pub fn init_params(config: &ModelConfig, seed: u64) -> Result<ModelParams> {
    ModelParams::init(config, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_shapes() {
        let p = init_params(&ModelConfig::default(), 0).unwrap();
        assert_eq!(p.drug.embedding.dim(), (65, 128));
        assert_eq!(p.protein.embedding.dim(), (26, 128));
        assert_eq!(p.drug.convs[0].weight.dim(), (32, 128, 8));
        assert_eq!(p.drug.projection.weight.dim(), (256, 192));
        assert_eq!(p.combined.convs[0].in_channels(), 96);
        assert_eq!(p.combined.projection.weight.dim(), (512, 576));
        assert_eq!(p.head[0].weight.dim(), (2048, 1024));
        let widths: Vec<usize> = p.head.iter().map(|l| l.weight.dim().0).collect();
        assert_eq!(widths, vec![2048, 2048, 1024, 512, 1]);
        assert!(p.all_finite());
    }

    #[test]
    fn init_is_deterministic() {
        let cfg = ModelConfig {
            smiles_len: 30,
            protein_len: 40,
            embed_dim: 8,
            stream_filters: [4, 4, 4],
            combined_filters: [4, 4, 4],
            stream_repr_dim: 8,
            combined_repr_dim: 8,
            fc_dims: vec![16, 1],
            ..ModelConfig::default()
        };
        assert_eq!(init_params(&cfg, 9).unwrap(), init_params(&cfg, 9).unwrap());
        assert_ne!(init_params(&cfg, 9).unwrap(), init_params(&cfg, 10).unwrap());
    }

    #[test]
    fn tensor_views_agree() {
        let mut p = init_params(&ModelConfig::default(), 1).unwrap();
        let names: Vec<String> = p.tensors().into_iter().map(|t| t.name).collect();
        let names_mut: Vec<String> = p.tensors_mut().into_iter().map(|t| t.name).collect();
        assert_eq!(names, names_mut);
        assert_eq!(names.len(), 2 * (1 + 6 + 2) + 6 + 2 + 10);
    }
}
