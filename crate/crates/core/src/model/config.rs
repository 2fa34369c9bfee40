use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Architecture hyperparameters. `Default` is the full-size setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub smiles_len: usize,
    pub protein_len: usize,
    pub embed_dim: usize,
    pub smiles_vocab: usize,
    pub protein_vocab: usize,
    pub stream_filters: [usize; 3],
    pub combined_filters: [usize; 3],
    pub kernel_size: usize,
    pub stride: usize,
    pub padding: usize,
    pub dilation: usize,
    pub stream_repr_dim: usize,
    pub combined_repr_dim: usize,
    pub fc_dims: Vec<usize>,
    pub dropout_p: f64,
    /// `true` pools every conv layer into the representation (the default);
    /// `false` keeps only the last conv layer's pool.
    pub use_skip: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            smiles_len: 100,
            protein_len: 1000,
            embed_dim: 128,
            smiles_vocab: 64,
            protein_vocab: 25,
            stream_filters: [32, 64, 96],
            combined_filters: [192, 288, 96],
            kernel_size: 8,
            stride: 1,
            padding: 0,
            dilation: 1,
            stream_repr_dim: 256,
            combined_repr_dim: 512,
            fc_dims: vec![2048, 2048, 1024, 512, 1],
            dropout_p: 0.1,
            use_skip: true,
        }
    }
}

impl ModelConfig {
    /// Same topology at a fraction of the width, sized for the synthetic
    /// datasets: SMILES up to 64 and proteins up to 160 characters.
    pub fn compact() -> Self {
        ModelConfig {
            smiles_len: 64,
            protein_len: 160,
            embed_dim: 16,
            stream_filters: [8, 16, 24],
            combined_filters: [16, 24, 24],
            kernel_size: 4,
            stream_repr_dim: 32,
            combined_repr_dim: 64,
            fc_dims: vec![64, 32, 1],
            ..ModelConfig::default()
        }
    }
}

/// Conv geometry shared by every layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvGeometry {
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
    pub dilation: usize,
}

impl ConvGeometry {
    pub fn output_len(&self, l_in: usize) -> Result<usize> {
        conv_output_length(l_in, self.kernel, self.stride, self.padding, self.dilation)
    }
}

/// `floor((l_in + 2*padding - dilation*(kernel-1) - 1) / stride + 1)`.
pub fn conv_output_length(
    l_in: usize,
    kernel: usize,
    stride: usize,
    padding: usize,
    dilation: usize,
) -> Result<usize> {
    if l_in == 0 || kernel == 0 || stride == 0 || dilation == 0 {
        return Err(Error::InvalidConfig(
            "conv length, kernel, stride and dilation must be positive".into(),
        ));
    }
    let span = (l_in + 2 * padding) as i64 - (dilation * (kernel - 1)) as i64 - 1;
    let out = span.div_euclid(stride as i64) + 1;
    if out < 1 {
        return Err(Error::DegenerateOutput(out));
    }
    Ok(out as usize)
}

/// Feature-map lengths through the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeChain {
    pub drug: [usize; 3],
    pub protein: [usize; 3],
    pub combined_input: usize,
    pub combined: [usize; 3],
    pub combined_channels: usize,
    pub stream_pool_width: usize,
    pub combined_pool_width: usize,
    pub fc_input: usize,
}

impl ModelConfig {
    pub fn geometry(&self) -> ConvGeometry {
        ConvGeometry {
            kernel: self.kernel_size,
            stride: self.stride,
            padding: self.padding,
            dilation: self.dilation,
        }
    }

    pub fn vocab_size(&self, stream: Stream) -> usize {
        match stream {
            Stream::Drug => self.smiles_vocab,
            Stream::Protein => self.protein_vocab,
        }
    }

    pub fn input_len(&self, stream: Stream) -> usize {
        match stream {
            Stream::Drug => self.smiles_len,
            Stream::Protein => self.protein_len,
        }
    }

    fn chain(&self, l_in: usize) -> Result<[usize; 3]> {
        let g = self.geometry();
        let a = g.output_len(l_in)?;
        let b = g.output_len(a)?;
        Ok([a, b, g.output_len(b)?])
    }

    pub fn shapes(&self) -> Result<ShapeChain> {
        self.validate()?;
        let drug = self.chain(self.smiles_len)?;
        let protein = self.chain(self.protein_len)?;
        let combined_input = drug[2] + protein[2];
        let combined = self.chain(combined_input)?;
        let pool = |f: &[usize; 3]| if self.use_skip { f.iter().sum() } else { f[2] };
        Ok(ShapeChain {
            drug,
            protein,
            combined_input,
            combined,
            combined_channels: self.stream_filters[2],
            stream_pool_width: pool(&self.stream_filters),
            combined_pool_width: pool(&self.combined_filters),
            fc_input: 2 * self.stream_repr_dim + self.combined_repr_dim,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("smiles_len", self.smiles_len),
            ("protein_len", self.protein_len),
            ("embed_dim", self.embed_dim),
            ("smiles_vocab", self.smiles_vocab),
            ("protein_vocab", self.protein_vocab),
            ("kernel_size", self.kernel_size),
            ("stride", self.stride),
            ("dilation", self.dilation),
            ("stream_repr_dim", self.stream_repr_dim),
            ("combined_repr_dim", self.combined_repr_dim),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.smiles_vocab > 255 || self.protein_vocab > 255 {
            return Err(Error::InvalidConfig("vocabularies are limited to 255 labels".into()));
        }
        if self.stream_filters.contains(&0) || self.combined_filters.contains(&0) {
            return Err(Error::InvalidConfig("filter counts must be positive".into()));
        }
        if self.fc_dims.last() != Some(&1) || self.fc_dims.contains(&0) {
            return Err(Error::InvalidConfig(
                "fc_dims must be positive and end in 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return Err(Error::InvalidConfig("dropout_p must be in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stream {
    Drug,
    Protein,
}
