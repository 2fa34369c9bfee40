//! ResDTA forward and backward passes.
//!
//! Each stream embeds its tokens, runs three conv+ReLU layers and
//! global-max-pools every layer's output over the length axis. With skips
//! enabled the three pooled vectors are concatenated before the linear
//! projection; the ablation keeps only the last one. The combined stream
//! consumes the drug and protein conv3 maps concatenated along length
//! (drug first). The head sees `[drug repr, combined repr, protein repr]`.

use ndarray::{concatenate, s, Array1, Array2, Array3, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ModelConfig, Stream};
use super::layers::{
    conv1d, conv1d_backward, embed, embed_backward, global_max_pool, linear, linear_backward,
    relu_backward, relu_inplace,
};
use super::params::{Conv1d, Linear, ModelParams};
use crate::error::{Error, Result};
use crate::mix_seed;

/// Dropout behaviour of a forward pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eval,
    /// Dropout on; sample `i` of a batch draws its masks from `mix(seed, i)`.
    Train { seed: u64 },
}

struct ConvStack {
    input: Array2<f64>,
    acts: Vec<Array2<f64>>,
    argmax: Vec<Vec<usize>>,
    pooled: Array1<f64>,
    repr: Array1<f64>,
}

fn stack_forward(
    convs: &[Conv1d],
    projection: &Linear,
    input: Array2<f64>,
    cfg: &ModelConfig,
) -> Result<ConvStack> {
    let geom = cfg.geometry();
    let mut acts: Vec<Array2<f64>> = Vec::with_capacity(convs.len());
    let mut argmax = Vec::with_capacity(convs.len());
    let mut pooled = Vec::new();
    for (i, conv) in convs.iter().enumerate() {
        let x = if i == 0 { input.view() } else { acts[i - 1].view() };
        let l_out = geom.output_len(x.ncols())?;
        let mut a = conv1d(conv, x, geom, l_out);
        relu_inplace(&mut a);
        let (values, idx) = global_max_pool(&a);
        if cfg.use_skip || i + 1 == convs.len() {
            pooled.extend(values);
        }
        argmax.push(idx);
        acts.push(a);
    }
    let pooled = Array1::from(pooled);
    let repr = linear(projection, &pooled);
    Ok(ConvStack {
        input,
        acts,
        argmax,
        pooled,
        repr,
    })
}

/// Backpropagates `drepr` (and an optional extra gradient on the last
/// activation map) through the stack. Returns the gradient on the input.
fn stack_backward(
    convs: &[Conv1d],
    projection: &Linear,
    grad_convs: &mut [Conv1d],
    grad_projection: &mut Linear,
    cache: &ConvStack,
    drepr: &Array1<f64>,
    extra_last: Option<ArrayView2<f64>>,
    cfg: &ModelConfig,
) -> Array2<f64> {
    let geom = cfg.geometry();
    let dpooled = linear_backward(projection, grad_projection, &cache.pooled, drepr);
    let n = convs.len();
    // pooled-gradient offset of each layer
    let mut offsets = vec![None; n];
    let mut off = 0;
    for (i, conv) in convs.iter().enumerate() {
        if cfg.use_skip || i + 1 == n {
            offsets[i] = Some(off);
            off += conv.out_channels();
        }
    }
    let mut dact: Option<Array2<f64>> = extra_last.map(|e| e.to_owned());
    let mut dinput = None;
    for i in (0..n).rev() {
        let act = &cache.acts[i];
        let mut g = dact.take().unwrap_or_else(|| Array2::zeros(act.raw_dim()));
        if let Some(o) = offsets[i] {
            for (ch, &t) in cache.argmax[i].iter().enumerate() {
                g[[ch, t]] += dpooled[o + ch];
            }
        }
        relu_backward(&mut g, act);
        let x = if i == 0 { cache.input.view() } else { cache.acts[i - 1].view() };
        let dx = conv1d_backward(&convs[i], &mut grad_convs[i], x, g.view(), geom, true)
            .expect("input gradient requested");
        if i == 0 {
            dinput = Some(dx);
        } else {
            dact = Some(dx);
        }
    }
    dinput.expect("stack has at least one conv")
}

struct HeadCache {
    inputs: Vec<Array1<f64>>,
    pre: Vec<Array1<f64>>,
    masks: Vec<Option<Vec<f64>>>,
}

fn head_forward(head: &[Linear], x: Array1<f64>, p: f64, dropout: Option<u64>) -> (f64, HeadCache) {
    let mut rng = dropout.map(ChaCha8Rng::seed_from_u64);
    let keep_scale = 1.0 / (1.0 - p);
    let mut cache = HeadCache {
        inputs: Vec::with_capacity(head.len()),
        pre: Vec::with_capacity(head.len()),
        masks: Vec::with_capacity(head.len()),
    };
    let mut x = x;
    for (i, layer) in head.iter().enumerate() {
        let z = linear(layer, &x);
        cache.inputs.push(x);
        if i + 1 == head.len() {
            let out = z[0];
            cache.pre.push(z);
            cache.masks.push(None);
            return (out, cache);
        }
        let mut a = z.mapv(|v| v.max(0.0));
        let mask = rng.as_mut().filter(|_| p > 0.0).map(|r| {
            (0..a.len())
                .map(|_| if r.gen::<f64>() < p { 0.0 } else { keep_scale })
                .collect::<Vec<f64>>()
        });
        if let Some(m) = &mask {
            a.iter_mut().zip(m).for_each(|(v, k)| *v *= k);
        }
        cache.pre.push(z);
        cache.masks.push(mask);
        x = a;
    }
    unreachable!("head has a final layer")
}

fn head_backward(head: &[Linear], grads: &mut [Linear], cache: &HeadCache, dout: f64) -> Array1<f64> {
    let mut g = Array1::from_elem(1, dout);
    for i in (0..head.len()).rev() {
        let gx = linear_backward(&head[i], &mut grads[i], &cache.inputs[i], &g);
        if i == 0 {
            return gx;
        }
        let prev = i - 1;
        let mask = cache.masks[prev].as_deref();
        g = Array1::from_iter(gx.iter().enumerate().map(|(j, &v)| {
            let active = cache.pre[prev][j] > 0.0;
            let m = mask.map_or(1.0, |m| m[j]);
            if active {
                v * m
            } else {
                0.0
            }
        }));
    }
    unreachable!()
}

fn check_tokens(cfg: &ModelConfig, stream: Stream, tokens: &[u8]) -> Result<()> {
    let len = cfg.input_len(stream);
    if tokens.len() != len {
        return Err(Error::ShapeMismatch(format!(
            "{stream:?} input has {} tokens, expected {len}",
            tokens.len()
        )));
    }
    let vocab_size = cfg.vocab_size(stream);
    match tokens.iter().find(|&&t| t as usize > vocab_size) {
        Some(&token) => Err(Error::TokenOutOfRange { token, vocab_size }),
        None => Ok(()),
    }
}

fn stream_stack(params: &ModelParams, stream: Stream, tokens: &[u8]) -> Result<ConvStack> {
    check_tokens(&params.config, stream, tokens)?;
    let sp = params.stream(stream);
    let embedded = embed(&sp.embedding, tokens);
    stack_forward(&sp.convs, &sp.projection, embedded, &params.config)
}

fn combined_stack(params: &ModelParams, drug_map: ArrayView2<f64>, protein_map: ArrayView2<f64>) -> Result<ConvStack> {
    if drug_map.nrows() != protein_map.nrows()
        || drug_map.nrows() != params.combined.convs[0].in_channels()
    {
        return Err(Error::ShapeMismatch(format!(
            "combined stream expects {} channels, got {} and {}",
            params.combined.convs[0].in_channels(),
            drug_map.nrows(),
            protein_map.nrows()
        )));
    }
    let input = concatenate(Axis(1), &[drug_map, protein_map]).expect("row counts checked");
    stack_forward(&params.combined.convs, &params.combined.projection, input, &params.config)
}

/// Cached activations of one (drug, protein) forward pass.
pub struct SampleForward {
    drug_tokens: Vec<u8>,
    protein_tokens: Vec<u8>,
    drug: ConvStack,
    protein: ConvStack,
    combined: ConvStack,
    head: HeadCache,
    prediction: f64,
}

impl SampleForward {
    pub fn run(params: &ModelParams, drug: &[u8], protein: &[u8], dropout: Option<u64>) -> Result<Self> {
        let d = stream_stack(params, Stream::Drug, drug)?;
        let p = stream_stack(params, Stream::Protein, protein)?;
        let c = combined_stack(params, d.acts[2].view(), p.acts[2].view())?;
        let x = concatenate(Axis(0), &[d.repr.view(), c.repr.view(), p.repr.view()])
            .expect("1-d concatenation");
        let (prediction, head) = head_forward(&params.head, x, params.config.dropout_p, dropout);
        Ok(SampleForward {
            drug_tokens: drug.to_vec(),
            protein_tokens: protein.to_vec(),
            drug: d,
            protein: p,
            combined: c,
            head,
            prediction,
        })
    }

    pub fn prediction(&self) -> f64 {
        self.prediction
    }

    /// Accumulates `dloss/dprediction = dpred` into `grads`.
    pub fn backward(&self, params: &ModelParams, dpred: f64, grads: &mut ModelParams) {
        let cfg = &params.config;
        let gx = head_backward(&params.head, &mut grads.head, &self.head, dpred);
        let ds = cfg.stream_repr_dim;
        let dc = cfg.combined_repr_dim;
        let g_drug = gx.slice(s![..ds]).to_owned();
        let g_comb = gx.slice(s![ds..ds + dc]).to_owned();
        let g_prot = gx.slice(s![ds + dc..]).to_owned();

        let dconcat = stack_backward(
            &params.combined.convs,
            &params.combined.projection,
            &mut grads.combined.convs,
            &mut grads.combined.projection,
            &self.combined,
            &g_comb,
            None,
            cfg,
        );
        let ld = self.drug.acts[2].ncols();
        let dmap_drug = dconcat.slice(s![.., ..ld]);
        let dmap_prot = dconcat.slice(s![.., ld..]);

        for (stream, cache, g, dmap, tokens) in [
            (Stream::Drug, &self.drug, &g_drug, dmap_drug, &self.drug_tokens),
            (Stream::Protein, &self.protein, &g_prot, dmap_prot, &self.protein_tokens),
        ] {
            let sp = params.stream(stream);
            let gsp = grads.stream_mut(stream);
            let demb = stack_backward(
                &sp.convs,
                &sp.projection,
                &mut gsp.convs,
                &mut gsp.projection,
                cache,
                g,
                Some(dmap),
                cfg,
            );
            embed_backward(&mut gsp.embedding, tokens, demb.view());
        }
    }
}

/// Forward + backward of the squared error for one sample. Adds
/// `d(pred − target)²/dθ` into `grads` and returns the squared error.
pub fn accumulate_squared_error(
    params: &ModelParams,
    drug: &[u8],
    protein: &[u8],
    target: f64,
    dropout: Option<u64>,
    grads: &mut ModelParams,
) -> Result<f64> {
    let fwd = SampleForward::run(params, drug, protein, dropout)?;
    let err = fwd.prediction() - target;
    if err.is_finite() {
        fwd.backward(params, 2.0 * err, grads);
    }
    Ok(err * err)
}

pub fn predict_one(params: &ModelParams, drug: &[u8], protein: &[u8]) -> Result<f64> {
    Ok(SampleForward::run(params, drug, protein, None)?.prediction())
}

fn batch_len<D: AsRef<[u8]>, P: AsRef<[u8]>>(drugs: &[D], proteins: &[P]) -> Result<usize> {
    if drugs.len() != proteins.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} drug inputs vs {} protein inputs",
            drugs.len(),
            proteins.len()
        )));
    }
    Ok(drugs.len())
}

/// Batched prediction. In [`Mode::Train`] dropout is active.
pub fn forward<D: AsRef<[u8]>, P: AsRef<[u8]>>(
    params: &ModelParams,
    drug_tokens: &[D],
    protein_tokens: &[P],
    mode: Mode,
) -> Result<Vec<f64>> {
    let n = batch_len(drug_tokens, protein_tokens)?;
    (0..n)
        .map(|i| {
            let dropout = match mode {
                Mode::Eval => None,
                Mode::Train { seed } => Some(mix_seed(seed, i as u64)),
            };
            SampleForward::run(params, drug_tokens[i].as_ref(), protein_tokens[i].as_ref(), dropout)
                .map(|f| f.prediction())
        })
        .collect()
}

/// Per-stream representation `(n, repr)` and final conv map `(n, C, L3)`.
pub fn stream_forward<T: AsRef<[u8]>>(
    params: &ModelParams,
    tokens: &[T],
    stream: Stream,
) -> Result<(Array2<f64>, Array3<f64>)> {
    let stacks = tokens
        .iter()
        .map(|t| stream_stack(params, stream, t.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let shapes = params.config.shapes()?;
    let l3 = match stream {
        Stream::Drug => shapes.drug[2],
        Stream::Protein => shapes.protein[2],
    };
    let c = params.config.stream_filters[2];
    let mut repr = Array2::zeros((stacks.len(), params.config.stream_repr_dim));
    let mut maps = Array3::zeros((stacks.len(), c, l3));
    for (i, st) in stacks.iter().enumerate() {
        repr.row_mut(i).assign(&st.repr);
        maps.index_axis_mut(Axis(0), i).assign(&st.acts[2]);
    }
    Ok((repr, maps))
}

/// Combined-stream representation `(n, combined_repr_dim)`.
pub fn combined_forward(
    params: &ModelParams,
    drug_map: &Array3<f64>,
    protein_map: &Array3<f64>,
) -> Result<Array2<f64>> {
    let n = drug_map.dim().0;
    if protein_map.dim().0 != n {
        return Err(Error::ShapeMismatch(format!(
            "batch sizes differ: {n} vs {}",
            protein_map.dim().0
        )));
    }
    let mut out = Array2::zeros((n, params.config.combined_repr_dim));
    for i in 0..n {
        let st = combined_stack(
            params,
            drug_map.index_axis(Axis(0), i),
            protein_map.index_axis(Axis(0), i),
        )?;
        out.row_mut(i).assign(&st.repr);
    }
    Ok(out)
}
