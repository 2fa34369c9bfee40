//! Single-sample layer kernels. Feature maps are `(channels, length)`.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis};

use super::config::ConvGeometry;
use super::params::{Conv1d, Linear};

/// `out[e, t] = table[tokens[t], e]`
pub fn embed(table: &Array2<f64>, tokens: &[u8]) -> Array2<f64> {
    let dim = table.ncols();
    let mut out = Array2::zeros((dim, tokens.len()));
    for (t, &tok) in tokens.iter().enumerate() {
        out.column_mut(t).assign(&table.row(tok as usize));
    }
    out
}

pub fn embed_backward(grad_table: &mut Array2<f64>, tokens: &[u8], dout: ArrayView2<f64>) {
    for (t, &tok) in tokens.iter().enumerate() {
        let mut row = grad_table.row_mut(tok as usize);
        row += &dout.column(t);
    }
}

fn padded(x: ArrayView2<f64>, padding: usize) -> Array2<f64> {
    let (c, l) = x.dim();
    let mut p = Array2::zeros((c, l + 2 * padding));
    p.slice_mut(s![.., padding..padding + l]).assign(&x);
    p
}

fn tap_range(k: usize, geom: ConvGeometry, l_out: usize) -> ndarray::SliceInfo<[ndarray::SliceInfoElem; 2], ndarray::Ix2, ndarray::Ix2> {
    let start = k * geom.dilation;
    let end = start + (l_out - 1) * geom.stride + 1;
    s![.., start..end;geom.stride]
}

/// Valid cross-correlation: `out[j, t] = b[j] + Σ_c Σ_k w[j, c, k] · x[c, t·s + k·d − p]`.
pub fn conv1d(conv: &Conv1d, x: ArrayView2<f64>, geom: ConvGeometry, l_out: usize) -> Array2<f64> {
    let cout = conv.out_channels();
    let mut out = Array2::from_shape_fn((cout, l_out), |(j, _)| conv.bias[j]);
    let owned;
    let xp = if geom.padding > 0 {
        owned = padded(x, geom.padding);
        owned.view()
    } else {
        x
    };
    for k in 0..geom.kernel {
        let wk = conv.weight.slice(s![.., .., k]);
        let xk = xp.slice(tap_range(k, geom, l_out));
        general_mat_mul(1.0, &wk, &xk, 1.0, &mut out);
    }
    out
}

/// Accumulates weight/bias gradients into `grad` and returns the input
/// gradient when `want_input` is set.
pub fn conv1d_backward(
    conv: &Conv1d,
    grad: &mut Conv1d,
    x: ArrayView2<f64>,
    dout: ArrayView2<f64>,
    geom: ConvGeometry,
    want_input: bool,
) -> Option<Array2<f64>> {
    let l_out = dout.ncols();
    grad.bias += &dout.sum_axis(Axis(1));
    let owned;
    let xp = if geom.padding > 0 {
        owned = padded(x, geom.padding);
        owned.view()
    } else {
        x
    };
    let mut dxp = want_input.then(|| Array2::zeros(xp.raw_dim()));
    for k in 0..geom.kernel {
        let xk = xp.slice(tap_range(k, geom, l_out));
        let mut dwk = grad.weight.slice_mut(s![.., .., k]);
        general_mat_mul(1.0, &dout, &xk.t(), 1.0, &mut dwk);
        if let Some(dxp) = dxp.as_mut() {
            let wk = conv.weight.slice(s![.., .., k]);
            let mut dxk = dxp.slice_mut(tap_range(k, geom, l_out));
            general_mat_mul(1.0, &wk.t(), &dout, 1.0, &mut dxk);
        }
    }
    dxp.map(|d| {
        if geom.padding > 0 {
            let l = x.ncols();
            d.slice(s![.., geom.padding..geom.padding + l]).to_owned()
        } else {
            d
        }
    })
}

pub fn relu_inplace(x: &mut Array2<f64>) {
    x.mapv_inplace(|v| v.max(0.0));
}

/// Zeroes `grad` where the post-activation output is not positive.
pub fn relu_backward(grad: &mut Array2<f64>, activated: &Array2<f64>) {
    ndarray::Zip::from(grad)
        .and(activated)
        .for_each(|g, &a| {
            if a <= 0.0 {
                *g = 0.0;
            }
        });
}

/// Max over the length axis; returns one value and the first argmax per channel.
pub fn global_max_pool(x: &Array2<f64>) -> (Vec<f64>, Vec<usize>) {
    x.rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (t, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = t;
                }
            }
            (row[best], best)
        })
        .unzip()
}

pub fn linear(layer: &Linear, x: &Array1<f64>) -> Array1<f64> {
    layer.weight.dot(x) + &layer.bias
}

/// Accumulates `dW += g xᵀ`, `db += g`; returns `Wᵀ g`.
pub fn linear_backward(layer: &Linear, grad: &mut Linear, x: &Array1<f64>, g: &Array1<f64>) -> Array1<f64> {
    for (mut row, &gi) in grad.weight.rows_mut().into_iter().zip(g.iter()) {
        if gi != 0.0 {
            row.scaled_add(gi, x);
        }
    }
    grad.bias += g;
    layer.weight.t().dot(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array3};

    fn naive_conv(w: &Array3<f64>, b: &Array1<f64>, x: &Array2<f64>, g: ConvGeometry, l_out: usize) -> Array2<f64> {
        let (cout, cin, kk) = w.dim();
        let l = x.ncols() as i64;
        Array2::from_shape_fn((cout, l_out), |(j, t)| {
            let mut acc = b[j];
            for c in 0..cin {
                for k in 0..kk {
                    let pos = (t * g.stride + k * g.dilation) as i64 - g.padding as i64;
                    if pos >= 0 && pos < l {
                        acc += w[[j, c, k]] * x[[c, pos as usize]];
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn conv_matches_naive_definition() {
        let w = Array3::from_shape_fn((3, 2, 3), |(a, b, c)| (a as f64 - b as f64 * 0.5 + c as f64 * 0.25).sin());
        let bias = array![0.1, -0.2, 0.3];
        let conv = Conv1d { weight: w.clone(), bias: bias.clone() };
        let x = Array2::from_shape_fn((2, 11), |(c, t)| (c as f64 + 0.3 * t as f64).cos());
        for g in [
            ConvGeometry { kernel: 3, stride: 1, padding: 0, dilation: 1 },
            ConvGeometry { kernel: 3, stride: 2, padding: 1, dilation: 2 },
        ] {
            let l_out = g.output_len(11).unwrap();
            let got = conv1d(&conv, x.view(), g, l_out);
            let want = naive_conv(&w, &bias, &x, g, l_out);
            assert!((&got - &want).iter().all(|d| d.abs() < 1e-12));
        }
    }

    #[test]
    fn conv_backward_matches_finite_differences() {
        let g = ConvGeometry { kernel: 2, stride: 2, padding: 1, dilation: 1 };
        let conv = Conv1d {
            weight: Array3::from_shape_fn((2, 2, 2), |(a, b, c)| 0.3 * a as f64 - 0.2 * b as f64 + 0.1 * c as f64 + 0.05),
            bias: array![0.0, 0.1],
        };
        let x = Array2::from_shape_fn((2, 7), |(c, t)| ((c * 7 + t) as f64).sin());
        let l_out = g.output_len(7).unwrap();
        // loss = Σ out ⊙ r for a fixed r
        let r = Array2::from_shape_fn((2, l_out), |(j, t)| 1.0 + j as f64 - 0.3 * t as f64);
        let loss = |x: &Array2<f64>| (conv1d(&conv, x.view(), g, l_out) * &r).sum();
        let mut grad = Conv1d { weight: Array3::zeros((2, 2, 2)), bias: Array1::zeros(2) };
        let dx = conv1d_backward(&conv, &mut grad, x.view(), r.view(), g, true).unwrap();
        let h = 1e-6;
        for idx in [(0, 0), (1, 3), (0, 6), (1, 5)] {
            let mut xp = x.clone();
            xp[idx] += h;
            let mut xm = x.clone();
            xm[idx] -= h;
            let num = (loss(&xp) - loss(&xm)) / (2.0 * h);
            assert!((num - dx[idx]).abs() < 1e-7, "{idx:?}: {num} vs {}", dx[idx]);
        }
        assert!((grad.bias.sum() - r.sum()).abs() < 1e-12);
    }

    #[test]
    fn pool_scales_with_channel() {
        let x = array![[0.5, 2.0, 1.0], [3.0, 3.0, -1.0]];
        let (v, i) = global_max_pool(&x);
        assert_eq!(v, vec![2.0, 3.0]);
        assert_eq!(i, vec![1, 0]);
        let mut scaled = x.clone();
        scaled.row_mut(0).mapv_inplace(|a| a * 4.0);
        assert_eq!(global_max_pool(&scaled).0[0], 8.0);
    }

    #[test]
    fn embedding_lookup_and_scatter() {
        let table = array![[0.0, 0.0], [1.0, 2.0], [3.0, 4.0]];
        let e = embed(&table, &[2, 1, 2, 0]);
        assert_eq!(e, array![[3.0, 1.0, 3.0, 0.0], [4.0, 2.0, 4.0, 0.0]]);
        let mut g = Array2::zeros((3, 2));
        embed_backward(&mut g, &[2, 1, 2, 0], Array2::ones((2, 4)).view());
        assert_eq!(g, array![[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]]);
    }
}
