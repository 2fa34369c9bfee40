mod common;

use common::{gradient_check, synthetic_data, tiny_config};
use ndarray::Array2;
use proptest::prelude::*;
use resdta::model::layers::global_max_pool;
use resdta::model::{combined_forward, forward, init_params, stream_forward, Mode, ModelConfig, Stream};
use resdta::synthetic::SyntheticSpec;
use resdta::Error;

fn batch(cfg: &ModelConfig, n: usize) -> (Vec<Vec<u8>>, Vec<Vec<u8>>) {
    let data = synthetic_data(cfg, &SyntheticSpec { n_drugs: 6, n_proteins: 4, missing_fraction: 0.0, ..SyntheticSpec::default() });
    let idx: Vec<usize> = (0..n).collect();
    (
        idx.iter().map(|&i| data.drug_tokens(i).to_vec()).collect(),
        idx.iter().map(|&i| data.protein_tokens(i).to_vec()).collect(),
    )
}

#[test]
fn gradients_match_finite_differences() {
    let cfg = tiny_config();
    let params = init_params(&cfg, 3).unwrap();
    let (d, p) = batch(&cfg, 3);
    for (i, dropout) in [None, Some(17), Some(99)].into_iter().enumerate() {
        for (name, rel) in gradient_check(&params, &d[i], &p[i], 0.7, dropout, 1e-5) {
            assert!(rel < 1e-4, "{name}: relative error {rel:e} (dropout {dropout:?})");
        }
    }
}

#[test]
fn ablation_gradients_match_finite_differences() {
    let cfg = ModelConfig { use_skip: false, ..tiny_config() };
    let params = init_params(&cfg, 5).unwrap();
    let (d, p) = batch(&cfg, 1);
    for (name, rel) in gradient_check(&params, &d[0], &p[0], -1.0, Some(4), 1e-5) {
        assert!(rel < 1e-4, "{name}: relative error {rel:e}");
    }
}

#[test]
fn output_and_intermediate_shapes() {
    let cfg = tiny_config();
    let params = init_params(&cfg, 0).unwrap();
    let (d, p) = batch(&cfg, 5);
    assert_eq!(forward(&params, &d, &p, Mode::Eval).unwrap().len(), 5);
    let (drepr, dmap) = stream_forward(&params, &d, Stream::Drug).unwrap();
    let (prepr, pmap) = stream_forward(&params, &p, Stream::Protein).unwrap();
    assert_eq!(drepr.dim(), (5, 5));
    assert_eq!(prepr.dim(), (5, 5));
    assert_eq!(dmap.dim(), (5, 4, 6));
    assert_eq!(pmap.dim(), (5, 4, 14));
    assert_eq!(combined_forward(&params, &dmap, &pmap).unwrap().dim(), (5, 6));
    let empty: [Vec<u8>; 0] = [];
    assert!(forward(&params, &empty, &empty, Mode::Eval).unwrap().is_empty());
}

#[test]
fn batch_order_does_not_change_predictions() {
    let cfg = tiny_config();
    let params = init_params(&cfg, 1).unwrap();
    let (d, p) = batch(&cfg, 8);
    let y = forward(&params, &d, &p, Mode::Eval).unwrap();
    let perm = [3, 0, 7, 5, 1, 6, 2, 4];
    let dp: Vec<_> = perm.iter().map(|&i| d[i].clone()).collect();
    let pp: Vec<_> = perm.iter().map(|&i| p[i].clone()).collect();
    let yp = forward(&params, &dp, &pp, Mode::Eval).unwrap();
    for (k, &i) in perm.iter().enumerate() {
        assert_eq!(yp[k], y[i]);
    }
}

#[test]
fn eval_is_deterministic_and_dropout_is_seeded() {
    let cfg = tiny_config();
    let params = init_params(&cfg, 2).unwrap();
    let (d, p) = batch(&cfg, 6);
    assert_eq!(
        forward(&params, &d, &p, Mode::Eval).unwrap(),
        forward(&params, &d, &p, Mode::Eval).unwrap()
    );
    let a = forward(&params, &d, &p, Mode::Train { seed: 1 }).unwrap();
    assert_eq!(a, forward(&params, &d, &p, Mode::Train { seed: 1 }).unwrap());
    assert_ne!(a, forward(&params, &d, &p, Mode::Train { seed: 2 }).unwrap());
    assert_ne!(a, forward(&params, &d, &p, Mode::Eval).unwrap());
}

#[test]
fn ablation_narrows_the_projection() {
    let full = ModelConfig::default();
    let ablated = ModelConfig { use_skip: false, ..full.clone() };
    assert_eq!(full.shapes().unwrap().stream_pool_width, 192);
    assert_eq!(ablated.shapes().unwrap().stream_pool_width, 96);
    assert_eq!(ablated.shapes().unwrap().combined_pool_width, 96);
    assert_eq!(ablated.shapes().unwrap().fc_input, 1024);
    let tiny = ModelConfig { use_skip: false, ..tiny_config() };
    let params = init_params(&tiny, 0).unwrap();
    assert_eq!(params.drug.projection.weight.dim(), (5, 4));
    let (d, p) = batch(&tiny, 2);
    assert!(forward(&params, &d, &p, Mode::Eval).unwrap().iter().all(|v| v.is_finite()));
}

#[test]
fn all_padding_input_is_finite() {
    let cfg = tiny_config();
    let params = init_params(&cfg, 0).unwrap();
    let d = vec![vec![0u8; cfg.smiles_len]];
    let p = vec![vec![0u8; cfg.protein_len]];
    assert!(forward(&params, &d, &p, Mode::Eval).unwrap()[0].is_finite());
}

#[test]
fn invalid_inputs_are_rejected() {
    let cfg = tiny_config();
    let params = init_params(&cfg, 0).unwrap();
    let good_d = vec![vec![1u8; cfg.smiles_len]];
    let good_p = vec![vec![1u8; cfg.protein_len]];
    let bad_token = vec![vec![65u8; cfg.smiles_len]];
    assert!(matches!(
        forward(&params, &bad_token, &good_p, Mode::Eval),
        Err(Error::TokenOutOfRange { token: 65, .. })
    ));
    let short = vec![vec![1u8; cfg.smiles_len - 1]];
    assert!(matches!(forward(&params, &short, &good_p, Mode::Eval), Err(Error::ShapeMismatch(_))));
    let two = vec![good_d[0].clone(), good_d[0].clone()];
    assert!(forward(&params, &two, &good_p, Mode::Eval).is_err());
    let shrunk = ModelConfig { smiles_len: 6, ..tiny_config() };
    assert!(matches!(init_params(&shrunk, 0), Err(Error::DegenerateOutput(0))));
}

proptest! {
    #[test]
    fn pooling_is_monotone(
        values in proptest::collection::vec(-5.0f64..5.0, 12),
        bumps in proptest::collection::vec(0.0f64..2.0, 12),
    ) {
        let x = Array2::from_shape_vec((3, 4), values).unwrap();
        let y = &x + &Array2::from_shape_vec((3, 4), bumps).unwrap();
        let (px, ix) = global_max_pool(&x);
        let (py, _) = global_max_pool(&y);
        for c in 0..3 {
            prop_assert!(py[c] >= px[c]);
            prop_assert_eq!(x[[c, ix[c]]], px[c]);
            prop_assert!(x.row(c).iter().all(|&v| v <= px[c]));
        }
    }
}
