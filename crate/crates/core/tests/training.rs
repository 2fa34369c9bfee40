mod common;

use common::{synthetic_data, tiny_config};
use resdta::dataset::EncodedDataset;
use resdta::model::{init_params, ModelParams};
use resdta::synthetic::SyntheticSpec;
use resdta::training::{fit, fit_with_observer, schedule_lr, Adam, EpochRecord, TrainConfig, TrainObserver};
use resdta::Error;

fn data() -> EncodedDataset {
    synthetic_data(&tiny_config(), &SyntheticSpec { n_drugs: 10, n_proteins: 6, seed: 4, ..SyntheticSpec::default() })
}

fn split(n: usize) -> (Vec<usize>, Vec<usize>) {
    let all: Vec<usize> = (0..n).collect();
    let cut = n * 3 / 4;
    (all[..cut].to_vec(), all[cut..].to_vec())
}

fn quick(epochs: usize) -> TrainConfig {
    TrainConfig {
        lr_initial: 1e-2,
        batch_size: 8,
        epochs,
        lr_drop_period: 3,
        lr_drop_factor: 0.5,
        restart_period: epochs,
        seed: 11,
        ..TrainConfig::default()
    }
}

fn max_abs_diff(a: &ModelParams, b: &ModelParams) -> f64 {
    a.tensors()
        .iter()
        .zip(b.tensors())
        .flat_map(|(x, y)| x.data.iter().zip(y.data).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn accumulation_matches_one_large_batch() {
    let d = data();
    let (train, val) = split(d.len());
    let p0 = init_params(&tiny_config(), 0).unwrap();
    let big = TrainConfig { batch_size: 16, accumulation_steps: 1, ..quick(3) };
    let small = TrainConfig { batch_size: 4, accumulation_steps: 4, ..quick(3) };
    let a = fit(p0.clone(), &d, &train, &val, &big).unwrap();
    let b = fit(p0, &d, &train, &val, &small).unwrap();
    assert!(max_abs_diff(&a.last, &b.last) < 1e-6);
    for (x, y) in a.history.epochs.iter().zip(&b.history.epochs) {
        assert_eq!(x.updates, y.updates);
        assert!((x.train_rmse - y.train_rmse).abs() < 1e-6);
    }
}

#[test]
fn one_update_per_window() {
    let d = data();
    let (train, val) = split(d.len());
    for (batch, acc) in [(8, 1), (5, 2), (64, 1), (1, 3)] {
        let cfg = TrainConfig { batch_size: batch, accumulation_steps: acc, ..quick(1) };
        let out = fit(init_params(&tiny_config(), 0).unwrap(), &d, &train, &val, &cfg).unwrap();
        assert_eq!(out.history.epochs[0].updates, train.len().div_ceil(batch * acc));
    }
}

#[test]
fn same_seed_same_run() {
    let d = data();
    let (train, val) = split(d.len());
    let run = |seed| {
        let cfg = TrainConfig { seed, ..quick(3) };
        fit(init_params(&tiny_config(), 0).unwrap(), &d, &train, &val, &cfg).unwrap()
    };
    let (a, b, c) = (run(1), run(1), run(2));
    assert_eq!(a.history.to_csv(), b.history.to_csv());
    assert_eq!(a.last, b.last);
    assert_ne!(a.history.to_csv(), c.history.to_csv());
}

#[test]
fn best_epoch_has_lowest_validation_mse() {
    let d = data();
    let (train, val) = split(d.len());
    let out = fit(init_params(&tiny_config(), 0).unwrap(), &d, &train, &val, &quick(8)).unwrap();
    let h = &out.history;
    let min = h.epochs.iter().map(|r| r.val_mse).fold(f64::INFINITY, f64::min);
    assert_eq!(h.best_val_mse, min);
    let first = h.epochs.iter().position(|r| r.val_mse == min).unwrap();
    assert_eq!(h.best_epoch, first);
    let pred = resdta::training::predict(&out.best, &d, &val).unwrap();
    let mse = resdta::metrics::mse(&d.targets(&val), &pred).unwrap();
    assert!((mse - min).abs() < 1e-12);
}

#[test]
fn learning_rate_trace_follows_schedule() {
    let d = data();
    let (train, val) = split(d.len());
    let cfg = quick(7);
    let out = fit(init_params(&tiny_config(), 0).unwrap(), &d, &train, &val, &cfg).unwrap();
    let lrs: Vec<f64> = out.history.epochs.iter().map(|r| r.lr).collect();
    assert_eq!(lrs, vec![1e-2, 1e-2, 1e-2, 5e-3, 5e-3, 5e-3, 2.5e-3]);
    assert!(lrs.iter().enumerate().all(|(e, &lr)| lr == schedule_lr(e, &cfg)));
}

/// Records the weights handed over at each improvement.
#[derive(Default)]
struct Snapshots {
    best: Option<ModelParams>,
    at_restart: Vec<(usize, f64)>,
}

impl TrainObserver for Snapshots {
    fn on_epoch(&mut self, r: &EpochRecord) -> resdta::Result<()> {
        if r.restarted {
            self.at_restart.push((r.epoch, r.val_mse));
        }
        Ok(())
    }

    fn on_improved(&mut self, _epoch: usize, params: &ModelParams) -> resdta::Result<()> {
        self.best = Some(params.clone());
        Ok(())
    }
}

#[test]
fn restarts_reload_the_best_weights() {
    let d = data();
    let (train, val) = split(d.len());
    let cfg = TrainConfig { restart_period: 3, lr_initial: 3e-2, ..quick(9) };
    let mut obs = Snapshots::default();
    let out = fit_with_observer(init_params(&tiny_config(), 0).unwrap(), &d, &train, &val, &cfg, &mut obs).unwrap();
    let flags: Vec<bool> = out.history.epochs.iter().map(|r| r.restarted).collect();
    assert_eq!(flags, vec![false, false, false, true, false, false, true, false, false]);
    assert_eq!(obs.best.as_ref(), Some(&out.best));

    // A restart epoch starts from the best weights, so its validation MSE sits
    // within one epoch's movement of the best seen before it.
    let h = &out.history.epochs;
    let step = h.windows(2).map(|w| (w[1].val_mse - w[0].val_mse).abs()).fold(0.0, f64::max);
    for &(epoch, val_mse) in &obs.at_restart {
        let best_before = h[..epoch].iter().map(|r| r.val_mse).fold(f64::INFINITY, f64::min);
        assert!(val_mse <= best_before + step, "epoch {epoch}: {val_mse} vs {best_before} + {step}");
    }
}

#[test]
fn first_adam_step_moves_each_weight_by_lr() {
    let params = init_params(&tiny_config(), 0).unwrap();
    let mut grads = params.zeros_like();
    for (t, g) in grads.tensors_mut().into_iter().enumerate() {
        for (i, x) in g.data.iter_mut().enumerate() {
            *x = if (t + i) % 3 == 0 { 0.0 } else if i % 2 == 0 { 2.5 } else { -0.01 };
        }
    }
    let cfg = TrainConfig::default();
    let mut adam = Adam::new(&params, &cfg);
    let mut p = params.clone();
    adam.update(&mut p, &grads, 0.1);
    assert_eq!(adam.steps(), 1);
    for ((a, b), g) in p.tensors().iter().zip(params.tensors()).zip(grads.tensors()) {
        for ((x, y), gi) in a.data.iter().zip(b.data).zip(g.data) {
            let expected = if *gi == 0.0 { 0.0 } else { -0.1 * gi.signum() };
            assert!((x - y - expected).abs() < 1e-6);
        }
    }
    adam.reset();
    assert_eq!(adam.steps(), 0);
}

#[test]
fn training_reduces_loss() {
    let d = data();
    let (train, val) = split(d.len());
    let out = fit(init_params(&tiny_config(), 0).unwrap(), &d, &train, &val, &quick(10)).unwrap();
    let h = &out.history.epochs;
    assert!(h.last().unwrap().train_rmse < 0.5 * h[0].train_rmse);
}

#[test]
fn divergence_is_reported() {
    let d = data();
    let (train, val) = split(d.len());
    let cfg = TrainConfig { lr_initial: 1e300, ..quick(3) };
    let err = fit(init_params(&tiny_config(), 0).unwrap(), &d, &train, &val, &cfg).err().unwrap();
    assert!(matches!(err, Error::NonFiniteLoss { .. }), "{err}");
}

#[test]
fn empty_splits_and_bad_config_are_rejected() {
    let d = data();
    let p = init_params(&tiny_config(), 0).unwrap();
    assert!(matches!(fit(p.clone(), &d, &[], &[0], &quick(1)), Err(Error::EmptySplit(_))));
    assert!(matches!(fit(p.clone(), &d, &[0], &[], &quick(1)), Err(Error::EmptySplit(_))));
    let bad = TrainConfig { batch_size: 0, ..quick(1) };
    assert!(matches!(fit(p, &d, &[0], &[1], &bad), Err(Error::InvalidConfig(_))));
}
