//! Full-batch training loop.

use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::network::batched::BatchEngine;
use crate::network::NetworkParams;
use crate::scalar::Real;

use super::{adam_step, AdamConfig, AdamState, ConstraintSet, LossWeights};

/// Stop once the total loss stays below `tol` for `patience` epochs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EarlyStop<T> {
    pub tol: T,
    pub patience: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig<T> {
    pub epochs: usize,
    pub adam: AdamConfig<T>,
    pub weights: LossWeights<T>,
    /// Learning-rate factor applied every `decay_every` of the epoch budget.
    pub decay: T,
    pub decay_every: f64,
    pub early_stop: Option<EarlyStop<T>>,
    /// Abort when the loss exceeds this multiple of the first loss.
    pub divergence_factor: T,
    /// Print a progress line every this many epochs (0 disables).
    pub log_every: usize,
}

impl<T: Real> TrainConfig<T> {
    pub fn new(epochs: usize) -> Self {
        Self {
            epochs,
            adam: AdamConfig::default(),
            weights: LossWeights::default(),
            decay: T::lit(0.5),
            decay_every: 0.2,
            early_stop: Some(EarlyStop {
                tol: T::lit(1e-6),
                patience: 500,
            }),
            divergence_factor: T::lit(1e3),
            log_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("epochs must be >= 1"));
        }
        if !(self.decay > T::zero() && self.decay <= T::one()) {
            return Err(Error::config("learning-rate decay must lie in (0, 1]"));
        }
        if !(self.decay_every > 0.0 && self.decay_every <= 1.0) {
            return Err(Error::config("decay interval must lie in (0, 1]"));
        }
        if !(self.divergence_factor > T::one()) {
            return Err(Error::config("divergence factor must be > 1"));
        }
        self.adam.validate()?;
        self.weights.validate()
    }

    /// Learning rate used at `epoch`.
    pub fn lr_at(&self, epoch: usize) -> T {
        let step = ((self.epochs as f64 * self.decay_every).round() as usize).max(1);
        self.adam.lr * self.decay.powi((epoch / step) as i32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord<T> {
    pub epoch: usize,
    pub total: T,
    pub l_pde: T,
    pub l_bc: T,
    /// Wall time since training started.
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainRecord<T> {
    /// Loss of the parameters entering each epoch, plus one final row for
    /// the parameters after the last update.
    pub epochs: Vec<EpochRecord<T>>,
    pub best_loss: T,
    pub best_epoch: usize,
    pub best_params: NetworkParams<T>,
    pub stopped_early: bool,
}

impl<T: Real> TrainRecord<T> {
    /// Losses only, without timings.
    pub fn losses(&self) -> Vec<(usize, T, T, T)> {
        self.epochs.iter().map(|e| (e.epoch, e.total, e.l_pde, e.l_bc)).collect()
    }

    pub fn final_loss(&self) -> Option<T> {
        self.epochs.last().map(|e| e.total)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "epoch,total,l_pde,l_bc,seconds")?;
        for e in &self.epochs {
            writeln!(out, "{},{:e},{:e},{:e},{:.6}", e.epoch, e.total, e.l_pde, e.l_bc, e.seconds)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// A failed run with everything recorded up to the failure.
#[derive(Debug)]
pub struct TrainAbort<T> {
    pub error: Error,
    pub record: TrainRecord<T>,
}

impl<T> From<Box<TrainAbort<T>>> for Error {
    fn from(a: Box<TrainAbort<T>>) -> Self {
        a.error
    }
}

/// Trains `init` against `constraints` and returns the record, whose
/// `best_params` are the lowest-loss parameters seen.
pub fn train<T: Real>(
    constraints: &ConstraintSet<T>,
    init: NetworkParams<T>,
    config: &TrainConfig<T>,
) -> Result<TrainRecord<T>, Box<TrainAbort<T>>> {
    let mut record = TrainRecord {
        epochs: Vec::with_capacity(config.epochs + 1),
        best_loss: T::infinity(),
        best_epoch: 0,
        best_params: init.clone(),
        stopped_early: false,
    };
    macro_rules! abort {
        ($e:expr) => {
            return Err(Box::new(TrainAbort { error: $e, record }))
        };
    }
    if let Err(e) = config.validate() {
        abort!(e);
    }
    let mut params = init;
    let mut state = match AdamState::new(&params, config.adam) {
        Ok(s) => s,
        Err(e) => abort!(e),
    };
    let mut engine = BatchEngine::new();
    let mut grad = params.map(|_| T::zero());
    let start = Instant::now();
    let mut initial = None;
    let mut below_tol = 0usize;

    for epoch in 0..=config.epochs {
        let last = epoch == config.epochs;
        grad.iter_mut().for_each(|g| *g = T::zero());
        let loss = match constraints.assemble_loss(&params, &config.weights, &mut engine, (!last).then_some(&mut grad)) {
            Ok(l) => l,
            Err(e) => abort!(e),
        };
        record.epochs.push(EpochRecord {
            epoch,
            total: loss.total,
            l_pde: loss.l_pde,
            l_bc: loss.l_bc,
            seconds: start.elapsed().as_secs_f64(),
        });
        let initial = *initial.get_or_insert(loss.total);
        if loss.total > config.divergence_factor * initial {
            abort!(Error::Diverged {
                epoch,
                loss: loss.total.to_f64_lossy(),
                initial: initial.to_f64_lossy(),
                factor: config.divergence_factor.to_f64_lossy(),
            });
        }
        if loss.total < record.best_loss {
            record.best_loss = loss.total;
            record.best_epoch = epoch;
            record.best_params.clone_from(&params);
        }
        if config.log_every > 0 && (epoch % config.log_every == 0 || last) {
            eprintln!(
                "epoch {epoch:>6}  loss {:.4e}  pde {:.4e}  bc {:.4e}  {:.1}s",
                loss.total,
                loss.l_pde,
                loss.l_bc,
                start.elapsed().as_secs_f64()
            );
        }
        if last {
            break;
        }
        if let Some(stop) = config.early_stop {
            below_tol = if loss.total < stop.tol { below_tol + 1 } else { 0 };
            if below_tol >= stop.patience {
                record.stopped_early = true;
                break;
            }
        }
        state.config.lr = config.lr_at(epoch);
        if let Err(e) = adam_step(&mut params, &grad, &mut state) {
            abort!(e);
        }
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Segment;
    use crate::training::{TermKind, ValueForm};

    /// Fit c(x) = x at ten points; the PDE block carries the fit and a single
    /// boundary point pins c(0) = 0.
    fn toy() -> ConstraintSet<f64> {
        let mut set = ConstraintSet::new(1);
        for i in 0..10 {
            let x = i as f64 / 9.0;
            set.push([x, 0.5], TermKind::Pde, &ValueForm(x)).unwrap();
        }
        set.push([0.0, 0.5], TermKind::Boundary(Segment::Left), &ValueForm(0.0)).unwrap();
        set
    }

    #[test]
    fn zero_epochs_is_a_config_error() {
        let net = NetworkParams::<f64>::init(&[2, 4, 1], 1).unwrap();
        let err = train(&toy(), net, &TrainConfig::new(0)).unwrap_err();
        assert!(matches!(err.error, Error::Config(_)));
    }

    #[test]
    fn toy_fit_converges() {
        // a single affine layer keeps the loss quadratic in the parameters
        let net = NetworkParams::<f64>::init(&[2, 1], 1).unwrap();
        let mut cfg = TrainConfig::new(5000);
        cfg.adam.lr = 1e-2;
        cfg.early_stop = None;
        let rec = train(&toy(), net, &cfg).unwrap();
        assert!(rec.best_loss < 1e-6, "best loss {}", rec.best_loss);
    }

    #[test]
    fn best_loss_is_history_minimum_and_deterministic() {
        let net = NetworkParams::<f64>::init(&[2, 6, 1], 7).unwrap();
        let mut cfg = TrainConfig::new(300);
        cfg.adam.lr = 5e-3;
        let a = train(&toy(), net.clone(), &cfg).unwrap();
        let min = a.epochs.iter().map(|e| e.total).fold(f64::INFINITY, f64::min);
        assert_eq!(a.best_loss, min);
        assert_eq!(a.epochs[a.best_epoch].total, a.best_loss);
        let b = train(&toy(), net, &cfg).unwrap();
        assert_eq!(a.losses(), b.losses());
        assert_eq!(a.best_params, b.best_params);
    }

    #[test]
    fn divergence_aborts_with_record() {
        let net = NetworkParams::<f64>::init(&[2, 6, 1], 7).unwrap();
        let mut cfg = TrainConfig::new(200);
        cfg.adam.lr = 50.0;
        cfg.divergence_factor = 1.5;
        let err = train(&toy(), net, &cfg).unwrap_err();
        assert!(matches!(err.error, Error::Diverged { .. }));
        assert!(!err.record.epochs.is_empty());
    }

    #[test]
    fn schedule_halves_every_fifth() {
        let cfg = TrainConfig::<f64>::new(100);
        assert_eq!(cfg.lr_at(0), 1e-3);
        assert_eq!(cfg.lr_at(19), 1e-3);
        assert_eq!(cfg.lr_at(20), 5e-4);
        assert_eq!(cfg.lr_at(99), 1e-3 / 16.0);
    }

    #[test]
    fn csv_columns() {
        let net = NetworkParams::<f64>::init(&[2, 3, 1], 2).unwrap();
        let rec = train(&toy(), net, &TrainConfig::new(3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        rec.write_csv(&p).unwrap();
        let text = std::fs::read_to_string(p).unwrap();
        assert_eq!(text.lines().next(), Some("epoch,total,l_pde,l_bc,seconds"));
        assert_eq!(text.lines().count(), 5);
    }
}
