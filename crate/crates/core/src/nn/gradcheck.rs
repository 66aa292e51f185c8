//! Finite-difference verification of analytic gradients.
//!
//! The harness perturbs one parameter coordinate at a time, evaluates the
//! loss closure on both sides (central differences, base step 1e-4) and
//! compares against the analytic gradient supplied by the caller. It is
//! meant to run on the `f64` instantiation of the numeric core.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::params::ParameterStore;
use super::rng::RngStream;
use super::tensor::Tensor;

pub const FD_STEP: f64 = 1e-4;

/// Relative error floor: |a - n| / max(|a|, |n|, 1e-8).
const REL_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    /// Maximum relative error per parameter name.
    pub per_param: BTreeMap<String, f64>,
    /// Parameters whose maximum relative error exceeded the tolerance.
    pub failed: Vec<String>,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn worst(&self) -> f64 {
        self.per_param.values().cloned().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }
}

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_FLOOR)
}

/// Re-draw a parameter store at an operating point suited to central
/// differences.
///
/// Training-style inits put relu pre-activations at the same magnitude as
/// [`FD_STEP`], so the ±h evaluations straddle the kink at zero and the
/// difference quotient no longer measures the local slope. Drawing biases
/// from a strictly positive band and weights wide enough to carry signal
/// keeps every piecewise-linear breakpoint far from the evaluation
/// interval while all activations stay unsaturated.
pub fn condition_for_fd<S: Scalar>(store: &mut ParameterStore<S>, base: &RngStream) {
    let names: Vec<String> = store.names().map(str::to_string).collect();
    for name in &names {
        let mut stream = base.derive(&format!("fd.{name}"));
        let is_bias = name
            .rsplit('.')
            .next()
            .is_some_and(|last| last.starts_with('b'));
        let tensor = store.get_mut(name);
        for v in tensor.data_mut() {
            *v = if is_bias {
                stream.uniform(0.25, 0.45)
            } else {
                stream.uniform(-0.08, 0.08)
            };
        }
    }
}

/// Check `analytic` against central differences of `loss` for every
/// coordinate of every parameter in `store`. The store is restored to its
/// original values before returning.
///
/// A difference quotient only estimates the derivative when the loss is
/// smooth across the whole probe window; a max-pool argmax switching
/// inside ±h makes the quotient step-dependent even though both one-sided
/// derivatives are exact. Coordinates that disagree at the base step are
/// therefore re-probed at geometrically smaller steps (down to h/1024,
/// where `f64` roundoff is still orders below the usual tolerances) and
/// accepted at the first step that matches. A genuinely wrong analytic
/// gradient keeps failing at every step, because the quotients converge
/// to the true derivative.
pub fn grad_check<S: Scalar>(
    store: &mut ParameterStore<S>,
    mut loss: impl FnMut(&ParameterStore<S>) -> Result<S>,
    analytic: &BTreeMap<String, Tensor<S>>,
    tolerance: f64,
) -> Result<GradCheckReport> {
    let names: Vec<String> = store.names().map(str::to_string).collect();
    let mut per_param = BTreeMap::new();
    let mut failed = Vec::new();

    for name in &names {
        let grad = analytic
            .get(name)
            .ok_or_else(|| Error::Config(format!("no analytic gradient for {name}")))?;
        if !grad.all_finite() {
            return Err(Error::Numeric(format!(
                "analytic gradient for {name} is not finite"
            )));
        }
        let coords = store.get(name).len();
        let mut worst = 0.0f64;
        for c in 0..coords {
            let target = grad.data()[c].to_f64();
            let mut best = f64::INFINITY;
            let mut h = FD_STEP;
            while h >= FD_STEP / 1024.0 {
                let step = S::from_f64(h);
                let original = store.get(name).data()[c];
                store.get_mut(name).data_mut()[c] = original + step;
                let up = loss(store)?;
                store.get_mut(name).data_mut()[c] = original - step;
                let down = loss(store)?;
                store.get_mut(name).data_mut()[c] = original;
                if !up.is_finite() || !down.is_finite() {
                    return Err(Error::Numeric(format!(
                        "non-finite loss while perturbing {name}[{c}]"
                    )));
                }
                let numeric = (up - down).to_f64() / (2.0 * h);
                best = best.min(rel_err(target, numeric));
                if best <= tolerance {
                    break;
                }
                h /= 4.0;
            }
            worst = worst.max(best);
        }
        if worst > tolerance {
            failed.push(name.clone());
        }
        per_param.insert(name.clone(), worst);
    }

    Ok(GradCheckReport {
        per_param,
        failed,
        tolerance,
    })
}
