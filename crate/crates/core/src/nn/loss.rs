//! Binary cross-entropy over multi-hot targets.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::tensor::Tensor;

/// Probabilities are clamped into `[CLIP, 1 - CLIP]` before taking logs.
/// This caps the loss of a perfect prediction at about 1e-7 and removes the
/// log singularities.
pub const CLIP: f64 = 1e-7;

/// Clamp by comparison so NaN inputs stay NaN and surface downstream
/// instead of being silently replaced by the clip bound.
fn clip<S: Scalar>(p: S) -> S {
    let lo = S::from_f64(CLIP);
    let hi = S::one() - lo;
    if p < lo {
        lo
    } else if p > hi {
        hi
    } else {
        p
    }
}

/// Mean over all entries of `-[y ln p + (1-y) ln(1-p)]`, whatever the
/// rank: a single score vector and a batch matrix average identically.
/// Returns the loss and its gradient with respect to `p`.
pub fn bce_loss<S: Scalar>(p: &Tensor<S>, y: &Tensor<S>) -> Result<(S, Tensor<S>)> {
    if p.shape() != y.shape() {
        return Err(Error::Shape {
            expected: format!("targets {:?}", p.shape()),
            got: format!("{:?}", y.shape()),
        });
    }
    let count = S::from_f64(p.len() as f64);
    let inv = S::one() / count;
    let one = S::one();
    let mut loss = S::zero();
    let mut grad = Tensor::zeros(p.shape());
    for (i, (&pv, &yv)) in p.iter().zip(y.iter()).enumerate() {
        let pc = clip(pv);
        loss -= yv * pc.ln() + (one - yv) * (one - pc).ln();
        // Zero gradient where the clip is active: the clamp is flat there.
        grad.data_mut()[i] = if pc == pv {
            inv * (-(yv / pc) + (one - yv) / (one - pc))
        } else {
            S::zero()
        };
    }
    Ok((loss * inv, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_probability_positive_label_is_ln2() {
        let p = Tensor::from_vec(&[1, 1], vec![0.5f64]).unwrap();
        let y = Tensor::from_vec(&[1, 1], vec![1.0]).unwrap();
        let (loss, _) = bce_loss(&p, &y).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn perfect_prediction_loss_is_capped_by_clip() {
        let p = Tensor::from_vec(&[1, 2], vec![1.0f64, 0.0]).unwrap();
        let y = p.clone();
        let (loss, grad) = bce_loss(&p, &y).unwrap();
        assert!(loss > 0.0 && loss <= -(1.0 - CLIP).ln() + 1e-12, "{loss}");
        assert_eq!(grad.data(), &[0.0, 0.0]);
    }

    #[test]
    fn nan_probability_propagates_to_loss() {
        let p = Tensor::from_vec(&[1, 1], vec![f64::NAN]).unwrap();
        let y = Tensor::from_vec(&[1, 1], vec![1.0]).unwrap();
        let (loss, _) = bce_loss(&p, &y).unwrap();
        assert!(loss.is_nan());
    }

    #[test]
    fn gradient_matches_closed_form_inside_clip_range() {
        let p = Tensor::from_vec(&[1, 2], vec![0.3f64, 0.8]).unwrap();
        let y = Tensor::from_vec(&[1, 2], vec![1.0, 0.0]).unwrap();
        let (_, grad) = bce_loss(&p, &y).unwrap();
        // d/dp of -(ln p)/2 at 0.3 and of -(ln(1-p))/2 at 0.8.
        assert!((grad.data()[0] - (-1.0 / 0.3) / 2.0).abs() < 1e-12);
        assert!((grad.data()[1] - (1.0 / 0.2) / 2.0).abs() < 1e-12);
    }
}
