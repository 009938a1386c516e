//! Margin Perceptron over affine hyperplanes.
//!
//! Points are augmented with a constant coordinate 1 and a homogeneous
//! margin Perceptron runs over the augmented vectors (norm <= sqrt 2). An
//! update fires while a point's normalized margin sits below the target, so
//! a successful run returns a hyperplane whose training margin is at least
//! the target. Presentation order is fixed (cyclic over the input order),
//! making failures reproducible.

use crate::error::{Error, Result};
use crate::geometry::{norm, Hyperplane, LabeledPoint};

#[derive(Debug, Clone)]
pub struct PerceptronConfig {
    /// Margin every training point must reach; 0 asks for bare strict
    /// separation.
    pub target_margin: f64,
    pub max_updates: usize,
}

impl PerceptronConfig {
    pub fn new(target_margin: f64, max_updates: usize) -> Result<Self> {
        if target_margin < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "target margin must be nonnegative, got {target_margin}"
            )));
        }
        if max_updates == 0 {
            return Err(Error::InvalidParameter("max_updates must be >= 1".into()));
        }
        Ok(Self {
            target_margin,
            max_updates,
        })
    }
}

/// Update-count bound when the sample is separable by a unit `(w*, b*)`
/// with `|b*| <= 1` at margin `gamma_star > target`: the augmented radius
/// is at most sqrt 2 and the effective margin shrinks to
/// `gamma_star - target`, giving `ceil(8 / (gamma_star - target)^2)`.
pub fn mistake_bound(gamma_star: f64, target_margin: f64) -> usize {
    let slack = gamma_star - target_margin;
    assert!(slack > 0.0, "target margin must sit below the data margin");
    (8.0 / (slack * slack)).ceil() as usize
}

/// Separating hyperplane plus the number of updates spent finding it.
#[derive(Debug, Clone)]
pub struct Separation {
    pub hyperplane: Hyperplane,
    pub updates: usize,
}

/// Runs the margin Perceptron. `Err(PerceptronExhausted)` signals the
/// update budget ran out, which is the expected outcome for candidates that
/// are not separable at the requested margin.
pub fn margin_perceptron(
    sample: &[LabeledPoint],
    cfg: &PerceptronConfig,
) -> Result<Separation> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter(
            "perceptron needs at least one point".into(),
        ));
    }
    let d = sample[0].dim();
    for p in sample {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
    }

    // augmented weight vector (w, b)
    let mut w = vec![0.0f64; d + 1];
    let mut w_norm_sq = 0.0f64;
    let mut updates = 0usize;

    loop {
        let mut clean = true;
        for p in sample {
            let y = p.label() as f64;
            let mut act = w[d]; // bias times augmented coordinate 1
            for (wi, xi) in w[..d].iter().zip(p.coords()) {
                act += wi * xi;
            }
            act *= y;

            let needs_update = if w_norm_sq == 0.0 {
                true
            } else if act <= 0.0 {
                true
            } else {
                cfg.target_margin > 0.0 && act < cfg.target_margin * w_norm_sq.sqrt()
            };

            if needs_update {
                if updates >= cfg.max_updates {
                    return Err(Error::PerceptronExhausted { updates });
                }
                for (wi, xi) in w[..d].iter_mut().zip(p.coords()) {
                    *wi += y * xi;
                }
                w[d] += y;
                w_norm_sq = w.iter().map(|v| v * v).sum();
                updates += 1;
                clean = false;
            }
        }
        if clean {
            break;
        }
    }

    let normal = w[..d].to_vec();
    if norm(&normal) < 1e-12 {
        return Err(Error::DegenerateSeparator);
    }
    let hyperplane = Hyperplane::new(normal, w[d])?;

    // returned plane must put every point strictly on its labeled side
    debug_assert!(sample.iter().all(|p| {
        let v = hyperplane.value_unchecked(p.coords());
        v * p.label() as f64 > 0.0
    }));

    Ok(Separation { hyperplane, updates })
}
