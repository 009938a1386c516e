//! Experiment harness: planted-polytope data generation, the randomized
//! sphere-direction heuristic, the dimension-sweep benchmark behind the
//! halfspace-count table, and confusion-style evaluation.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, scale, Hyperplane, LabeledPoint, Polytope};
use crate::sampling::{sample_unit_ball, sample_unit_sphere, RngSeed};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dims: Vec<usize>,
    pub n_points: usize,
    pub margin: f64,
    pub offset_range: (f64, f64),
    pub directions: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dims: (2..=8).collect(),
            n_points: 1000,
            margin: 0.05,
            offset_range: (0.05, 0.95),
            directions: 10_000,
            trials: 100,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.margin <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "margin must be positive, got {}",
                self.margin
            )));
        }
        let (lo, hi) = self.offset_range;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "offset range must sit inside (0,1), got [{lo}, {hi}]"
            )));
        }
        if self.dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidParameter(
                "dimensions start at 2".into(),
            ));
        }
        if self.n_points == 0 || self.directions == 0 {
            return Err(Error::InvalidParameter(
                "n_points and directions must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Planted instance in dimension `d`: `d` target halfspaces with uniform
/// sphere directions and offsets uniform in the configured range, oriented
/// so the origin side is inside (`Hyperplane(-w, b)` encodes
/// `w·x <= b`). Ball-uniform points keep only those with
/// `|min-value| >= margin`; labels follow the sign. Retries with fresh
/// randomness when every point lands in the dead band.
pub fn generate_instance<R: Rng>(
    d: usize,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<(Vec<LabeledPoint>, Polytope)> {
    cfg.validate()?;
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "instance dimension must be >= 2, got {d}"
        )));
    }
    let (lo, hi) = cfg.offset_range;
    let max_attempts = 100;
    for attempt in 1..=max_attempts {
        let mut hs = Vec::with_capacity(d);
        for _ in 0..d {
            let w = sample_unit_sphere(d, rng)?;
            let b = rng.gen_range(lo..=hi);
            hs.push(Hyperplane::new(scale(&w, -1.0), b)?);
        }
        let target = Polytope::new(d, hs)?;
        let mut points = Vec::new();
        for _ in 0..cfg.n_points {
            let x = sample_unit_ball(d, rng)?;
            let m = target.min_value(&x)?;
            if m >= cfg.margin {
                points.push(LabeledPoint::new(x, 1)?);
            } else if m <= -cfg.margin {
                points.push(LabeledPoint::new(x, -1)?);
            }
        }
        if !points.is_empty() {
            return Ok((points, target));
        }
        if attempt == max_attempts {
            break;
        }
    }
    Err(Error::EmptyInstance {
        attempts: max_attempts,
    })
}

/// Randomized cover heuristic. Each round samples `directions` unit
/// vectors; a direction `w` becomes the candidate `Hyperplane(-w, b)` with
/// `b` the smallest offset keeping every positive on the origin side
/// (boundary contact allowed). The candidate cutting the most remaining
/// negatives wins (ties to the lowest direction index) and its negatives
/// leave the pool. One fresh-stream resample is allowed on a zero-progress
/// round before giving up.
pub fn heuristic_learn<R: Rng>(
    sample: &[LabeledPoint],
    directions: usize,
    rng: &mut R,
) -> Result<Polytope> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    let d = sample[0].dim();
    let positives: Vec<&LabeledPoint> =
        sample.iter().filter(|p| p.label() == 1).collect();
    let mut negatives: Vec<&LabeledPoint> =
        sample.iter().filter(|p| p.label() == -1).collect();

    if negatives.is_empty() {
        return Ok(Polytope::all_space(d));
    }
    if positives.is_empty() {
        // any direction works: push the offset below every negative
        let w = sample_unit_sphere(d, rng)?;
        let b = negatives
            .iter()
            .map(|p| dot(&w, p.coords()))
            .fold(f64::INFINITY, f64::min)
            - 1.0;
        let p = Polytope::new(d, vec![Hyperplane::new(scale(&w, -1.0), b)?])?;
        debug_assert!(p.is_consistent(0.0, sample)?);
        return Ok(p);
    }

    let mut halfspaces = Vec::new();
    let mut retried = false;
    while !negatives.is_empty() {
        let mut best: Option<(usize, Hyperplane, Vec<usize>)> = None;
        for i in 0..directions {
            let w = sample_unit_sphere(d, rng)?;
            // tiny pad keeps the extremal positive on the inside after the
            // dot product is recomputed against the renormalized normal
            let b = positives
                .iter()
                .map(|p| dot(&w, p.coords()))
                .fold(f64::NEG_INFINITY, f64::max)
                + 1e-12;
            let h = Hyperplane::new(scale(&w, -1.0), b)?;
            let cut: Vec<usize> = negatives
                .iter()
                .enumerate()
                .filter(|(_, p)| h.value_unchecked(p.coords()) < 0.0)
                .map(|(j, _)| j)
                .collect();
            let better = match &best {
                None => true,
                Some((bi, _, bcut)) => {
                    cut.len() > bcut.len() || (cut.len() == bcut.len() && i < *bi)
                }
            };
            if better && !cut.is_empty() {
                best = Some((i, h, cut));
            }
        }
        match best {
            Some((_, h, cut)) => {
                let cutset: std::collections::HashSet<usize> =
                    cut.into_iter().collect();
                negatives = negatives
                    .into_iter()
                    .enumerate()
                    .filter(|(j, _)| !cutset.contains(j))
                    .map(|(_, p)| p)
                    .collect();
                halfspaces.push(h);
                retried = false;
            }
            None if !retried => {
                retried = true; // one more round on fresh randomness
            }
            None => {
                return Err(Error::HeuristicNoProgress {
                    remaining: negatives.len(),
                });
            }
        }
    }

    let p = Polytope::new(d, halfspaces)?;
    debug_assert!(p.is_consistent(0.0, sample)?);
    Ok(p)
}

/// One aggregated row of the dimension sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub d: usize,
    pub mean_halfspaces: f64,
    pub std_halfspaces: f64,
    pub trials: usize,
    pub failures: usize,
}

/// Runs `trials` generate-then-learn rounds per dimension, in parallel
/// with one RNG stream per (dimension, trial) pair, and aggregates the
/// halfspace counts. Failures are data, not errors.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<Vec<Fig3Row>> {
    cfg.validate()?;
    cfg.dims
        .iter()
        .map(|&d| {
            let counts: Vec<Result<Option<usize>>> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let stream = (d as u64) << 32 | trial as u64;
                    let mut rng = RngSeed::new(cfg.seed, stream).rng();
                    let (points, _) = generate_instance(d, cfg, &mut rng)?;
                    match heuristic_learn(&points, cfg.directions, &mut rng) {
                        Ok(p) => Ok(Some(p.len())),
                        Err(Error::HeuristicNoProgress { .. }) => Ok(None),
                        Err(e) => Err(e),
                    }
                })
                .collect();
            let mut sizes = Vec::new();
            let mut failures = 0usize;
            for c in counts {
                match c? {
                    Some(n) => sizes.push(n as f64),
                    None => failures += 1,
                }
            }
            let mean = if sizes.is_empty() {
                0.0
            } else {
                sizes.iter().sum::<f64>() / sizes.len() as f64
            };
            let std = if sizes.len() < 2 {
                0.0
            } else {
                let var = sizes.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
                    / (sizes.len() - 1) as f64;
                var.sqrt()
            };
            Ok(Fig3Row {
                d,
                mean_halfspaces: mean,
                std_halfspaces: std,
                trials: cfg.trials,
                failures,
            })
        })
        .collect()
}

/// Confusion-style counts of a model against a labeled sample. `errors`
/// counts plain misclassifications (margin 0); `margin_violations` counts
/// points that miss the `gamma`-consistency condition for their label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub true_pos: usize,
    pub true_neg: usize,
    pub margin_violations: usize,
    pub errors: usize,
}

pub fn evaluate(model: &Polytope, sample: &[LabeledPoint], gamma: f64) -> Result<EvalReport> {
    if gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be nonnegative, got {gamma}"
        )));
    }
    let mut r = EvalReport {
        true_pos: 0,
        true_neg: 0,
        margin_violations: 0,
        errors: 0,
    };
    for p in sample {
        let m = model.min_value(p.coords())?;
        let pred = if m >= 0.0 { 1 } else { -1 };
        match (p.label(), pred) {
            (1, 1) => r.true_pos += 1,
            (-1, -1) => r.true_neg += 1,
            _ => r.errors += 1,
        }
        let meets = if p.label() == 1 { m >= gamma } else { m <= -gamma };
        if !meets {
            r.margin_violations += 1;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk_cfg() -> ExperimentConfig {
        ExperimentConfig {
            dims: vec![2, 3],
            n_points: 300,
            trials: 5,
            directions: 1500,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let mut bad = ExperimentConfig::default();
        bad.margin = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = ExperimentConfig::default();
        bad.offset_range = (0.0, 0.95);
        assert!(bad.validate().is_err());
        let mut bad = ExperimentConfig::default();
        bad.dims = vec![1, 2];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn instance_respects_margin_filter() {
        let cfg = desk_cfg();
        let mut rng = RngSeed::new(70, 0).rng();
        let (pts, target) = generate_instance(2, &cfg, &mut rng).unwrap();
        assert!(!pts.is_empty());
        for p in &pts {
            let m = target.min_value(p.coords()).unwrap();
            assert!(m.abs() >= cfg.margin);
            assert_eq!(p.label(), if m > 0.0 { 1 } else { -1 });
        }
    }

    #[test]
    fn instance_deterministic() {
        let cfg = desk_cfg();
        let a = generate_instance(3, &cfg, &mut RngSeed::new(71, 0).rng()).unwrap();
        let b = generate_instance(3, &cfg, &mut RngSeed::new(71, 0).rng()).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn instance_mixed_labels_most_seeds() {
        let cfg = desk_cfg();
        let mut mixed = 0;
        for s in 0..40 {
            let (pts, _) =
                generate_instance(2, &cfg, &mut RngSeed::new(72, s).rng()).unwrap();
            let pos = pts.iter().filter(|p| p.label() == 1).count();
            if pos > 0 && pos < pts.len() {
                mixed += 1;
            }
        }
        assert!(mixed >= 38, "only {mixed}/40 seeds mixed");
    }

    #[test]
    fn heuristic_single_far_negative() {
        let mut s = vec![
            LabeledPoint::new(vec![0.1, 0.0], 1).unwrap(),
            LabeledPoint::new(vec![0.0, 0.1], 1).unwrap(),
        ];
        s.push(LabeledPoint::new(vec![0.9, 0.0], -1).unwrap());
        let mut rng = RngSeed::new(73, 0).rng();
        let p = heuristic_learn(&s, 500, &mut rng).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.is_consistent(0.0, &s).unwrap());
    }

    #[test]
    fn heuristic_no_negatives() {
        let s = vec![LabeledPoint::new(vec![0.1, 0.0], 1).unwrap()];
        let p = heuristic_learn(&s, 100, &mut RngSeed::new(74, 0).rng()).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn heuristic_no_positives() {
        let s = vec![
            LabeledPoint::new(vec![0.5, 0.0], -1).unwrap(),
            LabeledPoint::new(vec![-0.5, 0.0], -1).unwrap(),
        ];
        let p = heuristic_learn(&s, 100, &mut RngSeed::new(75, 0).rng()).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.is_consistent(0.0, &s).unwrap());
    }

    #[test]
    fn heuristic_consistent_on_planted() {
        let cfg = desk_cfg();
        let mut ok = 0;
        for s in 0..20 {
            let mut rng = RngSeed::new(76, s).rng();
            let (pts, _) = generate_instance(2, &cfg, &mut rng).unwrap();
            if let Ok(p) = heuristic_learn(&pts, 2000, &mut rng) {
                assert!(p.is_consistent(0.0, &pts).unwrap());
                ok += 1;
            }
        }
        assert!(ok >= 19, "only {ok}/20 runs succeeded");
    }

    #[test]
    fn fig3_deterministic_and_sane() {
        let cfg = ExperimentConfig {
            dims: vec![2, 3],
            n_points: 200,
            trials: 4,
            directions: 800,
            ..ExperimentConfig::default()
        };
        let a = run_fig3(&cfg).unwrap();
        let b = run_fig3(&cfg).unwrap();
        assert_eq!(a, b);
        for row in &a {
            assert_eq!(row.trials, 4);
            assert!(row.failures <= row.trials);
            if row.failures < row.trials {
                assert!(row.mean_halfspaces >= 1.0);
            }
        }
    }

    #[test]
    fn fig3_zero_trials() {
        let cfg = ExperimentConfig {
            dims: vec![2],
            trials: 0,
            ..ExperimentConfig::default()
        };
        let rows = run_fig3(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].trials, 0);
        assert_eq!(rows[0].failures, 0);
    }

    #[test]
    fn evaluate_target_on_own_instance() {
        let cfg = desk_cfg();
        let mut rng = RngSeed::new(77, 0).rng();
        let (pts, target) = generate_instance(2, &cfg, &mut rng).unwrap();
        let r = evaluate(&target, &pts, cfg.margin).unwrap();
        assert_eq!(r.errors, 0);
        assert_eq!(r.margin_violations, 0);
        assert_eq!(r.true_pos + r.true_neg, pts.len());
    }

    #[test]
    fn evaluate_all_space_predicts_positive() {
        let s = vec![
            LabeledPoint::new(vec![0.1, 0.0], 1).unwrap(),
            LabeledPoint::new(vec![0.2, 0.0], -1).unwrap(),
        ];
        let r = evaluate(&Polytope::all_space(2), &s, 0.0).unwrap();
        assert_eq!(r.true_pos, 1);
        assert_eq!(r.true_neg, 0);
        assert_eq!(r.errors, 1);
    }
}
