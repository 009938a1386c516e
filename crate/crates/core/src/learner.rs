//! Polytope learners: mirror candidates from a projected direction net and
//! offset grid, exact t-subset enumeration, the greedy cover, and the PAC
//! wrapper around them.

use itertools::Itertools;
use rayon::prelude::*;

use crate::bounds::pac_sample_size;
use crate::error::{Error, Result};
use crate::geometry::{distance, dot, Hyperplane, LabeledPoint, Polytope};
use crate::jl::{required_dim, JlMap};
use crate::net::{build_net, DirectionNet};
use crate::perceptron::{margin_perceptron, mistake_bound, PerceptronConfig};
use crate::sampling::RngSeed;

/// Knobs of the mirror/cover pipeline. The projection accuracy, net
/// resolution, offset grid step and far-point threshold all derive from
/// gamma unless overridden.
#[derive(Debug, Clone)]
pub struct LearnerConfig {
    pub gamma: f64,
    pub t_hint: Option<usize>,
    pub eps_jl: f64,
    pub delta_net: f64,
    pub offset_step: f64,
    pub mirror_threshold: f64,
    pub greedy_iteration_cap: Option<usize>,
    /// Cap on the number of (direction, offset) candidate pairs.
    pub candidate_budget: Option<usize>,
    pub enumeration_cap: u128,
    pub seed: RngSeed,
}

pub const DEFAULT_CANDIDATE_BUDGET: usize = 10_000;
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

impl LearnerConfig {
    pub fn new(gamma: f64, seed: RngSeed) -> Result<Self> {
        if !(0.0 < gamma && gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be in (0,1), got {gamma}"
            )));
        }
        Ok(Self {
            gamma,
            t_hint: None,
            eps_jl: gamma / 24.0,
            delta_net: gamma / 12.0,
            offset_step: gamma / 12.0,
            mirror_threshold: 3.0 * gamma / 4.0,
            greedy_iteration_cap: None,
            candidate_budget: Some(DEFAULT_CANDIDATE_BUDGET),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            seed,
        })
    }

    pub fn with_t_hint(mut self, t: usize) -> Self {
        self.t_hint = Some(t);
        self
    }

    pub fn with_candidate_budget(mut self, budget: Option<usize>) -> Self {
        self.candidate_budget = budget;
        self
    }

    /// Offset grid: integer multiples of the step covering [-(1+gamma),
    /// 1+gamma]. The grid is symmetric about 0 so halfspaces on the far
    /// side of the origin are expressible.
    pub fn offset_grid(&self) -> Vec<f64> {
        let imax = ((1.0 + self.gamma) / self.offset_step).floor() as i64;
        (-imax..=imax).map(|i| i as f64 * self.offset_step).collect()
    }

    fn greedy_cap(&self, n: usize) -> usize {
        if let Some(cap) = self.greedy_iteration_cap {
            return cap;
        }
        let ln_n = (n.max(2) as f64).ln();
        match self.t_hint {
            Some(t) => 64usize.max((3.0 * t as f64 * ln_n).ceil() as usize),
            None => 8 * (ln_n * ln_n).ceil() as usize,
        }
    }
}

/// Mirror hyperplanes in the original dimension plus per-mirror provenance
/// (net direction index, grid offset).
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub mirrors: Vec<Hyperplane>,
    pub provenance: Vec<(usize, f64)>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.mirrors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mirrors.is_empty()
    }
}

const MIRROR_DEDUP_TOL: f64 = 1e-6;

/// Builds the mirror candidate set: project the sample, enumerate (net
/// direction, grid offset) pairs, induce labels on far points, and recover
/// a full-dimensional hyperplane per pair with the margin Perceptron.
pub fn build_candidates(sample: &[LabeledPoint], cfg: &LearnerConfig) -> Result<CandidateSet> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter("sample must be nonempty".into()));
    }
    let d = sample[0].dim();
    let n = sample.len();
    let gamma = cfg.gamma;

    let k_req = required_dim(n + cfg.t_hint.unwrap_or(n), cfg.eps_jl)?;
    // Projection only ever reduces dimension; at desk scale the required
    // target usually exceeds d, in which case the identity is used.
    let (projection, k) = if k_req < d {
        let mut rng = cfg.seed.with_stream(1).rng();
        (Some(JlMap::new(d, k_req, &mut rng)?), k_req)
    } else {
        (None, d)
    };

    let projected: Vec<Vec<f64>> = match &projection {
        Some(f) => sample
            .iter()
            .map(|p| f.apply(p.coords()))
            .collect::<Result<_>>()?,
        None => sample.iter().map(|p| p.coords().to_vec()).collect(),
    };

    let offsets = cfg.offset_grid();
    let net = build_candidate_net(k, cfg, offsets.len())?;

    let threshold = cfg.mirror_threshold;
    let target = gamma / 4.0;
    // Far points carry margin gamma/2 with respect to the true facet, per
    // the projection error budget; size the update budget off that.
    let budget = mistake_bound(gamma / 2.0, target).max(256);
    let pcfg = PerceptronConfig::new(target, budget)?;

    // (net index, offset) pairs in deterministic order; perceptron runs are
    // RNG-free so the parallel map is reproducible.
    let pairs: Vec<(usize, f64)> = net
        .dirs()
        .iter()
        .enumerate()
        .flat_map(|(vi, _)| offsets.iter().map(move |b| (vi, *b)))
        .collect();

    let raw: Vec<Option<(usize, f64, Hyperplane)>> = pairs
        .par_iter()
        .map(|&(vi, b)| {
            let v = &net.dirs()[vi];
            let mut induced: Vec<LabeledPoint> = Vec::new();
            for (p, fx) in sample.iter().zip(&projected) {
                let val = dot(v, fx) + b;
                if val.abs() >= threshold {
                    let label = if val > 0.0 { 1 } else { -1 };
                    induced
                        .push(LabeledPoint::new(p.coords().to_vec(), label).expect("in-ball"));
                }
            }
            if induced.is_empty() {
                return None;
            }
            match margin_perceptron(&induced, &pcfg) {
                Ok(sep) => Some((vi, b, sep.hyperplane)),
                Err(_) => None,
            }
        })
        .collect();

    let mut mirrors: Vec<Hyperplane> = Vec::new();
    let mut provenance: Vec<(usize, f64)> = Vec::new();
    for item in raw.into_iter().flatten() {
        let (vi, b, h) = item;
        let duplicate = mirrors.iter().any(|m| {
            let dw = distance(m.normal(), h.normal());
            let db = (m.offset() - h.offset()).abs();
            (dw * dw + db * db).sqrt() < MIRROR_DEDUP_TOL
        });
        if !duplicate {
            mirrors.push(h);
            provenance.push((vi, b));
        }
    }

    Ok(CandidateSet { mirrors, provenance })
}

fn build_candidate_net(k: usize, cfg: &LearnerConfig, n_offsets: usize) -> Result<DirectionNet> {
    let mut rng = cfg.seed.with_stream(2).rng();
    let budget = cfg
        .candidate_budget
        .map(|c| (c / n_offsets.max(1)).max(16));
    build_net(k, cfg.delta_net, &mut rng, budget)
}

fn binomial(n: usize, t: usize) -> u128 {
    if t > n {
        return 0;
    }
    let t = t.min(n - t);
    let mut acc: u128 = 1;
    for i in 0..t {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// First consistent t-subset of the mirrors in lexicographic order.
pub fn enumerate_t_polytope(
    sample: &[LabeledPoint],
    gamma: f64,
    t: usize,
    candidates: &CandidateSet,
    cap: u128,
) -> Result<Polytope> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be >= 1".into()));
    }
    let m = candidates.len();
    if binomial(m, t) > cap {
        return Err(Error::EnumerationCapExceeded {
            candidates: m,
            t,
            cap,
        });
    }
    let d = sample.first().map(|p| p.dim()).unwrap_or(0);
    for combo in (0..m).combinations(t) {
        let hs: Vec<Hyperplane> = combo
            .iter()
            .map(|&i| candidates.mirrors[i].clone())
            .collect();
        let p = Polytope::new(d, hs)?;
        if p.is_consistent(gamma / 4.0, sample)? {
            return Ok(p);
        }
    }
    Err(Error::EnumerationExhausted { t })
}

/// Greedy cover: repeatedly choose the mirror that is gamma/4-positive on
/// every positive point and cuts the most remaining negatives at -gamma/4,
/// ties to the lowest candidate index.
pub fn greedy_polytope(
    sample: &[LabeledPoint],
    gamma: f64,
    candidates: &CandidateSet,
    cfg: &LearnerConfig,
) -> Result<Polytope> {
    let d = sample.first().map(|p| p.dim()).unwrap_or(0);
    let margin = gamma / 4.0;

    let positives: Vec<&LabeledPoint> = sample.iter().filter(|p| p.label() == 1).collect();
    let negative_idx: Vec<usize> = (0..sample.len())
        .filter(|&i| sample[i].label() == -1)
        .collect();

    if negative_idx.is_empty() {
        return Ok(Polytope::all_space(d));
    }

    // keep only mirrors consistent with all positives, remembering which
    // negatives each one cuts
    let usable: Vec<(usize, Vec<usize>)> = candidates
        .mirrors
        .par_iter()
        .enumerate()
        .filter_map(|(ci, h)| {
            let pos_ok = positives
                .iter()
                .all(|p| h.value_unchecked(p.coords()) >= margin);
            if !pos_ok {
                return None;
            }
            let cut: Vec<usize> = negative_idx
                .iter()
                .copied()
                .filter(|&i| h.value_unchecked(sample[i].coords()) <= -margin)
                .collect();
            Some((ci, cut))
        })
        .collect();

    let cap = cfg.greedy_cap(sample.len());
    let mut remaining: Vec<bool> = vec![false; sample.len()];
    for &i in &negative_idx {
        remaining[i] = true;
    }
    let mut remaining_count = negative_idx.len();
    let mut chosen: Vec<Hyperplane> = Vec::new();

    while remaining_count > 0 {
        if chosen.len() >= cap {
            return Err(Error::GreedyIterationCap { cap });
        }
        // deterministic argmax: highest cut count, lowest candidate index
        let best = usable
            .par_iter()
            .map(|(ci, cut)| {
                let score = cut.iter().filter(|&&i| remaining[i]).count();
                (score, *ci)
            })
            .reduce(
                || (0usize, usize::MAX),
                |a, b| {
                    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                        b
                    } else {
                        a
                    }
                },
            );
        let (score, ci) = best;
        if score == 0 {
            // Budget-truncated candidate nets can miss a facet direction
            // entirely; before giving up, fit one halfspace directly against
            // the leftover negatives. The perceptron run is RNG-free, so this
            // stays deterministic.
            let mut stalled: Vec<LabeledPoint> =
                positives.iter().map(|p| (*p).clone()).collect();
            stalled.extend(
                negative_idx
                    .iter()
                    .filter(|&&i| remaining[i])
                    .map(|&i| sample[i].clone()),
            );
            let rescue_cfg =
                PerceptronConfig::new(margin, mistake_bound(2.0 * margin, margin).max(256))?;
            match margin_perceptron(&stalled, &rescue_cfg) {
                Ok(sep) => {
                    remaining_count = 0;
                    remaining.iter_mut().for_each(|r| *r = false);
                    chosen.push(sep.hyperplane);
                    continue;
                }
                Err(_) => {
                    return Err(Error::GreedyNoProgress {
                        remaining: remaining_count,
                    });
                }
            }
        }
        let cut = &usable.iter().find(|(c, _)| *c == ci).unwrap().1;
        for &i in cut {
            if remaining[i] {
                remaining[i] = false;
                remaining_count -= 1;
            }
        }
        chosen.push(candidates.mirrors[ci].clone());
    }

    let polytope = Polytope::new(d, chosen)?;
    debug_assert!(polytope.is_consistent(margin, sample)?);
    if !polytope.is_consistent(margin, sample)? {
        return Err(Error::GreedyNoProgress { remaining: 0 });
    }
    Ok(polytope)
}

/// PAC wrapper: draw the closed-form sample size from the example source
/// and run the candidate + greedy pipeline on it.
pub fn learn_pac<F>(
    t: usize,
    gamma: f64,
    eps: f64,
    delta: f64,
    mut sampler: F,
    seed: RngSeed,
) -> Result<Polytope>
where
    F: FnMut() -> Result<LabeledPoint>,
{
    let m = pac_sample_size(t, gamma, eps, delta)?;
    let sample: Vec<LabeledPoint> = (0..m).map(|_| sampler()).collect::<Result<_>>()?;
    let cfg = LearnerConfig::new(gamma, seed)?.with_t_hint(t);
    let candidates = build_candidates(&sample, &cfg)?;
    greedy_polytope(&sample, gamma, &candidates, &cfg)
}
