//! Envelope geometry: nearest-point projection onto a polytope, envelope
//! membership, the margin-vs-envelope containment checks, the no-reenter
//! interval property of expanding polytopes, and Hausdorff distance/speed
//! estimation by ray-shooting.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{add, dot, scale, sub, EnvelopeRegion, Hyperplane, Polytope};
use crate::sampling::{sample_unit_ball, sample_unit_sphere, RngSeed};

pub const PROJECTION_TOL: f64 = 1e-9;
pub const PROJECTION_MAX_SWEEPS: usize = 100_000;

/// A polytope whose halfspaces move outward, each at its own constant
/// nonnegative speed.
#[derive(Debug, Clone)]
pub struct ExpandingPolytope {
    base: Polytope,
    speeds: Vec<f64>,
}

impl ExpandingPolytope {
    pub fn new(base: Polytope, speeds: Vec<f64>) -> Result<Self> {
        if speeds.len() != base.len() {
            return Err(Error::InvalidParameter(format!(
                "{} speeds for {} halfspaces",
                speeds.len(),
                base.len()
            )));
        }
        if speeds.iter().any(|s| *s < 0.0) {
            return Err(Error::InvalidParameter(
                "speeds must be nonnegative".into(),
            ));
        }
        Ok(Self { base, speeds })
    }

    /// Unit speed on every halfspace, so `at(tau) = base.shift(tau)`.
    pub fn unit_speed(base: Polytope) -> Self {
        let speeds = vec![1.0; base.len()];
        Self { base, speeds }
    }

    pub fn base(&self) -> &Polytope {
        &self.base
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    /// The polytope at time `tau`: offsets `b_i + s_i * tau`.
    pub fn at(&self, tau: f64) -> Polytope {
        let hs = self
            .base
            .halfspaces()
            .iter()
            .zip(&self.speeds)
            .map(|(h, s)| h.shifted(s * tau))
            .collect();
        Polytope::new(self.base.dim(), hs).expect("dims preserved")
    }
}

/// Result of projecting a point onto a polytope.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub point: Vec<f64>,
    pub distance: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nearest point of the polytope via Dykstra's alternating projections.
/// Plain cyclic projection only reaches feasibility; Dykstra's correction
/// terms converge to the true nearest point on intersections of convex
/// sets.
pub fn project_onto_polytope(
    p: &Polytope,
    x: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<ProjectionResult> {
    let m = p.min_value(x)?;
    if m >= 0.0 {
        return Ok(ProjectionResult {
            point: x.to_vec(),
            distance: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    let t = p.len();
    let mut y = x.to_vec();
    let mut corrections: Vec<Vec<f64>> = vec![vec![0.0; p.dim()]; t];

    for sweep in 1..=max_sweeps {
        let prev = y.clone();
        for (h, c) in p.halfspaces().iter().zip(corrections.iter_mut()) {
            let z = add(&y, c);
            let v = h.value_unchecked(&z);
            if v >= 0.0 {
                y = z;
                c.iter_mut().for_each(|e| *e = 0.0);
            } else {
                // project z onto the halfspace boundary
                y = sub(&z, &scale(h.normal(), v));
                *c = sub(&z, &y);
            }
        }
        let moved = crate::geometry::distance(&prev, &y);
        if moved <= tol && p.min_value_unchecked(&y) >= -tol {
            return Ok(ProjectionResult {
                distance: crate::geometry::distance(x, &y),
                point: y,
                iterations: sweep,
                converged: true,
            });
        }
    }

    Err(Error::ProjectionDiverged {
        sweeps: max_sweeps,
        best_distance: crate::geometry::distance(x, &y),
    })
}

/// Envelope classification: the inner boundary shell coincides with the
/// inner margin, while the outer shell is cut off at true Euclidean
/// distance gamma.
pub fn envelope_region(p: &Polytope, gamma: f64, x: &[f64]) -> Result<EnvelopeRegion> {
    if gamma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let m = p.min_value(x)?;
    if m >= 0.0 {
        Ok(if m <= gamma {
            EnvelopeRegion::InnerEnvelope
        } else {
            EnvelopeRegion::Inside
        })
    } else {
        let proj = project_onto_polytope(p, x, PROJECTION_TOL, PROJECTION_MAX_SWEEPS)?;
        Ok(if proj.distance <= gamma {
            EnvelopeRegion::OuterEnvelope
        } else {
            EnvelopeRegion::Outside
        })
    }
}

/// Checks the identity between the eroded polytope and the inward-shifted
/// one: deep points (min-value >= gamma) must fit a gamma-ball inside P,
/// and shallow interior points must be escapable within distance gamma.
/// Samples from a ball of radius `2 (1 + gamma)` around the origin.
pub fn verify_inner_identity<R: Rng>(
    p: &Polytope,
    gamma: f64,
    samples: usize,
    rng: &mut R,
) -> Result<usize> {
    let d = p.dim();
    let radius = 2.0 * (1.0 + gamma);
    let tol = 1e-9;
    let mut mismatches = 0usize;
    for _ in 0..samples {
        let x = scale(&sample_unit_ball(d, rng)?, radius);
        let m = p.min_value(&x)?;
        if m >= gamma {
            // ball-inside certificate for the Minkowski erosion
            for _ in 0..100 {
                let u = sample_unit_sphere(d, rng)?;
                if !p.contains(&add(&x, &scale(&u, gamma)))? {
                    mismatches += 1;
                    break;
                }
            }
        } else if m >= 0.0 && m.is_finite() {
            // shallow interior point: stepping just past the tightest facet
            // must leave P within distance gamma (so the point is outside
            // the Minkowski erosion, matching its min-value)
            let h = tightest_facet(p, &x);
            let escape = sub(&x, &scale(h.normal(), m + tol));
            if p.contains(&escape)? {
                mismatches += 1;
            }
        }
    }
    Ok(mismatches)
}

fn tightest_facet<'a>(p: &'a Polytope, x: &[f64]) -> &'a Hyperplane {
    p.halfspaces()
        .iter()
        .min_by(|a, b| {
            a.value_unchecked(x)
                .partial_cmp(&b.value_unchecked(x))
                .unwrap()
        })
        .expect("nonempty polytope")
}

/// Multistart search for a point of the unit ball with clearance at least
/// `gamma` (the witness precondition for margin/envelope containment).
pub fn find_witness<R: Rng>(p: &Polytope, gamma: f64, rng: &mut R) -> Result<Vec<f64>> {
    let d = p.dim();
    if p.is_empty() {
        return Ok(vec![0.0; d]);
    }
    let mut best = vec![0.0; d];
    let mut best_val = p.min_value(&best)?;
    for _ in 0..20_000 {
        let x = sample_unit_ball(d, rng)?;
        let v = p.min_value_unchecked(&x);
        if v > best_val {
            best_val = v;
            best = x;
        }
    }
    // subgradient ascent on the min-value, stay inside the unit ball
    let mut step = 0.25;
    while step > 1e-6 && best_val < gamma {
        let h = tightest_facet(p, &best);
        let cand = add(&best, &scale(h.normal(), step));
        let n = crate::geometry::norm(&cand);
        let cand = if n > 1.0 { scale(&cand, 1.0 / n) } else { cand };
        let v = p.min_value_unchecked(&cand);
        if v > best_val {
            best_val = v;
            best = cand;
        } else {
            step *= 0.5;
        }
    }
    if best_val >= gamma {
        Ok(best)
    } else {
        Err(Error::WitnessNotFound { gamma })
    }
}

/// Rejection-samples the thin margin band `|min| <= gamma^2/2` inside the
/// unit ball and counts points that fall outside the gamma-envelope
/// (expected zero when the witness precondition holds).
pub fn verify_margin_in_envelope<R: Rng>(
    p: &Polytope,
    gamma: f64,
    samples: usize,
    rng: &mut R,
) -> Result<usize> {
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be in (0,1), got {gamma}"
        )));
    }
    find_witness(p, gamma, rng)?;

    let band = gamma * gamma / 2.0;
    let d = p.dim();
    let mut violations = 0usize;
    let mut found = 0usize;
    let max_attempts = samples.saturating_mul(2000);
    for _ in 0..max_attempts {
        if found >= samples {
            break;
        }
        let x = sample_unit_ball(d, rng)?;
        let m = p.min_value_unchecked(&x);
        if m.abs() > band {
            continue;
        }
        found += 1;
        if m >= 0.0 {
            // inside P with min <= band < gamma: inner envelope by the
            // erosion identity
            continue;
        }
        let proj = project_onto_polytope(p, &x, PROJECTION_TOL, PROJECTION_MAX_SWEEPS)?;
        if proj.distance > gamma + 1e-9 {
            violations += 1;
        }
    }
    Ok(violations)
}

/// Membership of the moving point `p0 + tau v` in `Q(tau)` over the time
/// grid must form one contiguous block (a point can never exit a moving
/// halfspace and come back).
pub fn no_reenter_check(
    q: &ExpandingPolytope,
    p0: &[f64],
    v: &[f64],
    times: &[f64],
) -> Result<bool> {
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "times must be strictly increasing".into(),
        ));
    }
    let flags: Vec<bool> = times
        .iter()
        .map(|&tau| {
            let x = add(p0, &scale(v, tau));
            q.at(tau).contains(&x)
        })
        .collect::<Result<_>>()?;
    let mut transitions = 0;
    for w in flags.windows(2) {
        if w[0] != w[1] {
            transitions += 1;
        }
    }
    // inside flags form an interval iff at most one rise and one fall,
    // never a second rise
    let mut seen_inside = false;
    let mut left_inside = false;
    for f in &flags {
        match (f, seen_inside, left_inside) {
            (true, _, true) => return Ok(false),
            (true, _, _) => seen_inside = true,
            (false, true, _) => left_inside = true,
            _ => {}
        }
    }
    let _ = transitions;
    Ok(true)
}

/// Interior point search used by the Hausdorff estimator.
pub fn find_interior<R: Rng>(p: &Polytope, rng: &mut R) -> Result<Vec<f64>> {
    let d = p.dim();
    let origin = vec![0.0; d];
    if p.min_value(&origin)? > 1e-9 {
        return Ok(origin);
    }
    let radius = 1.0
        + p.halfspaces()
            .iter()
            .map(|h| h.offset().abs())
            .fold(0.0f64, f64::max);
    let mut best = origin;
    let mut best_val = p.min_value(&best)?;
    for _ in 0..5000 {
        let x = scale(&sample_unit_ball(d, rng)?, radius);
        let v = p.min_value_unchecked(&x);
        if v > best_val {
            best_val = v;
            best = x;
        }
    }
    let mut step = radius / 4.0;
    while step > 1e-9 && best_val <= 1e-9 {
        let h = tightest_facet(p, &best);
        let cand = add(&best, &scale(h.normal(), step));
        let v = p.min_value_unchecked(&cand);
        if v > best_val {
            best_val = v;
            best = cand;
        } else {
            step *= 0.5;
        }
    }
    if best_val > 1e-9 {
        Ok(best)
    } else {
        Err(Error::NoInteriorPoint)
    }
}

/// One-sided Hausdorff estimate between nested polytopes `inner` and
/// `outer`: ray-shoot from an interior point of `inner` through random
/// directions to the boundary of `outer` and take the largest projection
/// distance back to `inner`. A lower bound by construction; rays that
/// escape to infinity are skipped.
pub fn hausdorff_distance<R: Rng>(
    inner: &Polytope,
    outer: &Polytope,
    boundary_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let d = inner.dim();
    if outer.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: outer.dim(),
        });
    }
    let center = find_interior(inner, rng)?;
    let mut best = 0.0f64;
    let mut hits = 0usize;
    for _ in 0..boundary_samples {
        let u = sample_unit_sphere(d, rng)?;
        let Some(tau) = exit_time(outer, &center, &u) else {
            continue;
        };
        hits += 1;
        let z = add(&center, &scale(&u, tau));
        let dist = if inner.len() == 1 {
            (-inner.halfspaces()[0].value_unchecked(&z)).max(0.0)
        } else {
            project_onto_polytope(inner, &z, PROJECTION_TOL, PROJECTION_MAX_SWEEPS)?.distance
        };
        best = best.max(dist);
    }
    if hits == 0 {
        return Err(Error::UnboundedPolytope);
    }
    Ok(best)
}

/// Largest `tau >= 0` keeping `c + tau u` inside `p`, or None when the ray
/// never leaves.
fn exit_time(p: &Polytope, c: &[f64], u: &[f64]) -> Option<f64> {
    let mut tau = f64::INFINITY;
    for h in p.halfspaces() {
        let slope = dot(h.normal(), u);
        if slope < -1e-14 {
            let t = -h.value_unchecked(c) / slope;
            tau = tau.min(t.max(0.0));
        }
    }
    tau.is_finite().then_some(tau)
}

/// Estimated Hausdorff speed `delta(Q(tau), Q(tau + dt)) / dt` at each
/// grid time.
pub fn hausdorff_speed_profile(
    q: &ExpandingPolytope,
    times: &[f64],
    dt: f64,
    samples: usize,
    seed: RngSeed,
) -> Result<Vec<f64>> {
    if dt <= 0.0 {
        return Err(Error::InvalidParameter("dt must be positive".into()));
    }
    times
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            let mut rng = seed.with_stream(i as u64).rng();
            let h = hausdorff_distance(&q.at(tau), &q.at(tau + dt), samples, &mut rng)?;
            Ok(h / dt)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{norm, square};
    use approx::assert_relative_eq;

    #[test]
    fn projection_inside_is_identity() {
        let p = square(1.0);
        let r = project_onto_polytope(&p, &[0.3, -0.2], 1e-9, 1000).unwrap();
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.point, vec![0.3, -0.2]);
    }

    #[test]
    fn projection_single_halfspace() {
        let p = Polytope::new(
            2,
            vec![Hyperplane::new(vec![-1.0, 0.0], 0.0).unwrap()],
        )
        .unwrap();
        let r = project_onto_polytope(&p, &[1.0, 0.0], 1e-9, 10_000).unwrap();
        assert_relative_eq!(r.distance, 1.0, epsilon = 1e-6);
        assert!(norm(&sub(&r.point, &[0.0, 0.0])) < 1e-6);
    }

    #[test]
    fn projection_wedge_matches_brute_force() {
        // wedge x <= 0, y <= 0; query beyond the apex projects to origin
        let p = Polytope::new(
            2,
            vec![
                Hyperplane::new(vec![-1.0, 0.0], 0.0).unwrap(),
                Hyperplane::new(vec![0.0, -1.0], 0.0).unwrap(),
            ],
        )
        .unwrap();
        let x = [0.7, 0.9];
        let r = project_onto_polytope(&p, &x, 1e-10, 100_000).unwrap();

        // independent oracle: dense samples on the wedge boundary
        let mut best = f64::INFINITY;
        let n = 1_000_000;
        for i in 0..n {
            let s = -(i as f64) * 3.0 / n as f64;
            best = best
                .min(crate::geometry::distance(&x, &[s, 0.0]))
                .min(crate::geometry::distance(&x, &[0.0, s]));
        }
        best = best.min(crate::geometry::distance(&x, &[0.0, 0.0]));
        assert!((r.distance - best).abs() < 1e-4, "dykstra {} oracle {best}", r.distance);
    }

    #[test]
    fn projection_idempotent_and_optimal() {
        let p = square(1.0);
        let mut rng = RngSeed::new(50, 0).rng();
        for _ in 0..50 {
            let x = scale(&sample_unit_ball(2, &mut rng).unwrap(), 3.0);
            let r = project_onto_polytope(&p, &x, 1e-10, 100_000).unwrap();
            let r2 = project_onto_polytope(&p, &r.point, 1e-10, 100_000).unwrap();
            assert!(r2.distance <= 1e-8);
            // variational inequality against random members
            for _ in 0..100 {
                let q = scale(&sample_unit_ball(2, &mut rng).unwrap(), 1.0 / 2f64.sqrt());
                assert!(p.contains(&q).unwrap());
                let lhs = dot(&sub(&x, &r.point), &sub(&q, &r.point));
                assert!(lhs <= 1e-6, "violated optimality: {lhs}");
            }
        }
    }

    #[test]
    fn envelope_regions_unit_square() {
        let p = square(1.0);
        assert_eq!(
            envelope_region(&p, 0.2, &[1.1, 0.0]).unwrap(),
            EnvelopeRegion::OuterEnvelope
        );
        // corner: distance sqrt(2)*0.1 ~ 0.1414 <= 0.2
        assert_eq!(
            envelope_region(&p, 0.2, &[1.1, 1.1]).unwrap(),
            EnvelopeRegion::OuterEnvelope
        );
        assert_eq!(
            envelope_region(&p, 0.2, &[0.0, 0.0]).unwrap(),
            EnvelopeRegion::Inside
        );
        assert_eq!(
            envelope_region(&p, 0.2, &[0.9, 0.0]).unwrap(),
            EnvelopeRegion::InnerEnvelope
        );
        // corner margin/envelope split: (1.2, 1.2) is in the 0.3-outer
        // margin but distance sqrt(2)*0.2 > 0.25
        assert_eq!(
            envelope_region(&p, 0.25, &[1.2, 1.2]).unwrap(),
            EnvelopeRegion::Outside
        );
    }

    #[test]
    fn inner_identity_square_and_halfspace() {
        let mut rng = RngSeed::new(51, 0).rng();
        let p = square(1.0);
        assert_eq!(verify_inner_identity(&p, 0.5, 10_000, &mut rng).unwrap(), 0);
        let h = Polytope::new(
            2,
            vec![Hyperplane::new(vec![-1.0, 0.0], 0.3).unwrap()],
        )
        .unwrap();
        assert_eq!(verify_inner_identity(&h, 0.4, 5_000, &mut rng).unwrap(), 0);
        let empty = Polytope::all_space(2);
        assert_eq!(verify_inner_identity(&empty, 0.2, 100, &mut rng).unwrap(), 0);
    }

    #[test]
    fn margin_in_envelope_square() {
        let mut rng = RngSeed::new(52, 0).rng();
        let p = square(0.5);
        let v = verify_margin_in_envelope(&p, 0.2, 20_000, &mut rng).unwrap();
        assert_eq!(v, 0);
    }

    #[test]
    fn witness_required() {
        let mut rng = RngSeed::new(53, 0).rng();
        // polytope far from the unit ball: no witness
        let p = Polytope::new(
            2,
            vec![Hyperplane::new(vec![1.0, 0.0], -5.0).unwrap()],
        )
        .unwrap();
        match verify_margin_in_envelope(&p, 0.2, 100, &mut rng) {
            Err(Error::WitnessNotFound { .. }) => {}
            other => panic!("expected witness failure, got {other:?}"),
        }
    }

    #[test]
    fn no_reenter_static_square() {
        let q = ExpandingPolytope::new(square(1.0), vec![0.0; 4]).unwrap();
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.02).collect();
        assert!(no_reenter_check(&q, &[-3.0, 0.1], &[1.0, 0.0], &times).unwrap());
        // v = 0 inside forever
        assert!(no_reenter_check(&q, &[0.0, 0.0], &[0.0, 0.0], &times).unwrap());
    }

    #[test]
    fn hausdorff_parallel_slabs() {
        let p1 = Polytope::new(
            2,
            vec![Hyperplane::new(vec![-1.0, 0.0], 0.0).unwrap()],
        )
        .unwrap();
        let p2 = p1.shift(0.5);
        let mut rng = RngSeed::new(54, 0).rng();
        let h = hausdorff_distance(&p1, &p2, 2000, &mut rng).unwrap();
        assert_relative_eq!(h, 0.5, epsilon = 1e-6);
        // identical polytopes
        let h0 = hausdorff_distance(&p1, &p1.clone(), 500, &mut rng).unwrap();
        assert!(h0 <= 1e-9);
    }

    #[test]
    fn hausdorff_shifted_square_corner() {
        let p1 = square(1.0);
        let p2 = p1.shift(0.5);
        let mut rng = RngSeed::new(55, 0).rng();
        let h = hausdorff_distance(&p1, &p2, 10_000, &mut rng).unwrap();
        assert!((h - 0.5f64 * 2f64.sqrt()).abs() < 0.02, "estimate {h}");
    }

    #[test]
    fn speed_profile_single_halfspace() {
        let base = Polytope::new(
            2,
            vec![Hyperplane::new(vec![-1.0, 0.0], 1.0).unwrap()],
        )
        .unwrap();
        let q = ExpandingPolytope::new(base, vec![0.7]).unwrap();
        let times = [0.0, 0.5, 1.0];
        let prof =
            hausdorff_speed_profile(&q, &times, 0.2, 1000, RngSeed::new(56, 0)).unwrap();
        for s in prof {
            assert!((s - 0.7).abs() < 1e-6, "speed {s}");
        }
    }

    #[test]
    fn speed_profile_unit_square() {
        let q = ExpandingPolytope::unit_speed(square(1.0));
        let times = [0.0, 0.4, 0.8];
        let prof =
            hausdorff_speed_profile(&q, &times, 0.25, 10_000, RngSeed::new(57, 0)).unwrap();
        for s in prof {
            assert!((s - 2f64.sqrt()).abs() < 0.05, "speed {s}");
        }
    }
}
