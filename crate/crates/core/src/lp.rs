//! Linear feasibility via a separation oracle.
//!
//! A strict system `A x < b` reduces to finding a homogeneous direction
//! with positive dot product against the augmented rows `(-A_i, b_i)` and
//! the anchor `(0, ..., 0, 1)`; the margin Perceptron plays the oracle.
//! Non-strict systems are handled by growing a maximally feasible subset
//! with one oracle call per row, forcing the leftover rows to equality,
//! eliminating a variable per equality, and recursing.

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, scale, LabeledPoint};
use crate::perceptron::{margin_perceptron, PerceptronConfig};

pub const PIVOT_TOL: f64 = 1e-10;
pub const VERIFY_TOL: f64 = 1e-8;
pub const DEFAULT_ORACLE_BUDGET: usize = 500_000;

/// Strict feasibility problem `A x < b` (row-wise strict).
#[derive(Debug, Clone)]
pub struct StrictLp {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl StrictLp {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows vs {} offsets",
                a.len(),
                b.len()
            )));
        }
        if let Some(first) = a.first() {
            let n = first.len();
            if a.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidParameter("ragged constraint matrix".into()));
            }
        }
        Ok(Self { a, b })
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn vars(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

/// Terminal outcome of a solve. The Perceptron oracle cannot tell an
/// infeasible system from one whose margin is below its resolution, hence
/// the combined status.
#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Solved(Vec<f64>),
    InfeasibleOrTimeout,
}

/// Homogeneous separation oracle: given points, either a direction with
/// strictly positive dot product against all of them, or `None`.
pub type Separator<'a> = dyn FnMut(&[Vec<f64>]) -> Result<Option<Vec<f64>>> + 'a;

/// Perceptron-backed separator: augments the points with the origin
/// labeled negative, so the trained affine plane has a negative bias and
/// its normal alone is a homogeneous separator.
pub fn perceptron_separator(max_updates: usize) -> impl FnMut(&[Vec<f64>]) -> Result<Option<Vec<f64>>> {
    move |points: &[Vec<f64>]| {
        if points.is_empty() {
            return Ok(Some(vec![1.0]));
        }
        let d = points[0].len();
        let mut sample = Vec::with_capacity(points.len() + 1);
        for p in points {
            let n = norm(p);
            if n < 1e-15 {
                // the zero vector can never have positive dot product
                return Ok(None);
            }
            sample.push(LabeledPoint::new(scale(p, 1.0 / n), 1)?);
        }
        sample.push(LabeledPoint::new(vec![0.0; d], -1)?);
        let cfg = PerceptronConfig::new(0.0, max_updates)?;
        match margin_perceptron(&sample, &cfg) {
            Ok(sep) => Ok(Some(sep.hyperplane.normal().to_vec())),
            Err(Error::PerceptronExhausted { .. }) | Err(Error::DegenerateSeparator) => {
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

/// Solves `A x < b` through the separation oracle: separator success on
/// `{(-A_i, b_i)} ∪ {(0,...,0,1)}` yields `w = (x', t)` with `t > 0` and
/// `x = x'/t`. The solution is re-verified strictly before returning.
pub fn lp_strict_solve(lp: &StrictLp, separator: &mut Separator) -> Result<LpStatus> {
    let n = lp.vars();
    let mut points: Vec<Vec<f64>> = lp
        .a
        .iter()
        .zip(&lp.b)
        .map(|(row, &bi)| {
            let mut q: Vec<f64> = row.iter().map(|v| -v).collect();
            q.push(bi);
            q
        })
        .collect();
    let mut anchor = vec![0.0; n + 1];
    anchor[n] = 1.0;
    points.push(anchor);

    let Some(w) = separator(&points)? else {
        return Ok(LpStatus::InfeasibleOrTimeout);
    };
    if w.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: w.len(),
        });
    }
    let t = w[n];
    if t <= 0.0 {
        return Ok(LpStatus::InfeasibleOrTimeout);
    }
    let x: Vec<f64> = w[..n].iter().map(|v| v / t).collect();
    let strict = lp
        .a
        .iter()
        .zip(&lp.b)
        .all(|(row, &bi)| dot(row, &x) < bi);
    Ok(if strict {
        LpStatus::Solved(x)
    } else {
        LpStatus::InfeasibleOrTimeout
    })
}

/// Solves `A x <= b`: grows a maximally feasible row set with one strict
/// solve per row; leftover rows are forced to equality, one variable is
/// eliminated per equality (pivot = largest |coefficient|), and the
/// reduced system recurses. The returned point is always re-verified
/// against the original system to `1e-8`.
pub fn lp_solve(
    a: &[Vec<f64>],
    b: &[f64],
    strict: &mut dyn FnMut(&StrictLp) -> Result<LpStatus>,
) -> Result<LpStatus> {
    let n = a.first().map_or(0, Vec::len);
    let x = solve_rec(n, a, b, strict)?;
    match x {
        LpStatus::Solved(x) => {
            let ok = a
                .iter()
                .zip(b)
                .all(|(row, &bi)| dot(row, &x) <= bi + VERIFY_TOL);
            Ok(if ok {
                LpStatus::Solved(x)
            } else {
                LpStatus::InfeasibleOrTimeout
            })
        }
        s => Ok(s),
    }
}

fn solve_rec(
    n: usize,
    a: &[Vec<f64>],
    b: &[f64],
    strict: &mut dyn FnMut(&StrictLp) -> Result<LpStatus>,
) -> Result<LpStatus> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "{} rows vs {} offsets",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Ok(LpStatus::Solved(vec![0.0; n]));
    }
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("ragged constraint matrix".into()));
    }
    if n == 0 {
        return Ok(if b.iter().all(|&bi| bi >= -VERIFY_TOL) {
            LpStatus::Solved(vec![])
        } else {
            LpStatus::InfeasibleOrTimeout
        });
    }

    // forward sweep: keep row i if the subsystem stays strictly feasible
    let mut kept: Vec<usize> = Vec::new();
    let mut witness: Option<Vec<f64>> = None;
    for i in 0..a.len() {
        let mut trial = kept.clone();
        trial.push(i);
        let sub = StrictLp::new(
            trial.iter().map(|&j| a[j].clone()).collect(),
            trial.iter().map(|&j| b[j]).collect(),
        )?;
        if let LpStatus::Solved(x) = strict(&sub)? {
            kept = trial;
            witness = Some(x);
        }
    }
    if kept.len() == a.len() {
        return Ok(match witness {
            Some(x) => LpStatus::Solved(x),
            None => LpStatus::InfeasibleOrTimeout,
        });
    }

    // first leftover row is tight at every feasible point: eliminate a
    // variable through it
    let j = (0..a.len()).find(|i| !kept.contains(i)).expect("leftover row");
    let row = &a[j];
    let (pivot, &coeff) = row
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.abs().partial_cmp(&y.1.abs()).unwrap())
        .expect("n >= 1");
    if coeff.abs() < PIVOT_TOL {
        if b[j].abs() <= VERIFY_TOL {
            // vacuous equality 0 = 0: drop the row
            let (ra, rb) = drop_row(a, b, j);
            return solve_rec(n, &ra, &rb, strict);
        }
        return Err(Error::DegenerateRow { row: j });
    }

    // x_pivot = (b_j - sum_{k != pivot} row_k x_k) / coeff
    let mut ra = Vec::with_capacity(a.len() - 1);
    let mut rb = Vec::with_capacity(a.len() - 1);
    for (i, (r, &bi)) in a.iter().zip(b).enumerate() {
        if i == j {
            continue;
        }
        let f = r[pivot] / coeff;
        let nr: Vec<f64> = (0..n)
            .filter(|&k| k != pivot)
            .map(|k| r[k] - f * row[k])
            .collect();
        let nb = bi - f * b[j];
        // drop rows that became constant
        if nr.iter().all(|v| v.abs() < PIVOT_TOL) {
            if nb < -VERIFY_TOL {
                return Ok(LpStatus::InfeasibleOrTimeout);
            }
            continue;
        }
        ra.push(nr);
        rb.push(nb);
    }

    match solve_rec(n - 1, &ra, &rb, strict)? {
        LpStatus::Solved(y) => {
            let mut x = Vec::with_capacity(n);
            let mut it = y.iter();
            for k in 0..n {
                if k == pivot {
                    x.push(0.0); // placeholder, filled below
                } else {
                    x.push(*it.next().expect("reduced solution length"));
                }
            }
            let rest: f64 = (0..n)
                .filter(|&k| k != pivot)
                .map(|k| row[k] * x[k])
                .sum();
            x[pivot] = (b[j] - rest) / coeff;
            Ok(LpStatus::Solved(x))
        }
        s => Ok(s),
    }
}

fn drop_row(a: &[Vec<f64>], b: &[f64], j: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let ra = a
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, r)| r.clone())
        .collect();
    let rb = b
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, v)| *v)
        .collect();
    (ra, rb)
}

/// `lp_solve` wired to the Perceptron-backed strict solver.
pub fn lp_solve_default(a: &[Vec<f64>], b: &[f64], budget: usize) -> Result<LpStatus> {
    let mut sep = perceptron_separator(budget);
    let mut strict = |lp: &StrictLp| lp_strict_solve(lp, &mut sep);
    lp_solve(a, b, &mut strict)
}

/// `lp_strict_solve` wired to the Perceptron separator.
pub fn lp_strict_solve_default(lp: &StrictLp, budget: usize) -> Result<LpStatus> {
    let mut sep = perceptron_separator(budget);
    lp_strict_solve(lp, &mut sep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_unit_ball, sample_unit_sphere, RngSeed};
    use rand::Rng;

    fn solved(s: LpStatus) -> Vec<f64> {
        match s {
            LpStatus::Solved(x) => x,
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn strict_interval() {
        let lp = StrictLp::new(vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]).unwrap();
        let x = solved(lp_strict_solve_default(&lp, 100_000).unwrap());
        assert!(x[0] > -1.0 && x[0] < 1.0);
    }

    #[test]
    fn strict_infeasible() {
        // x < 0 and x > 1
        let lp = StrictLp::new(vec![vec![1.0], vec![-1.0]], vec![0.0, -1.0]).unwrap();
        assert_eq!(
            lp_strict_solve_default(&lp, 50_000).unwrap(),
            LpStatus::InfeasibleOrTimeout
        );
    }

    #[test]
    fn strict_planted_systems() {
        for seed in 0..5u64 {
            let (a, b) = planted_strict(5, 20, 0.05, seed);
            let lp = StrictLp::new(a.clone(), b.clone()).unwrap();
            let x = solved(lp_strict_solve_default(&lp, DEFAULT_ORACLE_BUDGET).unwrap());
            for (row, &bi) in a.iter().zip(&b) {
                assert!(dot(row, &x) < bi);
            }
        }
    }

    pub(crate) fn planted_strict(
        n: usize,
        m: usize,
        margin: f64,
        seed: u64,
    ) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = RngSeed::new(60, seed).rng();
        let x0 = sample_unit_ball(n, &mut rng).unwrap();
        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        for _ in 0..m {
            let row = sample_unit_sphere(n, &mut rng).unwrap();
            let slack = margin + rng.gen::<f64>();
            b.push(dot(&row, &x0) + slack);
            a.push(row);
        }
        (a, b)
    }

    #[test]
    fn solve_already_strict() {
        let (a, b) = planted_strict(3, 6, 0.1, 9);
        let x = solved(lp_solve_default(&a, &b, DEFAULT_ORACLE_BUDGET).unwrap());
        for (row, &bi) in a.iter().zip(&b) {
            assert!(dot(row, &x) <= bi + VERIFY_TOL);
        }
    }

    #[test]
    fn solve_forced_equality() {
        // x <= 1 and -x <= -1 pin x = 1
        let a = vec![vec![1.0], vec![-1.0]];
        let b = vec![1.0, -1.0];
        let x = solved(lp_solve_default(&a, &b, 100_000).unwrap());
        assert!((x[0] - 1.0).abs() < VERIFY_TOL);
    }

    #[test]
    fn solve_planted_equalities() {
        // feasible core in 4 vars plus two tight pairs
        let mut rng = RngSeed::new(61, 0).rng();
        let x0 = sample_unit_ball(4, &mut rng).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for _ in 0..6 {
            let row = sample_unit_sphere(4, &mut rng).unwrap();
            b.push(dot(&row, &x0) + 0.1 + rng.gen::<f64>());
            a.push(row);
        }
        for _ in 0..2 {
            let row = sample_unit_sphere(4, &mut rng).unwrap();
            let rhs = dot(&row, &x0);
            a.push(row.clone());
            b.push(rhs);
            a.push(row.iter().map(|v| -v).collect());
            b.push(-rhs);
        }
        let x = solved(lp_solve_default(&a, &b, DEFAULT_ORACLE_BUDGET).unwrap());
        for (row, &bi) in a.iter().zip(&b) {
            assert!(dot(row, &x) <= bi + VERIFY_TOL, "{} > {}", dot(row, &x), bi);
        }
    }

    #[test]
    fn degenerate_zero_row() {
        // 0 * x <= -1 can neither be kept nor pivoted
        let a = vec![vec![0.0]];
        let b = vec![-1.0];
        match lp_solve_default(&a, &b, 10_000) {
            Err(Error::DegenerateRow { row: 0 }) => {}
            other => panic!("expected degenerate row, got {other:?}"),
        }
    }

    #[test]
    fn vacuous_zero_row_dropped() {
        // 0 * x <= 0 is satisfied by anything
        let a = vec![vec![0.0], vec![1.0]];
        let b = vec![0.0, 2.0];
        let x = solved(lp_solve_default(&a, &b, 10_000).unwrap());
        assert!(x[0] <= 2.0 + VERIFY_TOL);
    }

    #[test]
    fn oracle_cannot_use_zero_point() {
        let mut sep = perceptron_separator(1000);
        assert_eq!(sep(&[vec![0.0, 0.0]]).unwrap(), None);
    }
}
