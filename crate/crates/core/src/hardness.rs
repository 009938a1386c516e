//! Graph reductions: labeled instances whose single-hyperplane structure
//! mirrors independent sets, certificate hyperplanes built from vertex
//! sets, a bitmask brute-force oracle for small graphs, and covers built
//! from proper colorings.

use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, LabeledPoint, Polytope};

/// Simple undirected graph on vertices `0..n` given by an edge list.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Graph("graph needs at least one vertex".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut canon = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if seen.insert(e) {
                canon.push(e);
            }
        }
        Ok(Self { n, edges: canon })
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Self::new(n, edges)
    }

    /// Checks that no edge has both endpoints in `set`.
    pub fn check_independent(&self, set: &[usize]) -> Result<()> {
        let mask: std::collections::HashSet<usize> = set.iter().copied().collect();
        for &(u, v) in &self.edges {
            if mask.contains(&u) && mask.contains(&v) {
                return Err(Error::NotIndependent(u, v));
            }
        }
        Ok(())
    }

    /// Checks that `colors[u] != colors[v]` on every edge.
    pub fn check_coloring(&self, colors: &[usize]) -> Result<()> {
        if colors.len() != self.n {
            return Err(Error::Graph(format!(
                "{} colors for {} vertices",
                colors.len(),
                self.n
            )));
        }
        for &(u, v) in &self.edges {
            if colors[u] == colors[v] {
                return Err(Error::ImproperColoring(u, v));
            }
        }
        Ok(())
    }
}

/// Labeled instance in `R^n` derived from a graph: each vertex `i` becomes
/// a negative point at the basis vector `e_i`; the origin and every edge
/// midpoint `(e_u + e_v)/2` become positives. All points sit inside the
/// unit ball.
pub fn graph_to_instance(g: &Graph) -> Result<Vec<LabeledPoint>> {
    let n = g.vertices();
    let basis = |i: usize| {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    };
    let mut pts = Vec::with_capacity(1 + n + g.edges().len());
    pts.push(LabeledPoint::new(vec![0.0; n], 1)?);
    for i in 0..n {
        pts.push(LabeledPoint::new(basis(i), -1)?);
    }
    for &(u, v) in g.edges() {
        let mut m = vec![0.0; n];
        m[u] = 0.5;
        m[v] = 0.5;
        pts.push(LabeledPoint::new(m, 1)?);
    }
    Ok(pts)
}

/// Margin achieved by the certificate hyperplane of an independent set of
/// size `k`: `1 / (4 sqrt k)`.
pub fn independent_set_margin(k: usize) -> f64 {
    1.0 / (4.0 * (k as f64).sqrt())
}

/// Certificate hyperplane for an independent set: weight `-1/sqrt k` on
/// each chosen vertex coordinate and offset `3/(4 sqrt k)`. It keeps the
/// origin and every edge midpoint on the positive side and cuts exactly
/// the chosen vertices, all at margin `1/(4 sqrt k)`.
pub fn independent_set_hyperplane(g: &Graph, set: &[usize]) -> Result<Hyperplane> {
    if set.is_empty() {
        return Err(Error::Graph("independent set must be nonempty".into()));
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() {
        return Err(Error::Graph("independent set has repeated vertices".into()));
    }
    if let Some(&v) = sorted.iter().find(|&&v| v >= g.vertices()) {
        return Err(Error::Graph(format!("vertex {v} out of range")));
    }
    g.check_independent(&sorted)?;
    let k = sorted.len() as f64;
    let mut w = vec![0.0; g.vertices()];
    for &i in &sorted {
        w[i] = -1.0 / k.sqrt();
    }
    Hyperplane::new(w, 3.0 / (4.0 * k.sqrt()))
}

/// Exact maximum independent set by bitmask enumeration; intended for the
/// test-oracle regime `n <= 20`.
pub fn brute_force_max_independent(g: &Graph) -> Result<Vec<usize>> {
    let n = g.vertices();
    if n > 20 {
        return Err(Error::Graph(format!(
            "brute force capped at 20 vertices, got {n}"
        )));
    }
    let edge_masks: Vec<u32> = g
        .edges()
        .iter()
        .map(|&(u, v)| (1u32 << u) | (1u32 << v))
        .collect();
    let mut best = 0u32;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() <= best.count_ones() {
            continue;
        }
        if edge_masks.iter().all(|&e| (mask & e) != e) {
            best = mask;
        }
    }
    Ok((0..n).filter(|i| best & (1 << i) != 0).collect())
}

/// Polytope covering all vertex negatives using one hyperplane per color
/// class of a proper coloring. Classes larger than `max_class` are split
/// (default cap: `ceil(n / #colors)`), so the weakest certificate margin
/// is at least `independent_set_margin` of the cap.
pub fn coloring_to_cover(
    g: &Graph,
    colors: &[usize],
    max_class: Option<usize>,
) -> Result<Polytope> {
    g.check_coloring(colors)?;
    let mut classes: std::collections::BTreeMap<usize, Vec<usize>> =
        std::collections::BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        classes.entry(c).or_default().push(v);
    }
    let cap = match max_class {
        Some(0) => {
            return Err(Error::InvalidParameter("max_class must be >= 1".into()))
        }
        Some(c) => c,
        None => g.vertices().div_ceil(classes.len()),
    };
    let mut hs = Vec::new();
    for class in classes.values() {
        for chunk in class.chunks(cap) {
            hs.push(independent_set_hyperplane(g, chunk)?);
        }
    }
    Polytope::new(g.vertices(), hs)
}
