//! Lloyd's k-means with k-means++ seeding.
//!
//! The objective is the sum of squared Euclidean distances from each point to
//! its nearest center. Distance ties are always resolved toward the lowest
//! center index, and every random choice is driven by an explicit seed.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{sq_dist, Matrix};
use crate::rng::{derive_seed, rng_from_seed, Rng};

/// Cluster id per point, each below `k`. Ids carry no meaning beyond
/// grouping; any consistent relabeling describes the same partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Labeling {
    assignments: Vec<usize>,
    k: usize,
}

impl Labeling {
    pub fn new(assignments: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("labeling needs k >= 1"));
        }
        if let Some((i, &id)) = assignments.iter().enumerate().find(|(_, &id)| id >= k) {
            return Err(Error::domain(format!("label {id} at index {i} is not below k = {k}")));
        }
        Ok(Labeling { assignments, k })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignments
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.assignments
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Number of points per cluster id.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.k];
        for &l in &self.assignments {
            c[l] += 1;
        }
        c
    }

    /// Relabel clusters in order of first appearance, giving a canonical
    /// form for comparing partitions up to permutation.
    pub fn canonical(&self) -> Vec<usize> {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        self.assignments
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect()
    }

    /// True when both labelings describe the same partition.
    pub fn same_partition(&self, other: &Labeling) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }
}

/// `k × d` matrix of cluster centers, `k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centers(Matrix);

impl Centers {
    pub fn new(values: Matrix) -> Result<Self> {
        if values.rows() == 0 {
            return Err(Error::domain("need at least one center"));
        }
        Ok(Centers(values))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Centers::new(Matrix::from_rows(rows)?)
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }

    pub fn dim(&self) -> usize {
        self.0.cols()
    }

    pub fn center(&self, j: usize) -> &[f64] {
        self.0.row(j)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// Stopping rules for [`lloyd`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LloydConfig {
    pub max_iters: usize,
    /// Relative center-shift tolerance.
    pub tol: f64,
    /// Seed for the initialization step in [`kmeans`] and restarts.
    pub seed: u64,
}

impl Default for LloydConfig {
    fn default() -> Self {
        LloydConfig {
            max_iters: 100,
            tol: 1e-6,
            seed: 0,
        }
    }
}

impl LloydConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config(format!("tolerance {} must be >= 0", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub centers: Centers,
    pub labels: Labeling,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Cost of the initial centers followed by the cost after each iteration.
    pub cost_history: Vec<f64>,
}

/// How initial centers are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMethod {
    #[default]
    KMeansPlusPlus,
    /// `k` distinct rows chosen uniformly.
    RandomRows,
}

fn check_k(x: &Matrix, k: usize) -> Result<()> {
    if k == 0 || k > x.rows() {
        return Err(Error::domain(format!(
            "k = {k} must be between 1 and the number of points ({})",
            x.rows()
        )));
    }
    Ok(())
}

fn check_dims(x: &Matrix, c: &Centers) -> Result<()> {
    if x.cols() != c.dim() {
        return Err(Error::domain(format!(
            "points have {} columns, centers have {}",
            x.cols(),
            c.dim()
        )));
    }
    Ok(())
}

/// Row indices chosen by D² sampling: the first uniformly, each next one with
/// probability proportional to its squared distance from the closest row
/// already chosen. When every remaining weight is zero (duplicate rows) the
/// next index is drawn uniformly from the rows not yet chosen.
pub fn kmeanspp_indices(x: &Matrix, k: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    check_k(x, k)?;
    let n = x.rows();
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let first = rng.random_range(0..n);
    chosen.push(first);
    taken[first] = true;
    let mut d2: Vec<f64> = x.row_iter().map(|r| sq_dist(r, x.row(first))).collect();

    while chosen.len() < k {
        let total: f64 = d2.iter().zip(&taken).filter(|(_, &t)| !t).map(|(d, _)| d).sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            let mut last_positive = None;
            for i in 0..n {
                if taken[i] || d2[i] <= 0.0 {
                    continue;
                }
                last_positive = Some(i);
                acc += d2[i];
                if acc > target {
                    pick = Some(i);
                    break;
                }
            }
            pick.or(last_positive).expect("positive total implies a candidate")
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        taken[next] = true;
        let row = x.row(next);
        for (i, d) in d2.iter_mut().enumerate() {
            let nd = sq_dist(x.row(i), row);
            if nd < *d {
                *d = nd;
            }
        }
    }
    Ok(chosen)
}

/// k-means++ initial centers.
pub fn kmeanspp_seed(x: &Matrix, k: usize, seed: u64) -> Result<Centers> {
    let idx = kmeanspp_indices(x, k, &mut rng_from_seed(seed))?;
    Centers::new(x.select_rows(&idx))
}

/// `k` distinct rows chosen uniformly at random.
pub fn random_rows_seed(x: &Matrix, k: usize, seed: u64) -> Result<Centers> {
    check_k(x, k)?;
    let idx = sample(&mut rng_from_seed(seed), x.rows(), k).into_vec();
    Centers::new(x.select_rows(&idx))
}

pub fn initial_centers(x: &Matrix, k: usize, method: InitMethod, seed: u64) -> Result<Centers> {
    match method {
        InitMethod::KMeansPlusPlus => kmeanspp_seed(x, k, seed),
        InitMethod::RandomRows => random_rows_seed(x, k, seed),
    }
}

#[inline]
fn nearest(row: &[f64], c: &Centers) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = sq_dist(row, c.center(0));
    for j in 1..c.k() {
        let d = sq_dist(row, c.center(j));
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    (best, best_d)
}

fn assign_with_cost(x: &Matrix, c: &Centers) -> (Vec<usize>, f64) {
    let mut cost = 0.0;
    let labels = x
        .row_iter()
        .map(|r| {
            let (j, d) = nearest(r, c);
            cost += d;
            j
        })
        .collect();
    (labels, cost)
}

/// Nearest-center label per point.
pub fn assign(x: &Matrix, c: &Centers) -> Result<Labeling> {
    check_dims(x, c)?;
    Labeling::new(assign_with_cost(x, c).0, c.k())
}

/// Sum over points of the squared distance to the nearest center.
pub fn cost(x: &Matrix, c: &Centers) -> Result<f64> {
    check_dims(x, c)?;
    Ok(assign_with_cost(x, c).1)
}

/// Per-cluster means of the labeled points.
///
/// An empty cluster takes the point farthest from the center of the cluster
/// it is currently assigned to (lowest index on ties); that point is then
/// excluded from further re-seeding. Empty clusters are processed in id order.
pub fn update_centers(x: &Matrix, labels: &Labeling, k: usize) -> Result<Centers> {
    if labels.len() != x.rows() {
        return Err(Error::domain(format!(
            "{} labels for {} points",
            labels.len(),
            x.rows()
        )));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let d = x.cols();
    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (row, &l) in x.row_iter().zip(labels.as_slice()) {
        if l >= k {
            return Err(Error::domain(format!("label {l} is not below k = {k}")));
        }
        counts[l] += 1;
        for (s, v) in sums[l * d..(l + 1) * d].iter_mut().zip(row) {
            *s += v;
        }
    }
    for j in 0..k {
        if counts[j] > 0 {
            let n = counts[j] as f64;
            sums[j * d..(j + 1) * d].iter_mut().for_each(|s| *s /= n);
        }
    }

    if counts.contains(&0) {
        let mut far: Vec<f64> = x
            .row_iter()
            .zip(labels.as_slice())
            .map(|(r, &l)| sq_dist(r, &sums[l * d..(l + 1) * d]))
            .collect();
        for j in 0..k {
            if counts[j] > 0 {
                continue;
            }
            let pick = argmax_available(&far).ok_or_else(|| {
                Error::domain(format!("cannot re-seed empty cluster {j}: too few points"))
            })?;
            sums[j * d..(j + 1) * d].copy_from_slice(x.row(pick));
            far[pick] = f64::NEG_INFINITY;
        }
    }
    Centers::new(Matrix::new(k, d, sums)?)
}

/// Index of the largest finite entry, lowest index on ties.
pub(crate) fn argmax_available(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v == f64::NEG_INFINITY {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Lloyd iterations from `init`.
///
/// Each iteration recomputes centers from the current labels and reassigns
/// points. The loop stops when labels no longer change, when every center
/// moves less than `tol · (1 + ‖center‖)`, or after `max_iters` iterations.
pub fn lloyd(x: &Matrix, init: &Centers, cfg: &LloydConfig) -> Result<ClusteringResult> {
    check_dims(x, init)?;
    cfg.validate().map_err(|e| Error::Domain(e.to_string()))?;
    if x.rows() == 0 {
        return Err(Error::domain("cannot cluster zero points"));
    }
    let k = init.k();
    let mut centers = init.clone();
    let (mut labels, c0) = assign_with_cost(x, &centers);
    let mut history = vec![c0];
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iters {
        iterations = it;
        let new_centers = update_centers(x, &Labeling::new(labels.clone(), k)?, k)?;
        let (new_labels, c) = assign_with_cost(x, &new_centers);
        history.push(c);
        let settled = (0..k).all(|j| {
            let old = centers.center(j);
            let shift = sq_dist(old, new_centers.center(j)).sqrt();
            let norm = old.iter().map(|v| v * v).sum::<f64>().sqrt();
            shift < cfg.tol * (1.0 + norm)
        });
        let unchanged = new_labels == labels;
        centers = new_centers;
        labels = new_labels;
        if unchanged || settled {
            converged = true;
            break;
        }
    }

    Ok(ClusteringResult {
        cost: *history.last().expect("history is never empty"),
        centers,
        labels: Labeling::new(labels, k)?,
        iterations,
        converged,
        cost_history: history,
    })
}

/// Seeded initialization followed by Lloyd iterations.
pub fn kmeans(x: &Matrix, k: usize, cfg: &LloydConfig, init: InitMethod) -> Result<ClusteringResult> {
    let c = initial_centers(x, k, init, cfg.seed)?;
    lloyd(x, &c, cfg)
}

/// Lowest-cost result over `restarts` independently seeded runs; restart `r`
/// uses seed `derive_seed(cfg.seed, [r])`. Ties keep the earliest restart.
pub fn best_of_restarts(
    x: &Matrix,
    k: usize,
    restarts: usize,
    cfg: &LloydConfig,
    init: InitMethod,
) -> Result<ClusteringResult> {
    if restarts == 0 {
        return Err(Error::domain("need at least one restart"));
    }
    let mut best: Option<ClusteringResult> = None;
    for r in 0..restarts {
        let run_cfg = LloydConfig {
            seed: derive_seed(cfg.seed, &[r as u64]),
            ..*cfg
        };
        let res = kmeans(x, k, &run_cfg, init)?;
        if best.as_ref().is_none_or(|b| res.cost < b.cost) {
            best = Some(res);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn naive_cost(x: &Matrix, c: &Centers) -> f64 {
        let mut total = 0.0;
        for i in 0..x.rows() {
            let mut best = f64::INFINITY;
            for j in 0..c.k() {
                let mut s = 0.0;
                for t in 0..x.cols() {
                    s += (x.get(i, t) - c.center(j)[t]).powi(2);
                }
                best = best.min(s);
            }
            total += best;
        }
        total
    }

    /// Optimal k-means cost by enumerating set partitions into at most k blocks.
    fn brute_force_optimum(x: &Matrix, k: usize) -> f64 {
        fn rec(x: &Matrix, k: usize, labels: &mut Vec<usize>, used: usize, best: &mut f64) {
            let i = labels.len();
            if i == x.rows() {
                let l = Labeling::new(labels.clone(), k).unwrap();
                let mut total = 0.0;
                for j in 0..used {
                    let members: Vec<usize> = (0..i).filter(|&p| l.as_slice()[p] == j).collect();
                    let sub = x.select_rows(&members);
                    let mu = crate::matrix::mean_rows(&sub).unwrap();
                    total += sub.row_iter().map(|r| sq_dist(r, &mu)).sum::<f64>();
                }
                *best = best.min(total);
                return;
            }
            for j in 0..(used + 1).min(k) {
                labels.push(j);
                rec(x, k, labels, used.max(j + 1), best);
                labels.pop();
            }
        }
        let mut best = f64::INFINITY;
        rec(x, k, &mut Vec::new(), 0, &mut best);
        best
    }

    #[test]
    fn labeling_validation() {
        assert!(Labeling::new(vec![0, 2], 2).is_err());
        assert!(Labeling::new(vec![], 0).is_err());
        let a = Labeling::new(vec![1, 1, 0, 2], 3).unwrap();
        let b = Labeling::new(vec![2, 2, 1, 0], 3).unwrap();
        assert!(a.same_partition(&b));
        assert_eq!(a.counts(), vec![1, 2, 1]);
        assert!(!a.same_partition(&Labeling::new(vec![0, 1, 0, 2], 3).unwrap()));
    }

    #[test]
    fn kmeanspp_k_equals_n_is_permutation() {
        let x = m(&[&[0.0], &[1.0], &[5.0], &[5.0], &[9.0]]);
        let idx = kmeanspp_indices(&x, 5, &mut rng_from_seed(3)).unwrap();
        let mut sorted = idx.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        assert!(kmeanspp_seed(&x, 6, 0).is_err());
        assert!(kmeanspp_seed(&x, 0, 0).is_err());
    }

    #[test]
    fn kmeanspp_first_pick_is_uniform() {
        let x = m(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[3.0, 3.0]]);
        let mut freq = [0usize; 4];
        for s in 0..10_000u64 {
            let idx = kmeanspp_indices(&x, 1, &mut rng_from_seed(s)).unwrap();
            freq[idx[0]] += 1;
        }
        for f in freq {
            let p = f as f64 / 10_000.0;
            assert!((0.22..=0.28).contains(&p), "frequency {p}");
        }
    }

    #[test]
    fn kmeanspp_prefers_far_point() {
        // ten points within unit distance of the origin and one at distance 1000
        let mut rows: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![(i as f64 * 0.7).cos() * 0.5, (i as f64 * 0.7).sin() * 0.5])
            .collect();
        rows.push(vec![1000.0, 0.0]);
        let x = Matrix::from_rows(&rows).unwrap();
        let mut hits = 0;
        for s in 0..10_000u64 {
            let idx = kmeanspp_indices(&x, 2, &mut rng_from_seed(s)).unwrap();
            if idx.contains(&10) {
                hits += 1;
            }
        }
        assert!(hits as f64 / 10_000.0 >= 0.999, "hits {hits}");
    }

    #[test]
    fn random_rows_are_distinct() {
        let x = m(&[&[0.0], &[1.0], &[2.0], &[3.0]]);
        let c = random_rows_seed(&x, 4, 9).unwrap();
        let mut v = c.as_matrix().as_slice().to_vec();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn assign_examples() {
        let c = Centers::from_rows(&[[0.0, 0.0], [3.0, 1.0], [-2.0, 5.0]]).unwrap();
        let l = assign(c.as_matrix(), &c).unwrap();
        assert_eq!(l.as_slice(), &[0, 1, 2]);

        let x = m(&[&[0.0], &[1.0], &[9.0], &[10.0]]);
        let c = Centers::from_rows(&[[0.5], [9.5]]).unwrap();
        assert_eq!(assign(&x, &c).unwrap().as_slice(), &[0, 0, 1, 1]);

        let c = Centers::from_rows(&[[-1.0], [1.0]]).unwrap();
        assert_eq!(assign(&m(&[&[0.0]]), &c).unwrap().as_slice(), &[0]);
        assert!(assign(&m(&[&[0.0, 1.0]]), &c).is_err());
    }

    #[test]
    fn update_center_examples() {
        let x = m(&[&[0.0], &[1.0], &[9.0], &[10.0]]);
        let l = Labeling::new(vec![0, 0, 1, 1], 2).unwrap();
        let c = update_centers(&x, &l, 2).unwrap();
        assert_eq!(c.as_matrix().as_slice(), &[0.5, 9.5]);

        let l = Labeling::new(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(update_centers(&x, &l, 4).unwrap().as_matrix(), &x);
    }

    #[test]
    fn empty_cluster_takes_farthest_point() {
        let x = m(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[10.0, 0.0]]);
        let l = Labeling::new(vec![0, 0, 0, 0], 2).unwrap();
        let c = update_centers(&x, &l, 2).unwrap();
        assert_eq!(c.center(0), &[3.25, 0.0]);
        // oracle: distances to center 0
        let far = (0..4)
            .max_by(|&a, &b| sq_dist(x.row(a), &[3.25, 0.0]).total_cmp(&sq_dist(x.row(b), &[3.25, 0.0])))
            .unwrap();
        assert_eq!(c.center(1), x.row(far));

        // two empty clusters get distinct points
        let c = update_centers(&x, &Labeling::new(vec![0; 4], 3).unwrap(), 3).unwrap();
        assert_eq!(c.center(1), &[10.0, 0.0]);
        assert_eq!(c.center(2), &[0.0, 0.0]);
    }

    #[test]
    fn cost_examples() {
        let c = Centers::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(cost(c.as_matrix(), &c).unwrap(), 0.0);
        let c = Centers::from_rows(&[[1.0]]).unwrap();
        assert_eq!(cost(&m(&[&[0.0], &[2.0]]), &c).unwrap(), 2.0);
        assert!(cost(&m(&[&[0.0, 2.0]]), &c).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data: Vec<f64> = (0..24).map(|_| rng.random_range(-4.0..4.0)).collect();
        let x = Matrix::new(8, 3, data).unwrap();
        let c = kmeanspp_seed(&x, 3, 1).unwrap();
        let a = cost(&x, &c).unwrap();
        let b = naive_cost(&x, &c);
        assert!((a - b).abs() <= 1e-10 * b.max(1.0));
    }

    #[test]
    fn lloyd_fixed_point_converges_immediately() {
        let x = m(&[&[0.0], &[1.0], &[9.0], &[10.0]]);
        let c = Centers::from_rows(&[[0.5], [9.5]]).unwrap();
        let r = lloyd(&x, &c, &LloydConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.labels.as_slice(), &[0, 0, 1, 1]);
    }

    #[test]
    fn lloyd_reaches_brute_force_optimum() {
        let x = m(&[&[0.0], &[1.0], &[9.0], &[10.0]]);
        let c = Centers::from_rows(&[[0.0], [10.0]]).unwrap();
        let r = lloyd(&x, &c, &LloydConfig::default()).unwrap();
        assert_eq!(r.centers.as_matrix().as_slice(), &[0.5, 9.5]);
        assert_eq!(r.cost, 1.0);
        assert_eq!(brute_force_optimum(&x, 2), 1.0);
    }

    #[test]
    fn lloyd_cost_is_monotone_and_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..30u64 {
            let mut rows = Vec::new();
            for b in 0..4 {
                for _ in 0..15 {
                    rows.push(vec![
                        b as f64 * 3.0 + rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                    ]);
                }
            }
            let x = Matrix::from_rows(&rows).unwrap();
            let init = random_rows_seed(&x, 4, trial).unwrap();
            let r = lloyd(&x, &init, &LloydConfig { tol: 0.0, ..Default::default() }).unwrap();
            for w in r.cost_history.windows(2) {
                assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0));
            }
            let again = cost(&x, &r.centers).unwrap();
            assert!((again - r.cost).abs() <= 1e-9 * again.max(1.0));
            assert_eq!(assign(&x, &r.centers).unwrap(), r.labels);
        }
    }

    #[test]
    fn lloyd_never_beats_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in 0..10u64 {
            let data: Vec<f64> = (0..9 * 2).map(|_| rng.random_range(-5.0..5.0)).collect();
            let x = Matrix::new(9, 2, data).unwrap();
            let opt = brute_force_optimum(&x, 3);
            let r = kmeans(&x, 3, &LloydConfig { seed: s, ..Default::default() }, InitMethod::KMeansPlusPlus)
                .unwrap();
            assert!(r.cost >= opt - 1e-9);
        }
    }

    #[test]
    fn permutation_invariance_of_cost() {
        let x = m(&[&[0.0, 1.0], &[2.0, 2.0], &[7.0, 1.0], &[3.0, 3.0]]);
        let c = Centers::from_rows(&[[0.0, 0.0], [5.0, 5.0], [7.0, 0.0]]).unwrap();
        let p = Centers::from_rows(&[[7.0, 0.0], [0.0, 0.0], [5.0, 5.0]]).unwrap();
        assert_eq!(cost(&x, &c).unwrap(), cost(&x, &p).unwrap());
    }

    #[test]
    fn best_of_restarts_is_no_worse_than_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<f64> = (0..60).map(|_| rng.random_range(-5.0..5.0)).collect();
        let x = Matrix::new(30, 2, data).unwrap();
        let cfg = LloydConfig { seed: 11, ..Default::default() };
        let best = best_of_restarts(&x, 4, 5, &cfg, InitMethod::KMeansPlusPlus).unwrap();
        let first = kmeans(
            &x,
            4,
            &LloydConfig { seed: derive_seed(11, &[0]), ..cfg },
            InitMethod::KMeansPlusPlus,
        )
        .unwrap();
        assert!(best.cost <= first.cost);
        assert!(best_of_restarts(&x, 4, 0, &cfg, InitMethod::KMeansPlusPlus).is_err());
    }

    #[test]
    fn assign_is_idempotent_at_fixed_point() {
        let x = m(&[&[0.0], &[1.0], &[4.0], &[9.0], &[10.0]]);
        let r = kmeans(&x, 2, &LloydConfig::default(), InitMethod::KMeansPlusPlus).unwrap();
        let l = assign(&x, &r.centers).unwrap();
        assert_eq!(l, assign(&x, &r.centers).unwrap());
        let c = update_centers(&x, &l, 2).unwrap();
        for (a, b) in c.as_matrix().as_slice().iter().zip(r.centers.as_matrix().as_slice()) {
            assert!((a - b).abs() <= 1e-6 * (1.0 + b.abs()));
        }
    }
}
