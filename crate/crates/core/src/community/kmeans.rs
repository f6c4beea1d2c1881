use crate::rng::{RngSeed, Stream};
use crate::{Error, Result};

/// Outcome of [`kmeans`].
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    /// Within-cluster sum of squares of the best restart.
    pub cost: f64,
    /// Cost after every Lloyd iteration of the best restart.
    pub cost_trace: Vec<f64>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Within-cluster sum of squares of an assignment, using cluster means.
pub fn wcss(points: &[Vec<f64>], assignment: &[usize], k: usize) -> f64 {
    let centers = means(points, assignment, k);
    points
        .iter()
        .zip(assignment)
        .map(|(p, &a)| squared_distance(p, &centers[a]))
        .sum()
}

fn means(points: &[Vec<f64>], assignment: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignment) {
        counts[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            for x in s.iter_mut() {
                *x /= c as f64;
            }
        }
    }
    sums
}

fn seed_centers(points: &[Vec<f64>], k: usize, stream: &mut Stream) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![stream.below(n)];
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &points[chosen[0]]))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = stream.unit() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).expect("positive mass"))
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[stream.below(free.len())]
        };
        chosen.push(next);
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(squared_distance(p, &points[next]));
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = squared_distance(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Moves the farthest point of a multi-member cluster into every empty
/// cluster, making that point the new center.
fn repair_empty(points: &[Vec<f64>], assignment: &mut [usize], centers: &mut [Vec<f64>]) {
    let k = centers.len();
    loop {
        let mut counts = vec![0usize; k];
        for &a in assignment.iter() {
            counts[a] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far = None;
        let mut far_d = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            let a = assignment[i];
            if counts[a] < 2 {
                continue;
            }
            let d = squared_distance(p, &centers[a]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let i = far.expect("k <= number of points leaves a multi-member cluster");
        assignment[i] = empty;
        centers[empty] = points[i].clone();
    }
}

fn lloyd(
    points: &[Vec<f64>],
    k: usize,
    max_iters: usize,
    stream: &mut Stream,
) -> (Vec<usize>, Vec<Vec<f64>>, Vec<f64>) {
    let mut centers = seed_centers(points, k, stream);
    let mut assignment: Vec<usize> = vec![usize::MAX; points.len()];
    let mut trace = Vec::new();
    for _ in 0..max_iters.max(1) {
        let mut next: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
        repair_empty(points, &mut next, &mut centers);
        let changed = next != assignment;
        assignment = next;
        centers = means(points, &assignment, k);
        trace.push(
            points
                .iter()
                .zip(&assignment)
                .map(|(p, &a)| squared_distance(p, &centers[a]))
                .sum(),
        );
        if !changed {
            break;
        }
    }
    (assignment, centers, trace)
}

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs by
/// within-cluster sum of squares. Every cluster of the result is non-empty.
pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    restarts: usize,
    max_iters: usize,
    seed: RngSeed,
) -> Result<KMeansResult> {
    if k == 0 || k > points.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} clusters requested for {} points",
            points.len()
        )));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidParameter("points differ in dimension".into()));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite coordinate".into()));
    }
    let mut stream = seed.stream();
    let mut best: Option<KMeansResult> = None;
    for _ in 0..restarts.max(1) {
        let (assignment, centers, cost_trace) = lloyd(points, k, max_iters, &mut stream);
        let cost = *cost_trace.last().expect("at least one iteration");
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(KMeansResult {
                assignment,
                centers,
                cost,
                cost_trace,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(seed: u64) -> Vec<Vec<f64>> {
        let mut s = RngSeed::new(seed, 0).stream();
        let centers = [(0.0, 0.0), (4.0, 0.5), (1.5, 5.0)];
        (0..90)
            .map(|i| {
                let (cx, cy) = centers[i % 3];
                // Irwin-Hall approximation of a unit normal
                let mut g = || (0..12).map(|_| s.unit()).sum::<f64>() - 6.0;
                vec![cx + g(), cy + g()]
            })
            .collect()
    }

    #[test]
    fn separated_pairs() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![0.0, 0.1],
            vec![10.0, 10.0],
            vec![10.0, 10.1],
        ];
        let r = kmeans(&pts, 2, 5, 100, RngSeed::new(3, 0)).unwrap();
        assert_eq!(r.assignment[0], r.assignment[1]);
        assert_eq!(r.assignment[2], r.assignment[3]);
        assert_ne!(r.assignment[0], r.assignment[2]);
        assert!((r.cost - 0.01).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let r = kmeans(&pts, 6, 3, 50, RngSeed::new(0, 0)).unwrap();
        let mut a = r.assignment.clone();
        a.sort_unstable();
        assert_eq!(a, [0, 1, 2, 3, 4, 5]);
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn duplicate_points_still_fill_every_cluster() {
        let pts = vec![vec![1.0]; 5];
        let r = kmeans(&pts, 3, 2, 20, RngSeed::new(0, 0)).unwrap();
        let mut used = r.assignment.clone();
        used.sort_unstable();
        used.dedup();
        assert_eq!(used, [0, 1, 2]);
    }

    #[test]
    fn too_many_clusters() {
        assert!(kmeans(&[vec![0.0]], 2, 1, 10, RngSeed::new(0, 0)).is_err());
        assert!(kmeans(&[vec![0.0], vec![0.0, 1.0]], 1, 1, 10, RngSeed::new(0, 0)).is_err());
    }

    #[test]
    fn beats_random_assignments() {
        let pts = blobs(11);
        let r = kmeans(&pts, 3, 20, 200, RngSeed::new(5, 0)).unwrap();
        let mut s = RngSeed::new(99, 1).stream();
        for _ in 0..1000 {
            let a: Vec<usize> = (0..pts.len()).map(|_| s.below(3)).collect();
            assert!(r.cost <= wcss(&pts, &a, 3) + 1e-9);
        }
        assert!((wcss(&pts, &r.assignment, 3) - r.cost).abs() < 1e-9);
    }

    #[test]
    fn cost_never_increases() {
        for seed in 0..20 {
            let pts = blobs(seed);
            let mut stream = RngSeed::new(seed, 7).stream();
            for k in [2, 3, 5, 8] {
                let (_, _, trace) = lloyd(&pts, k, 200, &mut stream);
                for w in trace.windows(2) {
                    assert!(w[1] <= w[0] * (1.0 + 1e-12), "{trace:?}");
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let pts = blobs(4);
        let a = kmeans(&pts, 4, 5, 100, RngSeed::new(8, 2)).unwrap();
        let b = kmeans(&pts, 4, 5, 100, RngSeed::new(8, 2)).unwrap();
        assert_eq!(a, b);
    }
}
