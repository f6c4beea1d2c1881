//! Ground truths and seeded perturbations for the synthetic experiments.
//!
//! Each generator is a pure function of its inputs and an [`RngSeed`]; the
//! same seed reproduces the same labeling on every platform.

use crate::partition::Labeling;
use crate::rng::{RngSeed, Stream};
use crate::{Error, Result};

/// Shape of a ground-truth labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTruthKind {
    /// 32 equally sized clusters.
    Equal32,
    /// One cluster with half the objects, one with a quarter, and the rest
    /// spread over five more.
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundTruthSpec {
    pub kind: GroundTruthKind,
    pub n: usize,
}

impl GroundTruthSpec {
    pub fn equal_32(n: usize) -> Self {
        Self {
            kind: GroundTruthKind::Equal32,
            n,
        }
    }

    pub fn asymmetric(n: usize) -> Self {
        Self {
            kind: GroundTruthKind::Asymmetric,
            n,
        }
    }

    /// Cluster sizes in block order.
    pub fn cluster_sizes(&self) -> Result<Vec<usize>> {
        match self.kind {
            GroundTruthKind::Equal32 => {
                if self.n == 0 || !self.n.is_multiple_of(32) {
                    return Err(Error::InvalidParameter(format!(
                        "equal_32 ground truth needs n divisible by 32, got {}",
                        self.n
                    )));
                }
                Ok(vec![self.n / 32; 32])
            }
            GroundTruthKind::Asymmetric => {
                if self.n < 8 {
                    return Err(Error::InvalidParameter(format!(
                        "asymmetric ground truth needs n >= 8, got {}",
                        self.n
                    )));
                }
                let major = self.n / 2;
                let second = self.n / 4;
                let rest = self.n - major - second;
                let mut sizes = vec![major, second];
                // Larger parts first; parts that would be empty (n < 12) are dropped.
                sizes.extend(
                    (0..5)
                        .map(|i| rest / 5 + usize::from(i < rest % 5))
                        .filter(|&s| s > 0),
                );
                Ok(sizes)
            }
        }
    }
}

/// Block-ordered ground-truth labeling.
pub fn ground_truth(spec: GroundTruthSpec) -> Result<Labeling> {
    let sizes = spec.cluster_sizes()?;
    let labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(label, &size)| std::iter::repeat_n(label, size))
        .collect();
    Labeling::from_labels(&labels)
}

fn check_target(n: usize, c: usize) -> Result<()> {
    if c == 0 {
        return Err(Error::InvalidParameter(
            "target cluster count must be >= 1".into(),
        ));
    }
    if c > n {
        return Err(Error::CannotSplitBeyondSingletons { requested: c, n });
    }
    Ok(())
}

/// Assigns `n` objects to exactly `c` clusters: `c` random anchor objects
/// seed one cluster each and every other object picks a cluster uniformly.
pub fn random_reassign(n: usize, c: usize, seed: RngSeed) -> Result<Labeling> {
    if n == 0 {
        return Err(Error::EmptyLabeling);
    }
    check_target(n, c)?;
    let mut stream = seed.stream();
    let mut labels = vec![usize::MAX; n];
    for (label, object) in stream.sample_indices(n, c).into_iter().enumerate() {
        labels[object] = label;
    }
    for label in labels.iter_mut().filter(|l| **l == usize::MAX) {
        *label = stream.below(c);
    }
    Labeling::from_labels(&labels)
}

fn labeling_from_clusters(n: usize, clusters: &[Vec<usize>]) -> Result<Labeling> {
    let mut labels = vec![0usize; n];
    for (label, members) in clusters.iter().enumerate() {
        for &i in members {
            labels[i] = label;
        }
    }
    Labeling::from_labels(&labels)
}

/// Merges random cluster pairs (`c < M`) or splits random clusters (`c > M`)
/// until exactly `c` clusters remain.
pub fn merge_split(f: &Labeling, c: usize, seed: RngSeed) -> Result<Labeling> {
    check_target(f.n(), c)?;
    if c == f.num_clusters() {
        return Ok(f.clone());
    }
    let mut stream = seed.stream();
    let mut clusters = f.clusters();
    while clusters.len() > c {
        merge_random_pair(&mut clusters, &mut stream);
    }
    while clusters.len() < c {
        split_random_cluster(&mut clusters, &mut stream);
    }
    labeling_from_clusters(f.n(), &clusters)
}

fn merge_random_pair(clusters: &mut Vec<Vec<usize>>, stream: &mut Stream) {
    let m = clusters.len();
    let a = stream.below(m);
    let mut b = stream.below(m - 1);
    if b >= a {
        b += 1;
    }
    let absorbed = std::mem::take(&mut clusters[b]);
    clusters[a].extend(absorbed);
    clusters.swap_remove(b);
}

fn split_random_cluster(clusters: &mut Vec<Vec<usize>>, stream: &mut Stream) {
    let candidates: Vec<usize> = (0..clusters.len())
        .filter(|&i| clusters[i].len() >= 2)
        .collect();
    let chosen = candidates[stream.below(candidates.len())];
    let size = clusters[chosen].len();
    let moved = ((stream.unit() * size as f64).round() as usize).clamp(1, size - 1);
    let picks = stream.sample_indices(size, moved);
    let mut take = vec![false; size];
    for p in picks {
        take[p] = true;
    }
    let (new_cluster, kept): (Vec<usize>, Vec<usize>) = (0..size).partition(|&pos| take[pos]);
    let members = std::mem::take(&mut clusters[chosen]);
    clusters[chosen] = kept.into_iter().map(|pos| members[pos]).collect();
    clusters.push(new_cluster.into_iter().map(|pos| members[pos]).collect());
}

fn check_proportion(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "proportion {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Selects `round(p n)` random objects and permutes their labels among them.
/// Cluster sizes are preserved exactly.
pub fn shuffle_labels(f: &Labeling, p: f64, seed: RngSeed) -> Result<Labeling> {
    check_proportion(p)?;
    let n = f.n();
    let k = (p * n as f64).round() as usize;
    let mut stream = seed.stream();
    let selected = stream.sample_indices(n, k.min(n));
    let mut moved: Vec<usize> = selected.iter().map(|&i| f.label(i)).collect();
    stream.shuffle(&mut moved);
    let mut labels = f.labels().to_vec();
    for (&i, l) in selected.iter().zip(moved) {
        labels[i] = l;
    }
    Labeling::from_labels(&labels)
}

/// Selects `round(p n_out)` random objects outside `main_cluster` and gives
/// each a fresh label drawn uniformly from all clusters of `f`. Members of
/// `main_cluster` never move.
pub fn shuffle_outside_main(
    f: &Labeling,
    p: f64,
    main_cluster: usize,
    seed: RngSeed,
) -> Result<Labeling> {
    check_proportion(p)?;
    if main_cluster >= f.num_clusters() {
        return Err(Error::InvalidParameter(format!(
            "cluster {main_cluster} does not exist (labeling has {})",
            f.num_clusters()
        )));
    }
    let outside: Vec<usize> = (0..f.n()).filter(|&i| f.label(i) != main_cluster).collect();
    let k = ((p * outside.len() as f64).round() as usize).min(outside.len());
    let mut stream = seed.stream();
    let mut labels = f.labels().to_vec();
    for pos in stream.sample_indices(outside.len(), k) {
        labels[outside[pos]] = stream.below(f.num_clusters());
    }
    Labeling::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{resmi, Comparison, Measure, MeasureOptions};
    use crate::partition::pair_stats;
    use proptest::prelude::*;

    fn seed(s: u64) -> RngSeed {
        RngSeed::new(s, 0)
    }

    #[test]
    fn ground_truth_shapes() {
        let g = ground_truth(GroundTruthSpec::equal_32(1024)).unwrap();
        assert_eq!(g.cluster_sizes(), vec![32; 32]);
        assert_eq!(g.label(0), 0);
        assert_eq!(g.label(1023), 31);

        let small = ground_truth(GroundTruthSpec::equal_32(64)).unwrap();
        assert_eq!(small.cluster_sizes(), vec![2; 32]);

        let asym = ground_truth(GroundTruthSpec::asymmetric(1024)).unwrap();
        assert_eq!(asym.cluster_sizes(), vec![512, 256, 52, 51, 51, 51, 51]);

        assert!(ground_truth(GroundTruthSpec::equal_32(100)).is_err());
        assert!(ground_truth(GroundTruthSpec::asymmetric(7)).is_err());
        assert_eq!(
            ground_truth(GroundTruthSpec::asymmetric(8))
                .unwrap()
                .cluster_sizes(),
            vec![4, 2, 1, 1]
        );
    }

    #[test]
    fn random_reassign_endpoints() {
        assert_eq!(random_reassign(1024, 1, seed(1)).unwrap().num_clusters(), 1);
        let all = random_reassign(1024, 1024, seed(1)).unwrap();
        assert_eq!(all.num_clusters(), 1024);
        assert!(random_reassign(10, 11, seed(1)).is_err());
        assert!(random_reassign(10, 0, seed(1)).is_err());
    }

    #[test]
    fn random_reassign_near_zero_similarity() {
        let truth = ground_truth(GroundTruthSpec::equal_32(1024)).unwrap();
        let g = random_reassign(1024, 32, seed(3)).unwrap();
        assert_eq!(g.num_clusters(), 32);
        let value = resmi(&pair_stats(&truth, &g).unwrap()).value;
        assert!(value < 0.01, "ResMI {value}");
    }

    #[test]
    fn merge_split_identity_and_endpoints() {
        let truth = ground_truth(GroundTruthSpec::equal_32(1024)).unwrap();
        assert_eq!(merge_split(&truth, 32, seed(0)).unwrap(), truth);

        let one = merge_split(&truth, 1, seed(0)).unwrap();
        assert_eq!(one.num_clusters(), 1);
        let c = Comparison::new(&truth, &one).unwrap();
        let opts = MeasureOptions::default();
        for m in [Measure::Ami, Measure::Ari, Measure::ResMi] {
            assert!(c.evaluate(m, &opts).unwrap().value.abs() < 1e-12);
        }

        let all = merge_split(&truth, 1024, seed(0)).unwrap();
        assert_eq!(all.num_clusters(), 1024);
        assert_eq!(resmi(&pair_stats(&truth, &all).unwrap()).value, 0.0);

        let err = merge_split(&truth, 1025, seed(0)).unwrap_err();
        assert!(err
            .to_string()
            .starts_with("cannot split beyond singletons"));
    }

    #[test]
    fn shuffle_endpoints() {
        let truth = ground_truth(GroundTruthSpec::equal_32(1024)).unwrap();
        assert_eq!(shuffle_labels(&truth, 0.0, seed(0)).unwrap(), truth);
        let full = shuffle_labels(&truth, 1.0, seed(0)).unwrap();
        assert!(resmi(&pair_stats(&truth, &full).unwrap()).value < 0.01);
        assert!(shuffle_labels(&truth, 1.5, seed(0)).is_err());
    }

    #[test]
    fn shuffle_outside_main_behaviour() {
        let truth = ground_truth(GroundTruthSpec::asymmetric(1024)).unwrap();
        assert_eq!(
            shuffle_outside_main(&truth, 0.0, 0, seed(0)).unwrap(),
            truth
        );
        let moved = shuffle_outside_main(&truth, 1.0, 0, seed(0)).unwrap();
        for i in 0..512 {
            assert_eq!(moved.label(i), 0);
        }
        let changed = (512..1024)
            .filter(|&i| moved.label(i) != truth.label(i))
            .count();
        // fresh uniform labels: about 6/7 of the moved objects change cluster
        assert!(changed > 350, "{changed}");
        assert!(shuffle_outside_main(&truth, 0.5, 7, seed(0)).is_err());
    }

    #[test]
    fn deterministic() {
        let truth = ground_truth(GroundTruthSpec::equal_32(256)).unwrap();
        let s = RngSeed::new(42, 9);
        assert_eq!(
            random_reassign(256, 17, s).unwrap(),
            random_reassign(256, 17, s).unwrap()
        );
        assert_eq!(
            merge_split(&truth, 100, s).unwrap(),
            merge_split(&truth, 100, s).unwrap()
        );
        assert_eq!(
            shuffle_labels(&truth, 0.3, s).unwrap(),
            shuffle_labels(&truth, 0.3, s).unwrap()
        );
        assert_ne!(
            random_reassign(256, 17, s).unwrap(),
            random_reassign(256, 17, s.with_stream(10)).unwrap()
        );
    }

    /// Every cluster of `fine` lies inside one cluster of `coarse`.
    fn refines(fine: &Labeling, coarse: &Labeling) -> bool {
        fine.clusters().iter().all(|members| {
            members
                .iter()
                .all(|&i| coarse.label(i) == coarse.label(members[0]))
        })
    }

    fn sorted_sizes(l: &Labeling) -> Vec<u64> {
        let mut s = l.cluster_sizes();
        s.sort_unstable();
        s
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_reassign_has_exactly_c(n in 1usize..300, frac in 0.0f64..1.0, s in any::<u64>()) {
            let c = 1 + ((n - 1) as f64 * frac) as usize;
            prop_assert_eq!(random_reassign(n, c, seed(s)).unwrap().num_clusters(), c);
        }

        #[test]
        fn merge_split_coarsens_or_refines(c in 1usize..=256, s in any::<u64>()) {
            let truth = ground_truth(GroundTruthSpec::equal_32(256)).unwrap();
            let out = merge_split(&truth, c, seed(s)).unwrap();
            prop_assert_eq!(out.num_clusters(), c);
            if c < 32 {
                prop_assert!(refines(&truth, &out));
            } else {
                prop_assert!(refines(&out, &truth));
            }
        }

        #[test]
        fn shuffle_preserves_sizes(p in 0.0f64..=1.0, s in any::<u64>()) {
            let truth = ground_truth(GroundTruthSpec::asymmetric(300)).unwrap();
            let out = shuffle_labels(&truth, p, seed(s)).unwrap();
            prop_assert_eq!(sorted_sizes(&out), sorted_sizes(&truth));
        }

        #[test]
        fn main_cluster_untouched(p in 0.0f64..=1.0, s in any::<u64>()) {
            let truth = ground_truth(GroundTruthSpec::asymmetric(200)).unwrap();
            let out = shuffle_outside_main(&truth, p, 0, seed(s)).unwrap();
            for i in 0..100 {
                prop_assert_eq!(out.label(i), 0);
            }
        }
    }
}
