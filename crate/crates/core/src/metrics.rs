//! External clustering scores: ACC, NMI, Purity, pairwise Precision and
//! F-score, and ARI.
//!
//! Everything is computed from the contingency table of predicted clusters
//! against true classes, so all scores are invariant to relabeling.
//! Label values need not be dense; they are re-indexed internally.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::reindex_dense;
use crate::{Error, Result};

/// NMI divides mutual information by the geometric mean of the entropies.
pub const NMI_NORMALIZATION: &str = "geometric";

/// `counts[j][c]` is the number of samples in predicted cluster `j` and true class `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<usize>,
    n_pred: usize,
    n_true: usize,
    pred_sums: Vec<usize>,
    true_sums: Vec<usize>,
    n: usize,
}

impl ContingencyTable {
    pub fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::invalid_argument(alloc::format!(
                "label vectors differ in length: {} vs {}",
                pred.len(),
                truth.len()
            )));
        }
        if pred.is_empty() {
            return Err(Error::invalid_argument("label vectors are empty"));
        }
        let pred = reindex_dense(pred);
        let truth = reindex_dense(truth);
        let n_pred = pred.n_classes();
        let n_true = truth.n_classes();
        let mut counts = vec![0; n_pred * n_true];
        let mut pred_sums = vec![0; n_pred];
        let mut true_sums = vec![0; n_true];
        for (&j, &c) in pred.as_slice().iter().zip(truth.as_slice()) {
            counts[j * n_true + c] += 1;
            pred_sums[j] += 1;
            true_sums[c] += 1;
        }
        Ok(ContingencyTable {
            counts,
            n_pred,
            n_true,
            pred_sums,
            true_sums,
            n: pred.len(),
        })
    }

    #[inline]
    pub fn get(&self, j: usize, c: usize) -> usize {
        self.counts[j * self.n_true + c]
    }

    pub fn n_pred(&self) -> usize {
        self.n_pred
    }

    pub fn n_true(&self) -> usize {
        self.n_true
    }

    pub fn pred_sums(&self) -> &[usize] {
        &self.pred_sums
    }

    pub fn true_sums(&self) -> &[usize] {
        &self.true_sums
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.iter().copied()
    }
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, O(n³)). Returns `assign[row] = col`.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be square");
    // 1-based arrays; column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut match_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        match_col[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = match_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if match_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        if match_col[j] != 0 {
            assign[match_col[j] - 1] = j - 1;
        }
    }
    assign
}

/// Best one-to-one matching accuracy.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(pred, truth)?;
    Ok(accuracy_from(&t))
}

fn accuracy_from(t: &ContingencyTable) -> f64 {
    let size = t.n_pred.max(t.n_true);
    let mut cost = vec![0.0; size * size];
    for j in 0..t.n_pred {
        for c in 0..t.n_true {
            cost[j * size + c] = -(t.get(j, c) as f64);
        }
    }
    let assign = min_cost_assignment(&cost, size);
    let matched: usize = (0..t.n_pred)
        .filter(|&j| assign[j] < t.n_true)
        .map(|j| t.get(j, assign[j]))
        .sum();
    matched as f64 / t.n as f64
}

fn entropy(sums: &[usize], n: usize) -> f64 {
    let n = n as f64;
    sums.iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * libm::log(p)
        })
        .sum()
}

pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(nmi_from(&ContingencyTable::new(pred, truth)?))
}

fn nmi_from(t: &ContingencyTable) -> f64 {
    let hp = entropy(&t.pred_sums, t.n);
    let ht = entropy(&t.true_sums, t.n);
    if hp == 0.0 && ht == 0.0 {
        return 1.0;
    }
    if hp == 0.0 || ht == 0.0 {
        return 0.0;
    }
    let n = t.n as f64;
    let mut mi = 0.0;
    for j in 0..t.n_pred {
        for c in 0..t.n_true {
            let njc = t.get(j, c);
            if njc == 0 {
                continue;
            }
            let njc = njc as f64;
            mi += njc / n * libm::log(n * njc / (t.pred_sums[j] as f64 * t.true_sums[c] as f64));
        }
    }
    (mi.max(0.0) / libm::sqrt(hp * ht)).min(1.0)
}

pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(purity_from(&ContingencyTable::new(pred, truth)?))
}

fn purity_from(t: &ContingencyTable) -> f64 {
    let hits: usize = (0..t.n_pred)
        .map(|j| (0..t.n_true).map(|c| t.get(j, c)).max().unwrap_or(0))
        .sum();
    hits as f64 / t.n as f64
}

/// Pair classification counts over all `N(N−1)/2` sample pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    /// same predicted cluster, same true class
    pub a: u64,
    /// same predicted cluster, different true class
    pub b: u64,
    /// different predicted cluster, same true class
    pub c: u64,
    /// different in both
    pub d: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }
}

#[inline]
fn choose2(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

pub fn pair_counts(pred: &[usize], truth: &[usize]) -> Result<PairCounts> {
    if pred.len() < 2 && pred.len() == truth.len() {
        return Err(Error::invalid_argument("pair counts need at least two samples"));
    }
    Ok(pair_counts_from(&ContingencyTable::new(pred, truth)?))
}

fn pair_counts_from(t: &ContingencyTable) -> PairCounts {
    let a: u64 = t.cells().map(choose2).sum();
    let same_pred: u64 = t.pred_sums.iter().map(|&s| choose2(s)).sum();
    let same_true: u64 = t.true_sums.iter().map(|&s| choose2(s)).sum();
    let total = choose2(t.n);
    let b = same_pred - a;
    let c = same_true - a;
    PairCounts {
        a,
        b,
        c,
        d: total - a - b - c,
    }
}

/// Pairwise precision and F-score (harmonic mean of pairwise precision and recall).
pub fn precision_fscore(pred: &[usize], truth: &[usize]) -> Result<(f64, f64)> {
    let pc = pair_counts(pred, truth)?;
    Ok(precision_fscore_from(&pc))
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn precision_fscore_from(pc: &PairCounts) -> (f64, f64) {
    let precision = ratio(pc.a, pc.a + pc.b);
    let recall = ratio(pc.a, pc.a + pc.c);
    let fscore = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, fscore)
}

pub fn ari(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(ari_from(&pair_counts(pred, truth)?))
}

fn ari_from(pc: &PairCounts) -> f64 {
    let total = pc.total() as f64;
    let index = pc.a as f64;
    let same_pred = (pc.a + pc.b) as f64;
    let same_true = (pc.a + pc.c) as f64;
    let expected = same_pred * same_true / total;
    let max_index = 0.5 * (same_pred + same_true);
    if max_index == expected {
        // only when both partitions are all-one-cluster or all-singletons
        return 1.0;
    }
    (index - expected) / (max_index - expected)
}

/// All six scores for one prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub acc: f64,
    pub nmi: f64,
    pub purity: f64,
    pub precision: f64,
    pub fscore: f64,
    pub ari: f64,
}

pub fn evaluate(pred: &[usize], truth: &[usize]) -> Result<MetricReport> {
    let t = ContingencyTable::new(pred, truth)?;
    if t.n < 2 {
        return Err(Error::invalid_argument("metrics need at least two samples"));
    }
    let pc = pair_counts_from(&t);
    let (precision, fscore) = precision_fscore_from(&pc);
    Ok(MetricReport {
        acc: accuracy_from(&t),
        nmi: nmi_from(&t),
        purity: purity_from(&t),
        precision,
        fscore,
        ari: ari_from(&pc),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: [usize; 4] = [0, 0, 1, 1];
    const T: [usize; 4] = [0, 1, 1, 1];
    const X: [usize; 4] = [0, 1, 0, 1];

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&P, &P).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 1, 0, 0], &P).unwrap(), 1.0);
        assert_eq!(accuracy(&P, &T).unwrap(), 0.75);
    }

    #[test]
    fn rectangular_tables() {
        // three predicted clusters against two classes
        assert_eq!(accuracy(&[0, 1, 2, 2], &[0, 0, 1, 1]).unwrap(), 0.75);
        assert_eq!(accuracy(&[0, 0, 0, 0], &[0, 1, 2, 3]).unwrap(), 0.25);
    }

    #[test]
    fn nmi_examples() {
        assert!((nmi(&P, &P).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(nmi(&[0, 0, 0, 0], &P).unwrap(), 0.0);
        assert_eq!(nmi(&[0, 0, 0], &[4, 4, 4]).unwrap(), 1.0);
        assert!(nmi(&P, &X).unwrap().abs() < 1e-12);
    }

    #[test]
    fn purity_examples() {
        assert_eq!(purity(&P, &P).unwrap(), 1.0);
        assert_eq!(purity(&P, &T).unwrap(), 0.75);
        assert_eq!(purity(&[0, 1, 2, 3], &T).unwrap(), 1.0);
    }

    #[test]
    fn pair_count_examples() {
        assert_eq!(pair_counts(&P, &P).unwrap(), PairCounts { a: 2, b: 0, c: 0, d: 4 });
        let pc = pair_counts(&[0, 1, 2, 3], &T).unwrap();
        assert_eq!((pc.a, pc.b), (0, 0));
        assert_eq!(pair_counts(&P, &T).unwrap(), PairCounts { a: 1, b: 1, c: 2, d: 2 });
    }

    #[test]
    fn precision_fscore_examples() {
        assert_eq!(precision_fscore(&P, &P).unwrap(), (1.0, 1.0));
        let (p, f) = precision_fscore(&P, &T).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((f - 0.4).abs() < 1e-12);
        assert_eq!(precision_fscore(&[0, 1, 2, 3], &T).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn ari_examples() {
        assert_eq!(ari(&P, &P).unwrap(), 1.0);
        assert_eq!(ari(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
        // index 0, expected 2/3, max 2
        assert!((ari(&P, &X).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn input_errors() {
        assert!(accuracy(&[0, 1], &[0]).is_err());
        assert!(accuracy(&[], &[]).is_err());
        assert!(pair_counts(&[0], &[0]).is_err());
        assert!(evaluate(&[0], &[0]).is_err());
    }

    #[test]
    fn hungarian_matches_brute_force() {
        use rand::Rng;
        let mut rng = crate::rng::seeded(17);
        for n in 1..=6 {
            for _ in 0..20 {
                let cost: Vec<f64> = (0..n * n).map(|_| rng.random_range(0..20) as f64).collect();
                let assign = min_cost_assignment(&cost, n);
                let got: f64 = assign.iter().enumerate().map(|(r, &c)| cost[r * n + c]).sum();
                let mut perm: Vec<usize> = (0..n).collect();
                let mut best = f64::INFINITY;
                permute(&mut perm, 0, &mut |p| {
                    best = best.min(p.iter().enumerate().map(|(r, &c)| cost[r * n + c]).sum());
                });
                assert_eq!(got, best);
            }
        }
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    fn labels(max_k: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        (2usize..40).prop_flat_map(move |n| {
            (
                proptest::collection::vec(0..max_k, n),
                proptest::collection::vec(0..max_k, n),
            )
        })
    }

    proptest! {
        #[test]
        fn relabeling_invariance((p, t) in labels(5), shift in 1usize..7) {
            let relabeled: Vec<usize> = p.iter().map(|&l| (l * 7 + shift) % 97).collect();
            let a = evaluate(&p, &t).unwrap();
            let b = evaluate(&relabeled, &t).unwrap();
            prop_assert!((a.acc - b.acc).abs() < 1e-12);
            prop_assert!((a.nmi - b.nmi).abs() < 1e-12);
            prop_assert!((a.ari - b.ari).abs() < 1e-12);
            prop_assert_eq!(a.purity, b.purity);
            prop_assert_eq!(a.fscore, b.fscore);
        }

        #[test]
        fn accuracy_bounded_by_purity((p, t) in labels(5)) {
            prop_assert!(accuracy(&p, &t).unwrap() <= purity(&p, &t).unwrap() + 1e-12);
        }

        #[test]
        fn pair_total_is_n_choose_2((p, t) in labels(6)) {
            let n = p.len() as u64;
            prop_assert_eq!(pair_counts(&p, &t).unwrap().total(), n * (n - 1) / 2);
        }

        #[test]
        fn ranges_and_self_maximum((p, t) in labels(4)) {
            let m = evaluate(&p, &t).unwrap();
            for v in [m.acc, m.nmi, m.purity, m.precision, m.fscore] {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
            }
            prop_assert!((-1.0..=1.0 + 1e-12).contains(&m.ari));
            let s = evaluate(&p, &p).unwrap();
            prop_assert_eq!(s.acc, 1.0);
            prop_assert!((s.nmi - 1.0).abs() < 1e-12);
            prop_assert_eq!(s.purity, 1.0);
            prop_assert!((s.ari - 1.0).abs() < 1e-12);
            // fscore/precision are 0 by convention when no pair shares a cluster
            if p.iter().collect::<alloc::collections::BTreeSet<_>>().len() < p.len() {
                prop_assert_eq!((s.precision, s.fscore), (1.0, 1.0));
            }
        }
    }
}
