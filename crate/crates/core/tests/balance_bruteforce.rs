use spclust_core::schatten::one_hot_value;

/// All ways to write `n` as an ordered sum of `k` nonnegative parts.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn is_balanced(parts: &[usize]) -> bool {
    parts.iter().max().unwrap() - parts.iter().min().unwrap() <= 1
}

#[test]
fn balanced_composition_uniquely_maximizes_schatten_power() {
    for n in [4, 6, 8] {
        for k in [2, 3] {
            for p in [0.5, 1.0, 1.5] {
                let all = compositions(n, k);
                let best = all
                    .iter()
                    .map(|c| one_hot_value(c, p))
                    .fold(f64::NEG_INFINITY, f64::max);
                for c in &all {
                    let v = one_hot_value(c, p);
                    if is_balanced(c) {
                        assert!(
                            (v - best).abs() <= 1e-12,
                            "balanced {c:?} not maximal for n={n} k={k} p={p}"
                        );
                    } else {
                        assert!(
                            v < best - 1e-12,
                            "{c:?} ties the balanced optimum for n={n} k={k} p={p}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn frobenius_case_is_flat() {
    // p = 2 gives Σ n_j = N for every composition
    for c in compositions(6, 3) {
        assert_eq!(one_hot_value(&c, 2.0), 6.0);
    }
}
