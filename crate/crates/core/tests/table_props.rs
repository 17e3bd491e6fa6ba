use std::collections::BTreeMap;

use iloca::engine::ClusterMap;
use iloca::table::{
    altham_hack, altham_index, chi_square_independence, enumerate_log_odds, ContingencyTable,
};
use proptest::prelude::*;

/// Brute-force enumeration over every row pair and column pair.
fn oracle(t: &ContingencyTable) -> BTreeMap<(usize, usize, usize, usize), (f64, f64)> {
    let c = t.counts();
    let n = t.cols();
    let mut out = BTreeMap::new();
    for i in 0..t.rows() {
        for k in i + 1..t.rows() {
            for j in 0..n {
                for l in j + 1..n {
                    let (a, b, cc, d) = (c[i * n + j], c[k * n + l], c[i * n + l], c[k * n + j]);
                    if a > 0.0 && b > 0.0 && cc > 0.0 && d > 0.0 {
                        let theta = a * b / (cc * d);
                        out.insert((i, k, j, l), (theta, theta.ln()));
                    }
                }
            }
        }
    }
    out
}

fn table_strategy(rows: usize, cols: usize, max: u32) -> impl Strategy<Value = ContingencyTable> {
    prop::collection::vec(0..=max, rows * cols).prop_map(move |v| {
        let counts: Vec<f64> = v.into_iter().map(f64::from).collect();
        ContingencyTable::from_counts(rows, cols, &counts).unwrap()
    })
}

fn sorted_abs_phi(t: &ContingencyTable) -> Vec<f64> {
    let mut v: Vec<f64> = enumerate_log_odds(t).iter().map(|r| r.abs_phi).collect();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn enumeration_matches_brute_force(t in table_strategy(5, 4, 9)) {
        let got: BTreeMap<_, _> = enumerate_log_odds(&t)
            .into_iter()
            .map(|r| (r.key(), (r.theta, r.phi)))
            .collect();
        let want = oracle(&t);
        prop_assert_eq!(got.len(), want.len());
        for (key, (theta, phi)) in &want {
            let (g_theta, g_phi) = got[key];
            prop_assert_eq!(g_theta, *theta);
            prop_assert!((g_phi - phi).abs() <= 1e-12);
        }
    }

    #[test]
    fn theta_identities(t in table_strategy(5, 4, 50)) {
        for r in enumerate_log_odds(&t) {
            let [a_ij, a_kj, a_il, a_kl] = r.values;
            prop_assert!((r.phi.exp() - r.theta).abs() <= 1e-12 * r.theta);
            let lhs = r.theta * a_il * a_kj;
            let rhs = a_ij * a_kl;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }

    #[test]
    fn swaps_leave_statistics_invariant(
        t in table_strategy(5, 4, 30).prop_filter("positive marginals", |t| {
            t.row_totals().iter().chain(t.col_totals().iter()).all(|&x| x > 0.0)
        }),
        a in 0usize..5, b in 0usize..5, c in 0usize..4, d in 0usize..4,
    ) {
        let mut s = t.clone();
        s.swap_rows(a, b);
        s.swap_cols(c, d);
        let (x, y) = (sorted_abs_phi(&t), sorted_abs_phi(&s));
        prop_assert_eq!(x.len(), y.len());
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
        let (lt, ls) = (
            altham_index(&enumerate_log_odds(&t)).l,
            altham_index(&enumerate_log_odds(&s)).l,
        );
        prop_assert!((lt - ls).abs() <= 1e-9 * lt.max(1.0));
        let (ct, cs) = (chi_square_independence(&t).unwrap(), chi_square_independence(&s).unwrap());
        prop_assert!((ct.statistic - cs.statistic).abs() <= 1e-9 * ct.statistic.max(1.0));
        prop_assert!((ct.p_value - cs.p_value).abs() <= 1e-9);
    }

    #[test]
    fn rank_one_tables_are_independent(
        rows in 2usize..=10,
        cols in 2usize..=8,
        seed in prop::collection::vec(1u32..=40, 18),
    ) {
        let r: Vec<f64> = seed[..rows].iter().map(|&x| f64::from(x)).collect();
        let c: Vec<f64> = seed[10..10 + cols].iter().map(|&x| f64::from(x) / 3.0).collect();
        let counts: Vec<f64> = r.iter().flat_map(|a| c.iter().map(move |b| a * b)).collect();
        let t = ContingencyTable::from_counts(rows, cols, &counts).unwrap();
        let ratios = enumerate_log_odds(&t);
        prop_assert!(ratios.iter().all(|x| x.abs_phi <= 1e-9));
        prop_assert!(altham_index(&ratios).l <= 1e-15);
        prop_assert!(chi_square_independence(&t).unwrap().statistic <= 1e-9);
    }

    #[test]
    fn hack_without_clusters_is_plain_index(t in table_strategy(4, 4, 20)) {
        let map = ClusterMap::identity(&t);
        let hacked = altham_hack(&t, &map);
        let plain = altham_index(&enumerate_log_odds(&t));
        prop_assert_eq!(hacked.l.to_bits(), plain.l.to_bits());
        prop_assert_eq!(hacked.n_phi, plain.n_phi);
    }
}

#[test]
fn distinct_table_has_full_ratio_count() {
    let counts: Vec<f64> = (1..=40).map(f64::from).collect();
    let t = ContingencyTable::from_counts(8, 5, &counts).unwrap();
    // C(8,2) * C(5,2)
    assert_eq!(enumerate_log_odds(&t).len(), 28 * 10);
}
