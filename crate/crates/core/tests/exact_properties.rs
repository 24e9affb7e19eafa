mod common;

use bunkbed::exact::{check_hk, connect_prob_exact, connect_prob_exact_with, terminal_kernel_exact, EnumOptions};
use bunkbed::rational::{int, rat};
use common::{below, random_graph, rng, small_prob};

#[test]
fn harris_kleitman_on_random_graphs() {
    let mut r = rng(1);
    for _ in 0..50 {
        let g = random_graph(&mut r, 5, 5, small_prob);
        let k = terminal_kernel_exact(&g, 0, 1, 2).unwrap();
        assert!(check_hk(&k), "{k:?}");
        let total: bunkbed::Rational = k.to_array().iter().sum();
        assert_eq!(total, int(1));
    }
}

#[test]
fn contraction_does_not_change_connection() {
    let mut r = rng(2);
    for _ in 0..20 {
        let g = random_graph(&mut r, 6, 9, |r| match below(r, 4) {
            0 => int(1),
            1 => int(0),
            _ => small_prob(r),
        });
        let on = connect_prob_exact(&g, 0, 5).unwrap();
        let off = connect_prob_exact_with(&g, 0, 5, EnumOptions { contract: false, ..Default::default() }).unwrap();
        assert_eq!(on, off);
    }
}

#[test]
fn connection_is_monotone_in_p() {
    let mut r = rng(3);
    for _ in 0..10 {
        let g = random_graph(&mut r, 5, 7, |_| rat(1, 2));
        let values: Vec<_> = [rat(1, 4), rat(1, 2), rat(3, 4)]
            .iter()
            .map(|p| connect_prob_exact(&g.with_uniform_probability(p), 0, 4).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]), "{values:?}");
    }
}

#[test]
fn workers_give_identical_results() {
    let mut r = rng(4);
    let g = random_graph(&mut r, 7, 14, small_prob);
    let one = connect_prob_exact(&g, 0, 6).unwrap();
    let four = connect_prob_exact_with(&g, 0, 6, EnumOptions { workers: 4, ..Default::default() }).unwrap();
    assert_eq!(one, four);
}
