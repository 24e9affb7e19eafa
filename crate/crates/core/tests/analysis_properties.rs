mod common;

use bunkbed::analysis::{bbc_gap_exact, gap_polynomial_per_edge, gap_polynomial_univariate};
use bunkbed::graph::BunkbedInstance;
use bunkbed::rational::{int, rat};
use common::{below, random_connected, random_graph, rng, small_prob};

#[test]
fn pole_swap_keeps_the_gap() {
    let mut r = rng(20);
    for _ in 0..20 {
        let g = random_graph(&mut r, 5, 6, small_prob);
        let t: Vec<usize> = (0..5).filter(|_| below(&mut r, 2) == 0).collect();
        let forward = bbc_gap_exact(&BunkbedInstance::new(g.clone(), t.iter().copied(), 0, 3).unwrap()).unwrap();
        let back = bbc_gap_exact(&BunkbedInstance::new(g, t, 3, 0).unwrap()).unwrap();
        assert_eq!(forward.p_same, back.p_same);
        assert_eq!(forward.p_cross, back.p_cross);
    }
}

#[test]
fn per_edge_polynomial_collapses_to_univariate() {
    let mut r = rng(21);
    for _ in 0..8 {
        let g = random_connected(&mut r, 5, 2);
        let t: Vec<usize> = (0..5).filter(|_| below(&mut r, 2) == 0).collect();
        let b = BunkbedInstance::new(g, t, 0, 4).unwrap();
        let uni = gap_polynomial_univariate(&b).unwrap();
        let multi = gap_polynomial_per_edge(&b).unwrap();
        assert_eq!(multi.to_univariate(), uni);
    }
}

#[test]
fn univariate_polynomial_matches_exact_gaps() {
    let mut r = rng(22);
    for _ in 0..6 {
        let g = random_connected(&mut r, 5, 3);
        let b = BunkbedInstance::new(g.clone(), [1, 3], 0, 4).unwrap();
        let poly = gap_polynomial_univariate(&b).unwrap();
        assert!(poly.degree().unwrap_or(0) <= 2 * g.edge_count());
        assert_eq!(poly.eval(&int(0)), int(0));
        assert_eq!(poly.eval(&int(1)), int(0));
        for p in [rat(1, 5), rat(1, 2), rat(7, 9)] {
            let exact = bbc_gap_exact(&BunkbedInstance::new(g.with_uniform_probability(&p), [1, 3], 0, 4).unwrap())
                .unwrap();
            assert_eq!(Some(&poly.eval(&p)), exact.exact_gap());
        }
    }
}
