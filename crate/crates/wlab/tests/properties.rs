//! Randomized structural invariants spanning the geometry, measure, energy,
//! spectral, and reference modules.

use proptest::prelude::*;
use wlab::energy::{dirichlet_solve, energy, harmonic_extend, resistance, Normalization};
use wlab::geometry::{vertex_chain, Word};
use wlab::measure::{cell_measure, integrate, Quadrature, WeightMode};
use wlab::reference::interval_resistance;
use wlab::spectral::{decimate_step, decimation_parent, direct_spectrum, Branch};
use wlab::WeierstrassParams;

fn params() -> impl Strategy<Value = WeierstrassParams> {
    (0.4..0.85f64, 3..=5usize)
        .prop_map(|(lambda, nb)| WeierstrassParams::new(lambda, nb, true).unwrap())
}

fn params_and_two_words() -> impl Strategy<Value = (WeierstrassParams, Word, Word)> {
    (0.4..0.85f64, 3..=5usize).prop_flat_map(|(lambda, nb)| {
        let p = WeierstrassParams::new(lambda, nb, true).unwrap();
        let letters = proptest::collection::vec(0..nb, 0..5);
        (Just(p), letters.clone(), letters)
            .prop_map(move |(p, a, b)| (p, Word::new(a, nb).unwrap(), Word::new(b, nb).unwrap()))
    })
}

fn params_and_boundary() -> impl Strategy<Value = (WeierstrassParams, Vec<f64>)> {
    (0.4..0.85f64, 3..=5usize).prop_flat_map(|(lambda, nb)| {
        let p = WeierstrassParams::new(lambda, nb, true).unwrap();
        (Just(p), proptest::collection::vec(-3.0..3.0f64, nb))
    })
}

fn params_and_chain_values(m: usize) -> impl Strategy<Value = (WeierstrassParams, Vec<f64>)> {
    (0.4..0.85f64, 3..=5usize).prop_flat_map(move |(lambda, nb)| {
        let p = WeierstrassParams::new(lambda, nb, true).unwrap();
        let len = p.chain_len(m).unwrap();
        (Just(p), proptest::collection::vec(-3.0..3.0f64, len))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_count_is_cells_times_base_plus_one((p, m) in (params(), 0..=4usize)) {
        let chain = vertex_chain(&p, m).unwrap();
        let cells = p.nb_pow(m).unwrap();
        prop_assert_eq!(chain.vertices().len(), (p.nb() - 1) * cells + 1);
        prop_assert_eq!(chain.boundary_indices().len(), p.nb());
    }

    #[test]
    fn raw_measure_is_multiplicative_over_concatenation(
        (p, head, tail) in params_and_two_words()
    ) {
        let combined = cell_measure(&p, &head.then(&tail), WeightMode::Raw).unwrap();
        let product = cell_measure(&p, &head, WeightMode::Raw).unwrap()
            * cell_measure(&p, &tail, WeightMode::Raw).unwrap();
        prop_assert!((combined - product).abs() <= 1e-12 * product.abs().max(1.0));
    }

    #[test]
    fn normalized_measures_partition_unity((p, m) in (params(), 0..=5usize)) {
        let cells = p.nb_pow(m).unwrap();
        let total: f64 = (0..cells)
            .map(|j| {
                cell_measure(&p, &Word::from_index(j, m, p.nb()), WeightMode::Normalized)
                    .unwrap()
            })
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quadrature_is_linear((p, u) in params_and_chain_values(2), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let v: Vec<f64> = u.iter().rev().cloned().collect();
        let combined: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = integrate(&p, 2, &combined, Quadrature::MeanValue).unwrap();
        let rhs = a * integrate(&p, 2, &u, Quadrature::MeanValue).unwrap()
            + b * integrate(&p, 2, &v, Quadrature::MeanValue).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn quadrature_is_monotone((p, u) in params_and_chain_values(2), bump in 0.0..1.0f64) {
        let v: Vec<f64> = u.iter().map(|x| x + bump).collect();
        let lower = integrate(&p, 2, &u, Quadrature::MeanValue).unwrap();
        let upper = integrate(&p, 2, &v, Quadrature::MeanValue).unwrap();
        prop_assert!(upper >= lower - 1e-12);
    }

    #[test]
    fn energy_is_quadratic_under_scaling((p, u) in params_and_chain_values(2), c in -3.0..3.0f64) {
        let scaled: Vec<f64> = u.iter().map(|x| c * x).collect();
        let base = energy(&p, 2, &u, Normalization::Scaling).unwrap();
        let e = energy(&p, 2, &scaled, Normalization::Scaling).unwrap();
        prop_assert!((e - c * c * base).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn harmonic_extension_minimizes_energy(
        (p, u) in params_and_chain_values(1),
        vertex_seed in 0usize..1000,
        delta in proptest::sample::select(vec![-0.5f64, -0.01, 0.01, 0.5]),
    ) {
        let extended = harmonic_extend(&p, 2, &u).unwrap();
        let baseline = energy(&p, 2, &extended, Normalization::Scaling).unwrap();
        // Perturb one strictly finer vertex (not inherited from level 1).
        let candidates: Vec<usize> =
            (0..extended.len()).filter(|k| k % p.nb() != 0).collect();
        let k = candidates[vertex_seed % candidates.len()];
        let mut perturbed = extended.clone();
        perturbed[k] += delta;
        let worse = energy(&p, 2, &perturbed, Normalization::Scaling).unwrap();
        prop_assert!(worse >= baseline);
    }

    #[test]
    fn conservative_energy_is_level_invariant((p, boundary) in params_and_boundary()) {
        let base = energy(&p, 0, &boundary, Normalization::Conservative).unwrap();
        for m in 1..=4 {
            let u = dirichlet_solve(&p, m, &boundary).unwrap();
            let e = energy(&p, m, &u, Normalization::Conservative).unwrap();
            prop_assert!((e - base).abs() <= 1e-10 * base.max(1.0));
        }
    }

    #[test]
    fn scaling_energy_grows_by_the_walk_factor((p, boundary) in params_and_boundary()) {
        let ratio = (p.nb() as f64).powf(4.0 - 2.0 * p.d_w());
        let mut previous = energy(&p, 0, &boundary, Normalization::Scaling).unwrap();
        prop_assume!(previous > 1e-9);
        for m in 1..=3 {
            let u = dirichlet_solve(&p, m, &boundary).unwrap();
            let e = energy(&p, m, &u, Normalization::Scaling).unwrap();
            prop_assert!((e / previous - ratio).abs() <= 1e-10 * ratio);
            previous = e;
        }
    }

    #[test]
    fn resistance_is_symmetric_and_additive_along_the_chain(
        p in params(),
        seeds in (0usize..1000, 0usize..1000, 0usize..1000),
    ) {
        let m = 2;
        let len = p.chain_len(m).unwrap();
        let mut idx = [seeds.0 % len, seeds.1 % len, seeds.2 % len];
        idx.sort_unstable();
        let [i, j, k] = idx;
        let forward = resistance(&p, m, i, k, Normalization::Scaling).unwrap();
        let backward = resistance(&p, m, k, i, Normalization::Scaling).unwrap();
        prop_assert_eq!(forward, backward);
        let split = resistance(&p, m, i, j, Normalization::Scaling).unwrap()
            + resistance(&p, m, j, k, Normalization::Scaling).unwrap();
        prop_assert!((forward - split).abs() <= 1e-12 * forward.max(1e-12));
    }

    #[test]
    fn spectrum_size_and_range_hold_for_all_bases((p, m) in (params(), 1..=3usize)) {
        let s = direct_spectrum(&p, m).unwrap();
        let cells = p.nb_pow(m).unwrap();
        prop_assert_eq!(s.total_multiplicity(), (p.nb() - 1) * (cells - 1));
        prop_assert!(s.entries().iter().all(|e| e.value > 0.0 && e.value < 4.0));
        prop_assert!(s.entries().windows(2).all(|w| w[0].value < w[1].value));
    }

    #[test]
    fn decimation_children_fold_back_to_the_parent(
        p in params(),
        parent in 0.0..=4.0f64,
        plus in proptest::bool::ANY,
    ) {
        let branch = if plus { Branch::Plus } else { Branch::Minus };
        for child in decimate_step(&p, parent, branch).unwrap() {
            let back = decimation_parent(&p, child.value).unwrap();
            prop_assert!((back - parent).abs() <= 1e-9);
        }
    }

    #[test]
    fn interval_resistance_is_a_metric_on_ordered_triples(
        mut points in proptest::collection::vec(0.0..=1.0f64, 3)
    ) {
        points.sort_by(f64::total_cmp);
        let (x, y, z) = (points[0], points[1], points[2]);
        prop_assert_eq!(
            interval_resistance(x, z).unwrap(),
            interval_resistance(z, x).unwrap()
        );
        prop_assert_eq!(interval_resistance(y, y).unwrap(), 0.0);
        let total = interval_resistance(x, z).unwrap();
        let split = interval_resistance(x, y).unwrap() + interval_resistance(y, z).unwrap();
        prop_assert!((total - split).abs() <= 1e-15);
    }
}
