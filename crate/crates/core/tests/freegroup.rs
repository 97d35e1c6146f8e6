use visidense::freegrp::{abelian_census_free, annular_estimate, empirical_pn, enumerate_census_free, sphere_size_free};
use visidense::ratios::beta_limits;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn dp_equals_exhaustive_enumeration() {
    assert_eq!(abelian_census_free(2, 8).unwrap(), enumerate_census_free(2, 8).unwrap());
    assert_eq!(abelian_census_free(3, 5).unwrap(), enumerate_census_free(3, 5).unwrap());
}

#[test]
fn totals_and_invariants() {
    for (k, n_max) in [(2usize, 64usize), (3, 20), (4, 8)] {
        for c in abelian_census_free(k, n_max).unwrap() {
            assert_eq!(c.total, sphere_size_free(k, c.n));
            c.check_invariants().unwrap();
        }
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let one = in_pool(1, || abelian_census_free(2, 40).unwrap());
    let four = in_pool(4, || abelian_census_free(2, 40).unwrap());
    let eight = in_pool(8, || abelian_census_free(2, 40).unwrap());
    assert_eq!(one, four);
    assert_eq!(one, eight);
}

#[test]
fn parity_sequences_bracket_their_limits() {
    let b = beta_limits(2).unwrap();
    let c = abelian_census_free(2, 64).unwrap();
    for n in 40..=64 {
        let f = c[n].visible_fraction();
        let limit = b.for_parity(n);
        assert!((f - limit).abs() < 0.05, "n={n}: {f} vs {limit}");
        // Both parity sequences sit above their limits, so the annular error
        // is the mean of the two parity errors.
        let prev = c[n - 1].visible_fraction() - b.for_parity(n - 1);
        let a = annular_estimate(&c[n - 1], &c[n]).unwrap() - b.annular;
        assert!(prev > 0.0 && f - limit > 0.0);
        assert!((a - 0.5 * (prev + f - limit)).abs() < 1e-12);
        assert!(a.abs() <= prev.max(f - limit), "n={n}");
    }
}

#[test]
fn pn_weights_are_a_probability() {
    let c = abelian_census_free(3, 12).unwrap();
    for n in 1..=12 {
        let p = empirical_pn(&c[n - 1], &c[n]).unwrap();
        assert!((p.total_weight() - 1.0).abs() < 1e-12);
        for (alpha, w) in &p.weights {
            let neg = visidense::LatticeVector(alpha.coords().iter().map(|x| -x).collect());
            assert!((p.weight(&neg) - w).abs() < 1e-15);
        }
    }
}
