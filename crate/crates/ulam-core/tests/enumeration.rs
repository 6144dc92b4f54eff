//! Invariants of the enumerated fixed-point sets: path accounting, zero
//! tails, the identity suite, structure of the degree-3 family, padding
//! monotonicity and seed independence.

use ulam_core::homotopy::{count_ulam, nontrivial_existence_check, solve_system, SolutionSet};
use ulam_core::poly::CVec;
use ulam_core::ulam::{pad_check, ulam_map, verify_identities, ResidualSystem};

fn full_set(n: usize, seed: u64) -> SolutionSet<f64> {
    solve_system::<f64>(n, ResidualSystem::Full, seed).unwrap()
}

#[test]
fn bezout_accounting_and_no_escapes() {
    for n in 1..=5usize {
        for sys in [ResidualSystem::Full, ResidualSystem::Tilde] {
            if sys == ResidualSystem::Tilde && n < 2 {
                continue;
            }
            let set = solve_system::<f64>(n, sys, 17).unwrap();
            assert_eq!(set.path_count as u64, sys.bezout_number(n), "{sys:?} n={n}");
            assert_eq!(set.accounted_paths(), set.path_count, "{sys:?} n={n}");
            assert_eq!(set.at_infinity_count, 0, "{sys:?} n={n}");
            assert_eq!(set.failed_count, 0, "{sys:?} n={n}");
        }
    }
}

#[test]
fn enumerated_points_are_fixed_and_zero_tailed() {
    for n in 1..=5usize {
        let set = full_set(n, 23);
        for rec in &set.records {
            // idempotence under the map
            let image = ulam_map(&rec.point);
            assert!(
                image.max_dist(&rec.point) <= 1e-9,
                "n={n} point {:?} moves by {:e}",
                rec.point,
                image.max_dist(&rec.point)
            );
            // no zero component is followed by a nonzero one
            assert!(rec.has_zero_tail_property(), "n={n} point {:?}", rec.point);
        }
    }
}

#[test]
fn identity_suite_on_distinct_entry_points() {
    for n in 2..=5usize {
        let set = full_set(n, 29);
        for rec in &set.records {
            let rep = verify_identities(&rec.point, 1e-8).unwrap();
            assert!(rep.value_at_zeros <= 1e-8, "n={n}: {:e}", rep.value_at_zeros);
            assert!(rep.vieta_substitution <= 1e-8);
            if !rep.skipped_repeated_components {
                assert!(rep.derivative_product.unwrap() <= 1e-8);
                assert!(rep.second_derivative_sum.unwrap() <= 1e-8);
            }
        }
    }
}

#[test]
fn padding_lifts_every_point() {
    for n in 2..=4usize {
        let set = full_set(n, 31);
        for rec in &set.records {
            assert!(pad_check(&rec.point, 2, 1e-8).unwrap(), "n={n} {:?}", rec.point);
        }
    }
}

#[test]
fn degree_three_family_structure() {
    // nontrivial c3 != 0 solutions besides (1,-1,-1) satisfy
    // 2c1^3 + 2c1^2 - 1 = 0, c2 = -1/c1, c3 = 1/(c1+1)
    let set = full_set(3, 37);
    assert_eq!(set.records.len(), 6);
    let special = CVec::from_pairs(&[(1.0, 0.0), (-1.0, 0.0), (-1.0, 0.0)]);
    let mut family = 0;
    for rec in &set.records {
        let c = &rec.point;
        if c[2].norm() <= 1e-8 || c.max_dist(&special) <= 1e-8 {
            continue;
        }
        family += 1;
        let c1 = c[0];
        let poly = c1 * c1 * c1 * 2.0 + c1 * c1 * 2.0 - 1.0;
        assert!(poly.norm() <= 1e-8, "2c1^3+2c1^2-1 = {poly}");
        assert!((c[1] + c1.inv()).norm() <= 1e-8);
        assert!((c[2] - (c1 + 1.0).inv()).norm() <= 1e-8);
    }
    assert_eq!(family, 3);
}

#[test]
fn counts_are_monotone_and_consistent() {
    let mut prev = 0u64;
    for n in 1..=5usize {
        let rep = count_ulam::<f64>(n, 41).unwrap();
        assert!(rep.consistent, "n={n}: {:?}", rep);
        assert!(rep.counts.u_n >= prev, "counts must not decrease");
        // |U_N| <= N!
        let fact: u64 = (1..=n as u64).product();
        assert!(rep.counts.u_n <= fact);
        prev = rep.counts.u_n;
    }
}

#[test]
fn no_real_all_nonzero_point_in_degree_five() {
    let set = full_set(5, 43);
    for rec in &set.records {
        assert!(
            !(rec.is_real && rec.all_nonzero()),
            "unexpectedly real and nonzero: {:?}",
            rec.point
        );
    }
}

#[test]
fn record_sets_agree_across_seeds() {
    for n in 2..=5usize {
        let base = full_set(n, 1);
        for seed in [2u64, 3, 4, 5] {
            let other = full_set(n, seed);
            assert_eq!(base.records.len(), other.records.len());
            let mut used = vec![false; other.records.len()];
            for rec in &base.records {
                let mut matched = false;
                for (k, cand) in other.records.iter().enumerate() {
                    if !used[k] && rec.point.max_dist(&cand.point) <= 1e-8 {
                        assert_eq!(rec.cluster_size, cand.cluster_size);
                        used[k] = true;
                        matched = true;
                        break;
                    }
                }
                assert!(matched, "n={n} seed={seed}: no match for {:?}", rec.point);
            }
        }
    }
}

#[test]
fn existence_of_all_nonzero_points() {
    for n in 2..=5usize {
        assert!(nontrivial_existence_check::<f64>(n, 47).unwrap(), "n={n}");
    }
}

#[test]
fn single_precision_solve_works_at_loose_tolerances() {
    use ulam_core::homotopy::{solve_system_with, TrackOptions};
    let opts = TrackOptions::<f32> {
        corrector_tol: 1e-4,
        polish_tol: 1e-4,
        step_min: 1e-7,
        ..TrackOptions::default()
    };
    let set = solve_system_with::<f32>(2, ResidualSystem::Full, 5, &opts, 1e-2).unwrap();
    assert_eq!(set.records.len(), 2);
    let want = ulam_core::poly::CVec::<f32>::from_pairs(&[(1.0, 0.0), (-2.0, 0.0)]);
    assert!(set.records.iter().any(|r| r.point.max_dist(&want) < 1e-3));
}

/// Degree six sits beyond the hand-checked range; the two counting routes
/// (inclusion-exclusion over the deflated system vs direct enumeration)
/// still agree, on 720 tracked paths. Run with `-- --ignored`.
#[test]
#[ignore = "720-path solve, ~1s; run with -- --ignored"]
fn degree_six_counting_routes_agree() {
    let rep = count_ulam::<f64>(6, 1).unwrap();
    assert!(rep.consistent);
    assert_eq!(rep.counts.u_n, rep.full_direct);
    assert_eq!(rep.counts.v_zero, 119);
    let set = full_set(6, 1);
    assert_eq!(set.path_count, 720);
    assert_eq!(set.accounted_paths(), 720);
    assert_eq!(set.at_infinity_count, 0);
    // observed: 719 distinct points, one of multiplicity two
    assert_eq!(set.records.len(), 719);
    assert_eq!(set.records.iter().filter(|r| r.cluster_size == 2).count(), 1);
}
