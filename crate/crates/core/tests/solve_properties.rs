mod common;

use common::*;
use hypermetzler::solve::{fixed_point_bracket, mtensor_residual, solve_mtensor, solve_mtensor_from, SolveConfig};
use hypermetzler::spectral::{perron_nonnegative, PowerConfig};
use hypermetzler::tensor::CubicalTensor;
use hypermetzler::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `eta I - B` with `eta` a random multiple (> 1) of `rho(B)`, plus a positive rhs.
fn system(seed: u64, k: usize, max_n: usize) -> (CubicalTensor, Vec<f64>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let b = strongly_connected(&mut rng, |r| random_nonnegative(r, k, n, 0.5));
    let rho = perron_nonnegative(&b, &PowerConfig::default()).unwrap().value;
    let eta = rho.max(0.1) * rng.gen_range(1.1..2.0);
    let aneg = CubicalTensor::identity(k, n).unwrap().scale(eta).sub(&b).unwrap();
    let rhs = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    (aneg, rhs, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_certificate(seed in any::<u64>(), k in 2usize..=4) {
        let (aneg, rhs, _) = system(seed, k, 4);
        let cfg = SolveConfig::default();
        let rep = solve_mtensor(&aneg, &rhs, &cfg).unwrap();
        let again = mtensor_residual(&aneg, &rhs, &rep.solution).unwrap();
        prop_assert_eq!(again, rep.residual);
        prop_assert!(again <= cfg.tol);
        prop_assert!(rep.solution.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn restarts_agree(seed in any::<u64>(), k in 2usize..=4) {
        let (aneg, rhs, mut rng) = system(seed, k, 4);
        let cfg = SolveConfig::default();
        let base = solve_mtensor(&aneg, &rhs, &cfg).unwrap().solution;
        for _ in 0..10 {
            let start: Vec<f64> = (0..rhs.len()).map(|_| rng.gen_range(0.01..5.0)).collect();
            let x = solve_mtensor_from(&aneg, &rhs, &start, &cfg).unwrap().solution;
            let d = x.iter().zip(&base).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
            prop_assert!(d < 1e-8, "restart differs by {}", d);
        }
    }

    #[test]
    fn bracket_shrinks_along_the_iteration(seed in any::<u64>(), k in 2usize..=4, from_above in any::<bool>()) {
        let (aneg, rhs, mut rng) = system(seed, k, 4);
        let n = rhs.len();
        let start: Vec<f64> = if from_above {
            (0..n).map(|_| rng.gen_range(1.0..50.0)).collect()
        } else {
            (0..n).map(|_| rng.gen_range(0.01..5.0)).collect()
        };
        let (mut lo_prev, mut hi_prev) = (f64::NEG_INFINITY, f64::INFINITY);
        for m in 0..30 {
            let cfg = SolveConfig { tol: 0.0, max_iter: m };
            let x = match solve_mtensor_from(&aneg, &rhs, &start, &cfg) {
                Err(Error::SolverMaxIter { last, .. }) => last,
                Ok(rep) => rep.solution,
                Err(e) => panic!("{e}"),
            };
            let (lo, hi) = fixed_point_bracket(&aneg, &rhs, &x).unwrap();
            let (lo, hi) = (lo.min(1.0), hi.max(1.0));
            prop_assert!(hi <= hi_prev * (1.0 + 1e-12), "step {}: hi {} > {}", m, hi, hi_prev);
            prop_assert!(lo >= lo_prev * (1.0 - 1e-12), "step {}: lo {} < {}", m, lo, lo_prev);
            lo_prev = lo;
            hi_prev = hi;
        }
    }

    #[test]
    fn matrix_case_matches_lu(seed in any::<u64>()) {
        let (aneg, rhs, _) = system(seed, 2, 6);
        let n = rhs.len();
        let rep = solve_mtensor(&aneg, &rhs, &SolveConfig::default()).unwrap();
        let m = DMatrix::from_fn(n, n, |i, j| aneg.get(&[i, j]));
        let inv = m.clone().try_inverse().unwrap();
        let inv_norm = inv.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        let x = m.lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
        let d = x.iter().zip(&rep.solution).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        // residual tol 1e-10 bounds the error by ||M^-1|| * 1e-10, plus LU rounding
        let bound = inv_norm * 1e-10 * (1.0 + 1e-6) + 1e-12 * x.amax();
        prop_assert!(d <= bound, "gap to LU {} > {}", d, bound);
    }
}

/// The unscaled residual is not monotone: for k = 2 it evolves as
/// `r <- (B / eta) r`, and `B / eta` may have inf-norm above one.
#[test]
fn unscaled_residual_can_grow() {
    let b = CubicalTensor::from_entries(2, 2, vec![(vec![0, 1], 1.8), (vec![1, 0], 0.05)]).unwrap();
    let aneg = CubicalTensor::identity(2, 2).unwrap().sub(&b).unwrap();
    let rhs = [1.0, 1.0];
    let start = [1e-6, 1e-6];
    let res = |m: usize| match solve_mtensor_from(&aneg, &rhs, &start, &SolveConfig { tol: 0.0, max_iter: m }) {
        Err(Error::SolverMaxIter { residual, .. }) => residual,
        other => panic!("{other:?}"),
    };
    assert!(res(1) > 1.5 * res(0));
    let (lo0, hi0) = fixed_point_bracket(&aneg, &rhs, &start).unwrap();
    assert!(lo0 >= 1.0 && hi0 > 1.0);
}

#[test]
fn rejects_nonpositive_start() {
    let (aneg, rhs, _) = system(1, 3, 3);
    let start = vec![0.0; rhs.len()];
    assert!(matches!(
        solve_mtensor_from(&aneg, &rhs, &start, &SolveConfig::default()),
        Err(Error::InvalidInitialState(_))
    ));
}
