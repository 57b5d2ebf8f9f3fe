mod common;

use common::*;
use hypermetzler::spectral::{eigen_residual, perron_metzler, perron_nonnegative, PowerConfig};
use hypermetzler::tensor::{is_strongly_connected, metzler_split, CubicalTensor};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_metzler(seed: u64) -> CubicalTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=4);
    let n = rng.gen_range(1..=if k == 4 { 4 } else { 5 });
    let mut t = strongly_connected(&mut rng, |r| random_nonnegative(r, k, n, 0.4));
    for i in 0..n {
        t.set(vec![i; k], rng.gen_range(-10.0..3.0)).unwrap();
    }
    t
}

fn cfg() -> PowerConfig {
    PowerConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn shift_equivariance(seed in any::<u64>(), c in -20.0f64..20.0) {
        let a = random_metzler(seed);
        let p = perron_metzler(&a, &cfg()).unwrap();
        let q = perron_metzler(&a.shift_diagonal(c), &cfg()).unwrap();
        prop_assert!((q.value - (p.value + c)).abs() < 1e-9 * (1.0 + p.value.abs() + c.abs()));
        let d = p.vector.iter().zip(&q.vector).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        prop_assert!(d < 1e-9, "vectors differ by {}", d);
    }

    #[test]
    fn scale_equivariance(seed in any::<u64>(), c in 0.01f64..100.0) {
        let b = metzler_split(&random_metzler(seed)).unwrap().nonneg;
        let p = perron_nonnegative(&b, &cfg()).unwrap().value;
        let q = perron_nonnegative(&b.scale(c), &cfg()).unwrap().value;
        prop_assert!((q - c * p).abs() <= 1e-9 * c * p.max(1.0));
    }

    #[test]
    fn residual_bound(seed in any::<u64>()) {
        let a = random_metzler(seed);
        let c = cfg();
        let p = perron_metzler(&a, &c).unwrap();
        prop_assert_eq!(p.residual, eigen_residual(&a, p.value, &p.vector).unwrap());
        // for Metzler input the error scales with the nonnegative part, not
        // with the (possibly near-zero) value of A itself
        let rho_b = p.value + metzler_split(&a).unwrap().shift;
        let scale = p.value.abs().max(rho_b);
        prop_assert!(p.residual <= 10.0 * c.tol * scale + 1e-12, "residual {} scale {}", p.residual, scale);
        prop_assert!(p.vector.iter().all(|&v| v > 0.0));
        prop_assert!((p.vector.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_bound_nonnegative(seed in any::<u64>()) {
        let b = metzler_split(&random_metzler(seed)).unwrap().nonneg;
        let c = cfg();
        let p = perron_nonnegative(&b, &c).unwrap();
        prop_assert!(p.residual <= 10.0 * c.tol * p.value.abs() + 1e-12);
    }

    #[test]
    fn zeroing_an_entry_lowers_the_spectral_radius(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = metzler_split(&random_metzler(seed)).unwrap().nonneg;
        let off: Vec<Vec<usize>> = b
            .entries()
            .filter(|(i, _)| !CubicalTensor::is_diagonal_index(i))
            .map(|(i, _)| i.to_vec())
            .collect();
        prop_assume!(!off.is_empty());
        let mut r = b.clone();
        r.set(off[rng.gen_range(0..off.len())].clone(), 0.0).unwrap();
        prop_assume!(is_strongly_connected(&r));
        let tight = PowerConfig::with_tol(1e-13);
        let before = perron_nonnegative(&b, &tight).unwrap().value;
        let after = perron_nonnegative(&r, &tight).unwrap().value;
        prop_assert!(after < before, "{} !< {}", after, before);
    }
}
