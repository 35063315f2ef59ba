use gpotts::critical::mf_solutions;
use gpotts::model::{beta_of_u, embed, free_energy, k, k_prime, mf_rhs, relative_entropy, Magnetization, ModelParams, ProbabilityVector};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (2usize..=8, 2.0f64..8.0, 0.0f64..10.0).prop_map(|(q, z, beta)| ModelParams::new(q as f64, z, beta).unwrap())
}

proptest! {
    #[test]
    fn free_energy_of_embedding_is_profile(p in params(), u in 0.0f64..0.999) {
        let q = p.q as usize;
        let nu = embed(Magnetization::new(u).unwrap(), q);
        let total: f64 = nu.as_slice().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let f = free_energy(&nu, &p).unwrap();
        prop_assert!((f - k(u, &p)).abs() < 1e-12, "F={f} k={}", k(u, &p));
    }

    #[test]
    fn mean_field_presentations_agree(q in 2.0f64..8.0, z in 2.0f64..8.0, u in 0.001f64..0.999) {
        let beta = beta_of_u(u, q, z).unwrap();
        prop_assert!(beta > 0.0);
        let p = ModelParams::new(q, z, beta).unwrap();
        prop_assert!((mf_rhs(u, &p) - u).abs() <= 1e-10);
    }

    #[test]
    fn relative_entropy_is_nonnegative(w in prop::collection::vec(0.0f64..1.0, 2..7)) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 1e-6);
        let nu = ProbabilityVector::new(w.iter().map(|x| x / total).collect()).unwrap();
        let m = nu.len();
        prop_assert!(relative_entropy(&nu, m).unwrap() >= -1e-15);
        prop_assert!(relative_entropy(&ProbabilityVector::uniform(m), m).unwrap().abs() < 1e-15);
    }
}

#[test]
fn stationary_points_are_mean_field_solutions() {
    // Sign changes of k' on a fine grid against the solver's root list.
    for (q, z, beta) in [(3.0, 2.0, 2.76), (3.0, 2.0, 3.5), (2.0, 5.0, 4.2), (4.0, 3.0, 6.0), (2.0, 3.0, 2.5), (5.0, 2.5, 1.0)] {
        let p = ModelParams::new(q, z, beta).unwrap();
        let h = 1e-5;
        let mut crossings = vec![0.0];
        let mut prev = k_prime(h, &p);
        let mut u = h;
        while u + h < 1.0 - 1e-9 {
            let next = k_prime(u + h, &p);
            if prev.signum() != next.signum() {
                crossings.push(u + h / 2.0);
            }
            prev = next;
            u += h;
        }
        let roots = mf_solutions(&p).unwrap().solutions;
        assert_eq!(roots.len(), crossings.len(), "q={q} z={z} beta={beta}: {roots:?} vs {crossings:?}");
        for (r, c) in roots.iter().zip(&crossings) {
            assert!((r - c).abs() < 2e-5, "{r} vs {c}");
        }
    }
}

#[test]
fn beta_of_u_increasing_in_second_order_strip() {
    for z in [2.0, 2.5, 3.0, 3.5, 4.0] {
        let mut prev = beta_of_u(0.0, 2.0, z).unwrap();
        for i in 1..1000 {
            let b = beta_of_u(i as f64 / 1000.0, 2.0, z).unwrap();
            assert!(b > prev, "z={z} u={}", i as f64 / 1000.0);
            prev = b;
        }
    }
}
