use proptest::prelude::*;
use slabfront_core::dielectric::{eval_epsilon, DielectricModel, Resonance};
use slabfront_core::refraction::eval_eta;
use slabfront_core::slab::{Slab, SlabConfig};
use slabfront_core::Complex64;

fn passive_model() -> impl Strategy<Value = DielectricModel> {
    (0.2..2.0f64, prop::collection::vec((0.05..1.5f64, 0.3..4.0f64, 0.02..1.0f64), 1..4)).prop_map(|(p, lines)| {
        DielectricModel::OscillatorSet {
            plasma: p,
            resonances: lines.into_iter().map(|(f, w, g)| Resonance::new(f, w, g)).collect(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn real_response_symmetry(m in passive_model(), w in 0.01..20.0f64, l in 0.0..5.0f64) {
        let cfg = SlabConfig::new(m, l).unwrap();
        let s = Slab::new(&cfg).unwrap();
        let a = s.transmission(Complex64::new(w, 0.0)).unwrap();
        let b = s.transmission(Complex64::new(-w, 0.0)).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn passive_slab_conserves_or_absorbs(m in passive_model(), w in 0.01..20.0f64, l in 0.0..10.0f64) {
        let cfg = SlabConfig::new(m, l).unwrap();
        let s = Slab::new(&cfg).unwrap();
        let z = Complex64::new(w, 0.0);
        let e = s.transmission(z).unwrap().norm_sqr() + s.reflection(z).unwrap().norm_sqr();
        prop_assert!(e <= 1.0 + 1e-9, "{e}");
    }

    #[test]
    fn index_squares_to_epsilon(m in passive_model(), re in -10.0..10.0f64, im in 0.0..5.0f64) {
        let z = Complex64::new(re, im);
        let eps = eval_epsilon(&m, z).unwrap();
        let eta = eval_eta(&m, z).unwrap().value;
        prop_assert!((eta * eta - eps).norm() <= 1e-10 * eps.norm().max(1.0));
    }

    #[test]
    fn passive_epsilon_absorbs(m in passive_model(), w in 0.01..20.0f64) {
        let eps = eval_epsilon(&m, Complex64::new(w, 0.0)).unwrap();
        prop_assert!(eps.im >= 0.0);
    }

    #[test]
    fn thin_slab_is_transparent(m in passive_model(), w in 0.01..10.0f64) {
        let cfg = SlabConfig::new(m, 0.0).unwrap();
        let tau = Slab::new(&cfg).unwrap().transmission(Complex64::new(w, 0.0)).unwrap();
        prop_assert!((tau - 1.0).norm() < 1e-14);
    }
}
