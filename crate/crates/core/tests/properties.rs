use jcsusy::fock::{self, FockVector};
use jcsusy::model::{DiagFn, ModelParams};
use jcsusy::observables::first_local_min;
use jcsusy::oracle::laguerre_series_exact;
use jcsusy::phase_space::GridSpec;
use jcsusy::propagator::{efg, propagate_counter, propagate_rotating};
use jcsusy::scenario::Scenario;
use jcsusy::states::{rotating_preimage, schmidt_coefficients, susy_map, InitialCondition, InitialSpec, QubitFieldState};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn complex(max: f64) -> impl Strategy<Value = C64> {
    (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, th)| C64::from_polar(r, th))
}

fn kerr_params() -> impl Strategy<Value = ModelParams> {
    (1usize..=3, 0.0..0.6f64, -0.3..0.3f64, 0.02..0.2f64).prop_map(|(k, chi, delta, g)| ModelParams::kerr(delta, g, chi, k))
}

/// Random joint state on `n <= top`, inside a space of size `cutoff`.
fn state(cutoff: usize, top: usize) -> impl Strategy<Value = QubitFieldState> {
    proptest::collection::vec(complex(1.0), 2 * (top + 1)).prop_map(move |amps| {
        let mut e = FockVector::zeros(cutoff);
        let mut g = FockVector::zeros(cutoff);
        for n in 0..=top {
            e[n] = amps[n];
            g[n] = amps[top + 1 + n];
        }
        let s = QubitFieldState::new(e, g).unwrap();
        let norm = s.norm();
        s.scaled(C64::new(1.0 / norm, 0.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mu_symmetry(alpha in complex(6.0), n in 0usize..=60, s in 0usize..=60) {
        prop_assume!(alpha.norm() > 1e-3);
        let literal = fock::mu_negative_superscript(alpha, n, s).unwrap();
        let sym = fock::mu(-alpha, s, n).conj();
        let scale = literal.norm().max(sym.norm());
        prop_assert!((literal - sym).norm() <= 1e-10 * scale, "{literal} vs {sym}");
    }

    #[test]
    fn laguerre_matches_exact_series(s in 0usize..=12, a in -12i64..=12, xi in 0usize..3) {
        prop_assume!(a >= -(s as i64));
        let x = [0.5, 2.0, 10.0][xi];
        let exact = laguerre_series_exact(s, a, x).unwrap();
        let rec = fock::assoc_laguerre(s, a, x).unwrap();
        prop_assert!((rec - exact).abs() <= 1e-10 * exact.abs().max(1e-300), "{rec} vs {exact}");
    }

    #[test]
    fn factorial_ratio_recurrences(n in 0usize..=300, k in 0usize..=5) {
        let base = fock::factorial_ratio(n, k).unwrap();
        let up = fock::factorial_ratio(n, k + 1).unwrap();
        prop_assert!((up - (n + k + 1) as f64 * base).abs() <= 1e-13 * up);
        let sq = fock::sqrt_factorial_ratio(n, k).unwrap();
        prop_assert!((sq * sq - base).abs() <= 1e-13 * base);
    }

    #[test]
    fn lower_undoes_raise(v in proptest::collection::vec(complex(1.0), 21), k in 1usize..=3) {
        let v = FockVector::from_amps(v).unwrap();
        let up = fock::apply_raise_k(&v, k);
        let back = fock::apply_lower_k(&up.value, k);
        for n in 0..=20 - k {
            let want = v[n] * fock::factorial_ratio(n, k).unwrap();
            prop_assert!((back[n] - want).norm() <= 1e-12 * want.norm().max(1.0));
        }
        let lost: f64 = (21 - k..=20).map(|n| v[n].norm_sqr() * fock::factorial_ratio(n, k).unwrap()).sum();
        prop_assert!((up.leakage - lost).abs() <= 1e-12 * lost.max(1.0));
    }

    #[test]
    fn coherent_norm_when_tail_small(gamma in complex(5.0)) {
        let c = fock::coherent_with_guard(gamma, 120, 2, 1e-12);
        prop_assume!(c.tail_mass < 1e-12);
        prop_assert!((c.amps.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn efg_unitarity(p in kerr_params(), n in 0i64..200, t in 0.0..100.0f64) {
        let e = efg(n, t, &p);
        let r = fock::factorial_ratio(n as usize, p.k).unwrap();
        prop_assert!((e.e.norm() - 1.0).abs() < 1e-12);
        prop_assert!((e.f.norm_sqr() + r * e.g.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn counter_evolution_is_a_group(p in kerr_params(), psi in state(40, 30), t1 in 0.0..20.0f64, t2 in 0.0..20.0f64) {
        let two = propagate_counter(&propagate_counter(&psi, t1, &p).unwrap().value, t2, &p).unwrap().value;
        let one = propagate_counter(&psi, t1 + t2, &p).unwrap().value;
        prop_assert!(two.max_abs_diff(&one) < 1e-10);
        prop_assert!((one.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rotating_evolution_is_a_group(p in kerr_params(), psi in state(40, 30), t1 in 0.0..20.0f64, t2 in 0.0..20.0f64) {
        let two = propagate_rotating(&propagate_rotating(&psi, t1, &p).unwrap().value, t2, &p).unwrap().value;
        let one = propagate_rotating(&psi, t1 + t2, &p).unwrap().value;
        prop_assert!(two.max_abs_diff(&one) < 1e-10);
    }

    #[test]
    fn preimage_then_map_is_identity(k in 1usize..=3, amps in proptest::collection::vec(complex(1.0), 60)) {
        let cutoff = 40;
        let mut e = FockVector::zeros(cutoff);
        let mut g = FockVector::zeros(cutoff);
        for n in k..=30 {
            e[n] = amps[n];
            g[n] = amps[30 + n - k];
        }
        let psi = QubitFieldState::new(e, g).unwrap();
        let pre = rotating_preimage(&psi, k);
        prop_assert_eq!(pre.report.dropped_mass, 0.0);
        prop_assert_eq!(pre.report.leakage, 0.0);
        let back = susy_map(&pre.state, k);
        prop_assert!(back.state.max_abs_diff(&psi) < 1e-12);
    }

    #[test]
    fn product_states_have_schmidt_rank_one(ae in complex(1.0), ag in complex(1.0), gamma in complex(3.0)) {
        prop_assume!(ae.norm() + ag.norm() > 0.1);
        let c = fock::coherent_amplitudes(gamma, 60);
        let ic = InitialCondition::new(ae, ag, c.clone(), c).unwrap();
        prop_assert!(schmidt_coefficients(&ic.state())[1] < 1e-10);
    }

    #[test]
    fn scenario_round_trip(
        p in kerr_params(),
        gamma in complex(4.0),
        cutoff in 10usize..400,
        end in 0.0..100.0f64,
        steps in 1usize..5000,
        stark in proptest::option::of(proptest::collection::vec(-1.0..1.0f64, 1..4)),
    ) {
        let text = format!(
            "[model]\ndelta = {}\ng = {}\nchi = {}\nk = {}\n[initial]\nstate = \"excited-coherent(1)\"\n[numerics]\ncutoff = {cutoff}\n[time]\nstart = 0.0\nend = {end}\nsteps = {steps}\n[outputs]\nseries = [\"sigma_z\"]\n",
            p.delta, p.g, p.chi, p.k
        );
        let mut s = Scenario::parse(&text).unwrap();
        s.initial.state = InitialSpec::ExcitedCoherent(gamma);
        s.model.stark = stark.map(DiagFn::Poly);
        prop_assert_eq!(Scenario::parse(&s.emit()).unwrap(), s);
    }

    #[test]
    fn grid_spec_round_trip(a in -10.0..0.0f64, b in 0.1..10.0f64, n in 2usize..300, m in 2usize..300) {
        let g = GridSpec::new(a, b, -b, -a + 0.5, n, m).unwrap();
        prop_assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
    }

    #[test]
    fn first_local_min_is_a_local_min(values in proptest::collection::vec(-1.0..1.0f64, 3..50)) {
        let times: Vec<f64> = (0..values.len()).map(|i| i as f64).collect();
        if let Some((t, v)) = first_local_min(&times, &values) {
            let i = t as usize;
            prop_assert_eq!(values[i], v);
            prop_assert!(i > 0 && values[i - 1] > v);
        }
    }
}
