use proptest::prelude::*;

use secure_noma::maxmin::bound_triple;
use secure_noma::secrecy::{
    max_codeword_rate, secrecy_outage_closed_form, sinr_cross_message, sinr_own_message, stringency,
};
use secure_noma::{
    select_users, solve_maxmin_bisection, solve_maxmin_two_user, solve_min_power, Channel, Channel32, Requirement,
    Requirement32, SolveOutcome,
};

fn sorted(mut g: Vec<f64>) -> Vec<f64> {
    g.sort_by(f64::total_cmp);
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn min_power_solution_revalidates(
        gains in prop::collection::vec(1.0f64..200.0, 1..6),
        eaves in 0.1f64..2.0,
        q in 0.05f64..1.0,
        eps in 0.05f64..0.8,
    ) {
        let ch = Channel::new(sorted(gains), eaves).unwrap();
        let req = Requirement::new(q, eps).unwrap();
        if let SolveOutcome::Feasible(s) = solve_min_power(&ch, &req).unwrap() {
            for k in 0..ch.num_users() {
                let out = secrecy_outage_closed_form(&ch, &s.allocation, q, k).unwrap();
                prop_assert!((out - eps).abs() < 1e-8);
                // every later user can decode message k at the chosen codeword rate
                let rt = max_codeword_rate(&ch, &s.allocation, k).unwrap();
                prop_assert!((1.0 + sinr_own_message(&ch, &s.allocation, k).unwrap()).log2() >= rt - 1e-12);
                for m in k + 1..ch.num_users() {
                    let cross = sinr_cross_message(&ch, &s.allocation, m, k).unwrap();
                    prop_assert!((1.0 + cross).log2() >= rt - 1e-12);
                }
            }
        }
    }

    #[test]
    fn max_min_rate_spends_min_power(
        gains in prop::collection::vec(2.0f64..200.0, 2..5),
        eaves in 0.1f64..1.0,
        eps in 0.1f64..0.8,
        budget in 0.05f64..20.0,
    ) {
        let ch = Channel::new(sorted(gains), eaves).unwrap();
        prop_assume!(ch.gain(0) > stringency(eaves, eps));
        let s = solve_maxmin_bisection(&ch, eps, budget, 1e-10).unwrap().feasible().unwrap();
        prop_assume!(s.rate > 1e-6);
        let at_rate = solve_min_power(&ch, &Requirement::new(s.rate, eps).unwrap()).unwrap().feasible().unwrap();
        prop_assert!(at_rate.total_power <= budget * (1.0 + 1e-9));
        let above = solve_min_power(&ch, &Requirement::new(s.rate + 1e-6, eps).unwrap()).unwrap();
        prop_assert!(above.feasible().is_none_or(|p| p.total_power > budget));
    }

    #[test]
    fn closed_form_rate_is_the_binding_bound(
        g1 in 1.0f64..100.0,
        spread in 1.01f64..10.0,
        phi_frac in 0.01f64..0.95,
        budget in 0.01f64..50.0,
    ) {
        let (g2, phi) = (g1 * spread, g1 * phi_frac);
        let ch = Channel::new(vec![g1, g2], phi).unwrap();
        let eps = (-1.0f64).exp();
        let s = solve_maxmin_two_user(&ch, eps, budget).unwrap().feasible().unwrap();
        let b = bound_triple(g1, g2, phi, budget).unwrap();
        prop_assert!((s.rate - b.b3.log2()).abs() < 1e-12);
    }

    #[test]
    fn f32_tracks_f64(
        g1 in 2.0f64..50.0,
        spread in 1.1f64..5.0,
        q in 0.1f64..0.8,
    ) {
        let ch = Channel::new(vec![g1, g1 * spread], 0.5).unwrap();
        let ch32 = Channel32::new(vec![g1 as f32, (g1 * spread) as f32], 0.5).unwrap();
        let a = solve_min_power(&ch, &Requirement::new(q, 0.3).unwrap()).unwrap();
        let b = solve_min_power(&ch32, &Requirement32::new(q as f32, 0.3).unwrap()).unwrap();
        if let (Some(a), Some(b)) = (a.feasible(), b.feasible()) {
            prop_assert!((a.total_power - b.total_power as f64).abs() <= 1e-3 * a.total_power);
        }
    }
}

#[test]
fn selection_keeps_a_feasible_subset() {
    let ch = Channel::new(vec![1.2, 2.5, 3.0, 40.0, 90.0], 1.0).unwrap();
    let req = Requirement::new(0.8, 0.4).unwrap();
    assert!(solve_min_power(&ch, &req).unwrap().verdict().is_some());
    let sel = select_users(&ch, &req, Default::default()).unwrap();
    assert!(!sel.users.is_empty());
    let sub = ch.subset(&sel.users).unwrap();
    let direct = solve_min_power(&sub, &req).unwrap().feasible().unwrap();
    assert_eq!(direct.total_power, sel.solution.unwrap().total_power);
}
