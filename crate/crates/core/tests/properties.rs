use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gw_monogamy::concurrence::{
    bipartite_concurrence, concurrence_pure, gw_block_concurrence_oracle, lemma4_residual, BlockCut,
    PairConcurrenceSource,
};
use gw_monogamy::monogamy::{
    chained_bound_by_folding, chained_bound_theorem5, check_theorem4, ref34_bound, tighter_bound_theorem4,
    BetaInputs, ChainInput, FocusConcurrences, TighteningParams,
};
use gw_monogamy::pre::{monogamy_like_pre_check, q_sweep, upsilon, upsilon_prime};
use gw_monogamy::states::{GwState, Partition, C64};
use gw_monogamy::unified::{f_qs, g_qs, in_region_r, region_r_lower, region_r_upper, UeParams};
use gw_monogamy::Error;

const TOL: f64 = 1e-9;

fn region_params() -> impl Strategy<Value = UeParams> {
    (0.0f64..1.0, 0.05f64..=1.0).prop_map(|(t, s)| {
        let lo = region_r_lower(s);
        let hi = region_r_upper(s).min(6.0);
        UeParams::new(lo + t * (hi - lo), s).unwrap()
    })
}

fn gw_state() -> impl Strategy<Value = (GwState, u64)> {
    (3usize..=6, 2usize..=3, any::<u64>()).prop_map(|(n, d, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (GwState::random(n, d, &mut rng).unwrap(), seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn region_membership_is_consistent(p in region_params()) {
        prop_assert!(in_region_r(&p));
    }

    #[test]
    fn g_of_square_matches_f(p in region_params(), x in 0.0f64..=1.0) {
        prop_assert!((g_qs(x * x, &p).unwrap() - f_qs(x, &p).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn f_increasing_and_convex(p in region_params()) {
        let h = 1e-3;
        let f = |x: f64| f_qs(x, &p).unwrap();
        for k in 1..999 {
            let x = k as f64 * h;
            prop_assert!(f(x + h) - f(x) >= -1e-9);
            prop_assert!(f(x + h) - 2.0 * f(x) + f(x - h) >= -1e-7);
        }
    }

    #[test]
    fn g_squared_convex(p in region_params()) {
        let h = 1e-3;
        let g2 = |y: f64| g_qs(y, &p).unwrap().powi(2);
        for k in 1..999 {
            let y = k as f64 * h;
            prop_assert!(g2(y + h) - 2.0 * g2(y) + g2(y - h) >= -1e-7);
        }
    }

    #[test]
    fn lemma4_vanishes((gw, seed) in gw_state(), k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        let psi = gw.state_vector().unwrap();
        let part = Partition::random(gw.n(), k.min(gw.n()), &mut rng).unwrap();
        for s in 0..part.len() {
            prop_assert!(lemma4_residual(&psi, &part, s).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_agrees_with_pure_formula((gw, seed) in gw_state()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = gw.state_vector().unwrap();
        let n = gw.n();
        let cut = rand::Rng::gen_range(&mut rng, 1..n);
        let left: Vec<usize> = (0..cut).collect();
        let right: Vec<usize> = (cut..n).collect();
        let pure = concurrence_pure(&psi, &left).unwrap();
        let oracle = gw_block_concurrence_oracle(&psi, &left, &right).unwrap();
        prop_assert!((pure - oracle).abs() < 1e-9);
        prop_assert!((bipartite_concurrence(&psi, &left, &right).unwrap() - pure).abs() < 1e-15);
    }

    #[test]
    fn pair_concurrence_closed_form((gw, _) in gw_state()) {
        // C(ρ_{ij}) = 2 √(w_i w_j) for single-site pairs
        let psi = gw.state_vector().unwrap();
        let c = gw_block_concurrence_oracle(&psi, &[0], &[2]).unwrap();
        let expected = 2.0 * (gw.site_weight(0) * gw.site_weight(2)).sqrt();
        prop_assert!((c - expected).abs() < 1e-9);
    }

    #[test]
    fn tightened_dominates_reference(
        u12 in 0.05f64..1.0,
        ratio in 0.0f64..1.0,
        mu in 1.0f64..5.0,
        h in 1.0f64..3.0,
        t in 0.0f64..=1.0,
        alpha in 2.0f64..6.0,
    ) {
        // ratio scales U13 so that U12² ≥ h U13²
        let u13 = ratio * u12 / h.sqrt();
        let ceiling = 1.0 + mu * u13 * u13 / (u12 * u12);
        let p = 1.0 + t * (ceiling - 1.0);
        let tp = |p| TighteningParams { mu, h, tightening_factor: p, alpha };
        let tight = tighter_bound_theorem4(u12, u13, &tp(p)).unwrap();
        let reference = ref34_bound(u12, u13, mu, h, alpha, 2.0).unwrap();
        prop_assert!(tight >= reference - 1e-12);
        let at_one = tighter_bound_theorem4(u12, u13, &tp(1.0)).unwrap();
        prop_assert!((at_one - reference).abs() <= 1e-12);
    }

    #[test]
    fn tightened_bound_sound_on_gw((gw, seed) in gw_state(), alpha in 2.0f64..5.0, t in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let part = Partition::random(gw.n(), 3, &mut rng).unwrap();
        let fc = FocusConcurrences::from_vector(&gw.state_vector().unwrap(), &part, 0).unwrap();
        let params = UeParams::new(2.0, 1.0).unwrap();
        let whole = fc.whole_ue(&params).unwrap();
        let mut pairs = fc.pair_ues(&params).unwrap();
        pairs.sort_by(|a, b| b.total_cmp(a));
        let (u12, u13) = (pairs[0], pairs[1]);
        prop_assume!(u13 > 1e-9);
        // largest μ, h admitted by the premise and ratio
        let mu = ((whole * whole - u12 * u12) / (u13 * u13)).max(1.0);
        let h = (u12 * u12 / (u13 * u13)).max(1.0);
        let ceiling = 1.0 + mu * u13 * u13 / (u12 * u12);
        let tp = TighteningParams { mu, h, tightening_factor: 1.0 + t * (ceiling - 1.0), alpha };
        match check_theorem4(whole, u12, u13, &tp) {
            Ok(rep) => prop_assert!(rep.margin >= -TOL, "{rep:?}"),
            Err(Error::HypothesisRefused { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn chained_bound_equals_fold(
        r in 4usize..8,
        alpha in 2.0f64..5.0,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |lo: f64, hi: f64| rand::Rng::gen_range(&mut rng, lo..hi);
        let input = ChainInput {
            pair_ues: (0..r - 1).map(|_| draw(0.01, 1.0)).collect(),
            tail_ues: (0..r - 1).map(|_| draw(0.01, 1.0)).collect(),
            mu: (0..r - 2).map(|_| draw(1.0, 3.0)).collect(),
            h: (0..r - 2).map(|_| draw(1.0, 3.0)).collect(),
            p: (0..r - 2).map(|_| draw(1.0, 2.0)).collect(),
            k: 1 + (seed as usize) % (r - 3),
            alpha,
        };
        let closed = chained_bound_theorem5(&input).unwrap().value;
        let folded = chained_bound_by_folding(&input).unwrap();
        prop_assert!((closed - folded).abs() <= 1e-12 * closed.abs().max(1.0));
    }

    #[test]
    fn pre_residuals_nonnegative((gw, seed) in gw_state(), p in region_params()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = gw.n();
        let m = rand::Rng::gen_range(&mut rng, 1..n);
        let a = rand::Rng::gen_range(&mut rng, 1..=m);
        let b = rand::Rng::gen_range(&mut rng, m + 1..=n);
        let rep = monogamy_like_pre_check(&gw, &BlockCut::new(n, m, a, b).unwrap(), &p).unwrap();
        prop_assert!(rep.upper.margin >= -TOL && rep.lower.margin >= -TOL, "{rep:?}");
    }

    #[test]
    fn beta_lower_bound_holds((gw, seed) in gw_state(), beta in 0.0f64..=1.0, s in 0.5f64..=1.0) {
        let a = (seed % gw.n() as u64) as usize;
        let b = (a + 1) % gw.n();
        let rep = BetaInputs::compute(&gw, a, b).unwrap().lower_bound(beta, s).unwrap();
        prop_assert!(rep.margin >= -TOL, "{rep:?}");
    }

    #[test]
    fn beta_upper_bound_holds_for_tsallis2((gw, seed) in gw_state(), beta in 0.0f64..=1.0) {
        let a = (seed % gw.n() as u64) as usize;
        let b = (a + 1) % gw.n();
        let rep = BetaInputs::compute(&gw, a, b).unwrap().upper_bound(beta, 1.0).unwrap();
        prop_assert!(rep.margin >= -TOL, "{rep:?}");
    }
}

#[test]
fn upper_bound_fails_below_s_one() {
    // For q = 2 the closed form is f(x) = (1 − (1 − x²/2)^s)/s; the reduced
    // spectrum of ρ_AB is (w_A + w_B, 1 − w_A − w_B).
    let amps = [0.1, 0.7, 0.5, 0.5];
    let gw = GwState::qubits(&amps.map(|x| C64::new(x, 0.0))).unwrap();
    let s = 0.5;
    let f = |x: f64| (1.0 - (1.0 - x * x / 2.0).powf(s)) / s;
    let pair = |i: usize, j: usize| f(2.0 * amps[i] * amps[j]);
    let x = pair(0, 1) + pair(0, 2) + pair(0, 3);
    let y = pair(0, 1) + pair(1, 2) + pair(1, 3);
    let w = amps[0] * amps[0] + amps[1] * amps[1];
    let u_ab = ((w * w + (1.0 - w) * (1.0 - w)).powf(s) - 1.0) / (-s);
    let rep = BetaInputs::compute(&gw, 0, 1).unwrap().upper_bound(1.0, s).unwrap();
    assert!((rep.margin - (x + y - u_ab)).abs() < 1e-12);
    assert!(rep.is_violation());
}

#[test]
fn pre_decreasing_in_q() {
    let qs = q_sweep(1.0, 50);
    let printed = PairConcurrenceSource::PrintedClosedForm;
    for (a, b) in [(1, 5), (2, 5), (4, 5), (1, 6), (2, 6), (4, 6)] {
        let cut = BlockCut::new(6, 4, a, b).unwrap();
        let vals: Vec<f64> = qs.iter().map(|&q| upsilon(&cut, &UeParams::new(q, 1.0).unwrap(), printed).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "a={a} b={b}: {vals:?}");
    }
    for m in 1..6 {
        let vals: Vec<f64> = qs.iter().map(|&q| upsilon_prime(6, m, &UeParams::new(q, 1.0).unwrap(), printed).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "m={m}");
    }
}

#[test]
fn pre_oracle_nonnegative_on_uniform_w() {
    let oracle = PairConcurrenceSource::EffectiveQubitOracle;
    let params = UeParams::new(2.0, 1.0).unwrap();
    for m in 1..6 {
        assert!(upsilon_prime(6, m, &params, oracle).unwrap() >= -TOL);
        for a in 1..=m {
            for b in m + 1..=6 {
                assert!(upsilon(&BlockCut::new(6, m, a, b).unwrap(), &params, oracle).unwrap() >= -TOL);
            }
        }
    }
}
