//! Seeded randomized sweep of the monogamy theorems over GW states.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::monogamy::{
    alpha_monogamy_report, squared_monogamy_report, subadditivity_gaps, BetaInputs, FocusConcurrences,
    MonogamyReport, MARGIN_TOL,
};
use crate::states::{GwState, Partition};
use crate::unified::UeParams;

pub const DEFAULT_SEED: u64 = 20_240_617;

/// 5×5 grid, every point inside region R.
pub const GRID_Q: [f64; 5] = [1.2, 1.6, 2.0, 2.4, 2.8];
pub const GRID_S: [f64; 5] = [0.5, 0.625, 0.75, 0.875, 1.0];
pub const ALPHAS: [f64; 6] = [2.0, 2.5, 3.0, 5.0, -0.5, -1.0];
pub const BETAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const BETA_S: [f64; 3] = [0.5, 0.75, 1.0];
/// Negative powers are only exercised when every pair UE exceeds this.
pub const NEG_ALPHA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub states: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub d_min: usize,
    pub d_max: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            states: 500,
            n_min: 3,
            n_max: 8,
            d_min: 2,
            d_max: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub id: String,
    pub checked: usize,
    pub skipped: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub worst_case: String,
}

impl Tally {
    fn new(id: &str) -> Self {
        Tally {
            id: id.into(),
            checked: 0,
            skipped: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            worst_case: String::new(),
        }
    }

    fn record(&mut self, margin: f64, case: impl FnOnce() -> String) {
        self.checked += 1;
        if margin < -MARGIN_TOL {
            self.violations += 1;
        }
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_case = case();
        }
    }

    fn report(&mut self, rep: &MonogamyReport, state_idx: usize) {
        self.record(rep.margin, || describe(state_idx, rep));
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn describe(state_idx: usize, rep: &MonogamyReport) -> String {
    let params: Vec<String> = rep.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("state#{state_idx} {}", params.join(" "))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    pub tallies: Vec<Tally>,
}

impl SuiteSummary {
    pub fn tally(&self, id: &str) -> Option<&Tally> {
        self.tallies.iter().find(|t| t.id == id)
    }

    pub fn violations(&self) -> usize {
        self.tallies.iter().map(|t| t.violations).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Runs the squared, α-power, β-lower, β-upper and subadditivity checks.
/// Every random draw comes from one ChaCha stream seeded by `config.seed`.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut t2 = Tally::new("squared_monogamy");
    let mut t3 = Tally::new("alpha_monogamy");
    let mut t3r = Tally::new("alpha_reverse_strict");
    let mut t6 = Tally::new("beta_lower_bound");
    let mut t7 = Tally::new("beta_upper_bound");
    let mut sub = Tally::new("subadditivity");

    let grid: Vec<UeParams> = GRID_Q
        .iter()
        .flat_map(|&q| GRID_S.iter().map(move |&s| UeParams::new(q, s)))
        .collect::<Result<_>>()?;

    for idx in 0..config.states {
        let n = rng.gen_range(config.n_min..=config.n_max);
        let d = rng.gen_range(config.d_min..=config.d_max);
        let state = GwState::random(n, d, &mut rng)?;
        let k = rng.gen_range(2..=n.min(4));
        let partition = Partition::random(n, k, &mut rng)?;
        let focus = rng.gen_range(0..k);
        let psi = state.state_vector()?;
        let fc = FocusConcurrences::from_vector(&psi, &partition, focus)?;

        for params in &grid {
            t2.report(&squared_monogamy_report(&fc, params)?, idx);
            let pair_min = fc.pair_ues(params)?.into_iter().fold(f64::INFINITY, f64::min);
            for &alpha in &ALPHAS {
                if alpha >= 2.0 {
                    t3.report(&alpha_monogamy_report(&fc, params, alpha)?, idx);
                } else if pair_min > NEG_ALPHA_FLOOR {
                    t3r.report(&alpha_monogamy_report(&fc, params, alpha)?, idx);
                } else {
                    t3r.skipped += 1;
                }
            }
        }

        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let inputs = BetaInputs::compute(&state, a, b)?;
        for &s in &BETA_S {
            for &beta in &BETAS {
                t6.report(&inputs.lower_bound(beta, s)?, idx);
                t7.report(&inputs.upper_bound(beta, s)?, idx);
            }
            let (lo, hi) = subadditivity_gaps(&psi, a, b, &UeParams::new(2.0, s)?)?;
            sub.record(lo.min(hi), || format!("state#{idx} q=2 s={s} sites=({a},{b})"));
        }
    }

    Ok(SuiteSummary {
        config: config.clone(),
        tallies: vec![t2, t3, t3r, t6, t7, sub],
    })
}
