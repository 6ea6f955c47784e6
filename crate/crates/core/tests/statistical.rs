use aci_core::bandit::{bandit_step, confidence_width, BanditConfig, BanditMode, BanditState};
use aci_core::env::{make_iid_arms, ArmEnvironment, ArmSpec};
use aci_core::rng::replica_seed;
use aci_core::StepSchedule;

const RUNS: u64 = 1000;
const T: u64 = 1000;
const MAX_MISS: f64 = 0.05;

/// Share of (arm, step) pairs whose true mean falls outside the empirical
/// mean plus or minus the confidence width.
#[test]
fn confidence_intervals_cover_true_means() {
    let specs = vec![ArmSpec::fixed(0.2, 0.1), ArmSpec::fixed(0.5, 0.4), ArmSpec::fixed(0.7, 0.6), ArmSpec::fixed(0.9, 0.8)];
    let (mut miss, mut total) = (0u64, 0u64);
    for k in 0..RUNS {
        let mut env = make_iid_arms(specs.clone(), 1.0, replica_seed(4, k)).unwrap();
        let (means, _) = env.arm_means().unwrap();
        let cfg = BanditConfig::for_env(&env, 0.6, T, BanditMode::BoundaryRule).unwrap();
        let log_nt = (cfg.n as f64 * T as f64).ln();
        let mut st = BanditState::new(&cfg, StepSchedule::constant(1.0 / (T as f64).sqrt()).unwrap()).unwrap();
        for _ in 0..T {
            bandit_step(&mut st, &cfg, &mut env).unwrap();
            for (s, mu) in st.stats.iter().zip(&means) {
                if s.plays > 0 {
                    total += 1;
                    miss += u64::from((s.mean_reward - mu).abs() > confidence_width(log_nt, s.plays));
                }
            }
        }
    }
    let share = miss as f64 / total as f64;
    assert!(share < MAX_MISS, "true mean outside the interval on {share:.5} of pairs");
}
