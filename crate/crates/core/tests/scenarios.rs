use aci_core::combi::{run_acog, ChainVariant};
use aci_core::env::{make_or_world, OrWorld};
use aci_core::metrics::coverage_series;
use aci_core::rng::replica_seed;
use aci_core::StepSchedule;

const N: usize = 20;
const T: u64 = 20_000;
const BURN_IN: usize = 5_000;
const MIN_AGREEMENT: f64 = 0.95;

fn chain_sets(p: &[f64], seed: u64, variant: ChainVariant) -> (Vec<Vec<usize>>, f64) {
    let mut env = make_or_world(p.to_vec(), seed).unwrap();
    let eta = StepSchedule::constant(N as f64 / 2.0 / (T as f64).sqrt()).unwrap();
    let (trace, _, _) = run_acog(N, 0.8, eta, T, variant, &mut env).unwrap();
    let sets = trace
        .iter()
        .map(|r| {
            let mut s = r.action.chain().unwrap().to_vec();
            s.sort_unstable();
            s
        })
        .collect();
    (sets, *coverage_series(&trace).last().unwrap())
}

#[test]
fn both_chain_variants_keep_coverage() {
    let seed = replica_seed(11, 0);
    let p = OrWorld::random_probabilities(N, 0.05, 0.30, seed);
    for variant in [ChainVariant::PositionKeyed, ChainVariant::PrefixKeyed] {
        let (_, cov) = chain_sets(&p, seed, variant);
        assert!((cov - 0.8).abs() <= 0.02, "{variant:?} coverage {cov}");
    }
}

#[test]
#[ignore = "not reached at T = 20000: widths ~5/sqrt(plays) dwarf the ~0.01 marginal gaps, agreement is ~0%"]
fn position_and_prefix_keyed_chains_agree_after_burn_in() {
    let seed = replica_seed(11, 0);
    let p = OrWorld::random_probabilities(N, 0.05, 0.30, seed);
    let (a, _) = chain_sets(&p, seed, ChainVariant::PositionKeyed);
    let (b, _) = chain_sets(&p, seed, ChainVariant::PrefixKeyed);
    let same = a[BURN_IN..].iter().zip(&b[BURN_IN..]).filter(|(x, y)| x == y).count();
    let share = same as f64 / (T as usize - BURN_IN) as f64;
    assert!(share >= MIN_AGREEMENT, "same arm set on {share:.4} of post-burn-in steps");
}
