use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tql_core::oracle::{lifted_eval, tcra_eval, tcra_eval_with_ceiling, DatasetSet, OracleError};
use tql_core::reference::gen::{self, Limits};
use tql_core::reference::naive;
use tql_core::solver::DiscoveryProgram;

fn limits() -> Limits {
    Limits {
        max_free: 3,
        ..Limits::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn closed_programs_have_at_most_one_output(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let repo = gen::repository(&mut rng, &limits());
        let s = gen::closed_program(&mut rng, &repo, &limits());
        let dp = DiscoveryProgram::new(s, repo).unwrap();
        let out = tcra_eval(&dp).unwrap();
        let direct = naive::run(dp.resolved(), &[]);
        prop_assert!(out.len() <= 1);
        prop_assert_eq!(out.iter().next().map(|d| d.structural_key()), direct.map(|t| t.canonical()));
    }

    #[test]
    fn more_datasets_never_lose_outputs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let small = gen::repository(&mut rng, &Limits { max_datasets: 3, ..limits() });
        let s = gen::program(&mut rng, &small, &limits());
        let mut big = small.clone();
        for i in 0..rand::Rng::gen_range(&mut rng, 1..=2) {
            big.insert(format!("extra{i}"), gen::dataset(&mut rng, 6));
        }
        let before = tcra_eval(&DiscoveryProgram::new(s.clone(), small).unwrap()).unwrap();
        let after = tcra_eval(&DiscoveryProgram::new(s, big).unwrap()).unwrap();
        prop_assert!(before.is_subset(&after), "lost {:?}", before.difference(&after).collect::<Vec<_>>());
    }

    #[test]
    fn lifting_over_approximates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let repo = gen::repository(&mut rng, &limits());
        let s = gen::program(&mut rng, &repo, &limits());
        let dp = DiscoveryProgram::new(s, repo).unwrap();
        let exact = tcra_eval(&dp).unwrap();
        let lifted = lifted_eval(&dp).unwrap();
        prop_assert!(exact.is_subset(&lifted));
        if dp.arity() == 0 || dp.repo().len() == 1 {
            prop_assert_eq!(exact, lifted);
        }
    }

    #[test]
    fn outputs_are_deduplicated(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let repo = gen::repository(&mut rng, &limits());
        let s = gen::program(&mut rng, &repo, &limits());
        let dp = DiscoveryProgram::new(s, repo).unwrap();
        let out = tcra_eval(&dp).unwrap();
        let rebuilt: DatasetSet = out.iter().cloned().chain(out.iter().cloned()).collect();
        prop_assert_eq!(rebuilt.len(), out.len());
    }
}

#[test]
fn ceiling_is_enforced() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let repo = gen::repository(
        &mut rng,
        &Limits {
            max_datasets: 4,
            ..limits()
        },
    );
    let dp = DiscoveryProgram::new(tql_core::frontend::compile("a; b; return a").unwrap(), repo)
        .unwrap();
    let n = dp.candidate_count().unwrap();
    assert!(tcra_eval_with_ceiling(&dp, n).is_ok());
    assert!(matches!(
        tcra_eval_with_ceiling(&dp, n - 1),
        Err(OracleError::CeilingExceeded { candidates: Some(c), .. }) if c == n
    ));
}
