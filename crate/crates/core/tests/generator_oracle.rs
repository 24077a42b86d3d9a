mod common;

use std::collections::BTreeSet;

use ecmix::generator::{generate, GeneratorConfig};
use ecmix::synth::{random_bitree, TreeShape};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check(seed: u64, shape: &TreeShape) -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_bitree(&mut rng, shape);
    let gen = generate(&t, &GeneratorConfig::default(), "t");
    let got: Vec<common::Surface> = gen.candidates.iter().map(|c| common::surface(&c.tokens)).collect();
    let set: BTreeSet<_> = got.iter().cloned().collect();
    if set.len() != got.len() {
        return Err(format!("duplicates for {}", t.to_bracketed()));
    }
    let want = common::oracle(&t);
    if set != want {
        let extra: Vec<_> = set.difference(&want).take(3).collect();
        let missing: Vec<_> = want.difference(&set).take(3).collect();
        return Err(format!("{}\nextra {extra:?}\nmissing {missing:?}", t.to_bracketed()));
    }
    Ok(())
}

#[test]
fn matches_oracle_on_default_shape() {
    for seed in 0..300 {
        check(seed, &TreeShape::default()).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn matches_oracle_on_varied_shapes(
        seed in any::<u64>(),
        p_permuted in 0.0..1.0f64,
        p_elided in 0.0..0.3f64,
        p_tgt_only in 0.0..0.3f64,
        max_children in 2usize..5,
    ) {
        let shape = TreeShape { p_permuted, p_elided, p_tgt_only, max_children, max_leaves: 10, ..TreeShape::default() };
        prop_assert!(check(seed, &shape).is_ok(), "{}", check(seed, &shape).unwrap_err());
    }
}
