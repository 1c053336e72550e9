use proptest::prelude::*;

use prc_bounds::bounds::partition::partition_identity;
use prc_bounds::channel::{build_matrix, transition_prob, BitString, ChannelSpec, DEFAULT_MEMORY_BUDGET};
use prc_bounds::oracle::{enumerate_transition, mutual_information, simulate, SimConfig};

fn bitstring(max_len: usize) -> impl Strategy<Value = BitString> {
    (0..=max_len).prop_flat_map(|len| {
        let top = if len == 0 { 1u64 } else { 1u64 << len };
        (0..top).prop_map(move |v| BitString::new(len, v).unwrap())
    })
}

proptest! {
    #[test]
    fn dp_matches_enumeration(
        x in bitstring(5).prop_filter("nonempty", |x| !x.is_empty()),
        cap in 0u32..=4,
        lambda in 0.0f64..3.0,
        y in bitstring(12),
    ) {
        let dp = transition_prob(x, y, lambda, Some(cap));
        let en = enumerate_transition(x, y, lambda, cap).unwrap();
        prop_assert!((dp - en).abs() <= 1e-12, "dp={dp} enum={en}");
    }

    #[test]
    fn partition_rates_recompose(
        seed in any::<u64>(),
        l in 1u32..=3,
        lambda in 0.1f64..2.0,
        cap in prop::option::of(1u32..=3),
        k in 1usize..=4,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let spec = ChannelSpec { lambda, block_len: l, max_output_len: 2 * l + 1, per_bit_cap: cap, conditioned: true };
        let m = build_matrix(&spec, DEFAULT_MEMORY_BUDGET).unwrap();
        let mut parts = vec![Vec::new(); k];
        for i in 0..m.outputs.len() {
            parts[rng.random_range(0..k)].push(i);
        }
        let mut q: Vec<f64> = (0..m.dmc().num_inputs()).map(|_| rng.random::<f64>() + 1e-3).collect();
        let s: f64 = q.iter().sum();
        q.iter_mut().for_each(|v| *v /= s);
        let (lhs, rhs) = partition_identity(m.dmc(), &parts, &q).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9);
        prop_assert!((lhs - mutual_information(m.dmc(), &q).unwrap()).abs() == 0.0);
    }
}

#[test]
fn unreachable_lengths_have_zero_probability() {
    let x: BitString = "101".parse().unwrap();
    let y = BitString::new(7, 0b1011101).unwrap();
    assert_eq!(enumerate_transition(x, y, 1.0, 2).unwrap(), 0.0);
    assert_eq!(transition_prob(x, y, 1.0, Some(2)), 0.0);
}

#[test]
fn simulated_length_and_frequencies() {
    let cfg = SimConfig {
        seed: 7,
        samples_per_input: 1_000_000,
    };
    let n = cfg.samples_per_input as f64;

    let lambda = 1.3;
    let zero: BitString = "0".parse().unwrap();
    let mut rng = cfg.stream(0);
    let mut total = 0.0;
    for _ in 0..cfg.samples_per_input {
        let y = simulate(zero, lambda, &mut rng).unwrap();
        assert!(y.bits().all(|b| !b));
        total += y.len() as f64;
    }
    let mean = total / n;
    assert!((mean - lambda).abs() <= 4.0 * (lambda / n).sqrt(), "mean {mean}");

    let x: BitString = "01".parse().unwrap();
    let one: BitString = "1".parse().unwrap();
    let mut rng = cfg.stream(1);
    let hits = (0..cfg.samples_per_input)
        .filter(|_| simulate(x, 1.0, &mut rng).unwrap() == one)
        .count() as f64;
    let p = (-2.0f64).exp();
    let f = hits / n;
    assert!((f - p).abs() <= 4.0 * (p * (1.0 - p) / n).sqrt(), "freq {f} vs {p}");
}

#[test]
fn streams_are_reproducible() {
    let cfg = SimConfig {
        seed: 99,
        samples_per_input: 1,
    };
    let x: BitString = "0110".parse().unwrap();
    let draw = |j| {
        let mut rng = cfg.stream(j);
        (0..200).map(|_| simulate(x, 1.5, &mut rng).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(draw(3), draw(3));
    assert_ne!(draw(3), draw(4));
}
