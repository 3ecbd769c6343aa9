//! Finite-difference validation of every hand-derived gradient path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radnlp_core::corpus::{Tag, TagGrid};
use radnlp_core::nnkernel::{grad_check, Matrix, FD_STEP};
use radnlp_core::tagger::{loss, loss_and_grads, TaggerConfig, TaggerParams, TrainItem};

fn random_grid(n: usize, rng: &mut ChaCha8Rng) -> TagGrid {
    let mut grid = TagGrid::new(n);
    for t in 0..n {
        for c in 0..5 {
            grid.set(t, c, Tag::from_index(rng.gen_range(0..5)).unwrap());
        }
    }
    grid
}

fn check_tagger(config: &TaggerConfig, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = 6;
    let emb = Matrix::uniform(vocab, config.embedding_dim, -0.5, 0.5, &mut rng);
    let params = TaggerParams::init(config, emb, &mut rng).unwrap();

    let n = rng.gen_range(1..=config.max_len);
    let word_ids: Vec<u32> = (0..n).map(|_| rng.gen_range(0..vocab as u32)).collect();
    let grid = random_grid(n, &mut rng);
    let item = TrainItem::from_grid(word_ids, &grid).unwrap();

    let (_, analytic) = loss_and_grads(&params, config, &item).unwrap();
    let named = params.tensors();
    let names: Vec<&str> = named.iter().map(|(n, _)| n.as_str()).collect();
    let mut tensors: Vec<Matrix> = named.iter().map(|(_, m)| (*m).clone()).collect();
    let analytic_list: Vec<Matrix> = analytic.tensors().iter().map(|(_, m)| (*m).clone()).collect();

    let mut template = params.clone();
    let report = grad_check(
        &mut tensors,
        &names,
        &analytic_list,
        |ts| {
            template.set_from_tensor_list(ts);
            loss(&template, config, &item).unwrap()
        },
        FD_STEP,
    );
    report.max_rel_error()
}

#[test]
fn full_tagger_loss_matches_finite_differences() {
    let config = TaggerConfig {
        embedding_dim: 3,
        cell_size: 4,
        max_len: 4,
        ..TaggerConfig::default()
    };
    for seed in 0..3 {
        let err = check_tagger(&config, seed);
        assert!(err < 1e-4, "seed {seed}: max rel error {err}");
    }
}

#[test]
fn tagger_without_peepholes_matches_finite_differences() {
    let config = TaggerConfig {
        embedding_dim: 3,
        cell_size: 4,
        max_len: 3,
        use_peepholes: false,
        ..TaggerConfig::default()
    };
    let err = check_tagger(&config, 9);
    assert!(err < 1e-4, "max rel error {err}");
}

#[test]
fn positionwise_projection_matches_finite_differences() {
    let config = TaggerConfig {
        embedding_dim: 2,
        cell_size: 3,
        max_len: 3,
        positionwise_projection: true,
        ..TaggerConfig::default()
    };
    let err = check_tagger(&config, 21);
    assert!(err < 1e-4, "max rel error {err}");
}
