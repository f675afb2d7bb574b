//! Analytic gradients against central finite differences.

mod common;

use common::{check_model, close, random_graphs, small_hp};
use ndarray::Array2;
use picolor::generators;
use picolor::gnn::ModelKind;
use picolor::potts::{modularity_couplings, soft_loss, soft_loss_gradient, Couplings, SoftAssignment};
use picolor::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn parameter_gradients_match_finite_differences() {
    let mut total = 0;
    for (i, g) in random_graphs().iter().enumerate() {
        for kind in [ModelKind::Gcn, ModelKind::Sage] {
            for q in [3, 4, 6] {
                total += check_model(g, &small_hp(kind, q, i as u64), &Couplings::default());
            }
        }
    }
    assert!(total > 10_000);
}

#[test]
fn deeper_models_and_weighted_couplings() {
    let g = generators::gnp(14, 0.35, 9);
    let j = modularity_couplings(&g).unwrap();
    for kind in [ModelKind::Gcn, ModelKind::Sage] {
        let mut hp = small_hp(kind, 3, 1);
        hp.hidden_dims = vec![4, 5];
        check_model(&g, &hp, &Couplings::default());
        check_model(&g, &hp, &j);
    }
}

#[test]
fn isolated_nodes() {
    let g = Graph::new(6, &[(0, 1), (1, 2)]).unwrap();
    for kind in [ModelKind::Gcn, ModelKind::Sage] {
        check_model(&g, &small_hp(kind, 4, 3), &Couplings::default());
    }
}

fn random_soft(n: usize, q: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let mut p = Array2::from_shape_fn((n, q), |_| rng.gen_range(0.05..1.0));
    for mut row in p.rows_mut() {
        let s = row.sum();
        row /= s;
    }
    p
}

#[test]
fn soft_loss_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..10 {
        let g = generators::gnp(12, 0.4, seed);
        if g.edge_count() == 0 {
            continue;
        }
        let couplings = [Couplings::Uniform(-1.0), Couplings::Uniform(0.7), modularity_couplings(&g).unwrap()];
        for j in &couplings {
            let p = random_soft(12, 4, &mut rng);
            let soft = SoftAssignment::new(p.clone()).unwrap();
            let grad = soft_loss_gradient(&g, &soft, j).unwrap();
            for v in 0..12 {
                for c in 0..4 {
                    // Move mass between two colors so the row stays stochastic,
                    // giving the directional derivative grad[v,c] - grad[v,c'].
                    let other = (c + 1) % 4;
                    let eval = |delta: f64| {
                        let mut m = p.clone();
                        m[[v, c]] += delta;
                        m[[v, other]] -= delta;
                        soft_loss(&g, &SoftAssignment::new(m).unwrap(), j).unwrap()
                    };
                    let h = 1e-6;
                    let numeric = (eval(h) - eval(-h)) / (2.0 * h);
                    let analytic = grad[[v, c]] - grad[[v, other]];
                    assert!(close(analytic, numeric), "{analytic} vs {numeric}");
                }
            }
        }
    }
}
