mod common;

use std::sync::Arc;

use common::*;
use monotest::distcore::{distance_to_monotone_exact, Pmf};
use monotest::oracles::{AccessModel, IndexSet, OracleSession};
use rand::Rng;

const FROZEN: [(&[f64], f64); 5] = [
    (&[0.1, 0.2, 0.3, 0.4], 0.2),
    (&[0.3, 0.7], 0.2),
    (&[0.5, 0.0, 0.5], 0.25),
    (&[0.2, 0.1, 0.4, 0.05, 0.25], 0.25),
    (&[0.05, 0.05, 0.1, 0.3, 0.2, 0.3], 0.3),
];

#[test]
fn vertex_oracle_reproduces_frozen_values() {
    for (d, want) in FROZEN {
        assert!((distance_to_monotone_vertices(d) - want).abs() < 1e-12, "{d:?}");
        assert!(distance_to_monotone_grid(d, 40) >= want - 1e-12);
        assert!(distance_to_monotone_grid(d, 40) <= want + 0.05);
    }
}

#[test]
fn library_matches_frozen_values() {
    for (d, want) in FROZEN {
        let p = Pmf::new(d.to_vec()).unwrap();
        assert!((distance_to_monotone_exact(&p) - want).abs() < 1e-12, "{d:?}");
    }
}

#[test]
fn grid_never_beats_vertices() {
    let mut r = rng(11);
    for _ in 0..30 {
        let n = r.random_range(2..=4);
        let d = random_pmf(&mut r, n);
        let v = distance_to_monotone_vertices(&d);
        let g = distance_to_monotone_grid(&d, 30);
        assert!(g >= v - 1e-12 && g <= v + 0.1, "{d:?}: {g} vs {v}");
    }
}

fn session(w: Vec<f64>, model: AccessModel, seed: u64) -> OracleSession {
    OracleSession::new(Arc::new(Pmf::new(w).unwrap()), model, seed)
}

#[test]
fn batched_samples_follow_the_pmf() {
    let w = vec![0.3, 0.2, 0.15, 0.1, 0.1, 0.05, 0.05, 0.05];
    let mut s = session(w.clone(), AccessModel::Samp, 3);
    let t = 20_000;
    let mut counts = vec![0u64; w.len()];
    for (i, k) in s.samp_counts(t).unwrap() {
        counts[i] += k;
    }
    assert_eq!(counts.iter().sum::<u64>(), t);
    assert_eq!(s.log().samp, t);
    let (stat, cells) = pearson(&counts, &w);
    assert!(stat < chi_square_quantile((cells - 1) as f64, 3.7), "{stat}");
}

#[test]
fn single_samples_follow_the_pmf() {
    let w = vec![0.5, 0.25, 0.125, 0.0625, 0.0625];
    let mut s = session(w.clone(), AccessModel::Samp, 5);
    let mut counts = vec![0u64; w.len()];
    for _ in 0..10_000 {
        counts[s.samp().unwrap()] += 1;
    }
    let (stat, cells) = pearson(&counts, &w);
    assert!(stat < chi_square_quantile((cells - 1) as f64, 3.7), "{stat}");
}

#[test]
fn conditional_draws_follow_the_restriction() {
    let w = vec![0.05, 0.3, 0.05, 0.2, 0.1, 0.1, 0.1, 0.1];
    let set = IndexSet::from_indices([1, 3, 6, 7]);
    let restricted: Vec<f64> = [0.3, 0.2, 0.1, 0.1].iter().map(|x| x / 0.7).collect();
    let mut s = session(w.clone(), AccessModel::Cond, 9);
    let mut counts = vec![0u64; 4];
    for _ in 0..10_000 {
        let i = s.cond(&set).unwrap();
        counts[[1, 3, 6, 7].iter().position(|&x| x == i).unwrap()] += 1;
    }
    let (stat, cells) = pearson(&counts, &restricted);
    assert!(stat < chi_square_quantile((cells - 1) as f64, 3.7), "{stat}");

    let target = IndexSet::from_indices([3, 7]);
    let hits = s.cond_hits(&set, &target, 100_000).unwrap();
    let p: f64 = 0.3 / 0.7;
    let sd = (100_000.0 * p * (1.0 - p)).sqrt();
    assert!((hits as f64 - 100_000.0 * p).abs() < 4.5 * sd);
}

#[test]
fn interval_and_pair_hits_are_binomial() {
    let w = vec![0.4, 0.1, 0.2, 0.3];
    let t = 50_000u64;
    let mut s = session(w.clone(), AccessModel::IntCond, 2);
    let hits = s.intcond_hits(1..4, 2..3, t).unwrap();
    let p = 0.2 / 0.6;
    assert!((hits as f64 / t as f64 - p).abs() < 4.5 * (p * (1.0 - p) / t as f64).sqrt());
    assert_eq!(s.log().intcond, t);

    let mut s = session(w, AccessModel::PairCond, 2);
    let hits = s.paircond_hits(0, 3, t).unwrap();
    let p = 0.3 / 0.7;
    assert!((hits as f64 / t as f64 - p).abs() < 4.5 * (p * (1.0 - p) / t as f64).sqrt());
    assert_eq!(s.log().paircond, t);
}

#[test]
fn cumulative_queries_are_exact() {
    let w = vec![0.4, 0.1, 0.2, 0.3];
    let mut s = session(w, AccessModel::CumulativeDual, 0);
    assert!((s.ceval(0).unwrap() - 0.4).abs() < 1e-15);
    assert!((s.ceval(3).unwrap() - 1.0).abs() < 1e-15);
    assert!((s.ceval_mass(1..3).unwrap() - 0.3).abs() < 1e-15);
    assert_eq!(s.log().ceval, 4);
    assert!(s.eval(0).is_err());
}
