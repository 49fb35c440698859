use super::{DistError, Histogram, Partition, Pmf};

fn same_len(p: &Pmf, q: &Pmf) -> Result<(), DistError> {
    if p.len() != q.len() {
        return Err(DistError::LengthMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(())
}

/// Total variation distance, half the l1 distance.
pub fn tv_distance(p: &Pmf, q: &Pmf) -> Result<f64, DistError> {
    same_len(p, q)?;
    let s: f64 = p
        .weights()
        .iter()
        .zip(q.weights())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * s).clamp(0.0, 1.0))
}

/// Averages `d` within each block of `part`.
pub fn flatten(d: &Pmf, part: &Partition) -> Result<Pmf, DistError> {
    Ok(Histogram::from_pmf(d, part)?.to_pmf())
}

/// Block masses of `d`, as a pmf over the `len()` blocks.
pub fn reduce(d: &Pmf, part: &Partition) -> Result<Pmf, DistError> {
    let h = Histogram::from_pmf(d, part)?;
    Pmf::new(h.block_weights().to_vec())
}

/// Spreads each block mass of `q` uniformly over its block.
pub fn expand(q: &Pmf, part: &Partition) -> Result<Pmf, DistError> {
    Ok(Histogram::new(part.clone(), q.weights().to_vec())?.to_pmf())
}

/// Index reversal, `D^R(i) = D(n-1-i)` on `{0, .., n-1}`.
pub fn mirror(d: &Pmf) -> Pmf {
    let mut w = d.weights().to_vec();
    w.reverse();
    Pmf::from_normalized(w)
}

#[cfg(test)]
mod tests {
    use super::super::oblivious_partition;
    use super::*;
    use proptest::prelude::*;

    fn pmf_strategy(max_n: usize) -> impl Strategy<Value = Pmf> {
        prop::collection::vec(0.0f64..1.0, 1..max_n).prop_filter_map("zero", |v| Pmf::from_masses(v).ok())
    }

    #[test]
    fn tv_examples() {
        let p = Pmf::new(vec![0.5, 0.5]).unwrap();
        let q = Pmf::new(vec![1.0, 0.0]).unwrap();
        assert!((tv_distance(&p, &q).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert!(tv_distance(&p, &Pmf::uniform(3).unwrap()).is_err());
    }

    #[test]
    fn flatten_reduce_expand() {
        let d = Pmf::new(vec![0.4, 0.2, 0.2, 0.1, 0.05, 0.05]).unwrap();
        let part = Partition::from_sizes(&[1, 2, 3]).unwrap();
        let q = reduce(&d, &part).unwrap();
        assert_eq!(q.len(), 3);
        assert!((q.weight(2) - 0.2).abs() < 1e-15);
        let f = flatten(&d, &part).unwrap();
        let e = expand(&q, &part).unwrap();
        assert_eq!(f, e);
        assert!((f.weight(4) - 0.2 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mirror_is_reversal() {
        let d = Pmf::new(vec![0.1, 0.2, 0.7]).unwrap();
        assert_eq!(mirror(&d).weights(), &[0.7, 0.2, 0.1]);
    }

    proptest! {
        #[test]
        fn mirror_involution(d in pmf_strategy(40)) {
            prop_assert_eq!(mirror(&mirror(&d)), d);
        }

        #[test]
        fn tv_is_metric(a in pmf_strategy(12), seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = a.len();
            let mut draw = || Pmf::from_masses((0..n).map(|_| rng.random::<f64>() + 1e-9).collect()).unwrap();
            let b = draw();
            let c = draw();
            let ab = tv_distance(&a, &b).unwrap();
            prop_assert!((ab - tv_distance(&b, &a).unwrap()).abs() < 1e-15);
            prop_assert!(ab <= tv_distance(&a, &c).unwrap() + tv_distance(&c, &b).unwrap() + 1e-12);
        }

        #[test]
        fn flatten_contracts(p in pmf_strategy(64), seed in 0u64..1000, alpha in 0.05f64..1.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let q = Pmf::from_masses((0..p.len()).map(|_| rng.random::<f64>() + 1e-9).collect()).unwrap();
            let part = oblivious_partition(p.len(), alpha).unwrap();
            let before = tv_distance(&p, &q).unwrap();
            let after = tv_distance(&flatten(&p, &part).unwrap(), &flatten(&q, &part).unwrap()).unwrap();
            prop_assert!(after <= before + 1e-12);
        }

        #[test]
        fn reduce_expand_roundtrip(p in pmf_strategy(64), alpha in 0.05f64..1.0) {
            let part = oblivious_partition(p.len(), alpha).unwrap();
            let q = reduce(&p, &part).unwrap();
            let back = reduce(&expand(&q, &part).unwrap(), &part).unwrap();
            for (a, b) in q.weights().iter().zip(back.weights()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
