use super::{check_eps, guarded, require, Step, TesterError, TesterKind, Verdict};
use super::exp_property::test_growth_property;
use crate::constants::Constants;
use crate::distcore::{oblivious_partition, GrowthCaps, Partition};
use crate::oracles::{IndexSet, OracleError, OracleSession, PairConditional};
use crate::subroutines::{estimate_dist_to_flattening_cond, UniformityDistance, Whitebox};

/// The block-mass distribution of a COND session, seen through its blocks.
///
/// A conditional query on blocks `{j, k}` is a COND query on `I_j ∪ I_k`.
pub struct ReducedView<'a> {
    pub session: &'a mut OracleSession,
    pub partition: &'a Partition,
}

impl PairConditional for ReducedView<'_> {
    fn domain_len(&self) -> usize {
        self.partition.len()
    }

    fn sample(&mut self) -> Result<usize, OracleError> {
        Ok(self.partition.block_of(self.session.samp()?))
    }

    fn pair_hits(&mut self, x: usize, y: usize, t: u64) -> Result<u64, OracleError> {
        let target = IndexSet::interval(self.partition.block(y));
        let within = target.union(&IndexSet::interval(self.partition.block(x)));
        self.session.cond_hits(&within, &target, t)
    }
}

/// COND tester with query count independent of `n`, using `plugin` for
/// block distances to uniformity.
pub fn test_monotone_cond_polyeps_with(
    s: &mut OracleSession,
    eps: f64,
    plugin: &mut dyn UniformityDistance,
    c: &Constants,
) -> Result<Verdict, TesterError> {
    require(s, TesterKind::CondPolyeps)?;
    check_eps(eps)?;
    let alpha = eps / 4.0;
    let part = oblivious_partition(s.domain_size(), alpha)?.partition;
    let caps = GrowthCaps::for_partition(&part);
    guarded(s, |s| {
        let mut view = ReducedView {
            session: s,
            partition: &part,
        };
        if test_growth_property(&mut view, &caps, alpha, eps / 4.0, c)? {
            return Ok(Verdict::reject(s, Step::ExpProperty));
        }
        let d = estimate_dist_to_flattening_cond(s, &part, eps / 8.0, 0.1, plugin, c)?;
        if d.value > eps / 4.0 + eps / 8.0 {
            return Ok(Verdict::reject(s, Step::FlatteningDistance));
        }
        Ok(Verdict::accept(s))
    })
}

/// [`test_monotone_cond_polyeps_with`] using exact block distances.
pub fn test_monotone_cond_polyeps(s: &mut OracleSession, eps: f64, c: &Constants) -> Result<Verdict, TesterError> {
    test_monotone_cond_polyeps_with(s, eps, &mut Whitebox::default(), c)
}
