use rand::Rng;

use super::{
    build_block_mp, build_conditional, build_custom, build_full, build_static_linkage_tree, build_univariate,
    learn_linkage_tree_discrete, learn_linkage_tree_real, Fos, LinkageModel, SimilarityMatrix, SimilarityMeasure, Vig,
};
use crate::error::Result;
use crate::fitness::Fitness;
use crate::types::{Domain, Gene};

/// A linkage model prepared for a run: either one FOS fixed for the whole
/// run, or a tree relearned from the population every generation.
#[derive(Debug, Clone, PartialEq)]
pub enum Linkage {
    Fixed(Fos),
    Learned {
        measure: SimilarityMeasure,
        filtered: bool,
        max_set_size: usize,
    },
}

impl Linkage {
    pub fn resolve<G: Gene, R: Rng + ?Sized>(
        model: &LinkageModel,
        domain: Domain,
        fitness: &Fitness<'_, G>,
        rng: &mut R,
    ) -> Result<Self> {
        let decomposition = fitness.decomposition();
        model.check(domain, decomposition.is_some())?;
        let ell = fitness.size()?.get();
        let vig = || {
            let d = decomposition.expect("checked above");
            Vig::from_inputs(ell, d.inputs())
        };
        let fos = match model {
            LinkageModel::LinkageTree { measure, filtered, max_set_size } => {
                return Ok(Linkage::Learned {
                    measure: *measure,
                    filtered: *filtered,
                    max_set_size: *max_set_size,
                })
            }
            LinkageModel::Univariate => build_univariate(ell),
            LinkageModel::Full => build_full(ell, domain)?,
            LinkageModel::BlockMarginalProduct { block_size } => build_block_mp(ell, *block_size)?,
            LinkageModel::Custom { sets } => build_custom(sets, ell)?,
            LinkageModel::CustomFile { .. } => unreachable!("rejected by check"),
            LinkageModel::StaticLinkageTree { max_set_size } => {
                let function = decomposition.expect("checked above").function();
                let custom = function
                    .similarity_measure(0, ell.min(1))
                    .map(|_| SimilarityMatrix::from_fn(ell, |a, b| function.similarity_measure(a, b).unwrap_or(0.0)));
                build_static_linkage_tree(&vig(), custom.as_ref(), *max_set_size, domain, rng)
            }
            LinkageModel::Conditional { max_clique_size, include_cliques, include_full } => {
                build_conditional(&vig(), *max_clique_size, *include_cliques, *include_full)?
            }
        };
        fos.validate(domain)?;
        Ok(Linkage::Fixed(fos))
    }

    pub fn is_learned(&self) -> bool {
        matches!(self, Linkage::Learned { .. })
    }

    /// FOS for the next generation of a binary population.
    pub fn for_discrete<R: Rng + ?Sized>(&self, population: &[&[u8]], ell: usize, rng: &mut R) -> Fos {
        match self {
            Linkage::Fixed(f) => f.clone(),
            Linkage::Learned { measure, filtered, max_set_size } => {
                learn_linkage_tree_discrete(population, ell, *measure, *filtered, *max_set_size, rng)
            }
        }
    }

    /// FOS for the next generation of a real-valued population.
    pub fn for_real<R: Rng + ?Sized>(&self, population: &[&[f64]], ell: usize, rng: &mut R) -> Fos {
        match self {
            Linkage::Fixed(f) => f.clone(),
            Linkage::Learned { filtered, max_set_size, .. } => {
                learn_linkage_tree_real(population, ell, *filtered, *max_set_size, rng)
            }
        }
    }
}
