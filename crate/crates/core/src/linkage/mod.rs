//! Linkage models: families of subsets (FOS) of variable indices that
//! structure variation.

mod cliques;
mod conditional;
mod custom;
mod similarity;
mod upgma;
mod resolve;
mod vig;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::types::Domain;

pub use cliques::{capped_maximal_cliques, maximal_cliques};
pub use conditional::{build_conditional, forward_factorization, outside_neighbors};
pub use custom::{format_custom_fos, parse_custom_fos};
pub use similarity::{absolute_correlation, entropies, estimate_similarity, SimilarityMatrix, SimilarityMeasure};
pub use upgma::{upgma, MergeFilter, TreeOptions};
pub use resolve::Linkage;
pub use vig::Vig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FosKind {
    Univariate,
    BlockMarginalProduct,
    LinkageTree { filtered: bool },
    StaticLinkageTree,
    Custom,
    Full,
    Conditional,
}

/// One step of forward sampling: draw `variables` given the already drawn
/// `conditioning` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardStep {
    pub variables: Vec<usize>,
    pub conditioning: Vec<usize>,
}

/// Family of subsets. Each linkage set is sorted and duplicate free.
/// Conditional models carry, per set, the variables it is conditioned on,
/// and for the all-variables set a forward-sampling factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fos {
    kind: FosKind,
    ell: usize,
    sets: Vec<Vec<usize>>,
    conditioning: Vec<Vec<usize>>,
    forward: Vec<ForwardStep>,
}

impl Fos {
    pub(crate) fn from_parts(
        kind: FosKind,
        ell: usize,
        sets: Vec<Vec<usize>>,
        conditioning: Vec<Vec<usize>>,
        forward: Vec<ForwardStep>,
    ) -> Self {
        debug_assert_eq!(sets.len(), conditioning.len());
        Self {
            kind,
            ell,
            sets,
            conditioning,
            forward,
        }
    }

    fn plain(kind: FosKind, ell: usize, sets: Vec<Vec<usize>>) -> Self {
        let conditioning = vec![Vec::new(); sets.len()];
        Self::from_parts(kind, ell, sets, conditioning, Vec::new())
    }

    pub fn kind(&self) -> FosKind {
        self.kind
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn conditioning(&self, set: usize) -> &[usize] {
        &self.conditioning[set]
    }

    pub fn forward_steps(&self) -> &[ForwardStep] {
        &self.forward
    }

    /// The set holds every variable and is sampled by forward sampling.
    pub fn is_generational(&self, set: usize) -> bool {
        self.kind == FosKind::Conditional && !self.forward.is_empty() && self.sets[set].len() == self.ell
    }

    /// Checks the structural invariants of this FOS's kind.
    pub fn validate(&self, domain: Domain) -> Result<()> {
        let bad = |m: String| Err(Error::Contract(m));
        if self.sets.is_empty() {
            return bad("FOS has no linkage sets".into());
        }
        for s in &self.sets {
            if s.is_empty() {
                return bad("empty linkage set".into());
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return bad(alloc::format!("linkage set {s:?} is not sorted and duplicate free"));
            }
            if s.iter().any(|&u| u >= self.ell) {
                return bad(alloc::format!("linkage set {s:?} out of range"));
            }
        }
        let marginal = matches!(
            self.kind,
            FosKind::Univariate | FosKind::BlockMarginalProduct | FosKind::Full
        );
        if marginal {
            let mut seen = vec![false; self.ell];
            for &u in self.sets.iter().flatten() {
                if core::mem::replace(&mut seen[u], true) {
                    return bad(alloc::format!("variable {u} appears in two marginal sets"));
                }
            }
            if seen.iter().any(|&s| !s) {
                return bad("marginal product does not cover every variable".into());
            }
        }
        let needs_singletons = matches!(
            self.kind,
            FosKind::LinkageTree { filtered: false } | FosKind::StaticLinkageTree
        );
        if needs_singletons && (0..self.ell).any(|u| !self.sets.iter().any(|s| s.len() == 1 && s[0] == u)) {
            return bad("linkage tree is missing a singleton".into());
        }
        if domain == Domain::Discrete
            && self.ell > 1
            && self.kind != FosKind::Custom
            && self.sets.iter().any(|s| s.len() == self.ell)
        {
            return bad("the full linkage set cannot be used for discrete variation".into());
        }
        Ok(())
    }
}

pub fn build_univariate(ell: usize) -> Fos {
    Fos::plain(FosKind::Univariate, ell, (0..ell).map(|u| vec![u]).collect())
}

pub fn build_block_mp(ell: usize, block_size: usize) -> Result<Fos> {
    if block_size == 0 || !ell.is_multiple_of(block_size) {
        return Err(Error::config(alloc::format!(
            "block size {block_size} does not divide the number of variables {ell}"
        )));
    }
    let sets = (0..ell / block_size)
        .map(|b| (b * block_size..(b + 1) * block_size).collect())
        .collect();
    Ok(Fos::plain(FosKind::BlockMarginalProduct, ell, sets))
}

/// The single all-variables set; real-valued only.
pub fn build_full(ell: usize, domain: Domain) -> Result<Fos> {
    if domain == Domain::Discrete {
        return Err(Error::config("the full linkage model is only available for real-valued optimization"));
    }
    Ok(Fos::plain(FosKind::Full, ell, vec![(0..ell).collect()]))
}

/// Custom sets, validated for range; overlap is allowed.
pub fn build_custom(sets: &[Vec<usize>], ell: usize) -> Result<Fos> {
    let mut out = Vec::with_capacity(sets.len());
    for (i, s) in sets.iter().enumerate() {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::config(alloc::format!("custom linkage set {i} is empty")));
        }
        if let Some(&u) = s.iter().find(|&&u| u >= ell) {
            return Err(Error::config(alloc::format!("custom linkage set {i} contains {u}, outside [0, {}]", ell - 1)));
        }
        out.push(s);
    }
    if out.is_empty() {
        return Err(Error::config("custom FOS contains no linkage sets"));
    }
    Ok(Fos::plain(FosKind::Custom, ell, out))
}

/// Linkage tree from a similarity matrix. The root is dropped for discrete
/// problems.
pub fn build_linkage_tree<R: Rng + ?Sized>(
    similarity: &SimilarityMatrix,
    filter: MergeFilter,
    max_set_size: usize,
    domain: Domain,
    rng: &mut R,
) -> Fos {
    let filtered = filter != MergeFilter::None;
    let options = TreeOptions {
        max_set_size,
        drop_root: domain == Domain::Discrete,
        filter,
        forbid_zero_similarity: false,
    };
    let sets = upgma(similarity, &options, rng);
    Fos::plain(FosKind::LinkageTree { filtered }, similarity.len(), sets)
}

/// Learns a linkage tree from binary genotypes.
pub fn learn_linkage_tree_discrete<R: Rng + ?Sized>(
    population: &[&[u8]],
    ell: usize,
    measure: SimilarityMeasure,
    filtered: bool,
    max_set_size: usize,
    rng: &mut R,
) -> Fos {
    let similarity = estimate_similarity(population, ell, measure);
    let filter = match (filtered, measure) {
        (false, _) => MergeFilter::None,
        (true, SimilarityMeasure::MutualInformation) => MergeFilter::MutualInformation {
            entropies: entropies(population, ell),
        },
        (true, SimilarityMeasure::NormalizedMutualInformation) => MergeFilter::Normalized,
    };
    build_linkage_tree(&similarity, filter, max_set_size, Domain::Discrete, rng)
}

/// Learns a linkage tree from real-valued genotypes, using absolute
/// correlation as similarity.
pub fn learn_linkage_tree_real<R: Rng + ?Sized>(
    population: &[&[f64]],
    ell: usize,
    filtered: bool,
    max_set_size: usize,
    rng: &mut R,
) -> Fos {
    let similarity = absolute_correlation(population, ell);
    let filter = if filtered { MergeFilter::Normalized } else { MergeFilter::None };
    build_linkage_tree(&similarity, filter, max_set_size, Domain::RealValued, rng)
}

/// Static linkage tree over interaction-graph connectivity. Variables with no
/// path between them never share a set. A problem-supplied similarity
/// replaces the connectivity measure.
pub fn build_static_linkage_tree<R: Rng + ?Sized>(
    vig: &Vig,
    custom_similarity: Option<&SimilarityMatrix>,
    max_set_size: usize,
    domain: Domain,
    rng: &mut R,
) -> Fos {
    let (similarity, forbid) = match custom_similarity {
        Some(s) => (s.clone(), false),
        None => (vig.similarity(), true),
    };
    let options = TreeOptions {
        max_set_size,
        drop_root: domain == Domain::Discrete,
        filter: MergeFilter::None,
        forbid_zero_similarity: forbid,
    };
    let sets = upgma(&similarity, &options, rng);
    Fos::plain(FosKind::StaticLinkageTree, vig.len(), sets)
}

/// Configuration of a linkage model.
///
/// Textual form (see [`FromStr`]):
/// `univariate | full | block:<b> | lt:<mi|nmi>[:filtered][:max=<s>] |
/// slt[:max=<s>] | custom:<path> | cond:<ucondgg|ucondfg|ucondhg|mcondhg:<c>>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkageModel {
    Univariate,
    Full,
    BlockMarginalProduct { block_size: usize },
    LinkageTree {
        measure: SimilarityMeasure,
        filtered: bool,
        /// 0 means unlimited.
        max_set_size: usize,
    },
    StaticLinkageTree { max_set_size: usize },
    Custom { sets: Vec<Vec<usize>> },
    /// A custom FOS still to be loaded from a file by the caller.
    CustomFile { path: String },
    Conditional {
        max_clique_size: usize,
        include_cliques: bool,
        include_full: bool,
    },
}

impl Default for LinkageModel {
    fn default() -> Self {
        LinkageModel::StaticLinkageTree { max_set_size: 0 }
    }
}

impl LinkageModel {
    pub fn ucond_gg() -> Self {
        Self::Conditional { max_clique_size: 1, include_cliques: false, include_full: true }
    }

    pub fn ucond_fg() -> Self {
        Self::Conditional { max_clique_size: 1, include_cliques: true, include_full: false }
    }

    pub fn ucond_hg() -> Self {
        Self::Conditional { max_clique_size: 1, include_cliques: true, include_full: true }
    }

    pub fn mcond_hg(max_clique_size: usize) -> Self {
        Self::Conditional { max_clique_size, include_cliques: true, include_full: true }
    }

    /// Relearned from the population every generation.
    pub fn is_learned(&self) -> bool {
        matches!(self, LinkageModel::LinkageTree { .. })
    }

    pub fn needs_gray_box(&self) -> bool {
        matches!(self, LinkageModel::StaticLinkageTree { .. } | LinkageModel::Conditional { .. })
    }

    /// Rejects combinations the model cannot support.
    pub fn check(&self, domain: Domain, gray_box: bool) -> Result<()> {
        match self {
            LinkageModel::Full if domain == Domain::Discrete => {
                Err(Error::config("the full linkage model is only available for real-valued optimization"))
            }
            LinkageModel::Conditional { .. } if domain == Domain::Discrete => {
                Err(Error::config("conditional linkage models are only available for real-valued optimization"))
            }
            LinkageModel::CustomFile { path } => Err(Error::config(alloc::format!(
                "custom FOS file {path:?} has not been loaded"
            ))),
            LinkageModel::BlockMarginalProduct { block_size: 0 } => Err(Error::config("block size must be positive")),
            m if m.needs_gray_box() && !gray_box => Err(Error::config(
                "this linkage model needs the interaction graph of a gray-box fitness function",
            )),
            _ => Ok(()),
        }
    }
}

fn parse_max(token: &str) -> Option<usize> {
    token.strip_prefix("max=")?.parse().ok()
}

impl FromStr for LinkageModel {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let err = || Error::parse(0, alloc::format!("invalid linkage model {spec:?}"));
        if let Some(path) = spec.strip_prefix("custom:") {
            if path.is_empty() {
                return Err(err());
            }
            return Ok(LinkageModel::CustomFile { path: path.to_string() });
        }
        let parts: Vec<&str> = spec.split(':').collect();
        let model = match parts.as_slice() {
            ["univariate"] => LinkageModel::Univariate,
            ["full"] => LinkageModel::Full,
            ["block", b] => LinkageModel::BlockMarginalProduct {
                block_size: b.parse().ok().filter(|&b| b > 0).ok_or_else(err)?,
            },
            ["lt", measure, rest @ ..] => {
                let measure = match *measure {
                    "mi" => SimilarityMeasure::MutualInformation,
                    "nmi" => SimilarityMeasure::NormalizedMutualInformation,
                    _ => return Err(err()),
                };
                let (filtered, max) = match rest {
                    [] => (false, None),
                    ["filtered"] => (true, None),
                    [m] => (false, Some(parse_max(m).ok_or_else(err)?)),
                    ["filtered", m] => (true, Some(parse_max(m).ok_or_else(err)?)),
                    _ => return Err(err()),
                };
                LinkageModel::LinkageTree { measure, filtered, max_set_size: max.unwrap_or(0) }
            }
            ["slt"] => LinkageModel::StaticLinkageTree { max_set_size: 0 },
            ["slt", m] => LinkageModel::StaticLinkageTree { max_set_size: parse_max(m).ok_or_else(err)? },
            ["cond", "ucondgg"] => LinkageModel::ucond_gg(),
            ["cond", "ucondfg"] => LinkageModel::ucond_fg(),
            ["cond", "ucondhg"] => LinkageModel::ucond_hg(),
            ["cond", "mcondhg", c] => {
                LinkageModel::mcond_hg(c.parse().ok().filter(|&c| c > 0).ok_or_else(err)?)
            }
            _ => return Err(err()),
        };
        Ok(model)
    }
}

impl fmt::Display for LinkageModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkageModel::Univariate => f.write_str("univariate"),
            LinkageModel::Full => f.write_str("full"),
            LinkageModel::BlockMarginalProduct { block_size } => write!(f, "block:{block_size}"),
            LinkageModel::LinkageTree { measure, filtered, max_set_size } => {
                let m = match measure {
                    SimilarityMeasure::MutualInformation => "mi",
                    SimilarityMeasure::NormalizedMutualInformation => "nmi",
                };
                write!(f, "lt:{m}")?;
                if *filtered {
                    f.write_str(":filtered")?;
                }
                if *max_set_size > 0 {
                    write!(f, ":max={max_set_size}")?;
                }
                Ok(())
            }
            LinkageModel::StaticLinkageTree { max_set_size: 0 } => f.write_str("slt"),
            LinkageModel::StaticLinkageTree { max_set_size } => write!(f, "slt:max={max_set_size}"),
            LinkageModel::Custom { sets } => write!(f, "custom[{} sets]", sets.len()),
            LinkageModel::CustomFile { path } => write!(f, "custom:{path}"),
            LinkageModel::Conditional { max_clique_size, include_cliques, include_full } => {
                match (max_clique_size, include_cliques, include_full) {
                    (1, false, true) => f.write_str("cond:ucondgg"),
                    (1, true, false) => f.write_str("cond:ucondfg"),
                    (1, true, true) => f.write_str("cond:ucondhg"),
                    (c, true, true) => write!(f, "cond:mcondhg:{c}"),
                    (c, cl, fu) => write!(f, "cond[max_clique_size={c},cliques={cl},full={fu}]"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::make_rng;

    #[test]
    fn univariate_sets() {
        let fos = build_univariate(3);
        assert_eq!(fos.sets(), &[vec![0], vec![1], vec![2]]);
        fos.validate(Domain::Discrete).unwrap();
        assert_eq!(build_univariate(1).sets(), &[vec![0]]);
        build_univariate(1).validate(Domain::Discrete).unwrap();
        let five = build_univariate(5);
        assert_eq!(five.len(), 5);
        five.validate(Domain::RealValued).unwrap();
    }

    #[test]
    fn block_sets() {
        let fos = build_block_mp(10, 5).unwrap();
        assert_eq!(fos.sets(), &[vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]]);
        fos.validate(Domain::Discrete).unwrap();
        let one = build_block_mp(4, 4).unwrap();
        assert_eq!(one.len(), 1);
        one.validate(Domain::RealValued).unwrap();
        assert!(one.validate(Domain::Discrete).is_err());
        assert!(matches!(build_block_mp(10, 3), Err(Error::Config(_))));
    }

    #[test]
    fn full_is_real_valued_only() {
        assert_eq!(build_full(3, Domain::RealValued).unwrap().sets(), &[vec![0, 1, 2]]);
        assert_eq!(build_full(1, Domain::RealValued).unwrap().sets(), build_univariate(1).sets());
        assert!(build_full(3, Domain::Discrete).is_err());
    }

    #[test]
    fn custom_allows_overlap() {
        let fos = build_custom(&[vec![0], vec![0, 1]], 2).unwrap();
        assert_eq!(fos.sets(), &[vec![0], vec![0, 1]]);
        fos.validate(Domain::Discrete).unwrap();
        assert!(build_custom(&[vec![2]], 2).is_err());
    }

    #[test]
    fn static_tree_on_trap_blocks() {
        let mut edges = Vec::new();
        for block in 0..2 {
            for a in 0..5 {
                for b in a + 1..5 {
                    edges.push((block * 5 + a, block * 5 + b));
                }
            }
        }
        let vig = Vig::from_edges(10, &edges);
        let mut rng = make_rng(9);
        let fos = build_static_linkage_tree(&vig, None, 0, Domain::Discrete, &mut rng);
        fos.validate(Domain::Discrete).unwrap();
        for s in fos.sets() {
            assert!(s.iter().all(|&u| u < 5) || s.iter().all(|&u| u >= 5), "{s:?}");
        }
        assert!(fos.sets().contains(&vec![0, 1, 2, 3, 4]));
        assert_eq!(fos.len(), 18);
    }

    #[test]
    fn static_tree_custom_similarity_overrides() {
        let vig = Vig::from_edges(3, &[(0, 1)]);
        let mut s = SimilarityMatrix::zeros(3);
        s.set(0, 2, 5.0);
        s.set(1, 2, 0.5);
        let mut rng = make_rng(0);
        let fos = build_static_linkage_tree(&vig, Some(&s), 0, Domain::Discrete, &mut rng);
        assert_eq!(fos.sets(), &[vec![0], vec![1], vec![2], vec![0, 2]]);
    }

    #[test]
    fn grammar_round_trip() {
        for spec in [
            "univariate",
            "full",
            "block:5",
            "lt:mi",
            "lt:nmi:filtered",
            "lt:mi:max=4",
            "lt:nmi:filtered:max=8",
            "slt",
            "slt:max=3",
            "custom:some/file.txt",
            "cond:ucondgg",
            "cond:ucondfg",
            "cond:ucondhg",
            "cond:mcondhg:3",
        ] {
            let m: LinkageModel = spec.parse().unwrap();
            assert_eq!(m.to_string(), spec);
        }
    }

    #[test]
    fn grammar_rejects() {
        for spec in [
            "", "uni", "block", "block:0", "block:x", "lt", "lt:x", "lt:mi:max", "lt:mi:max=4:filtered",
            "slt:4", "cond", "cond:mcondhg", "cond:mcondhg:0", "custom:", "LT:MI",
        ] {
            assert!(spec.parse::<LinkageModel>().is_err(), "{spec}");
        }
    }

    #[test]
    fn model_checks() {
        assert!(LinkageModel::Full.check(Domain::Discrete, true).is_err());
        assert!(LinkageModel::Full.check(Domain::RealValued, false).is_ok());
        assert!(LinkageModel::default().check(Domain::Discrete, false).is_err());
        assert!(LinkageModel::ucond_gg().check(Domain::RealValued, false).is_err());
        assert!(LinkageModel::ucond_gg().check(Domain::RealValued, true).is_ok());
        assert!(LinkageModel::ucond_gg().check(Domain::Discrete, true).is_err());
    }
}
