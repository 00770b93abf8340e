//! Linkage tree construction by UPGMA agglomeration.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::similarity::SimilarityMatrix;

/// Two merge candidates whose average similarities differ by at most this
/// much are treated as tied.
const TIE_TOLERANCE: f64 = 1e-12;
const SATURATION_TOLERANCE: f64 = 1e-12;

/// Rule deciding whether a merge happened at maximal possible similarity, in
/// which case both children are superfluous and are dropped from the tree.
#[derive(Debug, Clone, PartialEq)]
pub enum MergeFilter {
    None,
    /// Mutual information is bounded by the smaller entropy of each pair;
    /// a merge is saturated when the average similarity reaches the average
    /// of those bounds.
    MutualInformation { entropies: Vec<f64> },
    /// Normalized measures saturate at 1.
    Normalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeOptions {
    /// Sets larger than this are not recorded; 0 means unlimited. Merging
    /// itself continues past the cap so the tree shape is unaffected.
    pub max_set_size: usize,
    /// Drop the final set containing every variable.
    pub drop_root: bool,
    pub filter: MergeFilter,
    /// Never merge clusters whose average similarity is zero. Used with the
    /// interaction-graph similarity, where zero means "no path".
    pub forbid_zero_similarity: bool,
}

impl Default for TreeOptions {
    fn default() -> Self {
        Self {
            max_set_size: 0,
            drop_root: false,
            filter: MergeFilter::None,
            forbid_zero_similarity: false,
        }
    }
}

struct Cluster {
    members: Vec<usize>,
    // position in the output list, if recorded
    recorded: Option<usize>,
}

/// Agglomerates singletons by repeatedly merging the pair of clusters with
/// the highest average pairwise similarity. Returns the singletons followed
/// by every recorded merge, in merge order. Ties are broken uniformly at
/// random.
pub fn upgma<R: Rng + ?Sized>(similarity: &SimilarityMatrix, options: &TreeOptions, rng: &mut R) -> Vec<Vec<usize>> {
    let n = similarity.len();
    let fits = |size: usize| options.max_set_size == 0 || size <= options.max_set_size;

    let mut out: Vec<Option<Vec<usize>>> = Vec::with_capacity(2 * n);
    let mut clusters: Vec<Option<Cluster>> = (0..n)
        .map(|u| {
            let recorded = fits(1).then(|| {
                out.push(Some(vec![u]));
                out.len() - 1
            });
            Some(Cluster {
                members: vec![u],
                recorded,
            })
        })
        .collect();

    // working copy of inter-cluster similarity, indexed by cluster slot
    let mut sim = vec![0.0; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                sim[u * n + v] = similarity.get(u, v);
            }
        }
    }
    let mut active: Vec<usize> = (0..n).collect();

    while active.len() > 1 {
        let mut best = f64::NEG_INFINITY;
        let mut choice = None;
        let mut ties = 0u32;
        for (a, &i) in active.iter().enumerate() {
            for &j in &active[a + 1..] {
                let s = sim[i * n + j];
                if options.forbid_zero_similarity && s <= 0.0 {
                    continue;
                }
                if s > best + TIE_TOLERANCE {
                    best = s;
                    choice = Some((i, j));
                    ties = 1;
                } else if s >= best - TIE_TOLERANCE {
                    ties += 1;
                    if rng.random_range(0..ties) == 0 {
                        choice = Some((i, j));
                    }
                    best = best.max(s);
                }
            }
        }
        let Some((i, j)) = choice else { break };

        let a = clusters[i].take().expect("active cluster");
        let b = clusters[j].take().expect("active cluster");
        let saturated = is_saturated(&options.filter, &a.members, &b.members, best);

        let (wa, wb) = (a.members.len() as f64, b.members.len() as f64);
        for &k in &active {
            if k != i && k != j {
                let s = (wa * sim[i * n + k] + wb * sim[j * n + k]) / (wa + wb);
                sim[i * n + k] = s;
                sim[k * n + i] = s;
            }
        }

        let mut members = a.members;
        members.extend_from_slice(&b.members);
        members.sort_unstable();

        let is_root = members.len() == n;
        let recorded = (fits(members.len()) && !(is_root && options.drop_root)).then(|| {
            out.push(Some(members.clone()));
            out.len() - 1
        });
        if saturated && recorded.is_some() {
            for child in [a.recorded, b.recorded].into_iter().flatten() {
                out[child] = None;
            }
        }
        clusters[i] = Some(Cluster { members, recorded });
        active.retain(|&k| k != j);
    }

    out.into_iter().flatten().collect()
}

fn is_saturated(filter: &MergeFilter, a: &[usize], b: &[usize], similarity: f64) -> bool {
    match filter {
        MergeFilter::None => false,
        MergeFilter::Normalized => similarity >= 1.0 - SATURATION_TOLERANCE,
        MergeFilter::MutualInformation { entropies } => {
            let mut bound = 0.0;
            for &u in a {
                for &v in b {
                    bound += entropies[u].min(entropies[v]);
                }
            }
            bound /= (a.len() * b.len()) as f64;
            bound > 0.0 && similarity >= bound - SATURATION_TOLERANCE
        }
    }
}
