//! Conditional linkage models derived from the interaction graph.

use alloc::vec;
use alloc::vec::Vec;

use super::cliques::capped_maximal_cliques;
use super::vig::Vig;
use super::{ForwardStep, Fos, FosKind};
use crate::error::{Error, Result};

/// Sorted VIG neighbors of the members of `set` that lie outside it.
pub fn outside_neighbors(vig: &Vig, set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = set
        .iter()
        .flat_map(|&u| vig.neighbors(u).iter().copied())
        .filter(|v| set.binary_search(v).is_err())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Factorization used to sample every variable at once: factors are visited
/// in breadth-first order of the graph, and each factor's not yet sampled
/// variables are conditioned on their already sampled neighbors.
pub fn forward_factorization(vig: &Vig, factors: &[Vec<usize>]) -> Vec<ForwardStep> {
    let order = vig.breadth_first_order();
    let mut position = vec![0; vig.len()];
    for (p, &u) in order.iter().enumerate() {
        position[u] = p;
    }
    let mut ordered: Vec<&Vec<usize>> = factors.iter().collect();
    ordered.sort_by_key(|f| (f.iter().map(|&u| position[u]).min(), (*f).clone()));

    let mut sampled = vec![false; vig.len()];
    let mut steps = Vec::new();
    for factor in ordered {
        let mut variables: Vec<usize> = factor.iter().copied().filter(|&u| !sampled[u]).collect();
        if variables.is_empty() {
            continue;
        }
        variables.sort_unstable();
        let mut conditioning: Vec<usize> = variables
            .iter()
            .flat_map(|&u| vig.neighbors(u).iter().copied())
            .filter(|&v| sampled[v])
            .collect();
        conditioning.sort_unstable();
        conditioning.dedup();
        for &u in &variables {
            sampled[u] = true;
        }
        steps.push(ForwardStep { variables, conditioning });
    }
    steps
}

/// Builds a conditional FOS: the factors are the maximal cliques of the
/// graph capped at `max_clique_size`. With `include_cliques` each factor is
/// a linkage set conditioned on its outside neighbors (factorized mixing);
/// with `include_full` one set holds every variable and is sampled by
/// forward sampling over the factorization (generational mixing). Both
/// flags together give the hybrid.
pub fn build_conditional(vig: &Vig, max_clique_size: usize, include_cliques: bool, include_full: bool) -> Result<Fos> {
    if !include_cliques && !include_full {
        return Err(Error::config(
            "conditional linkage needs the clique sets, the full set, or both",
        ));
    }
    if max_clique_size == 0 {
        return Err(Error::config("max_clique_size must be at least 1"));
    }
    let ell = vig.len();
    let factors = capped_maximal_cliques(vig, max_clique_size);
    let mut sets = Vec::new();
    let mut conditioning = Vec::new();
    if include_full {
        sets.push((0..ell).collect());
        conditioning.push(Vec::new());
    }
    if include_cliques {
        for f in &factors {
            conditioning.push(outside_neighbors(vig, f));
            sets.push(f.clone());
        }
    }
    let forward = if include_full {
        forward_factorization(vig, &factors)
    } else {
        Vec::new()
    };
    Ok(Fos::from_parts(FosKind::Conditional, ell, sets, conditioning, forward))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Vig {
        Vig::from_edges(4, &[(0, 1), (1, 2), (2, 3)])
    }

    #[test]
    fn chain_factorized() {
        let fos = build_conditional(&chain(), 2, true, false).unwrap();
        assert_eq!(fos.sets(), &[vec![0, 1], vec![1, 2], vec![2, 3]]);
        assert_eq!(fos.conditioning(1), &[0, 3]);
        assert_eq!(fos.conditioning(0), &[2]);
        assert!(fos.forward_steps().is_empty());
    }

    #[test]
    fn generational_is_single_full_set() {
        let fos = build_conditional(&chain(), 1, false, true).unwrap();
        assert_eq!(fos.sets(), &[vec![0, 1, 2, 3]]);
        let steps = fos.forward_steps();
        assert_eq!(steps.len(), 4);
        assert_eq!(steps[0], ForwardStep { variables: vec![0], conditioning: vec![] });
        assert_eq!(steps[2], ForwardStep { variables: vec![2], conditioning: vec![1] });
        assert!(fos.is_generational(0));
    }

    #[test]
    fn univariate_conditioning_is_neighborhood() {
        let fos = build_conditional(&chain(), 1, true, false).unwrap();
        assert_eq!(fos.sets(), &[vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(fos.conditioning(0), &[1]);
        assert_eq!(fos.conditioning(1), &[0, 2]);
    }

    #[test]
    fn hybrid_has_both() {
        let fos = build_conditional(&chain(), 2, true, true).unwrap();
        assert_eq!(fos.len(), 4);
        assert!(fos.is_generational(0));
        assert!(!fos.is_generational(1));
        let steps = fos.forward_steps();
        assert_eq!(steps[0].variables, vec![0, 1]);
        assert_eq!(steps[1], ForwardStep { variables: vec![2], conditioning: vec![1] });
    }

    #[test]
    fn needs_a_flag() {
        assert!(build_conditional(&chain(), 1, false, false).is_err());
    }
}
