//! Maximal clique enumeration with a size cap.

use alloc::vec::Vec;

use super::vig::Vig;

/// All maximal cliques of `graph` (Bron-Kerbosch with pivoting).
/// Each clique is sorted; the list is sorted lexicographically.
pub fn maximal_cliques(graph: &Vig) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut r = Vec::new();
    let p: Vec<usize> = (0..graph.len()).collect();
    bron_kerbosch(graph, &mut r, p, Vec::new(), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn bron_kerbosch(graph: &Vig, r: &mut Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    // pivot: vertex of P ∪ X with the most neighbors in P
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| graph.has_edge(u, v)).count())
        .expect("non-empty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !graph.has_edge(pivot, v)).collect();
    for v in candidates {
        let nv = graph.neighbors(v);
        let p_next = p.iter().copied().filter(|u| nv.binary_search(u).is_ok()).collect();
        let x_next = x.iter().copied().filter(|u| nv.binary_search(u).is_ok()).collect();
        r.push(v);
        bron_kerbosch(graph, r, p_next, x_next, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Maximal cliques with cliques larger than `cap` replaced by all of their
/// `cap`-sized subcliques; duplicates and sets contained in another set are
/// removed. `cap == 0` means no cap.
pub fn capped_maximal_cliques(graph: &Vig, cap: usize) -> Vec<Vec<usize>> {
    let mut sets = Vec::new();
    for c in maximal_cliques(graph) {
        if cap == 0 || c.len() <= cap {
            sets.push(c);
        } else {
            combinations(&c, cap, &mut sets);
        }
    }
    sets.sort();
    sets.dedup();
    let dominated: Vec<bool> = sets
        .iter()
        .map(|a| sets.iter().any(|b| b.len() > a.len() && is_subset(a, b)))
        .collect();
    sets.into_iter()
        .zip(dominated)
        .filter_map(|(s, d)| (!d).then_some(s))
        .collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn combinations(items: &[usize], k: usize, out: &mut Vec<Vec<usize>>) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + items.len() - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn path_cliques_are_edges() {
        let g = Vig::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(maximal_cliques(&g), vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn triangle_plus_tail() {
        let g = Vig::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(maximal_cliques(&g), vec![vec![0, 1, 2], vec![2, 3], vec![4]]);
    }

    #[test]
    fn cap_splits_large_cliques() {
        let g = Vig::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(
            capped_maximal_cliques(&g, 2),
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![2, 3]]
        );
        assert_eq!(capped_maximal_cliques(&g, 1), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn combinations_count() {
        let mut out = Vec::new();
        combinations(&[1, 2, 3, 4, 5], 3, &mut out);
        assert_eq!(out.len(), 10);
        assert_eq!(out[0], vec![1, 2, 3]);
        assert_eq!(out[9], vec![3, 4, 5]);
        let mut out = Vec::new();
        combinations(&[7, 8], 2, &mut out);
        assert_eq!(out, vec![vec![7, 8]]);
    }
}
