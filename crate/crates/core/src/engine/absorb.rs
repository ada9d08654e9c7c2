//! Absorption probabilities of a finite Markov chain.
//!
//! Transient nodes are grouped into strongly connected components and
//! solved sinks-first; each cyclic component is one small linear system
//! `(I - P) h = b` solved by Gauss-Jordan elimination.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::model::Weight;

use super::EngineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Target {
    Transient(usize),
    Absorb(usize),
}

/// Pivots smaller than this are treated as zero for inexact weights.
const PIVOT_TOLERANCE: f64 = 1e-13;

/// `h[x][c]`: probability that the chain started at transient node `x` is
/// absorbed in class `c`. A transient set from which some mass can never
/// leave makes the system singular and yields [`EngineError::NonHalting`].
pub(crate) fn absorption<W: Weight>(
    edges: &[Vec<(Target, W)>],
    classes: usize,
) -> Result<Vec<Vec<W>>, EngineError> {
    let n = edges.len();
    let mut g = DiGraph::<(), ()>::with_capacity(n, 0);
    let ids: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (x, es) in edges.iter().enumerate() {
        for (t, _) in es {
            if let Target::Transient(y) = *t {
                g.add_edge(ids[x], ids[y], ());
            }
        }
    }
    let mut h: Vec<Option<Vec<W>>> = vec![None; n];
    let mut local = vec![usize::MAX; n];
    for scc in tarjan_scc(&g) {
        let members: Vec<usize> = scc.iter().map(|i| i.index()).collect();
        for (k, &x) in members.iter().enumerate() {
            local[x] = k;
        }
        let size = members.len();
        // Rows of [I - P_cc | b].
        let mut a = vec![vec![W::zero(); size + classes]; size];
        for (k, &x) in members.iter().enumerate() {
            a[k][k] = W::one();
            for (t, p) in &edges[x] {
                match *t {
                    Target::Absorb(c) => a[k][size + c] = a[k][size + c].clone() + p.clone(),
                    Target::Transient(y) => match &h[y] {
                        Some(hy) => {
                            for c in 0..classes {
                                a[k][size + c] = a[k][size + c].clone() + p.clone() * hy[c].clone();
                            }
                        }
                        None => {
                            let j = local[y];
                            a[k][j] = a[k][j].clone() - p.clone();
                        }
                    },
                }
            }
        }
        let solved = gauss_jordan(a, size)?;
        for (k, &x) in members.iter().enumerate() {
            h[x] = Some(solved[k].clone());
        }
    }
    Ok(h.into_iter()
        .map(|x| x.expect("every node lies in some component"))
        .collect())
}

fn is_zero_pivot<W: Weight>(x: &W) -> bool {
    if W::EXACT {
        x.is_zero()
    } else {
        x.abs_f64() < PIVOT_TOLERANCE
    }
}

/// Solves the augmented system `a = [A | B]` with `A` of size `n x n`.
/// Returns the solution rows.
fn gauss_jordan<W: Weight>(mut a: Vec<Vec<W>>, n: usize) -> Result<Vec<Vec<W>>, EngineError> {
    let width = a.first().map_or(0, Vec::len);
    for col in 0..n {
        let pivot = if W::EXACT {
            (col..n).find(|&r| !a[r][col].is_zero())
        } else {
            (col..n).max_by(|&r, &s| a[r][col].abs_f64().total_cmp(&a[s][col].abs_f64()))
        };
        let Some(pr) = pivot.filter(|&r| !is_zero_pivot(&a[r][col])) else {
            return Err(EngineError::NonHalting);
        };
        a.swap(col, pr);
        let inv = W::one() / a[col][col].clone();
        for j in col..width {
            a[col][j] = a[col][j].clone() * inv.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in col..width {
                let v = a[col][j].clone() * f.clone();
                a[r][j] = a[r][j].clone() - v;
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rational;
    use num_rational::BigRational;

    #[test]
    fn gamblers_ruin_from_one() {
        // Positions 1..=3 transient, 0 absorbs into class 0, 4 into class 1.
        let half = || rational(1, 2);
        let edges: Vec<Vec<(Target, BigRational)>> = vec![
            vec![(Target::Absorb(0), half()), (Target::Transient(1), half())],
            vec![
                (Target::Transient(0), half()),
                (Target::Transient(2), half()),
            ],
            vec![(Target::Transient(1), half()), (Target::Absorb(1), half())],
        ];
        let h = absorption(&edges, 2).unwrap();
        assert_eq!(h[0], vec![rational(3, 4), rational(1, 4)]);
        assert_eq!(h[2], vec![rational(1, 4), rational(3, 4)]);
    }

    #[test]
    fn closed_loop_is_non_halting() {
        let edges: Vec<Vec<(Target, f64)>> = vec![
            vec![(Target::Transient(1), 1.0)],
            vec![(Target::Transient(0), 1.0)],
        ];
        assert_eq!(absorption(&edges, 1), Err(EngineError::NonHalting));
    }

    #[test]
    fn acyclic_chain_needs_no_elimination() {
        let edges: Vec<Vec<(Target, f64)>> = vec![
            vec![(Target::Transient(1), 0.25), (Target::Absorb(0), 0.75)],
            vec![(Target::Absorb(1), 1.0)],
        ];
        let h = absorption(&edges, 2).unwrap();
        assert_eq!(h[0], vec![0.75, 0.25]);
    }
}
