//! Kernels of digraphs without odd directed cycles.
//!
//! A strongly connected digraph has an odd directed cycle exactly when its
//! underlying graph is not bipartite. Kernels are built component by
//! component from the sinks of the condensation upwards.

use crate::error::{domain, Result};
use crate::lattice::Graph;
use crate::listcolor::Orientation;

/// Strongly connected components of the sub-digraph induced by `active`,
/// in reverse topological order (every component appears after all
/// components it can reach). Iterative Tarjan.
pub fn strongly_connected_components(d: &Orientation, active: &[bool]) -> Vec<Vec<usize>> {
    let n = d.vertex_count();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0usize;
    for root in 0..n {
        if !active[root] || index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            let outs = d.out_neighbors(v);
            if top.1 < outs.len() {
                let w = outs[top.1];
                top.1 += 1;
                if !active[w] {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Underlying undirected graph of the arcs inside `comp` (local indices).
fn component_graph(d: &Orientation, comp: &[usize]) -> (Graph, bool) {
    let mut local = std::collections::HashMap::new();
    for (i, &v) in comp.iter().enumerate() {
        local.insert(v, i);
    }
    let mut edges = Vec::new();
    let mut self_loop = false;
    for &v in comp {
        for &w in d.out_neighbors(v) {
            if v == w {
                self_loop = true;
            } else if let Some(&j) = local.get(&w) {
                edges.push((local[&v], j));
            }
        }
    }
    (Graph::from_edges(comp.len(), &edges), self_loop)
}

pub fn has_odd_directed_cycle(d: &Orientation) -> bool {
    let active = vec![true; d.vertex_count()];
    strongly_connected_components(d, &active).iter().any(|comp| {
        let (g, self_loop) = component_graph(d, comp);
        self_loop || g.bipartition().is_none()
    })
}

/// A kernel of the sub-digraph induced by `active`: independent, and every
/// other active vertex has an out-arc into it.
pub fn kernel_within(d: &Orientation, active: &[bool]) -> Result<Vec<usize>> {
    let n = d.vertex_count();
    let mut in_kernel = vec![false; n];
    kernel_rec(d, active, &mut in_kernel)?;
    Ok((0..n).filter(|&v| in_kernel[v]).collect())
}

fn kernel_rec(d: &Orientation, active: &[bool], in_kernel: &mut [bool]) -> Result<()> {
    for comp in strongly_connected_components(d, active) {
        // vertices of this component not yet absorbed by the kernel built downstream
        let free: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|&v| !d.out_neighbors(v).iter().any(|&w| active[w] && in_kernel[w]))
            .collect();
        if free.is_empty() {
            continue;
        }
        if free.len() < comp.len() {
            let mut sub = vec![false; d.vertex_count()];
            for &v in &free {
                sub[v] = true;
            }
            kernel_rec(d, &sub, in_kernel)?;
            continue;
        }
        let (g, self_loop) = component_graph(d, &comp);
        if self_loop {
            return domain(format!("vertex {} has a self loop", comp[0]));
        }
        if comp.len() == 1 {
            in_kernel[comp[0]] = true;
            continue;
        }
        let Some(side) = g.bipartition() else {
            return domain("digraph has an odd directed cycle; no kernel is guaranteed");
        };
        // the class of the smallest vertex; both classes are kernels of the component
        let pick = side[0];
        for (i, &v) in comp.iter().enumerate() {
            if side[i] == pick {
                in_kernel[v] = true;
            }
        }
    }
    Ok(())
}

/// A kernel of `d`. Fails when `d` has an odd directed cycle.
pub fn find_kernel(d: &Orientation) -> Result<Vec<usize>> {
    if has_odd_directed_cycle(d) {
        return domain("digraph has an odd directed cycle; no kernel is guaranteed");
    }
    kernel_within(d, &vec![true; d.vertex_count()])
}

/// Independent and absorbing within `active`.
pub fn is_kernel(d: &Orientation, active: &[bool], kernel: &[usize]) -> bool {
    let mut k = vec![false; d.vertex_count()];
    for &v in kernel {
        if !active[v] {
            return false;
        }
        k[v] = true;
    }
    for &(a, b) in d.arcs() {
        if active[a] && active[b] && k[a] && k[b] {
            return false;
        }
    }
    (0..d.vertex_count())
        .filter(|&v| active[v] && !k[v])
        .all(|v| d.out_neighbors(v).iter().any(|&w| active[w] && k[w]))
}
