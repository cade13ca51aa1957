//! Index-based digraph helpers shared by the network checks, the residual
//! graph and the generator.

/// Out-adjacency in compressed form. Arcs keep their insertion order per tail.
#[derive(Debug, Clone)]
pub(crate) struct Adjacency {
    offsets: Vec<usize>,
    heads: Vec<usize>,
}

impl Adjacency {
    /// `arcs` yields `(tail, head)`.
    pub(crate) fn new<I>(node_count: usize, arcs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let arcs: Vec<(usize, usize)> = arcs.into_iter().collect();
        let mut offsets = vec![0usize; node_count + 1];
        for &(tail, _) in &arcs {
            offsets[tail + 1] += 1;
        }
        for v in 0..node_count {
            offsets[v + 1] += offsets[v];
        }
        let mut fill = offsets.clone();
        let mut heads = vec![0; arcs.len()];
        for (tail, head) in arcs {
            let slot = fill[tail];
            heads[slot] = head;
            fill[tail] += 1;
        }
        Adjacency { offsets, heads }
    }

    pub(crate) fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    fn out_len(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    fn head_at(&self, v: usize, i: usize) -> usize {
        self.heads[self.offsets[v] + i]
    }
}

/// Three-colour iterative DFS; true iff some back arc exists.
pub(crate) fn has_directed_cycle(adj: &Adjacency) -> bool {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let n = adj.node_count();
    let mut colour = vec![WHITE; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if colour[root] != WHITE {
            continue;
        }
        colour[root] = GREY;
        stack.push((root, 0));
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj.out_len(v) {
                let w = adj.head_at(v, *next);
                *next += 1;
                match colour[w] {
                    GREY => return true,
                    WHITE => {
                        colour[w] = GREY;
                        stack.push((w, 0));
                    }
                    _ => {}
                }
            } else {
                colour[v] = BLACK;
                stack.pop();
            }
        }
    }
    false
}

/// Tarjan's algorithm, iterative. Components are sorted by their smallest
/// member and members are sorted ascending.
pub(crate) fn strongly_connected(adj: &Adjacency) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.node_count();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0;
    let mut components = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < adj.out_len(v) {
                let w = adj.head_at(v, *next);
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
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
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
    }
    components.sort_unstable_by_key(|c| c[0]);
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj(n: usize, arcs: &[(usize, usize)]) -> Adjacency {
        Adjacency::new(n, arcs.iter().copied())
    }

    #[test]
    fn cycle_detection() {
        assert!(has_directed_cycle(&adj(3, &[(0, 1), (1, 2), (2, 0)])));
        assert!(!has_directed_cycle(&adj(3, &[(0, 1), (1, 2), (0, 2)])));
        assert!(!has_directed_cycle(&adj(0, &[])));
        assert!(has_directed_cycle(&adj(2, &[(0, 1), (1, 0)])));
    }

    #[test]
    fn tarjan_orders_components() {
        let comps = strongly_connected(&adj(5, &[(3, 4), (4, 3), (0, 3), (1, 2), (2, 1)]));
        assert_eq!(comps, vec![vec![0], vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn tarjan_deep_chain_does_not_recurse() {
        let n = 200_000;
        let arcs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let comps = strongly_connected(&adj(n, &arcs));
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), n);
    }
}
