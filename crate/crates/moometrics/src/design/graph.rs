//! A small directed multigraph over string-named nodes, used for the
//! package dependency graph. Nodes register on first mention, edges carry
//! a multiplicity, and strongly connected components come from an
//! iterative Tarjan walk so deep graphs cannot overflow the stack.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    nodes: Vec<String>,
    index: BTreeMap<String, usize>,
    /// (from, to) by node index → number of parallel edges.
    edges: BTreeMap<(usize, usize), u64>,
}

impl DependencyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a node (idempotent) and return its index.
    pub fn add_node(&mut self, name: &str) -> usize {
        if let Some(&idx) = self.index.get(name) {
            return idx;
        }
        let idx = self.nodes.len();
        self.nodes.push(name.to_string());
        self.index.insert(name.to_string(), idx);
        idx
    }

    /// Add one directed edge, registering endpoints as needed. Parallel
    /// edges accumulate multiplicity.
    pub fn add_edge(&mut self, from: &str, to: &str) {
        let from = self.add_node(from);
        let to = self.add_node(to);
        *self.edges.entry((from, to)).or_insert(0) += 1;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of distinct (from, to) pairs, ignoring multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.multiplicity(from, to) > 0
    }

    pub fn multiplicity(&self, from: &str, to: &str) -> u64 {
        match (self.index.get(from), self.index.get(to)) {
            (Some(&f), Some(&t)) => self.edges.get(&(f, t)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn has_self_edge(&self, node: &str) -> bool {
        self.has_edge(node, node)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.as_str())
    }

    /// All strongly connected components, each sorted by name, the list
    /// sorted as well. Every node appears in exactly one component.
    pub fn strongly_connected_components(&self) -> Vec<Vec<String>> {
        let n = self.nodes.len();
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(from, to) in self.edges.keys() {
            adjacency[from].push(to);
        }

        let mut order: Vec<Option<u32>> = vec![None; n]; // Tarjan index
        let mut lowlink: Vec<u32> = vec![0; n];
        let mut on_stack: Vec<bool> = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut next_order: u32 = 0;
        let mut components: Vec<Vec<String>> = Vec::new();

        for start in 0..n {
            if order[start].is_some() {
                continue;
            }
            // Explicit DFS frames: (node, next-successor position).
            let mut frames: Vec<(usize, usize)> = Vec::new();
            order[start] = Some(next_order);
            lowlink[start] = next_order;
            next_order += 1;
            stack.push(start);
            on_stack[start] = true;
            frames.push((start, 0));

            while let Some(&(v, pos)) = frames.last() {
                if let Some(&w) = adjacency[v].get(pos) {
                    frames.last_mut().expect("frame exists").1 += 1;
                    if order[w].is_none() {
                        order[w] = Some(next_order);
                        lowlink[w] = next_order;
                        next_order += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, 0));
                    } else if on_stack[w] {
                        lowlink[v] = lowlink[v].min(order[w].expect("visited"));
                    }
                } else {
                    frames.pop();
                    if let Some(&(parent, _)) = frames.last() {
                        lowlink[parent] = lowlink[parent].min(lowlink[v]);
                    }
                    if Some(lowlink[v]) == order[v] {
                        let mut component = Vec::new();
                        loop {
                            let w = stack.pop().expect("stack holds the component");
                            on_stack[w] = false;
                            component.push(self.nodes[w].clone());
                            if w == v {
                                break;
                            }
                        }
                        component.sort();
                        components.push(component);
                    }
                }
            }
        }

        components.sort();
        components
    }

    /// Components that actually form cycles: size ≥ 2, or a single node
    /// with an edge to itself.
    pub fn cycle_components(&self) -> Vec<Vec<String>> {
        self.strongly_connected_components()
            .into_iter()
            .filter(|c| c.len() >= 2 || self.has_self_edge(&c[0]))
            .collect()
    }
}
