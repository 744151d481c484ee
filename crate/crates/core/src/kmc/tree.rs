/// Complete binary sum tree over non-negative weights. Every internal node
/// is recomputed from its two children on update, so the root never drifts
/// from the sum of the leaves.
#[derive(Clone, Debug)]
pub(crate) struct RateTree {
    cap: usize,
    len: usize,
    nodes: Vec<f64>,
}

impl Default for RateTree {
    fn default() -> Self {
        RateTree {
            cap: 1,
            len: 0,
            nodes: vec![0.0; 2],
        }
    }
}

impl RateTree {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.nodes[self.cap + i]
    }

    pub fn values(&self) -> &[f64] {
        &self.nodes[self.cap..self.cap + self.len]
    }

    pub fn set(&mut self, i: usize, v: f64) {
        debug_assert!(i < self.len && v >= 0.0);
        let mut node = self.cap + i;
        self.nodes[node] = v;
        while node > 1 {
            node /= 2;
            self.nodes[node] = self.nodes[2 * node] + self.nodes[2 * node + 1];
        }
    }

    pub fn push(&mut self, v: f64) {
        if self.len == self.cap {
            self.rebuild(2 * self.cap);
        }
        self.len += 1;
        self.set(self.len - 1, v);
    }

    /// Removes leaf `i`; the last leaf takes its place.
    pub fn swap_remove(&mut self, i: usize) {
        let last = self.len - 1;
        if i != last {
            let v = self.get(last);
            self.set(i, v);
        }
        self.set(last, 0.0);
        self.len -= 1;
    }

    /// Replaces every leaf, recomputing all internal nodes.
    pub fn reset(&mut self, values: &[f64]) {
        self.len = 0;
        self.rebuild(values.len().next_power_of_two());
        self.len = values.len();
        self.nodes[self.cap..self.cap + self.len].copy_from_slice(values);
        for node in (1..self.cap).rev() {
            self.nodes[node] = self.nodes[2 * node] + self.nodes[2 * node + 1];
        }
    }

    fn rebuild(&mut self, cap: usize) {
        let mut nodes = vec![0.0; 2 * cap];
        nodes[cap..cap + self.len].copy_from_slice(self.values());
        for node in (1..cap).rev() {
            nodes[node] = nodes[2 * node] + nodes[2 * node + 1];
        }
        self.cap = cap;
        self.nodes = nodes;
    }

    /// Leaf whose cumulative interval contains `u ∈ [0, total)`. Never lands
    /// on a zero-weight subtree, even when rounding pushes `u` past the total.
    pub fn sample(&self, mut u: f64) -> usize {
        debug_assert!(self.len > 0 && self.total() > 0.0);
        let mut node = 1;
        while node < self.cap {
            let left = self.nodes[2 * node];
            let right = self.nodes[2 * node + 1];
            if (u < left && left > 0.0) || right <= 0.0 {
                node *= 2;
            } else {
                u -= left;
                node = 2 * node + 1;
            }
        }
        node - self.cap
    }
}
