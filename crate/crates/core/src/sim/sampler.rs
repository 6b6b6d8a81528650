//! Dynamic weighted sampling over vertices with a Fenwick (binary indexed) tree.

use rand::Rng;

/// Prefix-sum tree over per-vertex weights with O(log n) update and sampling.
///
/// Capacity is fixed at construction; vertices are appended with [`push`].
///
/// [`push`]: WeightIndex::push
#[derive(Debug, Clone)]
pub struct WeightIndex {
    // 1-based Fenwick array, tree[0] unused.
    tree: Vec<f64>,
    weights: Vec<f64>,
    capacity: usize,
    top_bit: usize,
    total: f64,
    updates_since_rebuild: u64,
}

/// Exact rebuild period, in updates.
pub const REBUILD_PERIOD: u64 = 1 << 16;

impl WeightIndex {
    pub fn with_capacity(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        Self {
            tree: vec![0.0; capacity + 1],
            weights: Vec::with_capacity(capacity),
            capacity,
            top_bit: 1 << (usize::BITS - 1 - capacity.leading_zeros()),
            total: 0.0,
            updates_since_rebuild: 0,
        }
    }

    pub fn from_weights(weights: &[f64], capacity: usize) -> Self {
        let mut idx = Self::with_capacity(capacity.max(weights.len()));
        idx.weights.extend_from_slice(weights);
        idx.rebuild();
        idx
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn tree_add(&mut self, i: usize, delta: f64) {
        let mut pos = i + 1;
        while pos <= self.capacity {
            self.tree[pos] += delta;
            pos += pos & pos.wrapping_neg();
        }
    }

    /// Appends a vertex and returns its index.
    pub fn push(&mut self, w: f64) -> usize {
        assert!(self.weights.len() < self.capacity, "weight index capacity exceeded");
        assert!(w > 0.0, "vertex weight must be positive, got {w}");
        let i = self.weights.len();
        self.weights.push(w);
        self.tree_add(i, w);
        self.total += w;
        self.tick();
        i
    }

    /// Adds `delta` to the weight of vertex `i`.
    pub fn add(&mut self, i: usize, delta: f64) {
        let w = self.weights[i] + delta;
        assert!(w > 0.0, "vertex weight must stay positive, got {w}");
        self.weights[i] = w;
        self.tree_add(i, delta);
        self.total += delta;
        self.tick();
    }

    fn tick(&mut self) {
        self.updates_since_rebuild += 1;
        if self.updates_since_rebuild >= REBUILD_PERIOD {
            self.rebuild();
        }
    }

    /// Recomputes the tree and the total from the stored weights.
    pub fn rebuild(&mut self) {
        self.tree.iter_mut().for_each(|t| *t = 0.0);
        for (i, &w) in self.weights.iter().enumerate() {
            self.tree[i + 1] = w;
        }
        for pos in 1..=self.capacity {
            let parent = pos + (pos & pos.wrapping_neg());
            if parent <= self.capacity {
                let v = self.tree[pos];
                self.tree[parent] += v;
            }
        }
        self.total = self.weights.iter().sum();
        self.updates_since_rebuild = 0;
    }

    /// Sum of weights of vertices `0..i`.
    pub fn prefix_sum(&self, i: usize) -> f64 {
        let mut pos = i;
        let mut acc = 0.0;
        while pos > 0 {
            acc += self.tree[pos];
            pos -= pos & pos.wrapping_neg();
        }
        acc
    }

    /// Index of the vertex whose cumulative weight interval contains `target`.
    pub fn find(&self, target: f64) -> usize {
        let mut pos = 0;
        let mut rem = target;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next <= self.capacity && self.tree[next] <= rem {
                pos = next;
                rem -= self.tree[next];
            }
            step >>= 1;
        }
        // Rounding can push past the last populated vertex.
        pos.min(self.weights.len() - 1)
    }

    /// Draws a vertex with probability `w_i / W`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.find(u * self.total)
    }
}
