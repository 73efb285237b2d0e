/// One stored node of the search tree: cumulative score, visit count, and the
/// expanded children keyed by grid index.
#[derive(Debug, Clone)]
pub struct TreeNode {
    w: f64,
    n: u64,
    depth: usize,
    choice: Option<usize>,
    children: Vec<Option<Box<TreeNode>>>,
    expanded: usize,
}

impl TreeNode {
    /// A fresh node with zero score and zero visits. `num_children` is the
    /// number of admissible choices at the next turn (zero for a terminal
    /// node).
    pub fn new(depth: usize, choice: Option<usize>, num_children: usize) -> Self {
        Self { w: 0.0, n: 0, depth, choice, children: vec![None; num_children], expanded: 0 }
    }

    /// Cumulative backpropagated score.
    pub fn score(&self) -> f64 {
        self.w
    }

    pub fn visits(&self) -> u64 {
        self.n
    }

    /// Mean score `w / n`; zero on an unvisited node.
    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.w / self.n as f64
        }
    }

    /// Turn index of the choice this node represents.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Grid index selected at this node (`None` for a game root).
    pub fn choice(&self) -> Option<usize> {
        self.choice
    }

    pub fn num_slots(&self) -> usize {
        self.children.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_fully_expanded(&self) -> bool {
        self.expanded == self.children.len()
    }

    pub fn child(&self, idx: usize) -> Option<&TreeNode> {
        self.children.get(idx).and_then(|c| c.as_deref())
    }

    /// Expanded `(grid index, node)` pairs in ascending index order.
    pub fn children(&self) -> impl Iterator<Item = (usize, &TreeNode)> {
        self.children.iter().enumerate().filter_map(|(i, c)| c.as_deref().map(|n| (i, n)))
    }

    /// Grid indices without an expanded child yet.
    pub fn unexpanded(&self) -> impl Iterator<Item = usize> + '_ {
        self.children.iter().enumerate().filter_map(|(i, c)| c.is_none().then_some(i))
    }

    /// Backpropagation update: one more visit carrying `reward`.
    pub fn record(&mut self, reward: f64) {
        self.n += 1;
        self.w += reward;
    }

    pub(crate) fn child_mut(&mut self, idx: usize) -> Option<&mut TreeNode> {
        self.children.get_mut(idx).and_then(|c| c.as_deref_mut())
    }

    /// Expands slot `idx` with `node`. The slot must be empty.
    pub fn insert_child(&mut self, idx: usize, node: TreeNode) -> &mut TreeNode {
        assert!(self.children[idx].is_none(), "slot {idx} already expanded");
        self.children[idx] = Some(Box::new(node));
        self.expanded += 1;
        self.children[idx].as_deref_mut().expect("just inserted")
    }

    /// Detaches the child at `idx`, e.g. to promote it to the new root.
    pub(crate) fn take_child(&mut self, idx: usize) -> Option<Box<TreeNode>> {
        let taken = self.children.get_mut(idx).and_then(Option::take);
        if taken.is_some() {
            self.expanded -= 1;
        }
        taken
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_node_has_zero_stats() {
        let node = TreeNode::new(0, None, 3);
        assert_eq!(node.visits(), 0);
        assert_eq!(node.score(), 0.0);
        assert_eq!(node.mean(), 0.0);
        assert!(!node.is_fully_expanded());
        assert_eq!(node.unexpanded().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn recording_updates_mean() {
        let mut node = TreeNode::new(1, Some(2), 0);
        node.record(0.5);
        node.record(1.5);
        assert_eq!(node.visits(), 2);
        assert_eq!(node.mean(), 1.0);
        assert!(node.is_terminal());
    }

    #[test]
    fn expansion_bookkeeping() {
        let mut node = TreeNode::new(0, None, 2);
        node.insert_child(1, TreeNode::new(1, Some(1), 0));
        assert!(!node.is_fully_expanded());
        assert_eq!(node.unexpanded().collect::<Vec<_>>(), vec![0]);
        node.insert_child(0, TreeNode::new(1, Some(0), 0));
        assert!(node.is_fully_expanded());
        let taken = node.take_child(1).unwrap();
        assert_eq!(taken.choice(), Some(1));
        assert!(!node.is_fully_expanded());
    }
}
