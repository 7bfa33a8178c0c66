//! Two-node solver memory with a spare slot for step doubling.

use crate::vector::StateVector;

/// One solution node. `a` is present for the second-order families.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub t: f64,
    pub x: StateVector,
    pub v: StateVector,
    pub a: Option<StateVector>,
}

impl Node {
    pub fn new(t: f64, x: StateVector, v: StateVector, a: Option<StateVector>) -> Self {
        Node { t, x, v, a }
    }

    /// The acceleration sample, which second-order steppers require.
    pub(crate) fn accel(&self) -> &StateVector {
        self.a
            .as_ref()
            .expect("second-order history node without acceleration")
    }
}

/// Nodes `n-1` and `n` spaced by the local step `h`, plus an optional spare
/// node at `t_n - 2h`.
///
/// A freshly started window holds only node `n`; the family's one-step
/// startup method fills in the rest.
#[derive(Debug, Clone)]
pub struct HistoryWindow {
    prev: Option<Node>,
    curr: Node,
    spare: Option<Node>,
    h: f64,
}

impl HistoryWindow {
    pub fn start(node: Node, h: f64) -> Self {
        HistoryWindow {
            prev: None,
            curr: node,
            spare: None,
            h,
        }
    }

    /// A window with both nodes already known, spaced by `h`.
    pub fn with_nodes(prev: Node, curr: Node, h: f64) -> Self {
        HistoryWindow {
            prev: Some(prev),
            curr,
            spare: None,
            h,
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn current(&self) -> &Node {
        &self.curr
    }

    pub fn previous(&self) -> Option<&Node> {
        self.prev.as_ref()
    }

    pub fn spare(&self) -> Option<&Node> {
        self.spare.as_ref()
    }

    /// True once two nodes are present, i.e. the two-step method can run.
    pub fn is_primed(&self) -> bool {
        self.prev.is_some()
    }

    /// `n-1 ← n`, `n ← n+1`. The old `n-1` becomes the spare node, which sits
    /// exactly `2h` behind the new front.
    pub fn rotate(&mut self, next: Node) {
        let old_curr = std::mem::replace(&mut self.curr, next);
        self.spare = self.prev.replace(old_curr);
    }

    /// Halves `h`. `midpoint` is the node at `t_n - h/2`; the old `n-1`
    /// becomes the spare.
    pub fn halve(&mut self, midpoint: Option<Node>) {
        self.h *= 0.5;
        match midpoint {
            Some(mid) => self.spare = self.prev.replace(mid),
            None => {
                self.prev = None;
                self.spare = None;
            }
        }
    }

    /// Doubles `h`, promoting the spare node to `n-1`. Returns `false`, and
    /// leaves the window untouched, when no spare is available.
    pub fn double(&mut self) -> bool {
        match self.spare.take() {
            Some(spare) => {
                self.prev = Some(spare);
                self.h *= 2.0;
                true
            }
            None => false,
        }
    }

    /// Replaces `h` and the `n-1` node after an arbitrary re-grid.
    pub fn regrid(&mut self, h: f64, prev: Node) {
        self.h = h;
        self.prev = Some(prev);
        self.spare = None;
    }

    /// Drops all history except node `n`, so the next step is a startup step.
    pub fn reset(&mut self, h: f64) {
        self.h = h;
        self.prev = None;
        self.spare = None;
    }

    /// Forces the time stamp of node `n` (used to pin global nodes exactly).
    pub(crate) fn pin_time(&mut self, t: f64) {
        self.curr.t = t;
    }
}
