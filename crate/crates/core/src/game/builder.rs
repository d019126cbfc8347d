use super::{Action, Game, GameError, InfosetId, NodeId, Owner, Player, Rational, RawNode};

/// Bottom-up game construction: children are created before their parent.
///
/// Builder ids are arbitrary; [`GameBuilder::build`] renumbers everything in
/// depth-first preorder.
#[derive(Default)]
pub struct GameBuilder {
    num_players: usize,
    nodes: Vec<RawNode>,
    infosets: Vec<(Player, Vec<String>)>,
}

impl GameBuilder {
    pub fn new(num_players: usize) -> Self {
        GameBuilder { num_players, nodes: Vec::new(), infosets: Vec::new() }
    }

    pub fn add_infoset<S: AsRef<str>>(&mut self, player: Player, labels: &[S]) -> InfosetId {
        self.infosets.push((player, labels.iter().map(|s| s.as_ref().to_string()).collect()));
        self.infosets.len() - 1
    }

    pub fn terminal(&mut self, payoffs: Vec<Rational>) -> NodeId {
        self.push(RawNode { owner: Owner::Terminal, infoset: None, actions: Vec::new(), payoffs })
    }

    /// A decision node in `infoset`; `children[a]` follows the infoset's a-th label.
    pub fn decision(&mut self, infoset: InfosetId, children: Vec<NodeId>) -> NodeId {
        let (player, labels) = &self.infosets[infoset];
        assert_eq!(labels.len(), children.len(), "child count must match the infoset's actions");
        let actions = labels
            .iter()
            .zip(children)
            .map(|(l, child)| Action { label: l.clone(), child, prob: None })
            .collect();
        let owner = Owner::Player(*player);
        self.push(RawNode { owner, infoset: Some(infoset), actions, payoffs: Vec::new() })
    }

    pub fn chance<S: Into<String>>(&mut self, outcomes: Vec<(S, Rational, NodeId)>) -> NodeId {
        let actions = outcomes
            .into_iter()
            .map(|(l, p, child)| Action { label: l.into(), child, prob: Some(p) })
            .collect();
        self.push(RawNode { owner: Owner::Chance, infoset: None, actions, payoffs: Vec::new() })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn push(&mut self, node: RawNode) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn build(self, root: NodeId) -> Result<Game, GameError> {
        self.build_with_map(root).map(|(g, _)| g)
    }

    /// Build and also return the builder-id to final-id map.
    pub fn build_with_map(self, root: NodeId) -> Result<(Game, Vec<NodeId>), GameError> {
        Game::assemble(self.num_players, self.nodes, root)
    }
}
