//! Lane association and reachability over the divider connectivity graph.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::scene::{AgentState, Point2, PolylineId, SemanticMap};
use crate::semantics::geometry::project_on_segment;

/// Default radius within which an agent associates to a divider.
pub const DEFAULT_ASSOCIATION_RADIUS: f64 = 5.0;

/// Default hop count for lane reachability.
pub const DEFAULT_REACH_DEPTH: usize = 3;

/// The dividers reachable for one agent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaneSet {
    pub divider_ids: BTreeSet<PolylineId>,
}

impl LaneSet {
    pub fn new(divider_ids: impl IntoIterator<Item = PolylineId>) -> Self {
        Self {
            divider_ids: divider_ids.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.divider_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divider_ids.is_empty()
    }

    pub fn contains(&self, id: &PolylineId) -> bool {
        self.divider_ids.contains(id)
    }
}

/// True iff the two lane sets share a divider. Symmetric; empty sets never
/// overlap anything.
pub fn lanes_overlap(a: &LaneSet, b: &LaneSet) -> bool {
    // Iterate the smaller set.
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.divider_ids.iter().any(|id| large.contains(id))
}

/// Closest point of a divider to `p`: distance, plus the tangent direction
/// of the segment the closest point lies on.
fn closest_on_divider(p: Point2, points: &[Point2]) -> Option<(f64, Point2)> {
    let mut best: Option<(f64, Point2)> = None;
    for w in points.windows(2) {
        let (proj, _) = project_on_segment(p, w[0], w[1]);
        let d = p.distance(proj);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, w[1].sub(w[0])));
        }
    }
    best
}

/// Divider the agent is currently driving on, if any.
///
/// Picks the nearest divider within `radius` whose local tangent is within
/// 90 degrees of the agent heading; ties by distance resolve to the
/// lexicographically smaller id.
pub fn associate_lane(
    state: &AgentState,
    map: &SemanticMap,
    radius: f64,
) -> Option<PolylineId> {
    let pos = state.position();
    let heading_dir = Point2::new(state.heading.cos(), state.heading.sin());

    let mut dividers: Vec<_> = map.dividers().collect();
    dividers.sort_by(|a, b| a.id.cmp(&b.id));

    let mut best: Option<(f64, &PolylineId)> = None;
    for divider in dividers {
        let Some((d, tangent)) = closest_on_divider(pos, &divider.points) else {
            continue;
        };
        if d > radius {
            continue;
        }
        if tangent.dot(heading_dir) <= 0.0 {
            continue;
        }
        // Strict < keeps the first (smallest) id on exact ties.
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, &divider.id));
        }
    }
    best.map(|(_, id)| id.clone())
}

/// Breadth-first closure over divider successors up to `depth` hops,
/// including the seed itself.
pub fn reachable_lanes(
    divider_id: &PolylineId,
    map: &SemanticMap,
    depth: usize,
) -> Result<LaneSet> {
    if map.polyline(divider_id).is_none() {
        return Err(Error::UnknownDivider(divider_id.to_string()));
    }
    let mut reached = BTreeSet::new();
    reached.insert(divider_id.clone());
    let mut frontier = VecDeque::new();
    frontier.push_back((divider_id.clone(), 0usize));
    while let Some((id, hops)) = frontier.pop_front() {
        if hops == depth {
            continue;
        }
        if let Some(succs) = map.successors(&id) {
            for next in succs {
                if reached.insert(next.clone()) {
                    frontier.push_back((next.clone(), hops + 1));
                }
            }
        }
    }
    Ok(LaneSet {
        divider_ids: reached,
    })
}

/// Lane set for an agent: association followed by reachability. `None` when
/// the agent does not associate to any divider.
pub fn lane_set_for(
    state: &AgentState,
    map: &SemanticMap,
    radius: f64,
    depth: usize,
) -> Option<LaneSet> {
    let seed = associate_lane(state, map, radius)?;
    reachable_lanes(&seed, map, depth).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{PolylineKind, TokenPolyline};
    use std::collections::BTreeMap;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn divider(id: &str, points: Vec<Point2>) -> TokenPolyline {
        TokenPolyline::new(PolylineId::new(id), PolylineKind::LaneDivider, points)
    }

    fn chain_map() -> SemanticMap {
        // d1 -> d2 -> d3, all along +x.
        let mut successors = BTreeMap::new();
        successors.insert(
            PolylineId::new("d1"),
            BTreeSet::from([PolylineId::new("d2")]),
        );
        successors.insert(
            PolylineId::new("d2"),
            BTreeSet::from([PolylineId::new("d3")]),
        );
        SemanticMap {
            polylines: vec![
                divider("d1", vec![p(0.0, 0.0), p(10.0, 0.0)]),
                divider("d2", vec![p(10.0, 0.0), p(20.0, 0.0)]),
                divider("d3", vec![p(20.0, 0.0), p(30.0, 0.0)]),
            ],
            divider_successors: successors,
            ..SemanticMap::default()
        }
    }

    fn state_heading(x: f64, y: f64, heading: f64) -> AgentState {
        AgentState::new(x, y, heading, heading.cos(), heading.sin())
    }

    #[test]
    fn agent_on_centerline_associates_to_it() {
        let map = chain_map();
        let s = state_heading(5.0, 0.0, 0.0);
        assert_eq!(
            associate_lane(&s, &map, DEFAULT_ASSOCIATION_RADIUS),
            Some(PolylineId::new("d1"))
        );
    }

    #[test]
    fn opposing_heading_blocks_association() {
        let map = chain_map();
        let s = state_heading(5.0, 0.0, std::f64::consts::PI);
        assert_eq!(associate_lane(&s, &map, DEFAULT_ASSOCIATION_RADIUS), None);
    }

    #[test]
    fn agent_outside_radius_does_not_associate() {
        let map = chain_map();
        let s = state_heading(5.0, 8.0, 0.0);
        assert_eq!(associate_lane(&s, &map, 5.0), None);
        assert_eq!(
            associate_lane(&s, &map, 10.0),
            Some(PolylineId::new("d1"))
        );
    }

    #[test]
    fn equidistant_tie_resolves_to_smaller_id() {
        let map = SemanticMap {
            polylines: vec![
                divider("db", vec![p(0.0, 2.0), p(10.0, 2.0)]),
                divider("da", vec![p(0.0, -2.0), p(10.0, -2.0)]),
            ],
            ..SemanticMap::default()
        };
        let s = state_heading(5.0, 0.0, 0.0);
        assert_eq!(associate_lane(&s, &map, 5.0), Some(PolylineId::new("da")));
    }

    #[test]
    fn isolated_divider_reaches_only_itself() {
        let map = SemanticMap {
            polylines: vec![divider("d9", vec![p(0.0, 0.0), p(5.0, 0.0)])],
            ..SemanticMap::default()
        };
        for depth in [0, 1, 5] {
            let set = reachable_lanes(&PolylineId::new("d9"), &map, depth).unwrap();
            assert_eq!(set, LaneSet::new([PolylineId::new("d9")]));
        }
    }

    #[test]
    fn chain_reaches_one_hop_per_depth() {
        let map = chain_map();
        let seed = PolylineId::new("d1");
        let one = reachable_lanes(&seed, &map, 1).unwrap();
        assert_eq!(
            one,
            LaneSet::new([PolylineId::new("d1"), PolylineId::new("d2")])
        );
        let two = reachable_lanes(&seed, &map, 2).unwrap();
        assert_eq!(two.len(), 3);
    }

    #[test]
    fn unknown_divider_is_rejected() {
        let map = chain_map();
        assert!(matches!(
            reachable_lanes(&PolylineId::new("nope"), &map, 1),
            Err(Error::UnknownDivider(_))
        ));
    }

    /// Brute-force oracle: enumerate every path of at most `depth` edges.
    fn enumerate_paths(map: &SemanticMap, seed: &PolylineId, depth: usize) -> BTreeSet<PolylineId> {
        let mut reached = BTreeSet::new();
        let mut stack = vec![(seed.clone(), 0usize)];
        while let Some((id, hops)) = stack.pop() {
            reached.insert(id.clone());
            if hops < depth {
                if let Some(succs) = map.successors(&id) {
                    for next in succs {
                        stack.push((next.clone(), hops + 1));
                    }
                }
            }
        }
        reached
    }

    fn branching_map() -> SemanticMap {
        // r -> {a, b}; a -> {c}; b -> {c, d}; c -> {e}; shared joints are
        // stitched by reusing endpoint tokens.
        let joints = [
            ("r", p(0.0, 0.0), p(10.0, 0.0)),
            ("a", p(10.0, 0.0), p(20.0, 5.0)),
            ("b", p(10.0, 0.0), p(20.0, -5.0)),
            ("c", p(20.0, 5.0), p(30.0, 0.0)),
            ("d", p(20.0, -5.0), p(30.0, -10.0)),
            ("e", p(30.0, 0.0), p(40.0, 0.0)),
        ];
        let polylines = joints
            .iter()
            .map(|(id, a, b)| divider(id, vec![*a, *b]))
            .collect();
        let mut successors: BTreeMap<PolylineId, BTreeSet<PolylineId>> = BTreeMap::new();
        let mut add = |from: &str, to: &str| {
            successors
                .entry(PolylineId::new(from))
                .or_default()
                .insert(PolylineId::new(to));
        };
        add("r", "a");
        add("r", "b");
        add("a", "c");
        add("b", "d");
        add("c", "e");
        SemanticMap {
            polylines,
            divider_successors: successors,
            ..SemanticMap::default()
        }
    }

    #[test]
    fn branching_reachability_matches_path_enumeration() {
        let map = branching_map();
        for depth in 0..=4 {
            for seed in ["r", "a", "b", "c", "d", "e"] {
                let seed = PolylineId::new(seed);
                let got = reachable_lanes(&seed, &map, depth).unwrap();
                let expected = enumerate_paths(&map, &seed, depth);
                assert_eq!(got.divider_ids, expected, "seed {seed} depth {depth}");
            }
        }
    }

    #[test]
    fn reachability_is_monotone_in_depth() {
        let map = branching_map();
        let seed = PolylineId::new("r");
        let mut prev = BTreeSet::new();
        for depth in 0..=4 {
            let set = reachable_lanes(&seed, &map, depth).unwrap().divider_ids;
            assert!(prev.is_subset(&set), "depth {depth} shrank the set");
            prev = set;
        }
    }

    #[test]
    fn overlap_is_set_intersection() {
        let a = LaneSet::new([PolylineId::new("d1"), PolylineId::new("d3")]);
        let b = LaneSet::new([PolylineId::new("d2"), PolylineId::new("d3")]);
        let c = LaneSet::new([PolylineId::new("d2")]);
        let empty = LaneSet::default();
        assert!(lanes_overlap(&a, &b));
        assert!(lanes_overlap(&b, &a));
        assert!(!lanes_overlap(&a, &c));
        assert!(!lanes_overlap(&empty, &a));
        assert!(!lanes_overlap(&empty, &empty));
    }
}
