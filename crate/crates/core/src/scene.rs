//! Domain types shared by the whole pipeline: agents, kinematic states,
//! trajectory histories, semantic maps, interaction graphs, cliques, and
//! agent-centric local map rasters.
//!
//! Everything here is immutable after construction and safe to share across
//! threads. The scene file format serializes these types directly; see the
//! repository docs for the field-by-field schema.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Normalize an angle to the half-open interval (-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    if !a.is_finite() {
        return a;
    }
    let r = a.rem_euclid(std::f64::consts::TAU);
    if r > std::f64::consts::PI {
        r - std::f64::consts::TAU
    } else {
        r
    }
}

/// 2D point/vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64)", into = "(f64, f64)")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product, i.e. the signed parallelogram area.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        self.sub(other).norm()
    }

    /// Rotate counterclockwise by `angle` radians around the origin.
    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point2 {
    fn from(t: (f64, f64)) -> Self {
        Point2::new(t.0, t.1)
    }
}

impl From<Point2> for (f64, f64) {
    fn from(p: Point2) -> Self {
        (p.x, p.y)
    }
}

/// Unique agent identifier. Ordering is lexicographic; deterministic
/// tie-breaking throughout the pipeline relies on it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub String);

impl AgentId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AgentId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Unique map polyline identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolylineId(pub String);

impl PolylineId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PolylineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PolylineId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Broad agent class. Determines default interaction thresholds and
/// footprint radii, and which semantic criteria apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Vehicle,
    Pedestrian,
}

impl AgentKind {
    /// Default interaction threshold distance for this class.
    pub fn default_d0(self) -> f64 {
        match self {
            AgentKind::Vehicle => 20.0,
            AgentKind::Pedestrian => 10.0,
        }
    }

    /// Default circular footprint radius for this class.
    pub fn default_footprint_radius(self) -> f64 {
        match self {
            AgentKind::Vehicle => 2.0,
            AgentKind::Pedestrian => 0.5,
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentKind::Vehicle => f.write_str("vehicle"),
            AgentKind::Pedestrian => f.write_str("pedestrian"),
        }
    }
}

/// Agent class plus its interaction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentType {
    pub kind: AgentKind,
    /// Circular footprint radius in meters, used for collision checks.
    pub footprint_radius: f64,
    /// Interaction threshold distance in meters.
    pub d0: f64,
}

impl AgentType {
    pub fn new(kind: AgentKind) -> Self {
        Self {
            kind,
            footprint_radius: kind.default_footprint_radius(),
            d0: kind.default_d0(),
        }
    }

    pub fn vehicle() -> Self {
        Self::new(AgentKind::Vehicle)
    }

    pub fn pedestrian() -> Self {
        Self::new(AgentKind::Pedestrian)
    }
}

/// Kinematic state of an agent at one timestep.
///
/// A single representation carries position, heading, and the velocity
/// vector; scalar speed is derived. `vehicle_view` / `pedestrian_view`
/// project out the class-specific subsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "AgentStateRepr")]
pub struct AgentState {
    pub x: f64,
    pub y: f64,
    /// Heading in radians, normalized to (-pi, pi] at construction.
    pub heading: f64,
    pub vx: f64,
    pub vy: f64,
}

#[derive(Deserialize)]
struct AgentStateRepr {
    x: f64,
    y: f64,
    heading: f64,
    vx: f64,
    vy: f64,
}

impl From<AgentStateRepr> for AgentState {
    fn from(r: AgentStateRepr) -> Self {
        AgentState::new(r.x, r.y, r.heading, r.vx, r.vy)
    }
}

impl AgentState {
    pub fn new(x: f64, y: f64, heading: f64, vx: f64, vy: f64) -> Self {
        Self {
            x,
            y,
            heading: normalize_angle(heading),
            vx,
            vy,
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn velocity(&self) -> Point2 {
        Point2::new(self.vx, self.vy)
    }

    /// Scalar speed, the L2 norm of the velocity vector.
    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    /// Vehicle projection: position, scalar speed, heading.
    pub fn vehicle_view(&self) -> (f64, f64, f64, f64) {
        (self.x, self.y, self.speed(), self.heading)
    }

    /// Pedestrian projection: position and velocity components.
    pub fn pedestrian_view(&self) -> (f64, f64, f64, f64) {
        (self.x, self.y, self.vx, self.vy)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.heading.is_finite()
            && self.vx.is_finite()
            && self.vy.is_finite()
    }
}

/// A contiguous run of states at consecutive timestep indices.
///
/// Index `start_index + k` maps to `states[k]`; uniform spacing is
/// guaranteed by construction. The scene owns the step duration `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHistory {
    pub start_index: i64,
    pub states: Vec<AgentState>,
}

impl TrajectoryHistory {
    pub fn new(start_index: i64, states: Vec<AgentState>) -> Self {
        Self {
            start_index,
            states,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first_index(&self) -> i64 {
        self.start_index
    }

    pub fn last_index(&self) -> i64 {
        self.start_index + self.states.len() as i64 - 1
    }

    pub fn state_at(&self, index: i64) -> Option<&AgentState> {
        if index < self.start_index {
            return None;
        }
        self.states.get((index - self.start_index) as usize)
    }

    pub fn last_state(&self) -> Option<&AgentState> {
        self.states.last()
    }

    /// Iterate as `(timestep_index, state)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &AgentState)> {
        let start = self.start_index;
        self.states
            .iter()
            .enumerate()
            .map(move |(k, s)| (start + k as i64, s))
    }
}

/// Polyline semantic class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolylineKind {
    Barrier,
    LaneDivider,
}

/// An ordered run of map tokens forming a barrier or lane divider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenPolyline {
    pub id: PolylineId,
    pub kind: PolylineKind,
    pub points: Vec<Point2>,
}

impl TokenPolyline {
    pub fn new(id: impl Into<PolylineId>, kind: PolylineKind, points: Vec<Point2>) -> Self {
        Self {
            id: id.into(),
            kind,
            points,
        }
    }

    /// Consecutive token pairs as segments.
    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn first_token(&self) -> Point2 {
        self.points[0]
    }

    pub fn last_token(&self) -> Point2 {
        *self.points.last().expect("polyline has points")
    }
}

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point2,
    pub max: Point2,
}

impl Bounds {
    pub fn new(min: Point2, max: Point2) -> Self {
        Self { min, max }
    }

    /// Smallest bounds containing all given points, padded by `margin`.
    pub fn around<'a>(points: impl Iterator<Item = Point2>, margin: f64) -> Self {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        if min.x > max.x {
            // No points at all.
            min = Point2::new(0.0, 0.0);
            max = Point2::new(0.0, 0.0);
        }
        Self {
            min: Point2::new(min.x - margin, min.y - margin),
            max: Point2::new(max.x + margin, max.y + margin),
        }
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(0.0, 0.0),
        }
    }
}

/// Token polylines plus the lane-divider connectivity graph.
///
/// `divider_successors` maps a divider to the dividers whose first token
/// coincides with its last token, i.e. the lanes reachable by continuing
/// forward.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SemanticMap {
    #[serde(default)]
    pub polylines: Vec<TokenPolyline>,
    #[serde(default)]
    pub divider_successors: BTreeMap<PolylineId, BTreeSet<PolylineId>>,
    #[serde(default)]
    pub bounds: Bounds,
}

impl SemanticMap {
    pub fn polyline(&self, id: &PolylineId) -> Option<&TokenPolyline> {
        self.polylines.iter().find(|p| &p.id == id)
    }

    pub fn barriers(&self) -> impl Iterator<Item = &TokenPolyline> {
        self.polylines
            .iter()
            .filter(|p| p.kind == PolylineKind::Barrier)
    }

    pub fn dividers(&self) -> impl Iterator<Item = &TokenPolyline> {
        self.polylines
            .iter()
            .filter(|p| p.kind == PolylineKind::LaneDivider)
    }

    pub fn successors(&self, id: &PolylineId) -> Option<&BTreeSet<PolylineId>> {
        self.divider_successors.get(id)
    }
}

/// One agent of a scene: identity, class parameters, and observed history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "SceneAgentRepr", into = "SceneAgentRepr")]
pub struct SceneAgent {
    pub id: AgentId,
    pub agent_type: AgentType,
    pub history: TrajectoryHistory,
}

#[derive(Serialize, Deserialize)]
struct SceneAgentRepr {
    id: AgentId,
    kind: AgentKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    footprint_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d0: Option<f64>,
    history: TrajectoryHistory,
}

impl From<SceneAgentRepr> for SceneAgent {
    fn from(r: SceneAgentRepr) -> Self {
        SceneAgent {
            id: r.id,
            agent_type: AgentType {
                kind: r.kind,
                footprint_radius: r
                    .footprint_radius
                    .unwrap_or_else(|| r.kind.default_footprint_radius()),
                d0: r.d0.unwrap_or_else(|| r.kind.default_d0()),
            },
            history: r.history,
        }
    }
}

impl From<SceneAgent> for SceneAgentRepr {
    fn from(a: SceneAgent) -> Self {
        SceneAgentRepr {
            id: a.id,
            kind: a.agent_type.kind,
            footprint_radius: Some(a.agent_type.footprint_radius),
            d0: Some(a.agent_type.d0),
            history: a.history,
        }
    }
}

impl SceneAgent {
    pub fn new(id: impl Into<AgentId>, agent_type: AgentType, history: TrajectoryHistory) -> Self {
        Self {
            id: id.into(),
            agent_type,
            history,
        }
    }
}

fn default_schema_version() -> u32 {
    1
}

/// A complete multiagent scene: agents with histories, the semantic map,
/// timing parameters, and optional ground-truth futures for evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Timestep duration in seconds, shared by all histories.
    pub dt: f64,
    /// Prediction horizon in seconds.
    pub horizon: f64,
    pub agents: Vec<SceneAgent>,
    #[serde(default)]
    pub map: SemanticMap,
    /// Future trajectories per agent, starting right after each agent's
    /// last history index. Empty when the scene carries no ground truth.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ground_truth: BTreeMap<AgentId, TrajectoryHistory>,
}

impl Scene {
    /// Number of prediction steps covered by the horizon.
    pub fn prediction_steps(&self) -> usize {
        (self.horizon / self.dt + 1e-9).floor() as usize
    }

    pub fn agent(&self, id: &AgentId) -> Option<&SceneAgent> {
        self.agents.iter().find(|a| &a.id == id)
    }

    /// Agents that have an observed state at timestep `t`, sorted by id.
    pub fn active_agents(&self, t: i64) -> Vec<&SceneAgent> {
        let mut active: Vec<&SceneAgent> = self
            .agents
            .iter()
            .filter(|a| a.history.state_at(t).is_some())
            .collect();
        active.sort_by(|a, b| a.id.cmp(&b.id));
        active
    }

    /// Sorted union of all timestep indices observed in any history.
    pub fn timestep_indices(&self) -> Vec<i64> {
        let mut set = BTreeSet::new();
        for a in &self.agents {
            for (t, _) in a.history.iter() {
                set.insert(t);
            }
        }
        set.into_iter().collect()
    }

    pub fn has_ground_truth(&self) -> bool {
        !self.ground_truth.is_empty()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_scene(self)
    }
}

/// Per-timestep interaction graph: a symmetric, zero-diagonal matrix of
/// nonnegative weights over the agents active at that timestep.
///
/// Symmetry and the zero diagonal are enforced by the mutation API.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    timestep_index: i64,
    ids: Vec<AgentId>,
    alpha: Vec<f64>,
}

impl SceneGraph {
    /// Create a zero graph over `ids`. Ids must be sorted and unique.
    pub fn new(timestep_index: i64, ids: Vec<AgentId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]), "ids sorted and unique");
        let n = ids.len();
        Self {
            timestep_index,
            ids,
            alpha: vec![0.0; n * n],
        }
    }

    pub fn timestep_index(&self) -> i64 {
        self.timestep_index
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[AgentId] {
        &self.ids
    }

    pub fn index_of(&self, id: &AgentId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }

    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        self.alpha[i * self.ids.len() + j]
    }

    pub fn alpha_by_id(&self, a: &AgentId, b: &AgentId) -> Option<f64> {
        Some(self.alpha(self.index_of(a)?, self.index_of(b)?))
    }

    /// Set the weight of the undirected edge (i, j). Panics on the diagonal
    /// or on negative/non-finite weights.
    pub fn set_alpha(&mut self, i: usize, j: usize, weight: f64) {
        assert!(i != j, "diagonal entries are fixed at zero");
        assert!(
            weight.is_finite() && weight >= 0.0,
            "edge weight must be finite and nonnegative"
        );
        let n = self.ids.len();
        self.alpha[i * n + j] = weight;
        self.alpha[j * n + i] = weight;
    }

    /// Edges strictly above `threshold`, as `(i, j, weight)` with `i < j`,
    /// in ascending index order.
    pub fn edges_above(&self, threshold: f64) -> Vec<(usize, usize, f64)> {
        let n = self.ids.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.alpha(i, j);
                if w > threshold {
                    edges.push((i, j, w));
                }
            }
        }
        edges
    }
}

/// A group of agents predicted jointly at one timestep. Cliques at a
/// timestep partition the active agent set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clique {
    pub timestep_index: i64,
    pub member_ids: BTreeSet<AgentId>,
}

impl Clique {
    pub fn new(timestep_index: i64, member_ids: impl IntoIterator<Item = AgentId>) -> Self {
        Self {
            timestep_index,
            member_ids: member_ids.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.member_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_ids.is_empty()
    }

    pub fn contains(&self, id: &AgentId) -> bool {
        self.member_ids.contains(id)
    }
}

/// Channel layout of local map rasters.
pub mod raster_channels {
    pub const BARRIER: usize = 0;
    pub const LANE_DIVIDER: usize = 1;
    pub const VEHICLE: usize = 2;
    pub const PEDESTRIAN: usize = 3;
    pub const COUNT: usize = 4;
}

/// Agent-centric occupancy raster: a K x K grid with one binary channel per
/// polyline kind and one per agent class. The agent sits at the grid center
/// with its heading mapped to the +x raster axis.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMap {
    pub agent_id: AgentId,
    /// Side length K in cells.
    pub size: usize,
    /// Meters per cell.
    pub resolution: f64,
    grid: Vec<u8>,
}

impl LocalMap {
    pub fn zeroed(agent_id: AgentId, size: usize, resolution: f64) -> Self {
        Self {
            agent_id,
            size,
            resolution,
            grid: vec![0; size * size * raster_channels::COUNT],
        }
    }

    pub fn channels(&self) -> usize {
        raster_channels::COUNT
    }

    fn offset(&self, row: usize, col: usize, channel: usize) -> usize {
        (row * self.size + col) * raster_channels::COUNT + channel
    }

    pub fn get(&self, row: usize, col: usize, channel: usize) -> u8 {
        self.grid[self.offset(row, col, channel)]
    }

    pub fn set(&mut self, row: usize, col: usize, channel: usize, value: u8) {
        let off = self.offset(row, col, channel);
        self.grid[off] = value;
    }

    /// Number of marked cells in one channel.
    pub fn count_marked(&self, channel: usize) -> usize {
        let mut n = 0;
        for row in 0..self.size {
            for col in 0..self.size {
                if self.get(row, col, channel) != 0 {
                    n += 1;
                }
            }
        }
        n
    }
}

/// A broken scene invariant: which entity, which rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
}

impl Violation {
    fn new(entity: impl Into<String>, rule: impl Into<String>) -> Self {
        Self {
            entity: entity.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

const TOKEN_MATCH_EPS: f64 = 1e-9;

/// Check every structural invariant of a scene. Returns an empty list iff
/// the scene is well formed; each violation names the offending entity and
/// the rule it breaks.
pub fn validate_scene(scene: &Scene) -> Vec<Violation> {
    let mut out = Vec::new();

    if !(scene.dt.is_finite() && scene.dt > 0.0) {
        out.push(Violation::new("scene", "dt must be finite and > 0"));
    }
    if !(scene.horizon.is_finite() && scene.horizon > 0.0) {
        out.push(Violation::new("scene", "horizon must be finite and > 0"));
    }

    let mut seen_agents = BTreeSet::new();
    for agent in &scene.agents {
        let entity = format!("agent {}", agent.id);
        if !seen_agents.insert(agent.id.clone()) {
            out.push(Violation::new(&entity, "duplicate agent_id"));
        }
        if !(agent.agent_type.footprint_radius > 0.0) {
            out.push(Violation::new(&entity, "footprint_radius must be > 0"));
        }
        if !(agent.agent_type.d0 > 0.0) {
            out.push(Violation::new(&entity, "d0 must be > 0"));
        }
        if agent.history.is_empty() {
            out.push(Violation::new(&entity, "history needs >= 1 state"));
        }
        for (t, state) in agent.history.iter() {
            if !state.is_finite() {
                out.push(Violation::new(
                    &entity,
                    format!("state at t={t} has non-finite fields"),
                ));
            }
        }
    }

    let mut seen_polylines = BTreeSet::new();
    for polyline in &scene.map.polylines {
        let entity = format!("polyline {}", polyline.id);
        if !seen_polylines.insert(polyline.id.clone()) {
            out.push(Violation::new(&entity, "duplicate polyline id"));
        }
        if polyline.points.len() < 2 {
            out.push(Violation::new(&entity, "polyline needs >= 2 points"));
        }
        for w in polyline.points.windows(2) {
            if w[0].distance(w[1]) == 0.0 {
                out.push(Violation::new(&entity, "consecutive points must be distinct"));
                break;
            }
        }
        if polyline.points.iter().any(|p| !p.is_finite()) {
            out.push(Violation::new(&entity, "points must be finite"));
        }
    }

    for (from, succs) in &scene.map.divider_successors {
        let entity = format!("successors of {from}");
        let from_poly = match scene.map.polyline(from) {
            Some(p) => p,
            None => {
                out.push(Violation::new(&entity, "references unknown polyline"));
                continue;
            }
        };
        if from_poly.kind != PolylineKind::LaneDivider {
            out.push(Violation::new(&entity, "successor source must be a lane divider"));
            continue;
        }
        for to in succs {
            let to_poly = match scene.map.polyline(to) {
                Some(p) => p,
                None => {
                    out.push(Violation::new(
                        &entity,
                        format!("successor {to} is not in the map"),
                    ));
                    continue;
                }
            };
            if to_poly.kind != PolylineKind::LaneDivider {
                out.push(Violation::new(
                    &entity,
                    format!("successor {to} must be a lane divider"),
                ));
                continue;
            }
            if from_poly.points.len() >= 2
                && to_poly.points.len() >= 2
                && from_poly.last_token().distance(to_poly.first_token()) > TOKEN_MATCH_EPS
            {
                out.push(Violation::new(
                    &entity,
                    format!("successor {to} does not share the end token of {from}"),
                ));
            }
        }
    }

    for (id, future) in &scene.ground_truth {
        let entity = format!("ground truth for {id}");
        match scene.agent(id) {
            None => out.push(Violation::new(&entity, "references unknown agent")),
            Some(agent) => {
                if !agent.history.is_empty()
                    && future.first_index() != agent.history.last_index() + 1
                {
                    out.push(Violation::new(
                        &entity,
                        "must start right after the last history index",
                    ));
                }
            }
        }
        if future.is_empty() {
            out.push(Violation::new(&entity, "needs >= 1 state"));
        }
        for (t, state) in future.iter() {
            if !state.is_finite() {
                out.push(Violation::new(
                    &entity,
                    format!("state at t={t} has non-finite fields"),
                ));
            }
        }
    }

    if !(scene.map.bounds.min.is_finite() && scene.map.bounds.max.is_finite()) {
        out.push(Violation::new("map bounds", "must be finite"));
    } else if scene.map.bounds.min.x > scene.map.bounds.max.x
        || scene.map.bounds.min.y > scene.map.bounds.max.y
    {
        out.push(Violation::new("map bounds", "min must not exceed max"));
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(x: f64, y: f64) -> AgentState {
        AgentState::new(x, y, 0.0, 1.0, 0.0)
    }

    fn one_state_history() -> TrajectoryHistory {
        TrajectoryHistory::new(0, vec![state(0.0, 0.0)])
    }

    #[test]
    fn normalize_angle_maps_into_half_open_interval() {
        use std::f64::consts::PI;
        assert_eq!(normalize_angle(0.0), 0.0);
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((normalize_angle(-3.0 * PI) - PI).abs() < 1e-12);
        for k in -10..10 {
            let a = 0.3 + k as f64 * std::f64::consts::TAU;
            assert!((normalize_angle(a) - 0.3).abs() < 1e-9);
        }
    }

    #[test]
    fn duplicate_agent_id_is_reported_by_name() {
        let scene = Scene {
            schema_version: 1,
            dt: 0.5,
            horizon: 4.0,
            agents: vec![
                SceneAgent::new("a1", AgentType::vehicle(), one_state_history()),
                SceneAgent::new("a1", AgentType::vehicle(), one_state_history()),
            ],
            map: SemanticMap::default(),
            ground_truth: BTreeMap::new(),
        };
        let violations = validate_scene(&scene);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].entity.contains("a1"));
        assert!(violations[0].rule.contains("duplicate"));
    }

    #[test]
    fn well_formed_two_agent_scene_has_no_violations() {
        let scene = Scene {
            schema_version: 1,
            dt: 0.5,
            horizon: 4.0,
            agents: vec![
                SceneAgent::new("a1", AgentType::vehicle(), one_state_history()),
                SceneAgent::new("a2", AgentType::pedestrian(), one_state_history()),
            ],
            map: SemanticMap::default(),
            ground_truth: BTreeMap::new(),
        };
        assert!(validate_scene(&scene).is_empty());
    }

    #[test]
    fn short_polyline_is_reported() {
        let mut scene = Scene {
            schema_version: 1,
            dt: 0.5,
            horizon: 4.0,
            agents: vec![SceneAgent::new(
                "a1",
                AgentType::vehicle(),
                one_state_history(),
            )],
            map: SemanticMap::default(),
            ground_truth: BTreeMap::new(),
        };
        scene.map.polylines.push(TokenPolyline {
            id: PolylineId::new("b0"),
            kind: PolylineKind::Barrier,
            points: vec![Point2::new(0.0, 0.0)],
        });
        let violations = validate_scene(&scene);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].rule.contains(">= 2 points"));
    }

    #[test]
    fn successor_token_mismatch_is_reported() {
        let mut scene = Scene {
            schema_version: 1,
            dt: 0.5,
            horizon: 4.0,
            agents: vec![SceneAgent::new(
                "a1",
                AgentType::vehicle(),
                one_state_history(),
            )],
            map: SemanticMap::default(),
            ground_truth: BTreeMap::new(),
        };
        scene.map.polylines.push(TokenPolyline {
            id: PolylineId::new("d1"),
            kind: PolylineKind::LaneDivider,
            points: vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0)],
        });
        scene.map.polylines.push(TokenPolyline {
            id: PolylineId::new("d2"),
            kind: PolylineKind::LaneDivider,
            points: vec![Point2::new(11.0, 0.0), Point2::new(20.0, 0.0)],
        });
        scene
            .map
            .divider_successors
            .insert(PolylineId::new("d1"), [PolylineId::new("d2")].into());
        let violations = validate_scene(&scene);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].rule.contains("share the end token"));
    }

    #[test]
    fn scene_graph_stays_symmetric_with_zero_diagonal() {
        let ids = vec![AgentId::new("a"), AgentId::new("b"), AgentId::new("c")];
        let mut g = SceneGraph::new(0, ids);
        g.set_alpha(0, 2, 1.5);
        g.set_alpha(1, 0, 0.25);
        for i in 0..3 {
            assert_eq!(g.alpha(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(g.alpha(i, j), g.alpha(j, i));
            }
        }
        assert_eq!(g.alpha(2, 0), 1.5);
        assert_eq!(
            g.edges_above(0.5),
            vec![(0, 2, 1.5)],
        );
    }

    #[test]
    #[should_panic(expected = "diagonal")]
    fn scene_graph_rejects_diagonal_writes() {
        let mut g = SceneGraph::new(0, vec![AgentId::new("a")]);
        g.set_alpha(0, 0, 1.0);
    }

    #[test]
    fn agent_state_views_project_the_shared_state() {
        let s = AgentState::new(1.0, 2.0, 0.5, 3.0, 4.0);
        let (x, y, speed, heading) = s.vehicle_view();
        assert_eq!((x, y), (1.0, 2.0));
        assert_eq!(speed, 5.0);
        assert_eq!(heading, 0.5);
        let (px, py, vx, vy) = s.pedestrian_view();
        assert_eq!((px, py, vx, vy), (1.0, 2.0, 3.0, 4.0));
    }

    #[test]
    fn heading_is_normalized_at_construction_and_deserialization() {
        let s = AgentState::new(0.0, 0.0, 3.0 * std::f64::consts::PI, 0.0, 0.0);
        assert!((s.heading - std::f64::consts::PI).abs() < 1e-12);
        let parsed: AgentState =
            serde_json::from_str(r#"{"x":0.0,"y":0.0,"heading":7.0,"vx":0.0,"vy":0.0}"#).unwrap();
        assert!(parsed.heading <= std::f64::consts::PI);
        assert!((parsed.heading - (7.0 - std::f64::consts::TAU)).abs() < 1e-12);
    }
}
