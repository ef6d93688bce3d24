//! Agent-centric local map rasterization.
//!
//! The crop is centered on the agent and rotated so its heading maps to the
//! +x raster axis (columns increase along the heading, rows increase to the
//! right of it). A cell is marked in a polyline channel when its center
//! lies within half a cell of the geometry.

use crate::scene::{
    raster_channels, AgentId, AgentKind, AgentState, LocalMap, Point2, PolylineKind, SemanticMap,
};
use crate::semantics::geometry::point_segment_distance;

fn channel_for(kind: PolylineKind) -> usize {
    match kind {
        PolylineKind::Barrier => raster_channels::BARRIER,
        PolylineKind::LaneDivider => raster_channels::LANE_DIVIDER,
    }
}

fn agent_channel(kind: AgentKind) -> usize {
    match kind {
        AgentKind::Vehicle => raster_channels::VEHICLE,
        AgentKind::Pedestrian => raster_channels::PEDESTRIAN,
    }
}

/// World position of the center of cell (row, col) for an agent-centric
/// raster of side `k` at `resolution` meters per cell.
fn cell_center_world(state: &AgentState, k: usize, resolution: f64, row: usize, col: usize) -> Point2 {
    let half = (k as f64 - 1.0) / 2.0;
    let local = Point2::new(
        (col as f64 - half) * resolution,
        (half - row as f64) * resolution,
    );
    state.position().add(local.rotate(state.heading))
}

/// Rasterize the map polylines into an agent-centric K x K crop. Agent
/// channels stay empty; see [`rasterize_local_map_with_agents`].
pub fn rasterize_local_map(
    state: &AgentState,
    map: &SemanticMap,
    k: usize,
    resolution: f64,
) -> LocalMap {
    rasterize_local_map_with_agents(AgentId::new("anonymous"), state, map, &[], k, resolution)
}

/// Rasterize map polylines plus neighboring agents' circular footprints.
/// Neighbors are given as (class, position, footprint radius).
pub fn rasterize_local_map_with_agents(
    agent_id: AgentId,
    state: &AgentState,
    map: &SemanticMap,
    neighbors: &[(AgentKind, Point2, f64)],
    k: usize,
    resolution: f64,
) -> LocalMap {
    assert!(k > 0, "raster size must be positive");
    assert!(resolution > 0.0, "resolution must be positive");

    let mut raster = LocalMap::zeroed(agent_id, k, resolution);
    let half_cell = resolution * 0.5;
    // Anything farther than the crop circumradius plus half a cell cannot
    // mark any cell; used to skip whole polylines cheaply.
    let crop_reach = (k as f64) * resolution * std::f64::consts::SQRT_2 / 2.0 + half_cell;

    for polyline in &map.polylines {
        let channel = channel_for(polyline.kind);
        for (a, b) in polyline.segments() {
            if point_segment_distance(state.position(), a, b) > crop_reach {
                continue;
            }
            for row in 0..k {
                for col in 0..k {
                    if raster.get(row, col, channel) != 0 {
                        continue;
                    }
                    let center = cell_center_world(state, k, resolution, row, col);
                    if point_segment_distance(center, a, b) <= half_cell {
                        raster.set(row, col, channel, 1);
                    }
                }
            }
        }
    }

    for &(kind, pos, radius) in neighbors {
        let channel = agent_channel(kind);
        if state.position().distance(pos) > crop_reach + radius {
            continue;
        }
        for row in 0..k {
            for col in 0..k {
                let center = cell_center_world(state, k, resolution, row, col);
                if center.distance(pos) <= radius {
                    raster.set(row, col, channel, 1);
                }
            }
        }
    }

    raster
}
