//! Randers grid graphs and distance fields.

use std::ffi::{c_char, CStr};

use quasimetric::cli::RandersScenario;
use quasimetric::randers::{
    backward_distances, build_graph, check_positivity, forward_distances, DistanceField, Graph, RandersStructure,
    DEFAULT_POSITIVITY_MARGIN,
};

use crate::space::{handle, out, slice_out};
use crate::status::{fail, guard, QmStatus};

/// A Randers structure on a grid together with its stencil graph. Opaque.
pub struct QmRandersGraph {
    structure: RandersStructure,
    graph: Graph,
}

/// Single-source distances over the active nodes of a graph. Opaque.
pub struct QmDistanceField {
    inner: DistanceField,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmDirection {
    /// Distances from the source.
    Forward = 0,
    /// Distances to the source.
    Backward = 1,
}

/// Builds the grid graph described by a JSON scenario, e.g.
/// `{"domain": {"bbox": [0, 1, 0, 1], "resolution": 101},
///   "metric": "euclidean", "one_form": "potential:linear(0.5,0)"}`.
/// Only the domain, metric, one-form, stencil and positivity margin are
/// used.
///
/// # Safety
/// `scenario_json` must be a NUL-terminated string; `out_graph` writable.
#[no_mangle]
pub unsafe extern "C" fn qm_randers_graph_new(
    scenario_json: *const c_char,
    out_graph: *mut *mut QmRandersGraph,
) -> QmStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        if scenario_json.is_null() {
            return Err(fail(QmStatus::NullPointer, "scenario_json is null"));
        }
        let text = CStr::from_ptr(scenario_json)
            .to_str()
            .map_err(|e| fail(QmStatus::Parse, format!("scenario is not UTF-8: {e}")))?;
        let scenario: RandersScenario = serde_json::from_str(text)
            .map_err(|e| fail(QmStatus::Parse, format!("scenario:{}:{}: {e}", e.line(), e.column())))?;
        let structure = scenario.build()?;
        let margin = scenario.tolerances.positivity_margin;
        let pos = check_positivity(&structure, margin)?;
        if !pos.holds {
            return Err(fail(
                QmStatus::NotPositive,
                format!(
                    "|b|_alpha reaches {} at node {} (margin {margin})",
                    pos.sup, pos.worst_node
                ),
            ));
        }
        let graph = build_graph(&structure, scenario.stencil)?;
        *slot = Box::into_raw(Box::new(QmRandersGraph { structure, graph }));
        Ok(())
    })
}

/// Frees a graph. Null is ignored.
///
/// # Safety
/// `graph` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qm_randers_graph_free(graph: *mut QmRandersGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of active grid nodes, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_randers_graph_node_count(graph: *const QmRandersGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.node_count())
}

/// Nearest active node to `(x, y)`.
///
/// # Safety
/// `graph` must be a live handle and `out_node` writable.
#[no_mangle]
pub unsafe extern "C" fn qm_randers_graph_nearest_node(
    graph: *const QmRandersGraph,
    x: f64,
    y: f64,
    out_node: *mut usize,
) -> QmStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        let node = g
            .structure
            .domain
            .nearest_node([x, y])
            .ok_or_else(|| fail(QmStatus::Domain, format!("({x}, {y}) is outside the masked domain")))?;
        *out(out_node, "out_node")? = node;
        Ok(())
    })
}

/// Coordinates of an active node.
///
/// # Safety
/// `graph` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn qm_randers_graph_node_coords(
    graph: *const QmRandersGraph,
    node: usize,
    out_x: *mut f64,
    out_y: *mut f64,
) -> QmStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        let n = g.graph.node_count();
        if node >= n {
            return Err(fail(
                QmStatus::IndexOutOfRange,
                format!("node {node} out of range for {n} nodes"),
            ));
        }
        let [x, y] = g.structure.domain.coords(node);
        *out(out_x, "out_x")? = x;
        *out(out_y, "out_y")? = y;
        Ok(())
    })
}

/// Runs Dijkstra from `source`. `direction` is a [`QmDirection`] value,
/// passed as an integer so that out-of-range values are rejected rather
/// than undefined.
///
/// # Safety
/// `graph` must be a live handle and `out_field` writable.
#[no_mangle]
pub unsafe extern "C" fn qm_distance_field_new(
    graph: *const QmRandersGraph,
    source: usize,
    direction: u32,
    out_field: *mut *mut QmDistanceField,
) -> QmStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        let slot = out(out_field, "out_field")?;
        let n = g.graph.node_count();
        if source >= n {
            return Err(fail(
                QmStatus::IndexOutOfRange,
                format!("source {source} out of range for {n} nodes"),
            ));
        }
        let inner = match direction {
            d if d == QmDirection::Forward as u32 => forward_distances(&g.graph, source)?,
            d if d == QmDirection::Backward as u32 => backward_distances(&g.graph, source)?,
            d => return Err(fail(QmStatus::InvalidArgument, format!("unknown direction {d}"))),
        };
        *slot = Box::into_raw(Box::new(QmDistanceField { inner }));
        Ok(())
    })
}

/// Frees a distance field. Null is ignored.
///
/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qm_distance_field_free(field: *mut QmDistanceField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of values (active nodes), or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_distance_field_len(field: *const QmDistanceField) -> usize {
    field.as_ref().map_or(0, |f| f.inner.values.len())
}

/// Number of nodes the source cannot reach (their value is infinite).
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_distance_field_unreachable(field: *const QmDistanceField) -> usize {
    field.as_ref().map_or(0, |f| f.inner.unreachable)
}

/// Copies all values into `out_values`.
///
/// # Safety
/// `field` must be a live handle; `out_values` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qm_distance_field_values(
    field: *const QmDistanceField,
    out_values: *mut f64,
    len: usize,
) -> QmStatus {
    guard(|| {
        let f = handle(field, "field")?;
        let v = &f.inner.values;
        slice_out(out_values, len, v.len(), "out_values")?.copy_from_slice(v);
        Ok(())
    })
}

/// Value at one node.
///
/// # Safety
/// `field` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn qm_distance_field_value(
    field: *const QmDistanceField,
    node: usize,
    out_value: *mut f64,
) -> QmStatus {
    guard(|| {
        let f = handle(field, "field")?;
        let n = f.inner.values.len();
        if node >= n {
            return Err(fail(
                QmStatus::IndexOutOfRange,
                format!("node {node} out of range for {n} nodes"),
            ));
        }
        *out(out_value, "out_value")? = f.inner.value(node);
        Ok(())
    })
}

/// Default margin for the `|b|_alpha < 1` test.
#[no_mangle]
pub extern "C" fn qm_default_positivity_margin() -> f64 {
    DEFAULT_POSITIVITY_MARGIN
}
