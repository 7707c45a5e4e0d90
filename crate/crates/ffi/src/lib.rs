//! C ABI over the core engine: opaque handles, integer status codes, and
//! a thread-local last-error message. The header is generated into
//! `include/rgcf.h` at build time.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::ptr;

use rgcf::engine::{train, TrainConfig};
use rgcf::error::Error;
use rgcf::graph::BipartiteGraph;
use rgcf::model::{HyperPriors, Posterior};
use rgcf::predict::like_probability;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgcfStatus {
    Ok = 0,
    /// Invalid argument (null pointer, bad UTF-8, bad configuration).
    InvalidArgument = 1,
    /// File could not be read, written, or parsed.
    Io = 2,
    /// Inputs disagree with each other (unknown ids, mismatched models).
    Inconsistent = 3,
    /// Numerical or generation failure during computation.
    Failed = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> RgcfStatus {
    match err {
        Error::Config(_) => RgcfStatus::InvalidArgument,
        Error::Parse { .. } | Error::Io { .. } | Error::ModelFormat(_) => RgcfStatus::Io,
        Error::Contract(_) | Error::Consistency(_) => RgcfStatus::Inconsistent,
        Error::Generation(_) | Error::Numerical { .. } => RgcfStatus::Failed,
    }
}

fn fail(err: &Error) -> RgcfStatus {
    set_error(err.to_string());
    status_of(err)
}

/// Message for the most recent error on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rgcf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// An immutable bipartite like graph.
pub struct RgcfGraph {
    graph: BipartiteGraph,
}

/// A trained (or loaded) posterior with id lookup maps.
pub struct RgcfModel {
    posterior: Posterior,
    user_index: HashMap<String, u32>,
    item_index: HashMap<String, u32>,
}

impl RgcfModel {
    fn new(posterior: Posterior) -> Self {
        let index = |ids: &[String]| {
            ids.iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), i as u32))
                .collect()
        };
        RgcfModel {
            user_index: index(posterior.user_ids()),
            item_index: index(posterior.item_ids()),
            posterior,
        }
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

/// Load an edge-list file into a new graph handle. On success writes the
/// handle through `out` and returns Ok.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rgcf_graph_load(
    path: *const c_char,
    out: *mut *mut RgcfGraph,
) -> RgcfStatus {
    let Some(path) = str_arg(path) else {
        set_error("path must be valid UTF-8 and non-null");
        return RgcfStatus::InvalidArgument;
    };
    if out.is_null() {
        set_error("out must be non-null");
        return RgcfStatus::InvalidArgument;
    }
    let file = match File::open(Path::new(path)) {
        Ok(f) => f,
        Err(e) => return fail(&Error::io(path, e)),
    };
    match BipartiteGraph::load_edges(BufReader::new(file)) {
        Ok((graph, _)) => {
            *out = Box::into_raw(Box::new(RgcfGraph { graph }));
            RgcfStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `graph` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn rgcf_graph_free(graph: *mut RgcfGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn rgcf_graph_num_users(graph: *const RgcfGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.num_users())
}

/// # Safety
/// `graph` must be a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn rgcf_graph_num_items(graph: *const RgcfGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.num_items())
}

/// # Safety
/// `graph` must be a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn rgcf_graph_num_edges(graph: *const RgcfGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.num_edges())
}

/// Training configuration mirroring the CLI defaults when zero-initialized
/// fields are replaced by `rgcf_train_config_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RgcfTrainConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
    pub iterations: usize,
    pub t_eps: usize,
    pub t_tau: usize,
    pub seed: u64,
    /// Nonzero pins user biases at zero.
    pub clamp_user_bias: i32,
}

#[no_mangle]
pub extern "C" fn rgcf_train_config_default() -> RgcfTrainConfig {
    let d = TrainConfig::default();
    RgcfTrainConfig {
        k: d.k,
        alpha: d.hyper.alpha,
        beta: d.hyper.beta,
        r: d.r,
        iterations: d.t_max,
        t_eps: d.t_eps,
        t_tau: d.t_tau,
        seed: d.seed,
        clamp_user_bias: 1,
    }
}

/// Train a model on `graph`. On success writes a model handle through
/// `out`.
///
/// # Safety
/// `graph`, `config` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rgcf_train(
    graph: *const RgcfGraph,
    config: *const RgcfTrainConfig,
    out: *mut *mut RgcfModel,
) -> RgcfStatus {
    let (Some(graph), Some(config)) = (graph.as_ref(), config.as_ref()) else {
        set_error("graph and config must be non-null");
        return RgcfStatus::InvalidArgument;
    };
    if out.is_null() {
        set_error("out must be non-null");
        return RgcfStatus::InvalidArgument;
    }
    let hyper = match HyperPriors::new(config.alpha, config.beta) {
        Ok(h) => h,
        Err(e) => return fail(&e),
    };
    let cfg = TrainConfig {
        k: config.k,
        hyper,
        r: config.r,
        t_max: config.iterations,
        t_eps: config.t_eps,
        t_tau: config.t_tau,
        seed: config.seed,
        clamp_user_bias: config.clamp_user_bias != 0,
        ..TrainConfig::default()
    };
    match train(&graph.graph, &cfg) {
        Ok(out_train) => {
            *out = Box::into_raw(Box::new(RgcfModel::new(out_train.posterior)));
            RgcfStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `model` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn rgcf_model_free(model: *mut RgcfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Write the model to `path` in the versioned text format.
///
/// # Safety
/// `model` and `path` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rgcf_model_save(
    model: *const RgcfModel,
    path: *const c_char,
) -> RgcfStatus {
    let (Some(model), Some(path)) = (model.as_ref(), str_arg(path)) else {
        set_error("model and path must be non-null and valid UTF-8");
        return RgcfStatus::InvalidArgument;
    };
    let file = match File::create(Path::new(path)) {
        Ok(f) => f,
        Err(e) => return fail(&Error::io(path, e)),
    };
    let mut w = BufWriter::new(file);
    match model.posterior.save(&mut w) {
        Ok(()) => RgcfStatus::Ok,
        Err(e) => fail(&Error::io(path, e)),
    }
}

/// Load a model file written by `rgcf_model_save` (or the CLI).
///
/// # Safety
/// `path` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rgcf_model_load(
    path: *const c_char,
    out: *mut *mut RgcfModel,
) -> RgcfStatus {
    let Some(path) = str_arg(path) else {
        set_error("path must be valid UTF-8 and non-null");
        return RgcfStatus::InvalidArgument;
    };
    if out.is_null() {
        set_error("out must be non-null");
        return RgcfStatus::InvalidArgument;
    }
    let file = match File::open(Path::new(path)) {
        Ok(f) => f,
        Err(e) => return fail(&Error::io(path, e)),
    };
    match Posterior::load(BufReader::new(file)) {
        Ok(q) => {
            *out = Box::into_raw(Box::new(RgcfModel::new(q)));
            RgcfStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Predicted like probability for a (user id, item id) pair, written
/// through `out`. Unknown ids return Inconsistent.
///
/// # Safety
/// All pointers must be valid; ids must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn rgcf_like_probability(
    model: *const RgcfModel,
    user_id: *const c_char,
    item_id: *const c_char,
    out: *mut f64,
) -> RgcfStatus {
    let (Some(model), Some(user), Some(item)) =
        (model.as_ref(), str_arg(user_id), str_arg(item_id))
    else {
        set_error("model and ids must be non-null and valid UTF-8");
        return RgcfStatus::InvalidArgument;
    };
    if out.is_null() {
        set_error("out must be non-null");
        return RgcfStatus::InvalidArgument;
    }
    let (Some(&m), Some(&n)) = (model.user_index.get(user), model.item_index.get(item)) else {
        set_error(format!("unknown user or item id: {user:?} / {item:?}"));
        return RgcfStatus::Inconsistent;
    };
    *out = like_probability(model.posterior.moments(m, n));
    RgcfStatus::Ok
}
